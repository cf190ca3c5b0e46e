#pragma once

#include "fluidnet/error.hpp"
#include "fluidnet/logic.hpp"
#include "fluidnet/measures.hpp"
#include "fluidnet/quotient.hpp"
#include "fluidnet/sim.hpp"

#include <cmath>
#include <algorithm>
#include <initializer_list>
#include <map>
#include <set>
#include <random>
#include <string>

namespace testing_support {

using namespace fluidnet;

inline Net fixture(const std::string& name)
{
    return load_net(std::string(FIXTURE_DIR) + "/" + name + ".json");
}

struct Model {
    Net net;
    Drg drg;
};

inline Model model(const std::string& name)
{
    Model m{fixture(name), {}};
    m.drg = explore(m.net);
    return m;
}

inline Rational r(const char* text) { return parse_rational(text); }

inline RationalVector rv(std::initializer_list<const char*> items)
{
    RationalVector v;
    for (const char* s : items)
        v.push_back(parse_rational(s));
    return v;
}

inline std::vector<ExtRational> ev(std::initializer_list<const char*> items)
{
    std::vector<ExtRational> v;
    for (const char* s : items)
        v.push_back(std::string(s) == "inf" ? ExtRational{} : ExtRational{parse_rational(s)});
    return v;
}

inline RatMatrix rm(std::initializer_list<std::initializer_list<const char*>> rows)
{
    RatMatrix m(rows.size(), rows.begin()->size());
    std::size_t i = 0;
    for (const auto& row : rows) {
        std::size_t j = 0;
        for (const char* s : row)
            m(i, j++) = parse_rational(s);
        ++i;
    }
    return m;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b)
{
    if (a.size() != b.size())
        return INFINITY;
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

// Random single-token state-machine net: place i holds the token in marking i.
// A ring through all places keeps every place reachable; extra arcs add branching.
inline Net random_state_machine(std::mt19937& rng, std::size_t places, const std::vector<std::string>& labels)
{
    std::uniform_int_distribution<int> rate(1, 3), fluid(0, 3), pick_label(0, static_cast<int>(labels.size()) - 1);
    std::uniform_int_distribution<std::size_t> pick_place(0, places - 1);
    Net net;
    for (std::size_t p = 0; p < places; ++p)
        net.discrete_places.push_back("p" + std::to_string(p));
    net.continuous_places = {"q"};
    net.initial_marking.assign(places, 0);
    net.initial_marking[0] = 1;
    auto add = [&](std::size_t from, std::size_t to) {
        Transition t;
        t.name = "t" + std::to_string(net.transitions.size());
        t.label = labels[pick_label(rng)];
        t.rate = RateFunction::constant(rate(rng));
        t.input.assign(places, 0);
        t.output.assign(places, 0);
        t.input[from] = 1;
        t.output[to] = 1;
        int in = fluid(rng), out = fluid(rng);
        t.fluid_in = {in ? std::optional(RateFunction::constant(in)) : std::nullopt};
        t.fluid_out = {out ? std::optional(RateFunction::constant(out)) : std::nullopt};
        net.transitions.push_back(t);
    };
    for (std::size_t p = 0; p < places; ++p)
        add(p, (p + 1) % places);
    std::size_t extra = pick_place(rng) + 1;
    for (std::size_t k = 0; k < extra; ++k) {
        std::size_t a = pick_place(rng), b = pick_place(rng);
        if (a != b)
            add(a, b);
    }
    return net;
}

inline RateFunction halve(const RateFunction& f)
{
    RateFunction h = f;
    for (auto& c : h.cases)
        c.second /= 2;
    return h;
}

// Splits the place `target` of a state-machine net into two copies. Every transition into it is
// split in halves (rate and fluid), the copy duplicates its outgoing transitions. The result is
// fluid bisimilar to the input by construction. Assumes no transition both consumes and produces on `target`.
inline Net split_place(const Net& net, std::size_t target)
{
    Net out = net;
    const std::size_t n = net.discrete_places.size();
    out.discrete_places.push_back(net.discrete_places[target] + "_copy");
    out.initial_marking.push_back(0);
    out.transitions.clear();
    auto widen = [&](Transition t) {
        t.input.push_back(0);
        t.output.push_back(0);
        return t;
    };
    for (const auto& t : net.transitions) {
        if (t.output[target] > 0) {
            Transition a = widen(t), b = widen(t);
            a.rate = halve(t.rate);
            b.rate = halve(t.rate);
            for (auto* half : {&a, &b}) {
                for (auto& f : half->fluid_in)
                    if (f)
                        f = halve(*f);
                for (auto& f : half->fluid_out)
                    if (f)
                        f = halve(*f);
            }
            b.name += "_copy";
            b.output[target] = 0;
            b.output[n] = t.output[target];
            out.transitions.push_back(a);
            out.transitions.push_back(b);
        } else {
            out.transitions.push_back(widen(t));
        }
        if (t.input[target] > 0) {
            Transition c = widen(t);
            c.name += "_copy";
            c.input[target] = 0;
            c.input[n] = t.input[target];
            out.transitions.push_back(c);
        }
    }
    return out;
}

// Constants realized by the nets: actions, per-action class rates, and potential rates.
struct Alphabet {
    std::vector<std::string> actions;
    std::vector<Rational> bounds;
    std::vector<Rational> rates;
};

inline Alphabet alphabet(const std::vector<const Model*>& models)
{
    std::set<std::string> actions;
    std::set<Rational> bounds, rates;
    for (const Model* m : models) {
        for (const auto& a : m->net.actions())
            actions.insert(a);
        for (const auto& r : potential_rates(m->net, m->drg))
            rates.insert(r);
        for (std::size_t i = 0; i < m->drg.size(); ++i) {
            std::map<std::string, Rational> per_action;
            for (std::size_t e : m->drg.out_edges[i]) {
                const auto& edge = m->drg.edges[e];
                bounds.insert(edge.rate);
                per_action[m->net.transitions[edge.transition].label] += edge.rate;
            }
            for (const auto& [a, rate] : per_action)
                bounds.insert(rate);
        }
    }
    return {{actions.begin(), actions.end()}, {bounds.begin(), bounds.end()}, {rates.begin(), rates.end()}};
}

// Formulas of depth <= 3: atoms, then diamonds over the previous level, closed under negation,
// with conjunctions of sampled pairs to keep the set bounded.
inline std::vector<FormulaPtr> enumerate_formulas(const Alphabet& alpha, std::size_t max_depth, std::mt19937& rng)
{
    std::vector<FormulaPtr> level{Formula::top()};
    for (const auto& a : alpha.actions)
        level.push_back(Formula::nabla(a));
    for (const auto& r : alpha.rates)
        level.push_back(Formula::rate(r));
    std::vector<FormulaPtr> all = level;
    for (std::size_t d = 1; d <= max_depth; ++d) {
        std::vector<FormulaPtr> bodies = level;
        std::shuffle(bodies.begin(), bodies.end(), rng);
        if (bodies.size() > 12)
            bodies.resize(12);
        std::vector<FormulaPtr> next;
        for (const auto& body : bodies)
            for (const auto& a : alpha.actions)
                for (const auto& b : alpha.bounds) {
                    next.push_back(Formula::diamond(a, body, b));
                    next.push_back(Formula::negation(Formula::diamond(a, body, b)));
                }
        std::uniform_int_distribution<std::size_t> pick(0, next.size() - 1);
        std::uniform_int_distribution<std::size_t> pick_all(0, all.size() - 1);
        for (int k = 0; k < 60; ++k)
            next.push_back(Formula::conjunction(next[pick(rng)], all[pick_all(rng)]));
        for (const auto& f : next)
            all.push_back(f);
        level = std::move(next);
    }
    return all;
}

inline std::vector<std::vector<std::string>> action_sequences(const std::vector<std::string>& actions,
                                                             std::size_t max_len)
{
    std::vector<std::vector<std::string>> out{{}};
    std::vector<std::vector<std::string>> frontier{{}};
    for (std::size_t len = 1; len <= max_len; ++len) {
        std::vector<std::vector<std::string>> next;
        for (const auto& s : frontier)
            for (const auto& a : actions) {
                auto t = s;
                t.push_back(a);
                next.push_back(t);
            }
        out.insert(out.end(), next.begin(), next.end());
        frontier = std::move(next);
    }
    return out;
}

}  // namespace testing_support
