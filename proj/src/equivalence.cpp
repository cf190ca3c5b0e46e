#include "fluidnet/equivalence.hpp"

#include "fluidnet/error.hpp"
#include "fluidnet/sfm.hpp"

#include <algorithm>
#include <set>
#include <tuple>

namespace fluidnet {

namespace {

bool ext_less(const ExtRational& a, const ExtRational& b)
{
    if (!a || !b)
        return a.has_value() && !b.has_value();
    return *a < *b;
}

struct TraceKeyLess {
    bool operator()(const FluidTrace& a, const FluidTrace& b) const
    {
        if (a.actions != b.actions)
            return a.actions < b.actions;
        if (a.times.size() != b.times.size())
            return a.times.size() < b.times.size();
        for (std::size_t i = 0; i < a.times.size(); ++i) {
            if (ext_less(a.times[i], b.times[i]))
                return true;
            if (ext_less(b.times[i], a.times[i]))
                return false;
        }
        return std::lexicographical_compare(a.rates.begin(), a.rates.end(), b.rates.begin(), b.rates.end());
    }
};

using TraceMap = std::map<FluidTrace, Rational, TraceKeyLess>;

TraceMap collect_traces(const Net& net, const Drg& drg, std::size_t depth, TraceKey key)
{
    const RationalVector rp = potential_rates(net, drg);
    const SojournStats stats = sojourn_stats(drg);
    auto time_of = [&](std::size_t i) -> ExtRational {
        if (key == TraceKey::ExitRate)
            return stats.re[i];
        return stats.sj[i];
    };

    TraceMap traces;
    FluidTrace prefix;
    auto visit = [&](auto&& self, std::size_t state, const Rational& prob) -> void {
        prefix.times.push_back(time_of(state));
        prefix.rates.push_back(rp[state]);
        FluidTrace k{prefix.actions, prefix.times, prefix.rates, 0};
        traces[k] += prob;
        if (prefix.actions.size() < depth) {
            for (std::size_t e : drg.out_edges[state]) {
                const auto& edge = drg.edges[e];
                prefix.actions.push_back(net.transitions[edge.transition].label);
                self(self, edge.target, Rational(prob * edge.rate / stats.re[state]));
                prefix.actions.pop_back();
            }
        }
        prefix.times.pop_back();
        prefix.rates.pop_back();
    };
    visit(visit, 0, Rational(1));
    return traces;
}

}  // namespace

std::vector<FluidTrace> fluid_traces(const Net& net, const Drg& drg, std::size_t depth, TraceKey key)
{
    std::vector<FluidTrace> out;
    for (auto& [k, prob] : collect_traces(net, drg, depth, key)) {
        FluidTrace t = k;
        t.prob = prob;
        out.push_back(std::move(t));
    }
    return out;
}

TraceVerdict trace_equivalent(const Net& a, const Drg& ga, const Net& b, const Drg& gb, std::size_t depth,
                              TraceKey key)
{
    TraceMap left = collect_traces(a, ga, depth, key);
    TraceMap right = collect_traces(b, gb, depth, key);
    TraceVerdict verdict{true, depth, std::nullopt};
    auto report = [&](const FluidTrace& k, const Rational& lp, const Rational& rp) {
        verdict.equivalent = false;
        verdict.witness = TraceWitness{k, lp, rp};
    };
    auto li = left.begin();
    auto ri = right.begin();
    TraceKeyLess less;
    while (li != left.end() || ri != right.end()) {
        if (ri == right.end() || (li != left.end() && less(li->first, ri->first))) {
            report(li->first, li->second, 0);
            break;
        }
        if (li == left.end() || less(ri->first, li->first)) {
            report(ri->first, 0, ri->second);
            break;
        }
        if (li->second != ri->second) {
            report(li->first, li->second, ri->second);
            break;
        }
        ++li;
        ++ri;
    }
    return verdict;
}

std::size_t Partition::class_of(const StateRef& s) const
{
    for (std::size_t c = 0; c < classes.size(); ++c)
        if (std::binary_search(classes[c].begin(), classes[c].end(), s))
            return c;
    throw Error("INDEX_OUT_OF_RANGE", "state is not covered by the partition");
}

Partition coarsest_fluid_bisimulation(const std::vector<const Net*>& nets, const std::vector<const Drg*>& drgs,
                                      std::size_t* rounds, std::optional<std::size_t>* separated_round)
{
    std::vector<RationalVector> rp;
    for (std::size_t s = 0; s < nets.size(); ++s)
        rp.push_back(potential_rates(*nets[s], *drgs[s]));

    // Initial blocks: equal potential fluid rate.
    std::vector<std::vector<std::size_t>> cls(nets.size());
    std::map<Rational, std::size_t> by_rate;
    for (std::size_t s = 0; s < nets.size(); ++s)
        for (std::size_t i = 0; i < drgs[s]->size(); ++i)
            by_rate.emplace(rp[s][i], by_rate.size());
    for (std::size_t s = 0; s < nets.size(); ++s)
        for (std::size_t i = 0; i < drgs[s]->size(); ++i)
            cls[s].push_back(by_rate.at(rp[s][i]));
    std::size_t count = by_rate.size();

    auto initial_split = [&] {
        for (std::size_t s = 1; s < nets.size(); ++s)
            if (cls[s][0] != cls[0][0])
                return true;
        return false;
    };
    std::size_t round = 0;
    if (separated_round)
        *separated_round = initial_split() ? std::optional<std::size_t>(0) : std::nullopt;

    using Signature = std::vector<std::tuple<std::string, std::size_t, Rational>>;
    while (true) {
        ++round;
        std::map<std::pair<std::size_t, Signature>, std::size_t> ids;
        std::vector<std::vector<std::size_t>> next(nets.size());
        for (std::size_t s = 0; s < nets.size(); ++s) {
            for (std::size_t i = 0; i < drgs[s]->size(); ++i) {
                std::map<std::pair<std::string, std::size_t>, Rational> rates;
                for (std::size_t e : drgs[s]->out_edges[i]) {
                    const auto& edge = drgs[s]->edges[e];
                    rates[{nets[s]->transitions[edge.transition].label, cls[s][edge.target]}] += edge.rate;
                }
                Signature sig;
                for (auto& [k, v] : rates)
                    sig.emplace_back(k.first, k.second, v);
                auto key = std::make_pair(cls[s][i], std::move(sig));
                auto it = ids.emplace(std::move(key), ids.size()).first;
                next[s].push_back(it->second);
            }
        }
        cls = std::move(next);
        if (separated_round && !*separated_round && initial_split())
            *separated_round = round;
        if (ids.size() == count)
            break;
        count = ids.size();
    }
    if (rounds)
        *rounds = round;

    std::vector<std::vector<StateRef>> groups(count);
    for (std::size_t s = 0; s < nets.size(); ++s)
        for (std::size_t i = 0; i < cls[s].size(); ++i)
            groups[cls[s][i]].push_back({s, i});
    Partition p;
    for (auto& g : groups)
        if (!g.empty()) {
            std::sort(g.begin(), g.end());
            p.classes.push_back(std::move(g));
        }
    std::sort(p.classes.begin(), p.classes.end(),
              [](const auto& x, const auto& y) { return x.front() < y.front(); });
    return p;
}

BisimVerdict fluid_bisimulation(const Net& a, const Drg& ga, const Net& b, const Drg& gb)
{
    BisimVerdict v{};
    v.partition = coarsest_fluid_bisimulation({&a, &b}, {&ga, &gb}, &v.rounds, &v.separated_round);
    v.equivalent = v.partition.class_of({0, 0}) == v.partition.class_of({1, 0});
    return v;
}

bool is_fluid_bisimulation(const std::vector<const Net*>& nets, const std::vector<const Drg*>& drgs,
                           const Partition& p)
{
    std::vector<RationalVector> rp;
    std::vector<std::vector<std::size_t>> cls(nets.size());
    for (std::size_t s = 0; s < nets.size(); ++s) {
        rp.push_back(potential_rates(*nets[s], *drgs[s]));
        cls[s].assign(drgs[s]->size(), SIZE_MAX);
    }
    for (std::size_t c = 0; c < p.classes.size(); ++c)
        for (const auto& m : p.classes[c]) {
            if (m.side >= nets.size() || m.index >= drgs[m.side]->size() || cls[m.side][m.index] != SIZE_MAX)
                return false;
            cls[m.side][m.index] = c;
        }
    for (const auto& side : cls)
        if (std::count(side.begin(), side.end(), SIZE_MAX))
            return false;

    auto profile = [&](const StateRef& m) {
        std::map<std::pair<std::string, std::size_t>, Rational> rates;
        for (std::size_t e : drgs[m.side]->out_edges[m.index]) {
            const auto& edge = drgs[m.side]->edges[e];
            rates[{nets[m.side]->transitions[edge.transition].label, cls[m.side][edge.target]}] += edge.rate;
        }
        return rates;
    };
    for (const auto& c : p.classes) {
        const auto& first = c.front();
        auto ref = profile(first);
        for (const auto& m : c)
            if (rp[m.side][m.index] != rp[first.side][first.index] || profile(m) != ref)
                return false;
    }
    return true;
}

Rational fluid_change_marking(const Net& net, const Drg& drg, std::size_t i)
{
    Rational re = exit_rate(drg, i);
    if (re == 0)
        throw Error("TERMINAL", "marking " + std::to_string(i) + " is terminal, its sojourn time is infinite");
    return potential_rate(net, drg.states[i]) / re;
}

Rational fluid_change_length(const Net& net, const Drg& drg, std::size_t n)
{
    const std::size_t size = drg.size();
    const RationalVector re = exit_rates(drg);
    const RationalVector rp = potential_rates(net, drg);

    // For r remaining steps from s: survive = total probability of length-r sequences,
    // value = sum over those sequences of PT times the path sum of SJ*RP,
    // blocked = some such sequence ends in a terminal marking with infinite sojourn time.
    RationalVector survive(size, Rational(1)), value(size, Rational(0));
    std::vector<bool> blocked(size, false);
    for (std::size_t s = 0; s < size; ++s) {
        if (re[s] == 0)
            blocked[s] = true;
        else
            value[s] = rp[s] / re[s];
    }
    for (std::size_t step = 0; step < n; ++step) {
        RationalVector next_survive(size, Rational(0)), next_value(size, Rational(0));
        std::vector<bool> next_blocked(size, false);
        for (std::size_t s = 0; s < size; ++s) {
            for (std::size_t e : drg.out_edges[s]) {
                const auto& edge = drg.edges[e];
                Rational pt = edge.rate / re[s];
                next_survive[s] += pt * survive[edge.target];
                next_value[s] += pt * value[edge.target];
                if (blocked[edge.target])
                    next_blocked[s] = true;
            }
            if (re[s] != 0)
                next_value[s] += rp[s] / re[s] * next_survive[s];
        }
        survive = std::move(next_survive);
        value = std::move(next_value);
        blocked = std::move(next_blocked);
    }
    if (blocked[0])
        throw Error("TERMINAL", "a length-" + std::to_string(n) + " sequence ends in a terminal marking");
    return value[0];
}

}  // namespace fluidnet
