#include "fluidnet/measures.hpp"

#include "fluidnet/error.hpp"

#include <algorithm>
#include <cmath>

namespace fluidnet {

namespace {

std::vector<std::size_t> state_set(const std::optional<std::vector<std::size_t>>& s, std::size_t n)
{
    std::vector<std::size_t> out;
    if (!s) {
        for (std::size_t i = 0; i < n; ++i)
            out.push_back(i);
        return out;
    }
    for (std::size_t i : *s) {
        if (i >= n)
            throw Error("PARAMETER", "state index " + std::to_string(i) + " out of range");
        out.push_back(i);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::size_t place_param(const Net& net, const MeasureRequest& req)
{
    if (req.place.empty())
        throw Error("PARAMETER", req.kind + " needs a discrete place");
    auto p = net.discrete_place_index(req.place);
    if (!p)
        throw Error("PARAMETER", "unknown discrete place '" + req.place + "'");
    return *p;
}

std::size_t transition_param(const Net& net, const MeasureRequest& req)
{
    if (req.transition.empty())
        throw Error("PARAMETER", req.kind + " needs a transition");
    auto t = net.transition_index(req.transition);
    if (!t)
        throw Error("PARAMETER", "unknown transition '" + req.transition + "'");
    return *t;
}

// Accumulates sum_i weight_i * factor_i exactly when possible, otherwise in floating point.
class WeightedSum {
public:
    explicit WeightedSum(const Pmf& phi) : phi_(phi) {}

    void add(std::size_t i, const Rational& factor, const std::string& label)
    {
        if (phi_.exact)
            exact_ += (*phi_.exact)[i] * factor;
        value_ += phi_.probs[i] * factor.get_d();
        terms_.push_back("phi[" + std::to_string(i) + "]*" + label);
    }

    MeasureReport report(const std::string& kind) const
    {
        MeasureReport r;
        r.kind = kind;
        r.terms = terms_;
        if (phi_.exact) {
            r.exact = exact_;
            r.value = exact_.get_d();
        } else {
            r.value = value_;
        }
        return r;
    }

private:
    const Pmf& phi_;
    Rational exact_ = 0;
    double value_ = 0;
    std::vector<std::string> terms_;
};

}  // namespace

const std::vector<std::string>& discrete_measure_kinds()
{
    static const std::vector<std::string> kinds{"time_fract", "prob_event", "tokens",    "tokens_num", "firing_freq",
                                                "exit_freq",  "prob_reward", "trav_freq", "delay"};
    return kinds;
}

const std::vector<std::string>& hybrid_measure_kinds()
{
    static const std::vector<std::string> kinds{"fluid_level",    "fluid_level_at", "fluid_flow",
                                                "fluid_flow_out", "fluid_flow_in",  "hybrid_reward"};
    return kinds;
}

MeasureReport discrete_measure(const Net& net, const Drg& drg, const Pmf& phi, const MeasureRequest& req)
{
    const std::size_t n = drg.size();
    if (phi.probs.size() != n)
        throw Error("DIMENSION_MISMATCH", "PMF length does not match the reachability graph");
    WeightedSum sum(phi);
    const std::string& k = req.kind;

    if (k == "time_fract" || k == "prob_event") {
        for (std::size_t i : state_set(req.states, n))
            sum.add(i, 1, "1");
    } else if (k == "tokens") {
        std::size_t p = place_param(net, req);
        if (!req.tokens)
            throw Error("PARAMETER", "tokens needs a token count");
        for (std::size_t i = 0; i < n; ++i)
            if (drg.states[i][p] == *req.tokens)
                sum.add(i, 1, "1");
    } else if (k == "tokens_num") {
        std::size_t p = place_param(net, req);
        for (std::size_t i = 0; i < n; ++i)
            if (drg.states[i][p] >= 1)
                sum.add(i, drg.states[i][p], std::to_string(drg.states[i][p]));
    } else if (k == "firing_freq") {
        std::size_t t = transition_param(net, req);
        for (std::size_t i : state_set(req.states, n))
            if (is_enabled(net, drg.states[i], t)) {
                Rational rate = net.transitions[t].rate.at(drg.states[i]);
                sum.add(i, rate, to_string(rate));
            }
    } else if (k == "exit_freq") {
        for (std::size_t i : state_set(req.states, n)) {
            Rational re = exit_rate(drg, i);
            sum.add(i, re, to_string(re));
        }
    } else if (k == "prob_reward") {
        if (req.reward.size() != n)
            throw Error("PARAMETER", "reward vector needs one value per marking");
        for (std::size_t i = 0; i < n; ++i) {
            if (req.reward[i] < 0 || req.reward[i] > 1)
                throw Error("PARAMETER", "reward values must lie in [0,1]");
            sum.add(i, req.reward[i], to_string(req.reward[i]));
        }
    } else if (k == "trav_freq") {
        if (!req.targets)
            throw Error("PARAMETER", "trav_freq needs target markings");
        auto targets = state_set(req.targets, n);
        std::set<std::size_t> target_set(targets.begin(), targets.end());
        for (std::size_t i : state_set(req.states, n)) {
            Rational rm = 0;
            for (std::size_t j : target_set)
                rm += move_rate(drg, i, j);
            sum.add(i, rm, to_string(rm));
        }
    } else if (k == "delay") {
        if (!req.trav_tokens || !req.token_rate)
            throw Error("PARAMETER", "delay needs trav_tokens and token_rate");
        if (*req.token_rate == 0)
            throw Error("DIVISION_BY_ZERO", "token rate is zero");
        MeasureReport r;
        r.kind = k;
        r.exact = *req.trav_tokens / *req.token_rate;
        r.value = r.exact->get_d();
        r.terms.push_back(to_string(*req.trav_tokens) + "/" + to_string(*req.token_rate));
        return r;
    } else {
        throw Error("UNKNOWN_KIND", "unknown discrete measure '" + k + "'");
    }
    return sum.report(k);
}

MeasureReport hybrid_measure(const Net& net, const Drg& drg, const SfmSolution& sol, const MeasureRequest& req)
{
    const std::size_t n = drg.size();
    if (sol.size() != n)
        throw Error("DIMENSION_MISMATCH", "fluid solution does not match the reachability graph");
    const std::string& k = req.kind;
    MeasureReport r;
    r.kind = k;
    const auto states = state_set(req.states, n);

    if (k == "fluid_level") {
        double v = 0;
        for (std::size_t i : states) {
            v += sol.phi[i] - sol.ell[i];
            r.terms.push_back("phi[" + std::to_string(i) + "]-ell[" + std::to_string(i) + "]");
        }
        r.value = v;
    } else if (k == "fluid_level_at") {
        if (!req.level || *req.level <= 0)
            throw Error("PARAMETER", "fluid_level_at needs a positive level");
        auto f = sol.cdf(*req.level);
        double v = 0;
        for (std::size_t i : states) {
            v += sol.phi[i] - f[i];
            r.terms.push_back("phi[" + std::to_string(i) + "]-F[" + std::to_string(i) + "](v)");
        }
        r.value = v;
    } else if (k == "fluid_flow") {
        Pmf phi{sol.phi, sol.exact_phi};
        WeightedSum sum(phi);
        for (std::size_t i : states)
            sum.add(i, sol.rp[i], to_string(sol.rp[i]));
        return sum.report(k);
    } else if (k == "fluid_flow_out" || k == "fluid_flow_in") {
        if (net.continuous_places.size() != 1)
            throw Error("MULTI_CONTINUOUS", "arc flow measures need exactly one continuous place");
        const bool out_arcs = k == "fluid_flow_out";
        std::vector<std::size_t> transitions;
        if (req.transition.empty())
            for (std::size_t t = 0; t < net.transitions.size(); ++t)
                transitions.push_back(t);
        else
            transitions.push_back(transition_param(net, req));
        double v = 0;
        for (std::size_t t : transitions) {
            for (std::size_t i : states) {
                const Marking& m = drg.states[i];
                if (!is_enabled(net, m, t))
                    continue;
                Rational in_sum = 0, out_sum = 0;
                for (std::size_t u : enabled(net, m)) {
                    in_sum += fluid_in_rate(net, u, 0, m);
                    out_sum += fluid_out_rate(net, u, 0, m);
                }
                Rational arc = out_arcs ? fluid_out_rate(net, t, 0, m) : fluid_in_rate(net, t, 0, m);
                const Rational& num = out_arcs ? in_sum : out_sum;
                const Rational& den = out_arcs ? out_sum : in_sum;
                double correction = 0;
                if (sol.ell[i] != 0) {
                    if (den == 0)
                        throw Error("DIVISION_BY_ZERO", "no " + std::string(out_arcs ? "outgoing" : "incoming") +
                                                            " continuous arc flow in marking " + std::to_string(i));
                    correction = sol.ell[i] * (Rational(num / den).get_d() - 1.0);
                }
                v += (correction + sol.phi[i]) * arc.get_d();
                r.terms.push_back("(ell[" + std::to_string(i) + "]*(" + to_string(num) + "/" + to_string(den) +
                                  "-1)+phi[" + std::to_string(i) + "])*" + to_string(arc));
            }
        }
        r.value = v;
    } else if (k == "hybrid_reward") {
        if (req.hybrid_reward.size() != n)
            throw Error("PARAMETER", "hybrid reward needs one function per marking");
        double v = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double at_zero = 0;
            Complex integral = 0;
            for (const auto& piece : req.hybrid_reward[i]) {
                if (piece.from < 0 || piece.to <= piece.from)
                    throw Error("PARAMETER", "reward pieces need 0 <= from < to");
                if (piece.from == 0 && !piece.coeffs.empty())
                    at_zero += piece.coeffs[0];
                for (std::size_t c = 0; c < piece.coeffs.size(); ++c) {
                    if (piece.coeffs[c] == 0)
                        continue;
                    for (const auto& mode : sol.modes)
                        integral += piece.coeffs[c] * mode.coefficient * mode.gamma * mode.v[i] *
                                    integrate_monomial_exp(static_cast<unsigned>(c), mode.gamma, piece.from, piece.to);
                }
            }
            v += sol.ell[i] * at_zero + integral.real();
            r.terms.push_back("ell[" + std::to_string(i) + "]*r(0)+int f*r");
        }
        r.value = v;
    } else {
        throw Error("UNKNOWN_KIND", "unknown hybrid measure '" + k + "'");
    }
    return r;
}

}  // namespace fluidnet
