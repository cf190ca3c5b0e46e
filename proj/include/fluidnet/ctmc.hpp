#pragma once

#include "fluidnet/reachability.hpp"

#include <set>

namespace fluidnet {

struct SojournStats {
    RationalVector re;
    std::vector<ExtRational> sj;
    std::vector<ExtRational> var;
};

struct Pmf {
    std::vector<double> probs;
    std::optional<RationalVector> exact;  // present when solved in rational arithmetic
};

constexpr std::size_t kExactSolveLimit = 64;

Rational exit_rate(const Drg& drg, std::size_t i);
RationalVector exit_rates(const Drg& drg);
SojournStats sojourn_stats(const Drg& drg);

Rational move_rate(const Drg& drg, std::size_t i, std::size_t j);
Rational move_rate_by_action(const Net& net, const Drg& drg, std::size_t i, const std::string& action,
                             const std::set<std::size_t>& targets);
// Probability that transition t fires in state i: rate / RE, zero if not enabled.
Rational firing_probability(const Drg& drg, std::size_t i, std::size_t t);

RatMatrix transition_rate_matrix(const Drg& drg);
RatMatrix embedded_tpm(const Drg& drg);

// Bottom strongly connected components of the chain; a terminal state is its own bottom component.
std::vector<std::vector<std::size_t>> bottom_components(const RatMatrix& q);

// Solves phi Q = 0, sum phi = 1; throws NOT_ERGODIC unless there is a single non-terminal bottom component.
Pmf steady_state(const RatMatrix& q, std::size_t exact_limit = kExactSolveLimit);

// phi(delta) = phi(0) exp(Q delta) by uniformization.
std::vector<double> transient_pmf(const RatMatrix& q, const std::vector<double>& initial, double delta);
std::vector<double> initial_pmf(std::size_t n);

}  // namespace fluidnet
