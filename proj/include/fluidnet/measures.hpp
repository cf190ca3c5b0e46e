#pragma once

#include "fluidnet/sfm.hpp"

namespace fluidnet {

// Polynomial sum_k coeffs[k] x^k on [from, to); to may be +inf.
struct RewardPiece {
    double from = 0;
    double to = std::numeric_limits<double>::infinity();
    std::vector<double> coeffs;
};

struct MeasureRequest {
    std::string kind;
    std::optional<std::vector<std::size_t>> states;   // marking set S (default: all markings)
    std::optional<std::vector<std::size_t>> targets;  // second marking set for traversal frequency
    std::string place;
    std::optional<std::uint32_t> tokens;
    std::string transition;
    std::optional<double> level;
    RationalVector reward;                             // discrete reward r_i per marking
    std::vector<std::vector<RewardPiece>> hybrid_reward;  // piecewise-polynomial r_i(x) per marking
    std::optional<Rational> trav_tokens;
    std::optional<Rational> token_rate;
};

struct MeasureReport {
    std::string kind;
    double value = 0;
    std::optional<Rational> exact;
    std::vector<std::string> terms;
};

const std::vector<std::string>& discrete_measure_kinds();
const std::vector<std::string>& hybrid_measure_kinds();

MeasureReport discrete_measure(const Net& net, const Drg& drg, const Pmf& phi, const MeasureRequest& req);
MeasureReport hybrid_measure(const Net& net, const Drg& drg, const SfmSolution& sol, const MeasureRequest& req);

}  // namespace fluidnet
