#pragma once

#include "fluidnet/equivalence.hpp"
#include "fluidnet/sfm.hpp"

#include <functional>

namespace fluidnet {

struct QuotientEdge {
    std::size_t source;
    std::string action;
    Rational rate;
    std::size_t target;
};

struct QuotientModel {
    Partition partition;
    RatMatrix collector;    // V, n x l
    RatMatrix distributor;  // W, l x n
    std::vector<QuotientEdge> edges;
    RatMatrix q;
    RationalVector rp;
    RatMatrix r;
    std::vector<ExtRational> sj;
    std::vector<ExtRational> var;
    std::size_t initial_class;
};

struct QuotientFunctions {
    std::vector<double> phi;
    std::optional<RationalVector> exact_phi;
    std::vector<double> ell;
    std::function<std::vector<double>(double)> cdf;
    std::function<std::vector<double>(double)> density;
};

struct IdentityCheck {
    std::string name;
    bool passed;
    std::string detail;
};

// Largest fluid autobisimulation of a single net (all members have side 0).
Partition largest_autobisimulation(const Net& net, const Drg& drg);

// V and W for a partition of the n markings of one net.
std::pair<RatMatrix, RatMatrix> collector_distributor(const Partition& p, std::size_t n);

// Throws PARTITION_NOT_STABLE unless the partition is a fluid autobisimulation.
QuotientModel quotient_model(const Net& net, const Drg& drg, const Partition& p);

QuotientFunctions quotient_functions(const Partition& p, const SfmSolution& sol);

std::vector<IdentityCheck> verify_quotient_identities(const Net& net, const Drg& drg, const Partition& p);

// Vertex- and edge-labelled digraph with a distinguished initial vertex, for isomorphism checks.
struct LabeledGraph {
    std::size_t initial = 0;
    std::vector<std::string> vertex_labels;
    std::map<std::pair<std::size_t, std::size_t>, std::string> edge_labels;
};

constexpr std::size_t kIsomorphismLimit = 12;

// Rate-labelled chain: vertices carry RP, edges carry off-diagonal rates.
LabeledGraph ctmc_graph(const RatMatrix& q, const RationalVector& rp, std::size_t initial = 0);
// Action-labelled quotient reachability graph.
LabeledGraph quotient_graph(const QuotientModel& m);

// Initial-preserving bijection f with labels(a, i) = labels(b, f(i)); throws ISOMORPHISM_LIMIT above the limit.
std::optional<std::vector<std::size_t>> find_isomorphism(const LabeledGraph& a, const LabeledGraph& b);

}  // namespace fluidnet
