#pragma once

#include "fluidnet/ctmc.hpp"

#include <compare>
#include <map>

namespace fluidnet {

// Which per-marking timing value labels a trace position.
enum class TraceKey { Sojourn, ExitRate };

struct FluidTrace {
    std::vector<std::string> actions;
    std::vector<ExtRational> times;  // SJ (or RE) per visited marking, length |actions| + 1
    RationalVector rates;            // RP per visited marking, length |actions| + 1
    Rational prob;
};

struct TraceWitness {
    FluidTrace trace;  // prob field unused
    Rational left_prob;
    Rational right_prob;
};

struct TraceVerdict {
    bool equivalent;
    std::size_t depth;
    std::optional<TraceWitness> witness;
};

// All traces of length <= depth from the initial marking, grouped by exact key, in key order.
std::vector<FluidTrace> fluid_traces(const Net& net, const Drg& drg, std::size_t depth,
                                     TraceKey key = TraceKey::Sojourn);

TraceVerdict trace_equivalent(const Net& a, const Drg& ga, const Net& b, const Drg& gb, std::size_t depth,
                              TraceKey key = TraceKey::Sojourn);

// A discrete marking of one of several nets being compared.
struct StateRef {
    std::size_t side;
    std::size_t index;
    auto operator<=>(const StateRef&) const = default;
};

struct Partition {
    std::vector<std::vector<StateRef>> classes;  // ordered by smallest member

    std::size_t class_of(const StateRef& s) const;
};

struct BisimVerdict {
    bool equivalent;
    Partition partition;
    std::size_t rounds;
    std::optional<std::size_t> separated_round;  // refinement round that split the initial markings
};

// Coarsest partition of the disjoint union of the nets' markings that is a fluid bisimulation.
Partition coarsest_fluid_bisimulation(const std::vector<const Net*>& nets, const std::vector<const Drg*>& drgs,
                                      std::size_t* rounds = nullptr,
                                      std::optional<std::size_t>* separated_round = nullptr);

BisimVerdict fluid_bisimulation(const Net& a, const Drg& ga, const Net& b, const Drg& gb);

// Checks the transfer conditions: equal RP per class and equal per-action class rates.
bool is_fluid_bisimulation(const std::vector<const Net*>& nets, const std::vector<const Drg*>& drgs,
                           const Partition& p);

Rational fluid_change_marking(const Net& net, const Drg& drg, std::size_t i);
Rational fluid_change_length(const Net& net, const Drg& drg, std::size_t n);

}  // namespace fluidnet
