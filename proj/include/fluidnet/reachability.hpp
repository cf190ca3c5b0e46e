#pragma once

#include "fluidnet/net.hpp"

#include <map>

namespace fluidnet {

struct DrgEdge {
    std::size_t source;
    std::size_t transition;
    Rational rate;
    std::size_t target;
};

// Discrete reachability graph; states[0] is the initial marking, order is BFS discovery.
struct Drg {
    std::vector<Marking> states;
    std::vector<DrgEdge> edges;
    std::map<Marking, std::size_t> index;
    std::vector<std::vector<std::size_t>> out_edges;  // edge ids per source state

    std::size_t size() const { return states.size(); }
};

constexpr std::size_t kDefaultMaxStates = 100000;

// kDefaultMaxStates unless FLUIDNET_MAX_STATES holds a positive integer.
std::size_t default_max_states();

Drg explore(const Net& net, std::size_t max_states = default_max_states());

}  // namespace fluidnet
