#include "fluidnet/reachability.hpp"

#include "fluidnet/error.hpp"

#include <cstdlib>
#include <deque>

namespace fluidnet {

std::size_t default_max_states()
{
    if (const char* env = std::getenv("FLUIDNET_MAX_STATES")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0' && v > 0)
            return static_cast<std::size_t>(v);
    }
    return kDefaultMaxStates;
}

Drg explore(const Net& net, std::size_t max_states)
{
    if (max_states < 1)
        throw Error("BAD_ARGUMENT", "max_states must be at least 1");
    if (net.initial_marking.size() != net.discrete_places.size())
        throw Error("DIMENSION_MISMATCH", "initial marking does not match the discrete places");

    Drg g;
    auto add_state = [&](const Marking& m) {
        auto [it, inserted] = g.index.emplace(m, g.states.size());
        if (inserted) {
            if (g.states.size() >= max_states)
                throw Error("STATE_BUDGET_EXCEEDED",
                            "more than " + std::to_string(max_states) + " discrete markings are reachable");
            g.states.push_back(m);
            g.out_edges.emplace_back();
        }
        return it->second;
    };

    add_state(net.initial_marking);
    for (std::size_t i = 0; i < g.states.size(); ++i) {
        const Marking m = g.states[i];
        for (std::size_t t : enabled(net, m)) {
            Rational rate = net.transitions[t].rate.at(m);
            std::size_t j = add_state(fire(net, m, t));
            g.out_edges[i].push_back(g.edges.size());
            g.edges.push_back({i, t, rate, j});
        }
    }
    return g;
}

}  // namespace fluidnet
