#include "support.hpp"

#include <doctest.h>

#include <set>

using namespace testing_support;

namespace {

// Independent oracle: the set of markings reachable by repeated firing, without ordering.
std::set<Marking> closure(const Net& net)
{
    std::set<Marking> seen{net.initial_marking};
    std::vector<Marking> stack{net.initial_marking};
    while (!stack.empty()) {
        Marking m = stack.back();
        stack.pop_back();
        for (std::size_t t = 0; t < net.transitions.size(); ++t)
            if (is_enabled(net, m, t)) {
                Marking next = fire(net, m, t);
                if (seen.insert(next).second)
                    stack.push_back(next);
            }
    }
    return seen;
}

}  // namespace

TEST_CASE("e1 graph")
{
    auto [net, drg] = model("e1_b");
    REQUIRE(drg.size() == 2);
    CHECK(drg.states[0] == Marking{1, 0});
    CHECK(drg.states[1] == Marking{0, 1});
    CHECK(drg.edges.size() == 3);
}

TEST_CASE("docprep graph lists its five edges in order")
{
    auto [net, drg] = model("docprep");
    REQUIRE(drg.size() == 4);
    CHECK(drg.states[0] == Marking{1, 1, 0, 0});
    CHECK(drg.states[1] == Marking{0, 1, 1, 0});
    CHECK(drg.states[2] == Marking{1, 0, 0, 1});
    CHECK(drg.states[3] == Marking{0, 0, 1, 1});
    REQUIRE(drg.edges.size() == 5);
    std::vector<std::tuple<std::size_t, std::string, std::size_t>> expected{
        {0, "t1", 1}, {0, "t2", 2}, {1, "t2", 3}, {2, "t1", 3}, {3, "t3", 0}};
    for (std::size_t k = 0; k < 5; ++k) {
        const auto& e = drg.edges[k];
        CHECK(std::tuple(e.source, net.transitions[e.transition].name, e.target) == expected[k]);
    }
}

TEST_CASE("unbounded net exceeds the budget")
{
    Net n = fixture("unbounded");
    CHECK_THROWS_WITH_AS(explore(n, 10), doctest::Contains("10"), Error);
    try {
        explore(n, 10);
    } catch (const Error& e) {
        CHECK(e.code() == "STATE_BUDGET_EXCEEDED");
    }
}

TEST_CASE("graph invariants on every fixture")
{
    for (const char* name : {"e1_b", "e1_t", "e1p_b", "e1p_t", "docprep", "docprep-seq", "docprep-ext",
                             "docprep-abstracted"}) {
        auto [net, drg] = model(name);
        CHECK(drg.states[0] == net.initial_marking);
        CHECK(std::set<Marking>(drg.states.begin(), drg.states.end()) == closure(net));
        for (const auto& e : drg.edges) {
            CHECK(fire(net, drg.states[e.source], e.transition) == drg.states[e.target]);
            CHECK(e.rate == net.transitions[e.transition].rate.at(drg.states[e.source]));
        }
    }
}

TEST_CASE("random state machines reach every place")
{
    std::mt19937 rng(7);
    for (int k = 0; k < 20; ++k) {
        Net net = random_state_machine(rng, 3 + k % 3, {"a", "b"});
        Drg drg = explore(net);
        CHECK(drg.size() == net.discrete_places.size());
        CHECK(std::set<Marking>(drg.states.begin(), drg.states.end()) == closure(net));
    }
}
