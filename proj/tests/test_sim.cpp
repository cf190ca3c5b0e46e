#include "support.hpp"

#include <doctest.h>

#include <tuple>

using namespace testing_support;

namespace {

double max_half_width(const std::vector<Interval>& v)
{
    double h = 0;
    for (const auto& i : v)
        h = std::max(h, i.half_width);
    return h;
}

}  // namespace

TEST_CASE("actual rate clamps at the empty boundary")
{
    Net e1 = fixture("e1_b");
    CHECK(actual_rate(e1, {0, 1}, 0) == 0);
    CHECK(actual_rate(e1, {0, 1}, 0.3) == -2);
    CHECK(actual_rate(e1, {1, 0}, 0) == 1);
    Net flat = e1;
    for (auto& t : flat.transitions) {
        t.fluid_in = {std::nullopt};
        t.fluid_out = {std::nullopt};
    }
    CHECK(actual_rate(flat, {0, 1}, 0.7) == 0);
}

TEST_CASE("boundary hit inside a sojourn")
{
    std::vector<Segment> out;
    double end = advance_fluid(0.5, -2, 10, 1, 1, out);
    CHECK(end == 0);
    REQUIRE(out.size() == 2);
    CHECK(out[0].end - out[0].start == doctest::Approx(0.25));
    CHECK(out[0].level_end == 0);
    CHECK(out[1].level_start == 0);
    CHECK(out[1].level_end == 0);
    CHECK(out[1].end == 11);

    out.clear();
    CHECK(advance_fluid(0.5, 1, 0, 2, 0, out) == doctest::Approx(2.5));
    CHECK(out.size() == 1);
}

TEST_CASE("zero horizon and terminal nets")
{
    auto [net, drg] = model("e1_b");
    SimConfig cfg;
    cfg.horizon = 0;
    cfg.replications = 2;
    auto runs = simulate(net, drg, cfg);
    REQUIRE(runs.size() == 2);
    CHECK(runs[0].segments.empty());
    CHECK(runs[0].initial_state == 0);

    Net terminal = parse_net(R"({"discrete_places": ["p"], "continuous_places": ["q"],
                                 "initial_marking": [1], "transitions": []})");
    Drg g = explore(terminal);
    cfg.horizon = 10;
    auto est = estimate_stationary(simulate(terminal, g, cfg), 1, cfg);
    CHECK(est.phi[0].mean == 1);
}

TEST_CASE("trajectories are deterministic, nonnegative and piecewise linear")
{
    auto [net, drg] = model("docprep");
    SimConfig cfg;
    cfg.horizon = 500;
    cfg.replications = 4;
    cfg.seed = 99;
    cfg.threads = 3;
    auto a = simulate(net, drg, cfg);
    cfg.threads = 1;
    auto b = simulate(net, drg, cfg);
    auto rp = potential_rates(net, drg);
    for (std::size_t k = 0; k < a.size(); ++k) {
        REQUIRE(a[k].segments.size() == b[k].segments.size());
        for (std::size_t i = 0; i < a[k].segments.size(); ++i) {
            const auto& s = a[k].segments[i];
            const auto& t = b[k].segments[i];
            CHECK(std::tie(s.start, s.end, s.level_start, s.level_end, s.state) ==
                  std::tie(t.start, t.end, t.level_start, t.level_end, t.state));
            CHECK(s.level_start >= 0);
            CHECK(s.level_end >= 0);
            double slope = (s.level_end - s.level_start) / (s.end - s.start);
            bool ok = std::abs(slope) < 1e-9 || std::abs(slope - rp[s.state].get_d()) < 1e-6;
            CHECK(ok);
            if (i > 0) {
                CHECK(s.start == a[k].segments[i - 1].end);
                CHECK(s.level_start == a[k].segments[i - 1].level_end);
            }
        }
    }
    // Different replications use different streams.
    CHECK(a[0].segments.size() != a[1].segments.size());
}

TEST_CASE("counter generator streams are reproducible and distinct")
{
    CounterRng x(1, 0), y(1, 0), z(1, 1), w(2, 0);
    for (int k = 0; k < 100; ++k) {
        auto vx = x();
        CHECK(vx == y());
        CHECK(vx != z());
        CHECK(vx != w());
    }
}

TEST_CASE("estimates converge and intervals shrink with the horizon")
{
    auto [net, drg] = model("e1_b");
    SimConfig cfg;
    cfg.replications = 20;
    cfg.seed = 7;
    cfg.horizon = 2000;
    auto short_run = estimate_stationary(simulate(net, drg, cfg), drg.size(), cfg);
    cfg.horizon = 4000;
    auto long_run = estimate_stationary(simulate(net, drg, cfg), drg.size(), cfg);
    double ratio = max_half_width(long_run.phi) / max_half_width(short_run.phi);
    CHECK(ratio >= 0.5);
    CHECK(ratio <= 0.9);
    double sum = 0;
    for (const auto& p : long_run.phi) {
        CHECK(p.mean >= 0);
        CHECK(p.mean <= 1);
        sum += p.mean;
    }
    CHECK(std::abs(sum - 1) < 1e-9);
    CHECK(std::abs(long_run.ell[1].mean - 0.25) < 0.02);
}
