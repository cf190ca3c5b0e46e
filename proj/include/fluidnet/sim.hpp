#pragma once

#include "fluidnet/reachability.hpp"

#include <cstdint>
#include <limits>

namespace fluidnet {

struct SimConfig {
    double horizon = 1e4;
    std::size_t replications = 20;
    double warmup = 0.2;  // fraction of the horizon discarded before estimating
    std::uint64_t seed = 1;
    std::vector<double> grid{0.5, 1.0, 2.0, 5.0};
    double initial_level = 0;
    std::size_t threads = 0;  // 0 = hardware concurrency
};

// Fluid level moves linearly from level_start to level_end over [start, end) in one marking.
struct Segment {
    double start;
    double end;
    double level_start;
    double level_end;
    std::uint32_t state;
};

struct Trajectory {
    std::uint32_t initial_state = 0;
    std::vector<Segment> segments;
};

struct Interval {
    double mean;
    double half_width;  // 95% normal confidence half-width across replications
};

struct SimEstimate {
    std::vector<Interval> phi;
    std::vector<Interval> ell;
    std::vector<std::vector<Interval>> cdf;  // [state][grid point]
    std::vector<double> grid;
};

// Counter-based generator: output k of stream (seed, stream) is a SplitMix64 finalizer of a counter.
class CounterRng {
public:
    using result_type = std::uint64_t;
    CounterRng(std::uint64_t seed, std::uint64_t stream);
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()();

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// Actual flow rate: the potential rate clamped at zero on the empty boundary.
Rational actual_rate(const Net& net, const Marking& m, double level);

// Fluid evolution over one sojourn starting at level x with potential rate rp; appends 1 or 2 segments.
double advance_fluid(double x, double rp, double start, double duration, std::uint32_t state,
                     std::vector<Segment>& out);

Trajectory simulate_replication(const Net& net, const Drg& drg, const SimConfig& config, std::size_t replication);
std::vector<Trajectory> simulate(const Net& net, const Drg& drg, const SimConfig& config);

SimEstimate estimate_stationary(const std::vector<Trajectory>& runs, std::size_t states, const SimConfig& config);

}  // namespace fluidnet
