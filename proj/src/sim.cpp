#include "fluidnet/sim.hpp"

#include "fluidnet/error.hpp"
#include "fluidnet/sfm.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

namespace fluidnet {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Interval summarize(const std::vector<double>& xs)
{
    const double n = static_cast<double>(xs.size());
    double mean = 0;
    for (double x : xs)
        mean += x;
    mean /= n;
    if (xs.size() < 2)
        return {mean, std::numeric_limits<double>::infinity()};
    double ss = 0;
    for (double x : xs)
        ss += (x - mean) * (x - mean);
    return {mean, 1.96 * std::sqrt(ss / (n - 1)) / std::sqrt(n)};
}

// Time within [0, T) a linear segment from a to b spends strictly below x.
double time_below(double a, double b, double duration, double x)
{
    if (duration <= 0)
        return 0;
    if (a == b)
        return a < x ? duration : 0;
    double slope = (b - a) / duration;
    double cross = std::clamp((x - a) / slope, 0.0, duration);
    return slope > 0 ? cross : duration - cross;
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix64(seed) ^ mix64((stream + 1) * kGolden))
{
}

CounterRng::result_type CounterRng::operator()()
{
    return mix64(key_ + (++counter_) * kGolden);
}

Rational actual_rate(const Net& net, const Marking& m, double level)
{
    Rational rp = potential_rate(net, m);
    if (level <= 0 && rp < 0)
        return 0;
    return rp;
}

double advance_fluid(double x, double rp, double start, double duration, std::uint32_t state,
                     std::vector<Segment>& out)
{
    if (duration <= 0)
        return x;
    if (rp >= 0 || x + rp * duration >= 0) {
        double end_level = std::max(0.0, x + rp * duration);
        out.push_back({start, start + duration, x, end_level, state});
        return end_level;
    }
    // The buffer empties at x / |rp| and stays empty for the rest of the sojourn.
    double hit = x / -rp;
    if (hit > 0)
        out.push_back({start, start + hit, x, 0.0, state});
    out.push_back({start + hit, start + duration, 0.0, 0.0, state});
    return 0.0;
}

Trajectory simulate_replication(const Net& net, const Drg& drg, const SimConfig& config, std::size_t replication)
{
    if (config.horizon < 0)
        throw Error("BAD_ARGUMENT", "negative horizon");
    CounterRng rng(config.seed, replication);
    const RationalVector rp_exact = potential_rates(net, drg);
    std::vector<double> rp(rp_exact.size());
    for (std::size_t i = 0; i < rp.size(); ++i)
        rp[i] = rp_exact[i].get_d();

    Trajectory traj;
    std::uint32_t state = 0;
    double now = 0;
    double level = config.initial_level;
    while (now < config.horizon) {
        // Race: every enabled transition draws an exponential delay, the smallest fires.
        double best = std::numeric_limits<double>::infinity();
        std::size_t winner = SIZE_MAX;
        for (std::size_t e : drg.out_edges[state]) {
            std::exponential_distribution<double> delay(drg.edges[e].rate.get_d());
            double d = delay(rng);
            if (d < best) {
                best = d;
                winner = e;
            }
        }
        double duration = std::min(best, config.horizon - now);
        level = advance_fluid(level, rp[state], now, duration, state, traj.segments);
        now += duration;
        if (winner == SIZE_MAX || now >= config.horizon)
            break;
        state = static_cast<std::uint32_t>(drg.edges[winner].target);
    }
    return traj;
}

std::vector<Trajectory> simulate(const Net& net, const Drg& drg, const SimConfig& config)
{
    if (config.replications < 1)
        throw Error("BAD_ARGUMENT", "at least one replication is needed");
    std::vector<Trajectory> runs(config.replications);
    std::size_t threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, config.replications);
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (std::size_t w = 0; w < threads; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::size_t r = next++; r < config.replications; r = next++)
                    runs[r] = simulate_replication(net, drg, config, r);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto& t : pool)
        t.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    return runs;
}

SimEstimate estimate_stationary(const std::vector<Trajectory>& runs, std::size_t states, const SimConfig& config)
{
    if (config.warmup < 0 || config.warmup >= 1)
        throw Error("BAD_ARGUMENT", "warmup fraction must lie in [0,1)");
    const std::size_t g = config.grid.size();
    const double from = config.warmup * config.horizon;
    std::vector<std::vector<double>> phi(states), ell(states);
    std::vector<std::vector<std::vector<double>>> cdf(states, std::vector<std::vector<double>>(g));

    for (const auto& run : runs) {
        std::vector<double> t_state(states, 0), t_empty(states, 0);
        std::vector<std::vector<double>> t_below(states, std::vector<double>(g, 0));
        double total = 0;
        for (const auto& s : run.segments) {
            if (s.end <= from)
                continue;
            double start = std::max(s.start, from);
            double span = s.end - s.start;
            double a = s.level_start;
            if (start > s.start && span > 0)
                a = s.level_start + (s.level_end - s.level_start) * (start - s.start) / span;
            double d = s.end - start;
            total += d;
            t_state[s.state] += d;
            if (a == 0 && s.level_end == 0)
                t_empty[s.state] += d;
            for (std::size_t k = 0; k < g; ++k)
                t_below[s.state][k] += time_below(a, s.level_end, d, config.grid[k]);
        }
        if (total == 0) {
            // Degenerate run (zero horizon or immediate stop): all mass on the initial marking.
            t_state[run.initial_state] = 1;
            total = 1;
        }
        for (std::size_t i = 0; i < states; ++i) {
            phi[i].push_back(t_state[i] / total);
            ell[i].push_back(t_empty[i] / total);
            for (std::size_t k = 0; k < g; ++k)
                cdf[i][k].push_back(t_below[i][k] / total);
        }
    }

    SimEstimate est;
    est.grid = config.grid;
    for (std::size_t i = 0; i < states; ++i) {
        est.phi.push_back(summarize(phi[i]));
        est.ell.push_back(summarize(ell[i]));
        est.cdf.emplace_back();
        for (std::size_t k = 0; k < g; ++k)
            est.cdf.back().push_back(summarize(cdf[i][k]));
    }
    return est;
}

}  // namespace fluidnet
