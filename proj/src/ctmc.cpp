#include "fluidnet/ctmc.hpp"

#include "fluidnet/error.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <functional>

namespace fluidnet {

namespace {

void check_index(const Drg& drg, std::size_t i)
{
    if (i >= drg.size())
        throw Error("INDEX_OUT_OF_RANGE", "state index " + std::to_string(i) + " out of range");
}

}  // namespace

Rational exit_rate(const Drg& drg, std::size_t i)
{
    check_index(drg, i);
    Rational sum = 0;
    for (std::size_t e : drg.out_edges[i])
        sum += drg.edges[e].rate;
    return sum;
}

RationalVector exit_rates(const Drg& drg)
{
    RationalVector re;
    re.reserve(drg.size());
    for (std::size_t i = 0; i < drg.size(); ++i)
        re.push_back(exit_rate(drg, i));
    return re;
}

SojournStats sojourn_stats(const Drg& drg)
{
    SojournStats s;
    s.re = exit_rates(drg);
    for (const auto& re : s.re) {
        if (re == 0) {
            s.sj.emplace_back(std::nullopt);
            s.var.emplace_back(std::nullopt);
        } else {
            Rational sj = 1 / re;
            s.sj.emplace_back(sj);
            s.var.emplace_back(Rational(sj * sj));
        }
    }
    return s;
}

Rational move_rate(const Drg& drg, std::size_t i, std::size_t j)
{
    check_index(drg, i);
    check_index(drg, j);
    Rational sum = 0;
    for (std::size_t e : drg.out_edges[i])
        if (drg.edges[e].target == j)
            sum += drg.edges[e].rate;
    return sum;
}

Rational move_rate_by_action(const Net& net, const Drg& drg, std::size_t i, const std::string& action,
                             const std::set<std::size_t>& targets)
{
    check_index(drg, i);
    Rational sum = 0;
    for (std::size_t e : drg.out_edges[i]) {
        const auto& edge = drg.edges[e];
        if (net.transitions[edge.transition].label == action && targets.count(edge.target))
            sum += edge.rate;
    }
    return sum;
}

Rational firing_probability(const Drg& drg, std::size_t i, std::size_t t)
{
    Rational re = exit_rate(drg, i);
    for (std::size_t e : drg.out_edges[i])
        if (drg.edges[e].transition == t)
            return drg.edges[e].rate / re;
    return 0;
}

RatMatrix transition_rate_matrix(const Drg& drg)
{
    const std::size_t n = drg.size();
    RatMatrix q(n, n);
    for (const auto& e : drg.edges)
        if (e.source != e.target)
            q(e.source, e.target) += e.rate;
    for (std::size_t i = 0; i < n; ++i) {
        Rational sum = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i)
                sum += q(i, j);
        q(i, i) = -sum;
    }
    return q;
}

RatMatrix embedded_tpm(const Drg& drg)
{
    const std::size_t n = drg.size();
    RatMatrix p(n, n);
    RationalVector re = exit_rates(drg);
    for (const auto& e : drg.edges)
        p(e.source, e.target) += e.rate / re[e.source];
    return p;
}

std::vector<std::vector<std::size_t>> bottom_components(const RatMatrix& q)
{
    const std::size_t n = q.rows();
    std::vector<std::vector<std::size_t>> succ(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && q(i, j) > 0)
                succ[i].push_back(j);

    // Iterative Tarjan to stay safe on long chains.
    std::vector<long> index(n, -1), low(n, 0), comp(n, -1);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<std::vector<std::size_t>> comps;
    long counter = 0;
    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] >= 0)
            continue;
        std::vector<std::pair<std::size_t, std::size_t>> work{{root, 0}};
        while (!work.empty()) {
            auto& [v, pos] = work.back();
            if (pos == 0 && index[v] < 0) {
                index[v] = low[v] = counter++;
                stack.push_back(v);
                on_stack[v] = true;
            }
            if (pos < succ[v].size()) {
                std::size_t w = succ[v][pos++];
                if (index[w] < 0)
                    work.push_back({w, 0});
                else if (on_stack[w])
                    low[v] = std::min(low[v], index[w]);
                continue;
            }
            if (low[v] == index[v]) {
                std::vector<std::size_t> c;
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = static_cast<long>(comps.size());
                    c.push_back(w);
                } while (w != v);
                std::sort(c.begin(), c.end());
                comps.push_back(std::move(c));
            }
            std::size_t done = v;
            work.pop_back();
            if (!work.empty())
                low[work.back().first] = std::min(low[work.back().first], low[done]);
        }
    }

    std::vector<std::vector<std::size_t>> bottoms;
    for (std::size_t c = 0; c < comps.size(); ++c) {
        bool closed = true;
        for (std::size_t v : comps[c])
            for (std::size_t w : succ[v])
                if (comp[w] != static_cast<long>(c))
                    closed = false;
        if (closed)
            bottoms.push_back(comps[c]);
    }
    std::sort(bottoms.begin(), bottoms.end());
    return bottoms;
}

Pmf steady_state(const RatMatrix& q, std::size_t exact_limit)
{
    const std::size_t n = q.rows();
    if (n == 0)
        throw Error("NOT_ERGODIC", "empty chain");
    auto bottoms = bottom_components(q);
    if (bottoms.size() != 1)
        throw Error("NOT_ERGODIC", std::to_string(bottoms.size()) + " closed recurrent classes");
    for (std::size_t i = 0; i < n; ++i)
        if (q(i, i) == 0)
            throw Error("NOT_ERGODIC", "state " + std::to_string(i) + " is terminal");

    Pmf pmf;
    if (n <= exact_limit) {
        RatMatrix a = q.transpose();
        RationalVector b(n, Rational(0));
        for (std::size_t j = 0; j < n; ++j)
            a(n - 1, j) = 1;
        b[n - 1] = 1;
        auto x = solve_exact(a, b);
        if (!x)
            throw Error("NOT_ERGODIC", "singular stationary system");
        pmf.probs = to_double(*x);
        pmf.exact = std::move(*x);
        return pmf;
    }

    Eigen::MatrixXd a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            a(j, i) = q(i, j).get_d();
    a.row(n - 1).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    b(n - 1) = 1;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    Eigen::VectorXd x = lu.solve(b);
    x += lu.solve(b - a * x);  // one step of iterative refinement
    pmf.probs.assign(x.data(), x.data() + n);
    for (auto& p : pmf.probs)
        p = std::max(p, 0.0);
    return pmf;
}

std::vector<double> initial_pmf(std::size_t n)
{
    std::vector<double> v(n, 0.0);
    if (n)
        v[0] = 1.0;
    return v;
}

std::vector<double> transient_pmf(const RatMatrix& q, const std::vector<double>& initial, double delta)
{
    const std::size_t n = q.rows();
    if (initial.size() != n)
        throw Error("DIMENSION_MISMATCH", "initial PMF length does not match the chain");
    if (delta < 0)
        throw Error("BAD_ARGUMENT", "negative time");
    double lambda = 0;
    for (std::size_t i = 0; i < n; ++i)
        lambda = std::max(lambda, std::abs(q(i, i).get_d()));
    if (delta == 0 || lambda == 0)
        return initial;

    // Uniformized jump matrix P = I + Q / lambda, stored sparse and transposed for column products.
    std::vector<Eigen::Triplet<double>> entries;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double v = q(i, j).get_d() / lambda + (i == j ? 1.0 : 0.0);
            if (v != 0)
                entries.emplace_back(static_cast<int>(j), static_cast<int>(i), v);
        }
    Eigen::SparseMatrix<double> pt(n, n);
    pt.setFromTriplets(entries.begin(), entries.end());

    const double mean = lambda * delta;
    const double tail = 1e-12;
    Eigen::VectorXd term = Eigen::Map<const Eigen::VectorXd>(initial.data(), n);
    Eigen::VectorXd result = Eigen::VectorXd::Zero(n);
    double mass = 0;
    for (std::size_t k = 0;; ++k) {
        double log_w = -mean + k * std::log(mean) - std::lgamma(static_cast<double>(k) + 1);
        double w = std::exp(log_w);
        result += w * term;
        mass += w;
        if (1.0 - mass <= tail && k >= mean)
            break;
        if (k > mean + 50 * std::sqrt(mean) + 1000)
            break;
        term = pt * term;
    }
    return {result.data(), result.data() + n};
}

}  // namespace fluidnet
