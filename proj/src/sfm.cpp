#include "fluidnet/sfm.hpp"

#include "fluidnet/error.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fluidnet {

namespace {

void require_single_place(const Net& net)
{
    if (net.continuous_places.size() != 1)
        throw Error("MULTI_CONTINUOUS", "analysis needs exactly one continuous place, the net has " +
                                            std::to_string(net.continuous_places.size()));
}

double combine(const std::vector<double>& base, const std::vector<SpectralMode>& modes, double x, std::size_t i,
               bool derivative)
{
    Complex sum = 0;
    for (const auto& m : modes) {
        Complex term = m.coefficient * std::exp(m.gamma * x) * m.v[i];
        sum += derivative ? term * m.gamma : term;
    }
    return (derivative ? 0.0 : base[i]) + sum.real();
}

}  // namespace

std::vector<double> SfmSolution::cdf(double x) const
{
    std::vector<double> out(size());
    for (std::size_t i = 0; i < size(); ++i)
        out[i] = combine(phi, modes, x, i, false);
    return out;
}

std::vector<double> SfmSolution::density(double x) const
{
    std::vector<double> out(size());
    for (std::size_t i = 0; i < size(); ++i)
        out[i] = combine(phi, modes, x, i, true);
    return out;
}

std::vector<double> SfmSolution::density_mass() const
{
    std::vector<double> out(size(), 0.0);
    for (std::size_t i = 0; i < size(); ++i) {
        Complex sum = 0;
        for (const auto& m : modes)
            sum -= m.coefficient * m.v[i];
        out[i] = sum.real();
    }
    return out;
}

Rational potential_rate(const Net& net, const Marking& m)
{
    require_single_place(net);
    Rational rp = 0;
    for (std::size_t t : enabled(net, m))
        rp += fluid_in_rate(net, t, 0, m) - fluid_out_rate(net, t, 0, m);
    return rp;
}

RationalVector potential_rates(const Net& net, const Drg& drg)
{
    RationalVector rp;
    rp.reserve(drg.size());
    for (const auto& m : drg.states)
        rp.push_back(potential_rate(net, m));
    return rp;
}

RatMatrix fluid_rate_matrix(const Net& net, const Drg& drg)
{
    return RatMatrix::diagonal(potential_rates(net, drg));
}

SignClasses sign_classes(const RationalVector& rp)
{
    SignClasses s;
    for (std::size_t i = 0; i < rp.size(); ++i) {
        if (rp[i] < 0)
            s.negative.push_back(i);
        else if (rp[i] == 0)
            s.zero.push_back(i);
        else
            s.positive.push_back(i);
    }
    return s;
}

StabilityReport stability(const Pmf& phi, const RationalVector& rp)
{
    if (phi.probs.size() != rp.size())
        throw Error("DIMENSION_MISMATCH", "PMF and rate vector lengths differ");
    StabilityReport r{};
    if (phi.exact) {
        Rational drift = 0;
        for (std::size_t i = 0; i < rp.size(); ++i)
            drift += (*phi.exact)[i] * rp[i];
        r.exact_drift = drift;
        r.mean_drift = drift.get_d();
        r.stable = drift < 0;
    } else {
        double drift = 0;
        for (std::size_t i = 0; i < rp.size(); ++i)
            drift += phi.probs[i] * rp[i].get_d();
        r.mean_drift = drift;
        r.stable = drift < 0;
    }
    return r;
}

SfmSolution spectral_solve(const RatMatrix& q, const RationalVector& rp)
{
    const std::size_t n = q.rows();
    if (rp.size() != n)
        throw Error("DIMENSION_MISMATCH", "rate vector length does not match the chain");

    SfmSolution sol;
    Pmf phi = steady_state(q);
    sol.phi = phi.probs;
    sol.exact_phi = phi.exact;
    sol.rp = rp;
    auto st = stability(phi, rp);
    if (!st.stable)
        throw Error("UNSTABLE", "mean potential drift " + (st.exact_drift ? to_string(*st.exact_drift)
                                                                            : std::to_string(st.mean_drift)) +
                                    " is not negative");

    const SignClasses signs = sign_classes(rp);
    Eigen::MatrixXd qt(n, n), r = Eigen::MatrixXd::Zero(n, n);
    double q_norm = 0, r_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            qt(j, i) = q(i, j).get_d();
        r(i, i) = rp[i].get_d();
        q_norm = std::max(q_norm, std::abs(q(i, i).get_d()));
        if (rp[i] != 0)
            r_min = std::min(r_min, std::abs(rp[i].get_d()));
    }
    const double scale = std::max(1.0, signs.positive.empty() ? 1.0 : q_norm / r_min);
    const double zero_tol = 1e-9 * scale;

    Eigen::GeneralizedEigenSolver<Eigen::MatrixXd> ges(qt, r, false);
    if (ges.info() != Eigen::Success)
        throw Error("NUMERIC_FAILURE", "generalized eigenvalue iteration did not converge");

    // Zero entries of R give exactly |DRS0| infinite eigenvalues; drop those with the smallest |beta|.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    auto finiteness = [&](std::size_t k) {
        double a = std::abs(ges.alphas()(k)), b = std::abs(ges.betas()(k));
        return a + b == 0 ? 0.0 : b / (a + b);
    };
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return finiteness(x) < finiteness(y); });
    for (std::size_t k = signs.zero.size(); k < n; ++k) {
        std::size_t idx = order[k];
        Complex g = ges.alphas()(idx) / ges.betas()(idx);
        // Snap round-off so the zero eigenvalue and real eigenvalues print exactly.
        if (std::abs(g) <= zero_tol)
            g = 0;
        if (std::abs(g.imag()) <= zero_tol)
            g = Complex(g.real() + 0.0, 0.0);
        sol.eigenvalues.push_back(g);
    }
    std::sort(sol.eigenvalues.begin(), sol.eigenvalues.end(), [](const Complex& a, const Complex& b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });

    std::vector<Complex> negative;
    std::size_t zeros = 0;
    for (const auto& g : sol.eigenvalues) {
        if (std::abs(g) <= zero_tol)
            ++zeros;
        else if (g.real() < -zero_tol)
            negative.push_back(g);
    }
    if (zeros != 1)
        throw Error("EIGEN_COUNT_MISMATCH", std::to_string(zeros) + " zero eigenvalues, expected 1");
    if (negative.size() != signs.positive.size())
        throw Error("EIGEN_COUNT_MISMATCH", std::to_string(negative.size()) + " eigenvalues with negative real part, " +
                                                std::to_string(signs.positive.size()) + " positive markings");

    // Eigenvectors: null vectors of (Q^T - gamma R), one per copy of a repeated eigenvalue.
    const double group_tol = 1e-6 * scale;
    std::size_t k = 0;
    while (k < negative.size()) {
        std::size_t end = k + 1;
        while (end < negative.size() && std::abs(negative[end] - negative[k]) <= group_tol)
            ++end;
        const std::size_t mult = end - k;
        Complex gamma = 0;
        for (std::size_t j = k; j < end; ++j)
            gamma += negative[j];
        gamma /= static_cast<double>(mult);

        Eigen::MatrixXcd m = qt.cast<Complex>() - gamma * r.cast<Complex>();
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        const double null_tol = 1e-7 * std::max(1.0, sv(0));
        for (std::size_t j = 0; j < mult; ++j) {
            Eigen::Index col = static_cast<Eigen::Index>(n - 1 - j);
            if (sv(col) > null_tol)
                throw Error("EIGEN_COUNT_MISMATCH", "defective pencil: eigenvalue with multiplicity " +
                                                        std::to_string(mult) + " lacks independent eigenvectors");
            Eigen::VectorXcd v = svd.matrixV().col(col);
            Eigen::Index arg = 0;
            v.cwiseAbs().maxCoeff(&arg);
            v /= v(arg);
            SpectralMode mode;
            mode.gamma = mult == 1 ? negative[k] : gamma;
            mode.v.assign(v.data(), v.data() + n);
            sol.modes.push_back(std::move(mode));
        }
        k = end;
    }

    // Lower boundary: F_l(0) = 0 for every positive marking.
    const std::size_t m = signs.positive.size();
    if (m > 0) {
        Eigen::MatrixXcd c(m, m);
        Eigen::VectorXcd rhs(m);
        for (std::size_t l = 0; l < m; ++l) {
            for (std::size_t j = 0; j < m; ++j)
                c(l, j) = sol.modes[j].v[signs.positive[l]];
            rhs(l) = -sol.phi[signs.positive[l]];
        }
        Eigen::FullPivLU<Eigen::MatrixXcd> lu(c);
        if (!lu.isInvertible())
            throw Error("NUMERIC_FAILURE", "boundary coefficient system is singular");
        Eigen::VectorXcd a = lu.solve(rhs);
        for (std::size_t j = 0; j < m; ++j)
            sol.modes[j].coefficient = a(j);
    }

    sol.ell = sol.cdf(0.0);
    for (std::size_t i : signs.positive)
        sol.ell[i] = 0.0;
    return sol;
}

SfmSolution spectral_solve(const Net& net, const Drg& drg)
{
    return spectral_solve(transition_rate_matrix(drg), potential_rates(net, drg));
}

Complex integrate_monomial_exp(unsigned k, Complex gamma, double lo, double hi)
{
    if (std::abs(gamma) == 0) {
        if (std::isinf(hi))
            throw Error("DIVERGENT", "integral of a polynomial over an infinite range");
        return (std::pow(hi, k + 1) - std::pow(lo, k + 1)) / (k + 1);
    }
    // Antiderivative exp(gamma x) * sum_j (-1)^j k!/(k-j)! x^(k-j) / gamma^(j+1).
    auto primitive = [&](double x) -> Complex {
        if (std::isinf(x))
            return 0.0;
        Complex sum = 0;
        double falling = 1;
        Complex gpow = gamma;
        for (unsigned j = 0; j <= k; ++j) {
            double sign = (j % 2) ? -1.0 : 1.0;
            sum += sign * falling * std::pow(x, static_cast<int>(k - j)) / gpow;
            falling *= static_cast<double>(k - j);
            gpow *= gamma;
        }
        return std::exp(gamma * x) * sum;
    };
    if (std::isinf(hi) && gamma.real() >= 0)
        throw Error("DIVERGENT", "non-decaying exponential over an infinite range");
    return primitive(hi) - primitive(lo);
}

}  // namespace fluidnet
