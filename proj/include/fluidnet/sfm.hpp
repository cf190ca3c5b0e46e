#pragma once

#include "fluidnet/ctmc.hpp"

#include <complex>

namespace fluidnet {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

struct SignClasses {
    std::vector<std::size_t> negative;
    std::vector<std::size_t> zero;
    std::vector<std::size_t> positive;
};

struct StabilityReport {
    double mean_drift;
    std::optional<Rational> exact_drift;
    bool stable;
};

// One exponential mode a * exp(gamma x) * v of the stationary fluid distribution.
struct SpectralMode {
    Complex gamma;
    ComplexVector v;  // unit infinity-norm
    Complex coefficient;
};

struct SfmSolution {
    std::vector<Complex> eigenvalues;  // every finite eigenvalue of the pencil, ascending real part
    std::vector<SpectralMode> modes;   // retained modes with negative real part
    std::vector<double> phi;
    std::optional<RationalVector> exact_phi;
    std::vector<double> ell;
    RationalVector rp;

    std::size_t size() const { return phi.size(); }
    std::vector<double> cdf(double x) const;        // F(x)
    std::vector<double> density(double x) const;    // f(x)
    std::vector<double> density_mass() const;       // integral of f over (0, inf)
};

// Potential fluid rate of the single continuous place in marking m.
Rational potential_rate(const Net& net, const Marking& m);
RationalVector potential_rates(const Net& net, const Drg& drg);
RatMatrix fluid_rate_matrix(const Net& net, const Drg& drg);
SignClasses sign_classes(const RationalVector& rp);

StabilityReport stability(const Pmf& phi, const RationalVector& rp);

SfmSolution spectral_solve(const RatMatrix& q, const RationalVector& rp);
SfmSolution spectral_solve(const Net& net, const Drg& drg);

// Integral of x^k exp(gamma x) over [lo, hi); hi may be +inf when Re(gamma) < 0.
Complex integrate_monomial_exp(unsigned k, Complex gamma, double lo, double hi);

}  // namespace fluidnet
