#include "support.hpp"

#include <doctest.h>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

using namespace testing_support;

namespace {

Eigen::MatrixXd dense(const RatMatrix& m)
{
    Eigen::MatrixXd d(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            d(i, j) = m(i, j).get_d();
    return d;
}

// Independent oracle for an invertible R: F(x) = ell * exp(x Q R^-1).
std::vector<double> cdf_by_matrix_exponential(const RatMatrix& q, const RatMatrix& r, const std::vector<double>& ell,
                                              double x)
{
    Eigen::MatrixXd a = dense(q) * dense(r).inverse();
    Eigen::RowVectorXd l = Eigen::Map<const Eigen::RowVectorXd>(ell.data(), ell.size());
    Eigen::RowVectorXd f = l * (a * x).exp();
    return {f.data(), f.data() + f.size()};
}

const std::vector<double> kGrid{0.0, 0.5, 1.0, 2.0, 5.0};

// F(x) = phi + a3 e^(g3 x) v3 + a4 e^(g4 x) v4 with the published coefficients and eigenvectors.
std::vector<double> docprep_closed_form(double x)
{
    const double s = std::sqrt(93.0);
    const double g3 = -(11 + s) / 14, g4 = -(11 - s) / 14;
    const double a3 = 2 * (31 - 3 * s) / (93 * (3 + s)), a4 = -2 * (10 + s) / (21 * s);
    const double v3[] = {14 / (3 - s), 98 / ((3 - s) * (3 - s)), 392 / ((3 - s) * (3 - s)), 1};
    const double v4[] = {14 / (3 + s), 98 / ((3 + s) * (3 + s)), 392 / ((3 + s) * (3 + s)), 1};
    const double phi[] = {2.0 / 9, 1.0 / 9, 4.0 / 9, 2.0 / 9};
    std::vector<double> out;
    for (int i = 0; i < 4; ++i)
        out.push_back(phi[i] + a3 * std::exp(g3 * x) * v3[i] + a4 * std::exp(g4 * x) * v4[i]);
    return out;
}

// Published density; the third element equals four times the second since v3 and v4 both scale that way.
std::vector<double> docprep_density_closed_form(double x)
{
    const double s = std::sqrt(93.0);
    const double e = std::exp(-(11 + s) / 14 * x), g = std::exp(s * x / 7);
    return {e * (31 - s + (31 + s) * g) / 1953, e * (-1 + g) / (9 * s), 4 * e * (-1 + g) / (9 * s),
            e * (14 * (-31 + s) + (620 + 48 * s) * g) / (4557 * (3 + s))};
}

std::vector<double> real_parts(const std::vector<Complex>& v)
{
    std::vector<double> out;
    for (const auto& c : v) {
        CHECK(std::abs(c.imag()) < 1e-9);
        out.push_back(c.real());
    }
    return out;
}

const char* kStableNets[] = {"e1_b", "e1_t", "e1p_b", "e1p_t", "docprep", "docprep-seq", "docprep-ext",
                             "docprep-abstracted"};

}  // namespace

TEST_CASE("potential rates and rate matrices")
{
    auto e1 = model("e1_b");
    CHECK(potential_rate(e1.net, {1, 0}) == 1);
    CHECK(potential_rate(e1.net, {0, 1}) == -2);
    CHECK(fluid_rate_matrix(e1.net, e1.drg) == RatMatrix::diagonal(rv({"1", "-2"})));
    auto e1p = model("e1p_b");
    CHECK(fluid_rate_matrix(e1p.net, e1p.drg) == RatMatrix::diagonal(rv({"1", "-2", "-2"})));
    auto doc = model("docprep");
    CHECK(potential_rate(doc.net, {1, 1, 0, 0}) == 3);
    CHECK(fluid_rate_matrix(doc.net, doc.drg) == RatMatrix::diagonal(rv({"3", "2", "1", "-7"})));
    CHECK(potential_rate(doc.net, {0, 0, 0, 0}) == 0);

    auto signs = sign_classes(rv({"1", "0", "-2", "3"}));
    CHECK(signs.negative == std::vector<std::size_t>{2});
    CHECK(signs.zero == std::vector<std::size_t>{1});
    CHECK(signs.positive == std::vector<std::size_t>{0, 3});
}

TEST_CASE("two continuous places are rejected")
{
    Net n = fixture("e1_b");
    n.continuous_places.push_back("q2");
    for (auto& t : n.transitions) {
        t.fluid_in.push_back(std::nullopt);
        t.fluid_out.push_back(std::nullopt);
    }
    CHECK_THROWS_AS(potential_rate(n, {1, 0}), Error);
}

TEST_CASE("stability")
{
    auto e1 = model("e1_b");
    auto st = stability(steady_state(transition_rate_matrix(e1.drg)), potential_rates(e1.net, e1.drg));
    CHECK(*st.exact_drift == r("-1/2"));
    CHECK(st.stable);
    auto doc = model("docprep");
    auto sd = stability(steady_state(transition_rate_matrix(doc.drg)), potential_rates(doc.net, doc.drg));
    CHECK(*sd.exact_drift == r("-2/9"));
    CHECK(sd.stable);
    auto flat = stability(steady_state(transition_rate_matrix(e1.drg)), rv({"0", "0"}));
    CHECK(flat.mean_drift == 0);
    CHECK(!flat.stable);
    try {
        spectral_solve(transition_rate_matrix(e1.drg), rv({"0", "0"}));
        FAIL("expected UNSTABLE");
    } catch (const Error& e) {
        CHECK(e.code() == "UNSTABLE");
    }
    try {
        spectral_solve(transition_rate_matrix(e1.drg), rv({"2", "-1"}));
        FAIL("expected UNSTABLE");
    } catch (const Error& e) {
        CHECK(e.code() == "UNSTABLE");
    }
}

TEST_CASE("running example spectral solution")
{
    auto e1 = model("e1_b");
    SfmSolution sol = spectral_solve(e1.net, e1.drg);
    CHECK(max_abs_diff(real_parts(sol.eigenvalues), {-1, 0}) < 1e-9);
    REQUIRE(sol.modes.size() == 1);
    // Published a_2 = -3/4 with v_2 = (2/3, 1/3); only the product is scale free.
    std::vector<double> product;
    for (const auto& c : sol.modes[0].v)
        product.push_back((sol.modes[0].coefficient * c).real());
    CHECK(max_abs_diff(product, {-0.75 * 2 / 3, -0.75 / 3}) < 1e-9);
    CHECK(max_abs_diff(sol.ell, {0, 0.25}) < 1e-9);
    CHECK(*sol.exact_phi == rv({"1/2", "1/2"}));
    for (double x : kGrid) {
        CHECK(max_abs_diff(sol.cdf(x), {0.5 - 0.5 * std::exp(-x), 0.5 - 0.25 * std::exp(-x)}) < 1e-9);
        CHECK(max_abs_diff(sol.density(x), {0.5 * std::exp(-x), 0.25 * std::exp(-x)}) < 1e-9);
    }
    CHECK(max_abs_diff(sol.cdf(0), sol.ell) < 1e-9);
}

TEST_CASE("three-state variant drops the positive eigenvalue")
{
    auto e1p = model("e1p_b");
    SfmSolution sol = spectral_solve(e1p.net, e1p.drg);
    CHECK(max_abs_diff(real_parts(sol.eigenvalues), {-1, 0, 1}) < 1e-9);
    REQUIRE(sol.modes.size() == 1);
    CHECK(std::abs(sol.modes[0].gamma - Complex(-1)) < 1e-9);
    CHECK(max_abs_diff(sol.ell, {0, 0.125, 0.125}) < 1e-9);
    for (double x : kGrid)
        CHECK(max_abs_diff(sol.cdf(x), {0.5 - 0.5 * std::exp(-x), 0.25 - 0.125 * std::exp(-x),
                                        0.25 - 0.125 * std::exp(-x)}) < 1e-9);
}

TEST_CASE("document preparation spectral solution against the published closed forms")
{
    auto doc = model("docprep");
    SfmSolution sol = spectral_solve(doc.net, doc.drg);
    const double s = std::sqrt(93.0);
    CHECK(max_abs_diff(real_parts(sol.eigenvalues), {-(11 + s) / 14, -1, -(11 - s) / 14, 0}) < 1e-9);
    CHECK(max_abs_diff(sol.ell, {0, 0, 0, 2.0 / 63}) < 1e-9);
    for (double x : kGrid) {
        CHECK(max_abs_diff(sol.cdf(x), docprep_closed_form(x)) < 1e-9);
        CHECK(max_abs_diff(sol.density(x), docprep_density_closed_form(x)) < 1e-9);
    }
    CHECK(max_abs_diff(sol.cdf(400), sol.phi) < 1e-12);
}

TEST_CASE("solution matches the matrix exponential oracle where R is invertible")
{
    for (const char* name : {"e1_b", "e1p_b", "docprep", "docprep-ext"}) {
        auto [net, drg] = model(name);
        RatMatrix q = transition_rate_matrix(drg), rr = fluid_rate_matrix(net, drg);
        SfmSolution sol = spectral_solve(net, drg);
        for (double x : {0.25, 0.5, 1.0, 2.0})
            CHECK(max_abs_diff(sol.cdf(x), cdf_by_matrix_exponential(q, rr, sol.ell, x)) < 1e-8);
    }
}

TEST_CASE("solution invariants on every fixture")
{
    for (const char* name : kStableNets) {
        auto [net, drg] = model(name);
        RatMatrix q = transition_rate_matrix(drg), rr = fluid_rate_matrix(net, drg);
        Eigen::MatrixXd qd = dense(q), rd = dense(rr);
        SfmSolution sol = spectral_solve(net, drg);
        const std::size_t n = sol.size();
        const double qnorm = qd.cwiseAbs().rowwise().sum().maxCoeff();

        for (const auto& m : sol.modes) {
            CHECK(m.gamma.real() < 0);
            Eigen::RowVectorXcd v(n);
            for (std::size_t i = 0; i < n; ++i)
                v(i) = m.v[i];
            Eigen::RowVectorXcd res = v * (qd.cast<Complex>() - m.gamma * rd.cast<Complex>());
            CHECK(res.cwiseAbs().maxCoeff() <= 1e-9 * v.cwiseAbs().maxCoeff() * qnorm);
        }
        for (std::size_t i = 0; i < n; ++i)
            if (sol.rp[i] > 0)
                CHECK(sol.ell[i] == 0);

        auto mass = sol.density_mass();
        double total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(std::abs(sol.ell[i] + mass[i] - sol.phi[i]) < 1e-9);
            total += sol.ell[i] + mass[i];
        }
        CHECK(std::abs(total - 1) < 1e-9);

        // Boundary equation f(0) R = ell Q.
        auto f0 = sol.density(0);
        for (std::size_t j = 0; j < n; ++j) {
            double lhs = f0[j] * rd(j, j), rhs = 0;
            for (std::size_t i = 0; i < n; ++i)
                rhs += sol.ell[i] * qd(i, j);
            CHECK(std::abs(lhs - rhs) < 1e-9);
        }

        // Monotone, bounded, and f is the derivative of F.
        std::vector<double> prev = sol.cdf(0);
        for (int k = 1; k <= 100; ++k) {
            double x = 0.1 * k;
            auto cur = sol.cdf(x);
            auto dens = sol.density(x);
            auto up = sol.cdf(x + 1e-5), down = sol.cdf(x - 1e-5);
            for (std::size_t i = 0; i < n; ++i) {
                CHECK(cur[i] >= prev[i] - 1e-12);
                CHECK(cur[i] >= -1e-12);
                CHECK(cur[i] <= sol.phi[i] + 1e-9);
                double fd = (up[i] - down[i]) / 2e-5;
                CHECK(std::abs(fd - dens[i]) <= 1e-6 * std::max(1.0, std::abs(dens[i])));
            }
            prev = cur;
        }
    }
}

TEST_CASE("monomial-exponential integrals")
{
    CHECK(std::abs(integrate_monomial_exp(0, -1.0, 0, INFINITY) - Complex(1)) < 1e-12);
    CHECK(std::abs(integrate_monomial_exp(1, -2.0, 0, INFINITY) - Complex(0.25)) < 1e-12);
    CHECK(std::abs(integrate_monomial_exp(2, -1.0, 0, INFINITY) - Complex(2)) < 1e-12);
    // int_1^2 x e^{-x} dx = 2/e - 3/e^2
    CHECK(std::abs(integrate_monomial_exp(1, -1.0, 1, 2) - Complex(2 / std::exp(1.0) - 3 / std::exp(2.0))) < 1e-12);
    CHECK_THROWS_AS(integrate_monomial_exp(0, 1.0, 0, INFINITY), Error);
}
