#include "fluidnet/quotient.hpp"

#include "fluidnet/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fluidnet {

namespace {

std::vector<std::size_t> class_index(const Partition& p, std::size_t n)
{
    std::vector<std::size_t> cls(n, SIZE_MAX);
    for (std::size_t c = 0; c < p.classes.size(); ++c)
        for (const auto& m : p.classes[c]) {
            if (m.side != 0 || m.index >= n || cls[m.index] != SIZE_MAX)
                throw Error("BAD_PARTITION", "partition does not match the reachability graph");
            cls[m.index] = c;
        }
    if (std::count(cls.begin(), cls.end(), SIZE_MAX))
        throw Error("BAD_PARTITION", "partition does not cover every discrete marking");
    return cls;
}

// Class-level edges, rates and RP taken from the smallest member of each class.
QuotientModel representative_quotient(const Net& net, const Drg& drg, const Partition& p)
{
    const std::size_t l = p.classes.size();
    const auto cls = class_index(p, drg.size());
    const RationalVector rp = potential_rates(net, drg);

    QuotientModel m;
    m.partition = p;
    std::tie(m.collector, m.distributor) = collector_distributor(p, drg.size());
    m.q = RatMatrix(l, l);
    m.rp.resize(l);
    m.initial_class = cls[0];
    for (std::size_t k = 0; k < l; ++k) {
        std::size_t rep = p.classes[k].front().index;
        m.rp[k] = rp[rep];
        std::map<std::pair<std::string, std::size_t>, Rational> rates;
        for (std::size_t e : drg.out_edges[rep]) {
            const auto& edge = drg.edges[e];
            rates[{net.transitions[edge.transition].label, cls[edge.target]}] += edge.rate;
        }
        Rational re = 0;
        for (const auto& [key, rate] : rates) {
            m.edges.push_back({k, key.first, rate, key.second});
            re += rate;
            if (key.second != k) {
                m.q(k, key.second) += rate;
                m.q(k, k) -= rate;
            }
        }
        if (re == 0) {
            m.sj.emplace_back(std::nullopt);
            m.var.emplace_back(std::nullopt);
        } else {
            m.sj.emplace_back(Rational(1 / re));
            m.var.emplace_back(Rational(1 / (re * re)));
        }
    }
    m.r = RatMatrix::diagonal(m.rp);
    return m;
}

std::string describe(const RatMatrix& a)
{
    std::ostringstream out;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        out << (i ? "; " : "");
        for (std::size_t j = 0; j < a.cols(); ++j)
            out << (j ? " " : "") << to_string(a(i, j));
    }
    return out.str();
}

}  // namespace

Partition largest_autobisimulation(const Net& net, const Drg& drg)
{
    return coarsest_fluid_bisimulation({&net}, {&drg});
}

std::pair<RatMatrix, RatMatrix> collector_distributor(const Partition& p, std::size_t n)
{
    const auto cls = class_index(p, n);
    const std::size_t l = p.classes.size();
    RatMatrix v(n, l), w(l, n);
    for (std::size_t i = 0; i < n; ++i)
        v(i, cls[i]) = 1;
    for (std::size_t k = 0; k < l; ++k)
        for (const auto& m : p.classes[k])
            w(k, m.index) = Rational(1, p.classes[k].size());
    return {v, w};
}

QuotientModel quotient_model(const Net& net, const Drg& drg, const Partition& p)
{
    if (!is_fluid_bisimulation({&net}, {&drg}, p))
        throw Error("PARTITION_NOT_STABLE", "partition is not a fluid autobisimulation");
    return representative_quotient(net, drg, p);
}

QuotientFunctions quotient_functions(const Partition& p, const SfmSolution& sol)
{
    const std::size_t n = sol.size();
    const auto cls = class_index(p, n);
    const std::size_t l = p.classes.size();
    auto aggregate = [cls, l](const std::vector<double>& x) {
        std::vector<double> out(l, 0.0);
        for (std::size_t i = 0; i < x.size(); ++i)
            out[cls[i]] += x[i];
        return out;
    };
    QuotientFunctions f;
    f.phi = aggregate(sol.phi);
    f.ell = aggregate(sol.ell);
    if (sol.exact_phi) {
        RationalVector exact(l, Rational(0));
        for (std::size_t i = 0; i < n; ++i)
            exact[cls[i]] += (*sol.exact_phi)[i];
        f.exact_phi = exact;
    }
    f.cdf = [sol, aggregate](double x) { return aggregate(sol.cdf(x)); };
    f.density = [sol, aggregate](double x) { return aggregate(sol.density(x)); };
    return f;
}

std::vector<IdentityCheck> verify_quotient_identities(const Net& net, const Drg& drg, const Partition& p)
{
    std::vector<IdentityCheck> checks;
    auto add = [&](const std::string& name, bool ok, const std::string& detail = "") {
        checks.push_back({name, ok, detail});
    };

    const QuotientModel m = representative_quotient(net, drg, p);
    const RatMatrix& v = m.collector;
    const RatMatrix& w = m.distributor;
    const RatMatrix q = transition_rate_matrix(drg);
    const RatMatrix r = fluid_rate_matrix(net, drg);
    const std::size_t l = p.classes.size();

    auto matrix_check = [&](const std::string& name, const RatMatrix& lhs, const RatMatrix& rhs) {
        bool ok = lhs == rhs;
        add(name, ok, ok ? "" : describe(lhs) + " vs " + describe(rhs));
    };
    matrix_check("WV=I", w * v, RatMatrix::identity(l));
    matrix_check("QV=VQq", q * v, v * m.q);
    matrix_check("RV=VRq", r * v, v * m.r);
    matrix_check("WQV=Qq", w * q * v, m.q);
    matrix_check("WRV=Rq", w * r * v, m.r);

    const SojournStats stats = sojourn_stats(drg);
    auto ext_check = [&](const std::string& name, const std::vector<ExtRational>& full,
                         const std::vector<ExtRational>& quotient) {
        bool finite = std::all_of(full.begin(), full.end(), [](const auto& x) { return x.has_value(); });
        bool ok = true;
        std::string detail;
        if (finite) {
            RationalVector d;
            for (const auto& x : full)
                d.push_back(*x);
            RationalVector ones(l, Rational(1));
            RationalVector lhs = ones * (w * RatMatrix::diagonal(d) * v);
            for (std::size_t k = 0; k < l; ++k)
                if (!quotient[k] || lhs[k] != *quotient[k]) {
                    ok = false;
                    detail = "class " + std::to_string(k) + ": " + to_string(lhs[k]) + " vs " + to_string(quotient[k]);
                }
        } else {
            // Terminal markings: compare member values with the class value directly.
            for (std::size_t k = 0; k < l; ++k)
                for (const auto& mem : p.classes[k])
                    if (full[mem.index] != quotient[k]) {
                        ok = false;
                        detail = "class " + std::to_string(k);
                    }
        }
        add(name, ok, detail);
    };
    ext_check("1WDiag(SJ)V=SJq", stats.sj, m.sj);
    ext_check("1WDiag(VAR)V=VARq", stats.var, m.var);

    try {
        const SfmSolution sol = spectral_solve(q, potential_rates(net, drg));
        const QuotientFunctions f = quotient_functions(p, sol);
        if (f.exact_phi) {
            RationalVector residual = *f.exact_phi * m.q;
            bool ok = std::all_of(residual.begin(), residual.end(), [](const Rational& x) { return x == 0; });
            add("phiq Qq=0", ok);
            Pmf direct = steady_state(m.q);
            add("phiq=steady_state(Qq)", direct.exact && *direct.exact == *f.exact_phi);
        }
        bool ode_ok = true;
        std::string detail;
        for (double x : {0.0, 0.5, 1.0, 2.0, 5.0}) {
            auto fx = f.density(x);
            auto cx = f.cdf(x);
            // Finite-difference check of the quotient ODE dFq/dx Rq = Fq Qq.
            const double h = 1e-5;
            auto plus = f.cdf(x + h);
            auto minus = x >= h ? f.cdf(x - h) : f.cdf(x);
            double span = x >= h ? 2 * h : h;
            for (std::size_t k = 0; k < l; ++k) {
                double lhs = (plus[k] - minus[k]) / span * m.rp[k].get_d();
                double lhs_exact = fx[k] * m.rp[k].get_d();
                double rhs = 0;
                for (std::size_t j = 0; j < l; ++j)
                    rhs += cx[j] * m.q(j, k).get_d();
                if (std::abs(lhs_exact - rhs) > 1e-9 || std::abs(lhs - rhs) > 1e-4) {
                    ode_ok = false;
                    detail = "x=" + std::to_string(x) + " class " + std::to_string(k);
                }
            }
        }
        add("dFq/dx Rq=Fq Qq", ode_ok, detail);
    } catch (const Error& e) {
        add("fluid solution", false, e.code() + ": " + e.what());
    }
    return checks;
}

LabeledGraph ctmc_graph(const RatMatrix& q, const RationalVector& rp, std::size_t initial)
{
    LabeledGraph g;
    g.initial = initial;
    for (std::size_t i = 0; i < q.rows(); ++i) {
        g.vertex_labels.push_back(to_string(rp[i]));
        for (std::size_t j = 0; j < q.cols(); ++j)
            if (i != j && q(i, j) != 0)
                g.edge_labels[{i, j}] = to_string(q(i, j));
    }
    return g;
}

LabeledGraph quotient_graph(const QuotientModel& m)
{
    LabeledGraph g;
    g.initial = m.initial_class;
    for (const auto& rp : m.rp)
        g.vertex_labels.push_back(to_string(rp));
    std::map<std::pair<std::size_t, std::size_t>, std::vector<std::string>> labels;
    for (const auto& e : m.edges)
        labels[{e.source, e.target}].push_back(e.action + ":" + to_string(e.rate));
    for (auto& [key, parts] : labels) {
        std::sort(parts.begin(), parts.end());
        std::string joined;
        for (const auto& s : parts)
            joined += (joined.empty() ? "" : ",") + s;
        g.edge_labels[key] = joined;
    }
    return g;
}

std::optional<std::vector<std::size_t>> find_isomorphism(const LabeledGraph& a, const LabeledGraph& b)
{
    const std::size_t n = a.vertex_labels.size();
    if (n > kIsomorphismLimit || b.vertex_labels.size() > kIsomorphismLimit)
        throw Error("ISOMORPHISM_LIMIT", "isomorphism search is limited to " + std::to_string(kIsomorphismLimit) +
                                             " states");
    if (b.vertex_labels.size() != n || a.edge_labels.size() != b.edge_labels.size())
        return std::nullopt;
    if (n == 0)
        return std::vector<std::size_t>{};

    auto label = [](const LabeledGraph& g, std::size_t i, std::size_t j) -> std::string {
        auto it = g.edge_labels.find({i, j});
        return it == g.edge_labels.end() ? std::string() : it->second;
    };
    std::vector<std::size_t> order{a.initial};
    for (std::size_t i = 0; i < n; ++i)
        if (i != a.initial)
            order.push_back(i);

    std::vector<std::size_t> map(n, SIZE_MAX);
    std::vector<bool> used(n, false);
    auto extend = [&](auto&& self, std::size_t depth) -> bool {
        if (depth == n)
            return true;
        std::size_t u = order[depth];
        for (std::size_t cand = 0; cand < n; ++cand) {
            if (used[cand] || a.vertex_labels[u] != b.vertex_labels[cand])
                continue;
            if (depth == 0 && cand != b.initial)
                continue;
            bool ok = label(a, u, u) == label(b, cand, cand);
            for (std::size_t k = 0; ok && k < depth; ++k) {
                std::size_t x = order[k];
                ok = label(a, u, x) == label(b, cand, map[x]) && label(a, x, u) == label(b, map[x], cand);
            }
            if (!ok)
                continue;
            map[u] = cand;
            used[cand] = true;
            if (self(self, depth + 1))
                return true;
            used[cand] = false;
            map[u] = SIZE_MAX;
        }
        return false;
    };
    if (!extend(extend, 0))
        return std::nullopt;
    return map;
}

}  // namespace fluidnet
