#include "fluidnet/error.hpp"
#include "fluidnet/logic.hpp"
#include "fluidnet/measures.hpp"
#include "fluidnet/quotient.hpp"
#include "fluidnet/sim.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace fluidnet;
using nlohmann::ordered_json;

namespace {

struct Options {
    std::string format;
    std::size_t max_states = 0;
};

std::string fmt_double(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

ordered_json rat(const Rational& r) { return to_string(r); }
ordered_json ext(const ExtRational& r) { return to_string(r); }

ordered_json rats(const RationalVector& v)
{
    ordered_json a = ordered_json::array();
    for (const auto& r : v)
        a.push_back(rat(r));
    return a;
}

ordered_json exts(const std::vector<ExtRational>& v)
{
    ordered_json a = ordered_json::array();
    for (const auto& r : v)
        a.push_back(ext(r));
    return a;
}

ordered_json matrix(const RatMatrix& m)
{
    ordered_json a = ordered_json::array();
    for (std::size_t i = 0; i < m.rows(); ++i)
        a.push_back(rats(m.row(i)));
    return a;
}

ordered_json cplx(const Complex& c) { return {{"re", c.real() + 0.0}, {"im", c.imag() + 0.0}}; }

ordered_json pmf(const Pmf& p)
{
    if (p.exact)
        return rats(*p.exact);
    return p.probs;
}

ordered_json classes(const Partition& p, bool with_side)
{
    ordered_json a = ordered_json::array();
    for (const auto& cls : p.classes) {
        ordered_json c = ordered_json::array();
        for (const auto& s : cls) {
            if (with_side)
                c.push_back({s.side, s.index});
            else
                c.push_back(s.index);
        }
        a.push_back(c);
    }
    return a;
}

std::vector<std::string> split(const std::string& text, char sep)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        auto b = item.find_first_not_of(" \t");
        auto e = item.find_last_not_of(" \t");
        out.push_back(b == std::string::npos ? "" : item.substr(b, e - b + 1));
    }
    return out;
}

Rational flag_rational(const std::string& text, const std::string& flag)
{
    try {
        return parse_rational(text);
    } catch (const Error&) {
        throw Error("USAGE", flag + ": '" + text + "' is not a rational");
    }
}

std::vector<ExtRational> flag_ext_list(const std::string& text, const std::string& flag)
{
    std::vector<ExtRational> out;
    for (const auto& item : split(text, ','))
        out.push_back(item == "inf" ? ExtRational{} : ExtRational{flag_rational(item, flag)});
    return out;
}

RationalVector flag_rational_list(const std::string& text, const std::string& flag)
{
    RationalVector out;
    for (const auto& item : split(text, ','))
        out.push_back(flag_rational(item, flag));
    return out;
}

std::vector<double> flag_double_list(const std::string& text, const std::string& flag)
{
    std::vector<double> out;
    for (const auto& item : split(text, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size())
                throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Error("USAGE", flag + ": '" + item + "' is not a number");
        }
    }
    return out;
}

std::vector<std::size_t> flag_index_list(const std::string& text, const std::string& flag)
{
    std::vector<std::size_t> out;
    for (const auto& item : split(text, ',')) {
        if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos)
            throw Error("USAGE", flag + ": '" + item + "' is not a state index");
        out.push_back(std::stoul(item));
    }
    return out;
}

Net read_net(const std::string& path)
{
    Net net = load_net(path);
    require_valid(net);
    return net;
}

void flatten_csv(const ordered_json& j, const std::string& prefix, std::ostream& out)
{
    if (j.is_object()) {
        for (const auto& [k, v] : j.items())
            flatten_csv(v, prefix.empty() ? k : prefix + "." + k, out);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i)
            flatten_csv(j[i], prefix + "[" + std::to_string(i) + "]", out);
    } else if (j.is_number_float()) {
        out << prefix << ',' << fmt_double(j.get<double>()) << '\n';
    } else if (j.is_string()) {
        out << prefix << ',' << j.get<std::string>() << '\n';
    } else {
        out << prefix << ',' << j.dump() << '\n';
    }
}

void pretty(const ordered_json& j, int indent, std::ostream& out)
{
    const std::string pad(indent, ' ');
    for (const auto& [k, v] : j.items()) {
        auto primitive = [](const auto& e) { return e.is_primitive(); };
        bool scalar_list = v.is_array() && std::all_of(v.begin(), v.end(), primitive);
        if (v.is_primitive()) {
            out << pad << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
        } else if (scalar_list) {
            out << pad << k << ": [";
            for (std::size_t i = 0; i < v.size(); ++i)
                out << (i ? ", " : "") << (v[i].is_string() ? v[i].get<std::string>() : v[i].dump());
            out << "]\n";
        } else {
            out << pad << k << ":\n";
            pretty(v, indent + 2, out);
        }
    }
}

void emit(const ordered_json& doc, const Options& opt)
{
    if (opt.format == "csv") {
        std::cout << "key,value\n";
        flatten_csv(doc, "", std::cout);
    } else if (opt.format == "pretty") {
        pretty(doc, 0, std::cout);
    } else {
        std::cout << doc.dump(2) << '\n';
    }
}

Drg explore_net(const Net& net, const Options& opt)
{
    return explore(net, opt.max_states ? opt.max_states : default_max_states());
}

int cmd_reach(const std::string& path, const Options& opt)
{
    Net net = read_net(path);
    Drg drg = explore_net(net, opt);
    ordered_json doc;
    doc["places"] = net.discrete_places;
    doc["states"] = drg.states;
    ordered_json edges = ordered_json::array();
    for (const auto& e : drg.edges)
        edges.push_back({e.source, net.transitions[e.transition].name, rat(e.rate), e.target});
    doc["edges"] = edges;
    emit(doc, opt);
    return 0;
}

int cmd_ctmc(const std::string& path, std::optional<double> transient, const Options& opt)
{
    Net net = read_net(path);
    Drg drg = explore_net(net, opt);
    RatMatrix q = transition_rate_matrix(drg);
    SojournStats stats = sojourn_stats(drg);
    ordered_json doc;
    doc["states"] = drg.states;
    doc["Q"] = matrix(q);
    doc["P"] = matrix(embedded_tpm(drg));
    doc["RE"] = rats(stats.re);
    doc["SJ"] = exts(stats.sj);
    doc["VAR"] = exts(stats.var);
    doc["phi"] = pmf(steady_state(q));
    if (transient)
        doc["transient"] = {{"delta", *transient}, {"pmf", transient_pmf(q, initial_pmf(drg.size()), *transient)}};
    emit(doc, opt);
    return 0;
}

int cmd_sfm(const std::string& path, double xmax, std::size_t points, const Options& opt)
{
    if (xmax < 0)
        throw Error("USAGE", "--xmax must be non-negative");
    if (points < 1)
        throw Error("USAGE", "--points must be positive");
    Net net = read_net(path);
    Drg drg = explore_net(net, opt);
    SfmSolution sol = spectral_solve(net, drg);
    std::vector<double> xs;
    for (std::size_t k = 0; k < points; ++k)
        xs.push_back(points == 1 ? 0.0 : xmax * static_cast<double>(k) / static_cast<double>(points - 1));

    const std::size_t n = sol.size();
    if (opt.format.empty() || opt.format == "csv") {
        std::cout << "x";
        for (std::size_t i = 0; i < n; ++i)
            std::cout << ",F" << i;
        for (std::size_t i = 0; i < n; ++i)
            std::cout << ",f" << i;
        std::cout << '\n';
        for (double x : xs) {
            std::cout << fmt_double(x);
            for (double v : sol.cdf(x))
                std::cout << ',' << fmt_double(v);
            for (double v : sol.density(x))
                std::cout << ',' << fmt_double(v);
            std::cout << '\n';
        }
        return 0;
    }
    ordered_json doc;
    doc["rp"] = rats(sol.rp);
    Pmf phi{sol.phi, sol.exact_phi};
    StabilityReport st = stability(phi, sol.rp);
    doc["mean_drift"] = st.exact_drift ? rat(*st.exact_drift) : ordered_json(st.mean_drift);
    ordered_json eig = ordered_json::array();
    for (const auto& g : sol.eigenvalues)
        eig.push_back(cplx(g));
    doc["eigenvalues"] = eig;
    ordered_json modes = ordered_json::array();
    for (const auto& m : sol.modes) {
        ordered_json v = ordered_json::array();
        for (const auto& c : m.v)
            v.push_back(cplx(c));
        modes.push_back({{"gamma", cplx(m.gamma)}, {"coefficient", cplx(m.coefficient)}, {"v", v}});
    }
    doc["modes"] = modes;
    doc["phi"] = sol.exact_phi ? rats(*sol.exact_phi) : ordered_json(sol.phi);
    doc["ell"] = sol.ell;
    ordered_json grid = ordered_json::array();
    for (double x : xs)
        grid.push_back({{"x", x}, {"F", sol.cdf(x)}, {"f", sol.density(x)}});
    doc["grid"] = grid;
    emit(doc, opt);
    return 0;
}

int cmd_bisim(const std::string& a_path, const std::string& b_path, const Options& opt)
{
    Net a = read_net(a_path), b = read_net(b_path);
    Drg ga = explore_net(a, opt), gb = explore_net(b, opt);
    BisimVerdict v = fluid_bisimulation(a, ga, b, gb);
    ordered_json doc;
    doc["equivalent"] = v.equivalent;
    doc["rounds"] = v.rounds;
    doc["separated_round"] = v.separated_round ? ordered_json(*v.separated_round) : ordered_json(nullptr);
    doc["class_count"] = v.partition.classes.size();
    doc["classes"] = classes(v.partition, true);
    emit(doc, opt);
    return 0;
}

int cmd_trace_eq(const std::string& a_path, const std::string& b_path, std::size_t depth, const std::string& key,
                 const Options& opt)
{
    if (key != "sojourn" && key != "exit-rate")
        throw Error("USAGE", "--key must be sojourn or exit-rate");
    TraceKey k = key == "sojourn" ? TraceKey::Sojourn : TraceKey::ExitRate;
    Net a = read_net(a_path), b = read_net(b_path);
    Drg ga = explore_net(a, opt), gb = explore_net(b, opt);
    TraceVerdict v = trace_equivalent(a, ga, b, gb, depth, k);
    ordered_json doc;
    doc["equivalent"] = v.equivalent;
    doc["depth"] = v.depth;
    if (v.witness) {
        doc["witness"] = {{"actions", v.witness->trace.actions},
                          {"times", exts(v.witness->trace.times)},
                          {"rates", rats(v.witness->trace.rates)},
                          {"left_prob", rat(v.witness->left_prob)},
                          {"right_prob", rat(v.witness->right_prob)}};
    } else {
        doc["witness"] = nullptr;
    }
    emit(doc, opt);
    return 0;
}

int cmd_quotient(const std::string& path, bool verify, const Options& opt)
{
    Net net = read_net(path);
    Drg drg = explore_net(net, opt);
    Partition p = largest_autobisimulation(net, drg);
    QuotientModel m = quotient_model(net, drg, p);
    ordered_json doc;
    doc["classes"] = classes(p, false);
    doc["initial_class"] = m.initial_class;
    doc["V"] = matrix(m.collector);
    doc["W"] = matrix(m.distributor);
    doc["Q"] = matrix(m.q);
    doc["R"] = matrix(m.r);
    doc["SJ"] = exts(m.sj);
    doc["VAR"] = exts(m.var);
    doc["phi"] = pmf(steady_state(m.q));
    ordered_json edges = ordered_json::array();
    for (const auto& e : m.edges)
        edges.push_back({e.source, e.action, rat(e.rate), e.target});
    doc["edges"] = edges;
    bool ok = true;
    if (verify) {
        ordered_json checks = ordered_json::array();
        for (const auto& c : verify_quotient_identities(net, drg, p)) {
            ok = ok && c.passed;
            checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
        }
        doc["checks"] = checks;
    }
    emit(doc, opt);
    if (!ok) {
        std::cerr << "error [IDENTITY_FAILED]: a quotient identity does not hold\n";
        return 1;
    }
    return 0;
}

int cmd_check(const std::string& path, const std::string& dialect, const std::string& text,
              const std::string& sojourns, const std::string& rates, std::size_t state, const Options& opt)
{
    if (dialect != "flt" && dialect != "flb")
        throw Error("USAGE", "--dialect must be flt or flb");
    Net net = read_net(path);
    Drg drg = explore_net(net, opt);
    if (state >= drg.size())
        throw Error("USAGE", "--state is out of range");
    ordered_json doc;
    if (dialect == "flt") {
        if (sojourns.empty() || rates.empty())
            throw Error("USAGE", "flt checks need --sojourns and --rates");
        FormulaPtr f = parse_formula(text, Dialect::Trace);
        auto soj = flag_ext_list(sojourns, "--sojourns");
        auto rp = flag_rational_list(rates, "--rates");
        doc["formula"] = to_string(f, Dialect::Trace);
        doc["value"] = rat(interpret_flt(net, drg, f, soj, rp, state));
    } else {
        FormulaPtr f = parse_formula(text, Dialect::Bisim);
        auto sat = satisfaction_set(net, drg, f);
        ordered_json set = ordered_json::array();
        for (std::size_t i = 0; i < sat.size(); ++i)
            if (sat[i])
                set.push_back(i);
        doc["formula"] = to_string(f, Dialect::Bisim);
        doc["satisfied"] = static_cast<bool>(sat[state]);
        doc["satisfying_states"] = set;
    }
    emit(doc, opt);
    return 0;
}

MeasureRequest request_from_json(const nlohmann::json& j)
{
    static const std::set<std::string> known{"kind",   "states", "targets",      "place",         "tokens",
                                              "transition", "level", "reward", "hybrid_reward", "trav_tokens",
                                              "token_rate"};
    MeasureRequest r;
    if (!j.is_object() || !j.contains("kind"))
        throw Error("SCHEMA", "each measure request is an object with a kind");
    for (const auto& [k, v] : j.items())
        if (!known.count(k))
            throw Error("SCHEMA", "unknown measure request key '" + k + "'");
    try {
        r.kind = j.at("kind").get<std::string>();
        if (j.contains("states"))
            r.states = j["states"].get<std::vector<std::size_t>>();
        if (j.contains("targets"))
            r.targets = j["targets"].get<std::vector<std::size_t>>();
        if (j.contains("place"))
            r.place = j["place"].get<std::string>();
        if (j.contains("tokens"))
            r.tokens = j["tokens"].get<std::uint32_t>();
        if (j.contains("transition"))
            r.transition = j["transition"].get<std::string>();
        if (j.contains("level"))
            r.level = j["level"].get<double>();
        if (j.contains("reward"))
            for (const auto& s : j["reward"])
                r.reward.push_back(parse_rational(s.get<std::string>()));
        if (j.contains("hybrid_reward"))
            for (const auto& pieces : j["hybrid_reward"]) {
                r.hybrid_reward.emplace_back();
                for (const auto& p : pieces) {
                    RewardPiece piece;
                    piece.from = p.value("from", 0.0);
                    if (p.contains("to") && !(p["to"].is_string() && p["to"] == "inf"))
                        piece.to = p["to"].get<double>();
                    piece.coeffs = p.at("coeffs").get<std::vector<double>>();
                    r.hybrid_reward.back().push_back(piece);
                }
            }
        if (j.contains("trav_tokens"))
            r.trav_tokens = parse_rational(j["trav_tokens"].get<std::string>());
        if (j.contains("token_rate"))
            r.token_rate = parse_rational(j["token_rate"].get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw Error("SCHEMA", std::string("bad measure request: ") + e.what());
    }
    return r;
}

bool is_hybrid(const std::string& kind)
{
    const auto& h = hybrid_measure_kinds();
    return std::find(h.begin(), h.end(), kind) != h.end();
}

int cmd_measures(const std::string& path, const std::vector<MeasureRequest>& requests, const Options& opt)
{
    Net net = read_net(path);
    Drg drg = explore_net(net, opt);
    std::optional<Pmf> phi;
    std::optional<SfmSolution> sol;
    ordered_json out = ordered_json::array();
    for (const auto& req : requests) {
        MeasureReport r;
        if (is_hybrid(req.kind)) {
            if (!sol)
                sol = spectral_solve(net, drg);
            r = hybrid_measure(net, drg, *sol, req);
        } else {
            if (!phi)
                phi = steady_state(transition_rate_matrix(drg));
            r = discrete_measure(net, drg, *phi, req);
        }
        ordered_json j;
        j["kind"] = r.kind;
        j["value"] = r.value;
        j["exact"] = r.exact ? rat(*r.exact) : ordered_json(nullptr);
        j["terms"] = r.terms;
        out.push_back(j);
    }
    ordered_json doc;
    doc["measures"] = out;
    emit(doc, opt);
    return 0;
}

void dump_trajectory(const Trajectory& t, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw Error("IO", "cannot write '" + path + "'");
    out << "time,state,fluid_level\n";
    if (t.segments.empty()) {
        out << "0," << t.initial_state << ",0\n";
        return;
    }
    for (const auto& s : t.segments)
        out << fmt_double(s.start) << ',' << s.state << ',' << fmt_double(s.level_start) << '\n';
    const auto& last = t.segments.back();
    out << fmt_double(last.end) << ',' << last.state << ',' << fmt_double(last.level_end) << '\n';
}

ordered_json intervals(const std::vector<Interval>& v)
{
    ordered_json a = ordered_json::array();
    for (const auto& i : v)
        a.push_back({{"mean", i.mean}, {"half_width", i.half_width}});
    return a;
}

int cmd_simulate(const std::string& path, SimConfig cfg, const std::string& grid, const std::string& dump,
                 std::size_t dump_rep, const Options& opt)
{
    if (!grid.empty())
        cfg.grid = flag_double_list(grid, "--grid");
    if (cfg.horizon < 0 || cfg.replications < 1 || cfg.warmup < 0 || cfg.warmup >= 1)
        throw Error("USAGE", "need horizon >= 0, replications >= 1 and warmup in [0,1)");
    if (!dump.empty() && dump_rep >= cfg.replications)
        throw Error("USAGE", "--dump-replication is out of range");
    Net net = read_net(path);
    Drg drg = explore_net(net, opt);
    auto runs = simulate(net, drg, cfg);
    if (!dump.empty())
        dump_trajectory(runs[dump_rep], dump);
    SimEstimate est = estimate_stationary(runs, drg.size(), cfg);
    ordered_json doc;
    doc["horizon"] = cfg.horizon;
    doc["replications"] = cfg.replications;
    doc["seed"] = cfg.seed;
    doc["grid"] = est.grid;
    doc["phi"] = intervals(est.phi);
    doc["ell"] = intervals(est.ell);
    ordered_json f = ordered_json::array();
    for (const auto& row : est.cdf)
        f.push_back(intervals(row));
    doc["F"] = f;
    emit(doc, opt);
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Analysis of stochastic Petri nets with a fluid place"};
    app.require_subcommand(1);
    app.fallthrough();
    Options opt;
    app.add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"json", "csv", "pretty"}));
    app.add_option("--max-states", opt.max_states, "Reachability state budget")->check(CLI::PositiveNumber);

    std::string net_path, other_path;
    std::function<int()> run;

    auto* reach = app.add_subcommand("reach", "Discrete reachability graph");
    reach->add_option("net", net_path)->required();
    reach->callback([&] { run = [&] { return cmd_reach(net_path, opt); }; });

    std::optional<double> transient;
    auto* ctmc = app.add_subcommand("ctmc", "Underlying CTMC, sojourn statistics and steady state");
    ctmc->add_option("net", net_path)->required();
    ctmc->add_option("--transient", transient, "Also report the PMF at this time")->check(CLI::NonNegativeNumber);
    ctmc->callback([&] { run = [&] { return cmd_ctmc(net_path, transient, opt); }; });

    double xmax = 10;
    std::size_t points = 101;
    auto* sfm = app.add_subcommand("sfm", "Stationary fluid distribution");
    sfm->add_option("net", net_path)->required();
    sfm->add_option("--xmax", xmax, "Largest fluid level on the grid");
    sfm->add_option("--points", points, "Number of grid points");
    sfm->callback([&] { run = [&] { return cmd_sfm(net_path, xmax, points, opt); }; });

    auto* bisim = app.add_subcommand("bisim", "Fluid bisimulation of two nets");
    bisim->add_option("left", net_path)->required();
    bisim->add_option("right", other_path)->required();
    bisim->callback([&] { run = [&] { return cmd_bisim(net_path, other_path, opt); }; });

    std::size_t trace_depth = 6;
    std::string trace_key = "sojourn";
    auto* trace = app.add_subcommand("trace-eq", "Fluid trace equivalence of two nets up to a depth");
    trace->add_option("left", net_path)->required();
    trace->add_option("right", other_path)->required();
    trace->add_option("--depth", trace_depth, "Maximal trace length");
    trace->add_option("--key", trace_key, "Timing key: sojourn or exit-rate");
    trace->callback([&] { run = [&] { return cmd_trace_eq(net_path, other_path, trace_depth, trace_key, opt); }; });

    bool verify = false;
    auto* quot = app.add_subcommand("quotient", "Quotient by the largest fluid autobisimulation");
    quot->add_option("net", net_path)->required();
    quot->add_flag("--verify", verify, "Check the lumping identities");
    quot->callback([&] { run = [&] { return cmd_quotient(net_path, verify, opt); }; });

    std::string dialect = "flb", formula, sojourns, rates;
    std::size_t state = 0;
    auto* check = app.add_subcommand("check", "Evaluate a logic formula");
    check->add_option("net", net_path)->required();
    check->add_option("--dialect", dialect, "flt (trace) or flb (bisimulation)");
    check->add_option("--formula", formula, "Formula text")->required();
    check->add_option("--sojourns", sojourns, "Comma separated sojourn times, inf allowed");
    check->add_option("--rates", rates, "Comma separated fluid rates");
    check->add_option("--state", state, "Marking index");
    check->callback([&] { run = [&] { return cmd_check(net_path, dialect, formula, sojourns, rates, state, opt); }; });

    MeasureRequest single;
    std::string batch, states_flag, targets_flag, reward_flag, trav_flag, token_rate_flag;
    std::optional<std::uint32_t> tokens;
    std::optional<double> level;
    auto* meas = app.add_subcommand("measures", "Performance measures");
    meas->add_option("net", net_path)->required();
    meas->add_option("--kind", single.kind, "Measure kind");
    meas->add_option("--states", states_flag, "Comma separated marking indices");
    meas->add_option("--targets", targets_flag, "Comma separated target marking indices");
    meas->add_option("--place", single.place, "Discrete place");
    meas->add_option("--tokens", tokens, "Token count");
    meas->add_option("--transition", single.transition, "Transition name");
    meas->add_option("--level", level, "Fluid level");
    meas->add_option("--reward", reward_flag, "Comma separated rewards per marking");
    meas->add_option("--trav-tokens", trav_flag, "Mean number of tokens");
    meas->add_option("--token-rate", token_rate_flag, "Token throughput");
    meas->add_option("--batch", batch, "JSON file with a list of requests");
    meas->callback([&] {
        run = [&] {
            std::vector<MeasureRequest> reqs;
            if (!batch.empty()) {
                if (!single.kind.empty())
                    throw Error("USAGE", "--batch and --kind are exclusive");
                std::ifstream in(batch);
                if (!in)
                    throw Error("IO", "cannot read '" + batch + "'");
                nlohmann::json j;
                try {
                    in >> j;
                } catch (const nlohmann::json::exception& e) {
                    throw Error("SYNTAX", std::string("batch file: ") + e.what());
                }
                if (!j.is_array())
                    throw Error("SCHEMA", "batch file holds a list of requests");
                for (const auto& r : j)
                    reqs.push_back(request_from_json(r));
            } else {
                if (single.kind.empty())
                    throw Error("USAGE", "--kind or --batch is required");
                if (!states_flag.empty())
                    single.states = flag_index_list(states_flag, "--states");
                if (!targets_flag.empty())
                    single.targets = flag_index_list(targets_flag, "--targets");
                if (!reward_flag.empty())
                    single.reward = flag_rational_list(reward_flag, "--reward");
                if (!trav_flag.empty())
                    single.trav_tokens = flag_rational(trav_flag, "--trav-tokens");
                if (!token_rate_flag.empty())
                    single.token_rate = flag_rational(token_rate_flag, "--token-rate");
                single.tokens = tokens;
                single.level = level;
                reqs.push_back(single);
            }
            return cmd_measures(net_path, reqs, opt);
        };
    });

    SimConfig cfg;
    std::string grid, dump;
    std::size_t dump_rep = 0;
    auto* sim = app.add_subcommand("simulate", "Monte-Carlo estimates of the stationary quantities");
    sim->add_option("net", net_path)->required();
    sim->add_option("--horizon", cfg.horizon, "Simulated time per replication");
    sim->add_option("--replications", cfg.replications, "Number of replications");
    sim->add_option("--warmup", cfg.warmup, "Discarded fraction of the horizon");
    sim->add_option("--seed", cfg.seed, "Random seed");
    sim->add_option("--grid", grid, "Comma separated fluid levels for the distribution");
    sim->add_option("--threads", cfg.threads, "Worker threads, 0 for all cores");
    sim->add_option("--dump", dump, "Write one trajectory as CSV");
    sim->add_option("--dump-replication", dump_rep, "Replication written by --dump");
    sim->callback([&] { run = [&] { return cmd_simulate(net_path, cfg, grid, dump, dump_rep, opt); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        return run();
    } catch (const Error& e) {
        std::cerr << "error [" << e.code() << "]: " << e.what() << '\n';
        return e.code() == "USAGE" ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error [INTERNAL]: " << e.what() << '\n';
        return 1;
    }
}
