#include "fluidnet/net.hpp"

#include "fluidnet/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace fluidnet {

using json = nlohmann::ordered_json;

RateFunction RateFunction::constant(const Rational& value)
{
    RateFunction f;
    f.cases.push_back({{}, value});
    return f;
}

bool RateFunction::is_constant() const
{
    return cases.size() == 1 && cases.front().first.empty();
}

Rational RateFunction::at(const Marking& m) const
{
    for (const auto& [pattern, value] : cases) {
        bool match = std::all_of(pattern.begin(), pattern.end(), [&](const auto& pc) {
            return pc.first < m.size() && m[pc.first] == pc.second;
        });
        if (match)
            return value;
    }
    throw Error("RATE_UNDEFINED", "no rate case matches marking " + to_string(m));
}

std::optional<std::size_t> Net::discrete_place_index(const std::string& name) const
{
    auto it = std::find(discrete_places.begin(), discrete_places.end(), name);
    if (it == discrete_places.end())
        return std::nullopt;
    return static_cast<std::size_t>(it - discrete_places.begin());
}

std::optional<std::size_t> Net::transition_index(const std::string& name) const
{
    for (std::size_t i = 0; i < transitions.size(); ++i)
        if (transitions[i].name == name)
            return i;
    return std::nullopt;
}

std::vector<std::string> Net::actions() const
{
    std::set<std::string> labels;
    for (const auto& t : transitions)
        labels.insert(t.label);
    return {labels.begin(), labels.end()};
}

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& what)
{
    throw Error("SCHEMA", path + ": " + what);
}

void require_keys(const json& obj, const std::string& path, std::initializer_list<const char*> required,
                  std::initializer_list<const char*> optional)
{
    if (!obj.is_object())
        schema_error(path, "expected an object");
    for (const char* key : required)
        if (!obj.contains(key))
            schema_error(path, std::string("missing key '") + key + "'");
    for (const auto& item : obj.items()) {
        auto known = [&](std::initializer_list<const char*> keys) {
            return std::any_of(keys.begin(), keys.end(), [&](const char* k) { return item.key() == k; });
        };
        if (!known(required) && !known(optional))
            schema_error(path, "unknown key '" + item.key() + "'");
    }
}

std::vector<std::string> parse_names(const json& j, const std::string& path)
{
    if (!j.is_array())
        schema_error(path, "expected an array of strings");
    std::vector<std::string> names;
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_string())
            schema_error(path + "/" + std::to_string(i), "expected a string");
        names.push_back(j[i].get<std::string>());
    }
    return names;
}

std::uint32_t parse_natural(const json& j, const std::string& path)
{
    if (!j.is_number_integer() || j.get<long long>() < 0 || j.get<long long>() > UINT32_MAX)
        schema_error(path, "expected a natural number");
    return static_cast<std::uint32_t>(j.get<long long>());
}

Rational parse_rational_at(const json& j, const std::string& path)
{
    if (!j.is_string())
        schema_error(path, "expected a rational string");
    try {
        return parse_rational(j.get<std::string>());
    } catch (const Error& e) {
        schema_error(path, e.what());
    }
}

std::size_t place_at(const Net& net, const std::string& name, const std::string& path)
{
    auto idx = net.discrete_place_index(name);
    if (!idx)
        schema_error(path, "unknown discrete place '" + name + "'");
    return *idx;
}

RateFunction parse_rate_function(const Net& net, const json& j, const std::string& path)
{
    if (j.is_string())
        return RateFunction::constant(parse_rational_at(j, path));
    if (!j.is_array() || j.empty())
        schema_error(path, "expected a rational string or a nonempty list of cases");
    RateFunction f;
    for (std::size_t i = 0; i < j.size(); ++i) {
        std::string cpath = path + "/" + std::to_string(i);
        require_keys(j[i], cpath, {"value"}, {"when"});
        RateFunction::Pattern pattern;
        if (j[i].contains("when")) {
            const json& when = j[i]["when"];
            if (!when.is_object())
                schema_error(cpath + "/when", "expected an object");
            for (const auto& item : when.items())
                pattern.push_back({place_at(net, item.key(), cpath + "/when"),
                                   parse_natural(item.value(), cpath + "/when/" + item.key())});
        }
        f.cases.push_back({pattern, parse_rational_at(j[i]["value"], cpath + "/value")});
    }
    return f;
}

std::vector<std::uint32_t> parse_weights(const Net& net, const json& j, const std::string& path)
{
    std::vector<std::uint32_t> w(net.discrete_places.size(), 0);
    if (!j.is_object())
        schema_error(path, "expected an object");
    for (const auto& item : j.items())
        w[place_at(net, item.key(), path)] = parse_natural(item.value(), path + "/" + item.key());
    return w;
}

std::vector<std::optional<RateFunction>> parse_fluid(const Net& net, const json& j, const std::string& path)
{
    std::vector<std::optional<RateFunction>> arcs(net.continuous_places.size());
    if (!j.is_object())
        schema_error(path, "expected an object");
    for (const auto& item : j.items()) {
        auto it = std::find(net.continuous_places.begin(), net.continuous_places.end(), item.key());
        if (it == net.continuous_places.end())
            schema_error(path, "unknown continuous place '" + item.key() + "'");
        arcs[it - net.continuous_places.begin()] = parse_rate_function(net, item.value(), path + "/" + item.key());
    }
    return arcs;
}

json rate_to_json(const Net& net, const RateFunction& f)
{
    if (f.is_constant())
        return to_string(f.cases.front().second);
    json cases = json::array();
    for (const auto& [pattern, value] : f.cases) {
        json c = json::object();
        if (!pattern.empty()) {
            json when = json::object();
            for (const auto& [place, count] : pattern)
                when[net.discrete_places[place]] = count;
            c["when"] = when;
        }
        c["value"] = to_string(value);
        cases.push_back(c);
    }
    return cases;
}

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte)
{
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

}  // namespace

Net parse_net(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
        throw Error("SYNTAX", "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + e.what());
    }
    require_keys(doc, "", {"discrete_places", "continuous_places", "initial_marking", "transitions"}, {});

    Net net;
    net.discrete_places = parse_names(doc["discrete_places"], "/discrete_places");
    net.continuous_places = parse_names(doc["continuous_places"], "/continuous_places");

    const json& init = doc["initial_marking"];
    if (!init.is_array())
        schema_error("/initial_marking", "expected an array of naturals");
    for (std::size_t i = 0; i < init.size(); ++i)
        net.initial_marking.push_back(parse_natural(init[i], "/initial_marking/" + std::to_string(i)));

    const json& ts = doc["transitions"];
    if (!ts.is_array())
        schema_error("/transitions", "expected an array");
    for (std::size_t i = 0; i < ts.size(); ++i) {
        std::string path = "/transitions/" + std::to_string(i);
        const json& tj = ts[i];
        require_keys(tj, path, {"name", "label", "rate"}, {"in", "out", "fluid_in", "fluid_out"});
        Transition t;
        if (!tj["name"].is_string())
            schema_error(path + "/name", "expected a string");
        if (!tj["label"].is_string())
            schema_error(path + "/label", "expected a string");
        t.name = tj["name"].get<std::string>();
        t.label = tj["label"].get<std::string>();
        t.rate = parse_rate_function(net, tj["rate"], path + "/rate");
        t.input = parse_weights(net, tj.value("in", json::object()), path + "/in");
        t.output = parse_weights(net, tj.value("out", json::object()), path + "/out");
        t.fluid_in = parse_fluid(net, tj.value("fluid_in", json::object()), path + "/fluid_in");
        t.fluid_out = parse_fluid(net, tj.value("fluid_out", json::object()), path + "/fluid_out");
        net.transitions.push_back(std::move(t));
    }
    return net;
}

Net load_net(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("IO", "cannot read " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_net(buffer.str());
}

std::string serialize_net(const Net& net)
{
    json doc = json::object();
    doc["discrete_places"] = net.discrete_places;
    doc["continuous_places"] = net.continuous_places;
    doc["initial_marking"] = net.initial_marking;
    json ts = json::array();
    for (const auto& t : net.transitions) {
        json tj = json::object();
        tj["name"] = t.name;
        tj["label"] = t.label;
        tj["rate"] = rate_to_json(net, t.rate);
        json in = json::object(), out = json::object(), fin = json::object(), fout = json::object();
        for (std::size_t p = 0; p < net.discrete_places.size(); ++p) {
            if (p < t.input.size() && t.input[p] > 0)
                in[net.discrete_places[p]] = t.input[p];
            if (p < t.output.size() && t.output[p] > 0)
                out[net.discrete_places[p]] = t.output[p];
        }
        for (std::size_t q = 0; q < net.continuous_places.size(); ++q) {
            if (q < t.fluid_in.size() && t.fluid_in[q])
                fin[net.continuous_places[q]] = rate_to_json(net, *t.fluid_in[q]);
            if (q < t.fluid_out.size() && t.fluid_out[q])
                fout[net.continuous_places[q]] = rate_to_json(net, *t.fluid_out[q]);
        }
        tj["in"] = in;
        tj["out"] = out;
        tj["fluid_in"] = fin;
        tj["fluid_out"] = fout;
        ts.push_back(tj);
    }
    doc["transitions"] = ts;
    return doc.dump(2) + "\n";
}

ValidationReport validate_net(const Net& net)
{
    ValidationReport report;
    auto error = [&](const std::string& code, const std::string& msg) { report.errors.push_back({code, msg}); };

    std::set<std::string> names;
    auto claim = [&](const std::string& name, const char* kind) {
        if (name.empty())
            error("EMPTY_NAME", std::string("empty ") + kind + " name");
        else if (!names.insert(name).second)
            error("DUPLICATE_NAME", "name '" + name + "' is used more than once");
    };
    for (const auto& p : net.discrete_places)
        claim(p, "discrete place");
    for (const auto& q : net.continuous_places)
        claim(q, "continuous place");
    for (const auto& t : net.transitions)
        claim(t.name, "transition");
    if (names.empty())
        error("EMPTY_NET", "the net has no places and no transitions");

    if (net.initial_marking.size() != net.discrete_places.size())
        error("MARKING_LENGTH", "initial marking has " + std::to_string(net.initial_marking.size()) +
                                    " entries for " + std::to_string(net.discrete_places.size()) + " places");

    const std::size_t np = net.discrete_places.size();
    const std::size_t nq = net.continuous_places.size();
    for (const auto& t : net.transitions) {
        if (t.label.empty())
            error("EMPTY_LABEL", "transition '" + t.name + "' has no action label");
        if (t.input.size() != np || t.output.size() != np)
            error("WEIGHT_LENGTH", "transition '" + t.name + "' has malformed arc weights");
        if (t.fluid_in.size() != nq || t.fluid_out.size() != nq)
            error("FLUID_LENGTH", "transition '" + t.name + "' has malformed continuous arcs");
        if (t.rate.cases.empty())
            error("RATE_MISSING", "transition '" + t.name + "' has no rate");
        for (const auto& [pattern, value] : t.rate.cases)
            if (value <= 0)
                error("RATE_NOT_POSITIVE", "transition '" + t.name + "' has rate " + to_string(value));
        auto check_fluid = [&](const std::vector<std::optional<RateFunction>>& arcs) {
            for (const auto& arc : arcs) {
                if (!arc)
                    continue;
                for (const auto& [pattern, value] : arc->cases)
                    if (value < 0)
                        error("FLUID_RATE_NEGATIVE",
                              "transition '" + t.name + "' has fluid rate " + to_string(value));
            }
        };
        check_fluid(t.fluid_in);
        check_fluid(t.fluid_out);
        auto check_patterns = [&](const RateFunction& f) {
            for (const auto& [pattern, value] : f.cases)
                for (const auto& [place, count] : pattern)
                    if (place >= np)
                        error("PATTERN_PLACE", "transition '" + t.name + "' has a rate case on an unknown place");
        };
        check_patterns(t.rate);
    }

    if (nq != 1)
        report.warnings.push_back({"MULTI_CONTINUOUS", "the net has " + std::to_string(nq) +
                                                           " continuous places; equivalence analyses need exactly 1"});
    return report;
}

void require_valid(const Net& net)
{
    auto report = validate_net(net);
    if (!report.ok())
        throw Error(report.errors.front().code, report.errors.front().message);
}

bool is_enabled(const Net& net, const Marking& m, std::size_t t)
{
    const auto& in = net.transitions[t].input;
    for (std::size_t p = 0; p < in.size(); ++p)
        if (in[p] > m[p])
            return false;
    return true;
}

std::vector<std::size_t> enabled(const Net& net, const Marking& m)
{
    if (m.size() != net.discrete_places.size())
        throw Error("DIMENSION_MISMATCH", "marking has " + std::to_string(m.size()) + " entries for " +
                                              std::to_string(net.discrete_places.size()) + " places");
    std::vector<std::size_t> out;
    for (std::size_t t = 0; t < net.transitions.size(); ++t)
        if (is_enabled(net, m, t))
            out.push_back(t);
    return out;
}

Marking fire(const Net& net, const Marking& m, std::size_t t)
{
    if (m.size() != net.discrete_places.size())
        throw Error("DIMENSION_MISMATCH", "marking dimension does not match the net");
    if (t >= net.transitions.size() || !is_enabled(net, m, t))
        throw Error("NOT_ENABLED", "transition is not enabled in " + to_string(m));
    const auto& tr = net.transitions[t];
    Marking next = m;
    for (std::size_t p = 0; p < next.size(); ++p)
        next[p] = next[p] - tr.input[p] + tr.output[p];
    return next;
}

Rational fluid_in_rate(const Net& net, std::size_t t, std::size_t q, const Marking& m)
{
    const auto& arc = net.transitions[t].fluid_in[q];
    return arc ? arc->at(m) : Rational(0);
}

Rational fluid_out_rate(const Net& net, std::size_t t, std::size_t q, const Marking& m)
{
    const auto& arc = net.transitions[t].fluid_out[q];
    return arc ? arc->at(m) : Rational(0);
}

std::string to_string(const Marking& m)
{
    std::string s = "(";
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (i)
            s += ",";
        s += std::to_string(m[i]);
    }
    return s + ")";
}

}  // namespace fluidnet
