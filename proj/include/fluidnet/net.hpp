#pragma once

#include "fluidnet/rational.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fluidnet {

using Marking = std::vector<std::uint32_t>;

// A marking-dependent rational value: the first case whose pattern matches wins.
// A pattern lists (discrete place index, exact token count); the empty pattern matches all.
struct RateFunction {
    using Pattern = std::vector<std::pair<std::size_t, std::uint32_t>>;
    std::vector<std::pair<Pattern, Rational>> cases;

    static RateFunction constant(const Rational& value);
    bool is_constant() const;
    Rational at(const Marking& m) const;

    bool operator==(const RateFunction&) const = default;
};

struct Transition {
    std::string name;
    std::string label;
    RateFunction rate;
    std::vector<std::uint32_t> input;   // weight per discrete place, 0 = no arc
    std::vector<std::uint32_t> output;
    // Per continuous place: fluid_in is the arc (t,q), fluid_out is the arc (q,t).
    std::vector<std::optional<RateFunction>> fluid_in;
    std::vector<std::optional<RateFunction>> fluid_out;

    bool operator==(const Transition&) const = default;
};

struct Net {
    std::vector<std::string> discrete_places;
    std::vector<std::string> continuous_places;
    std::vector<Transition> transitions;
    Marking initial_marking;

    std::optional<std::size_t> discrete_place_index(const std::string& name) const;
    std::optional<std::size_t> transition_index(const std::string& name) const;
    // Sorted, duplicate-free list of transition labels.
    std::vector<std::string> actions() const;

    bool operator==(const Net&) const = default;
};

struct Diagnostic {
    std::string code;
    std::string message;
};

struct ValidationReport {
    std::vector<Diagnostic> errors;
    std::vector<Diagnostic> warnings;
    bool ok() const { return errors.empty(); }
};

Net parse_net(const std::string& text);
Net load_net(const std::string& path);
std::string serialize_net(const Net& net);
ValidationReport validate_net(const Net& net);
// Throws Error(INVALID_NET) carrying the first validation error.
void require_valid(const Net& net);

std::vector<std::size_t> enabled(const Net& net, const Marking& m);
bool is_enabled(const Net& net, const Marking& m, std::size_t t);
Marking fire(const Net& net, const Marking& m, std::size_t t);

// Fluid rate of arc (t,q) or (q,t) in marking m; zero when the arc is absent.
Rational fluid_in_rate(const Net& net, std::size_t t, std::size_t q, const Marking& m);
Rational fluid_out_rate(const Net& net, std::size_t t, std::size_t q, const Marking& m);

std::string to_string(const Marking& m);

}  // namespace fluidnet
