#pragma once

#include "fluidnet/ctmc.hpp"

#include <memory>

namespace fluidnet {

enum class Dialect { Trace, Bisim };

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
    enum class Kind { Top, Not, And, Nabla, Rate, Diamond };
    Kind kind;
    std::string action;         // Nabla, Diamond
    Rational value;             // Rate: fluid rate; Diamond: rate bound (unused in the trace dialect)
    FormulaPtr left, right;     // Not/Diamond use left

    static FormulaPtr top();
    static FormulaPtr negation(FormulaPtr f);
    static FormulaPtr conjunction(FormulaPtr a, FormulaPtr b);
    static FormulaPtr disjunction(FormulaPtr a, FormulaPtr b);
    static FormulaPtr nabla(std::string action);
    static FormulaPtr rate(Rational r);
    static FormulaPtr diamond(std::string action, FormulaPtr f, Rational bound = 0);
};

FormulaPtr parse_formula(const std::string& text, Dialect dialect);
std::string to_string(const FormulaPtr& f, Dialect dialect);
std::size_t depth(const FormulaPtr& f);

// Diamond-only formula for an action sequence, and the sequence of a diamond-only formula.
FormulaPtr trace_formula(const std::vector<std::string>& actions);
std::vector<std::string> trace_actions(const FormulaPtr& f);

Rational selective_pt(const Net& net, const Drg& drg, std::size_t state, const std::vector<std::string>& actions,
                      const std::vector<ExtRational>& sojourns, const RationalVector& rates);

Rational interpret_flt(const Net& net, const Drg& drg, const FormulaPtr& f, const std::vector<ExtRational>& sojourns,
                       const RationalVector& rates, std::size_t state = 0);

bool satisfies_flb(const Net& net, const Drg& drg, std::size_t state, const FormulaPtr& f);
// Satisfaction of f in every marking, computed bottom-up.
std::vector<bool> satisfaction_set(const Net& net, const Drg& drg, const FormulaPtr& f);

}  // namespace fluidnet
