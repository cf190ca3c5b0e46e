#include "fluidnet/logic.hpp"

#include "fluidnet/error.hpp"
#include "fluidnet/sfm.hpp"

#include <cctype>

namespace fluidnet {

FormulaPtr Formula::top()
{
    return std::make_shared<const Formula>(Formula{Kind::Top, {}, 0, nullptr, nullptr});
}

FormulaPtr Formula::negation(FormulaPtr f)
{
    return std::make_shared<const Formula>(Formula{Kind::Not, {}, 0, std::move(f), nullptr});
}

FormulaPtr Formula::conjunction(FormulaPtr a, FormulaPtr b)
{
    return std::make_shared<const Formula>(Formula{Kind::And, {}, 0, std::move(a), std::move(b)});
}

FormulaPtr Formula::disjunction(FormulaPtr a, FormulaPtr b)
{
    return negation(conjunction(negation(std::move(a)), negation(std::move(b))));
}

FormulaPtr Formula::nabla(std::string action)
{
    return std::make_shared<const Formula>(Formula{Kind::Nabla, std::move(action), 0, nullptr, nullptr});
}

FormulaPtr Formula::rate(Rational r)
{
    return std::make_shared<const Formula>(Formula{Kind::Rate, {}, std::move(r), nullptr, nullptr});
}

FormulaPtr Formula::diamond(std::string action, FormulaPtr f, Rational bound)
{
    return std::make_shared<const Formula>(Formula{Kind::Diamond, std::move(action), std::move(bound), std::move(f),
                                                   nullptr});
}

namespace {

class Parser {
public:
    Parser(const std::string& text, Dialect dialect) : s_(text), dialect_(dialect) {}

    FormulaPtr parse()
    {
        FormulaPtr f = dialect_ == Dialect::Trace ? trace_formula() : disjunction();
        skip();
        if (pos_ != s_.size())
            fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return f;
    }

private:
    [[noreturn]] void fail(const std::string& what) const
    {
        throw Error("SYNTAX", "formula position " + std::to_string(pos_) + ": " + what);
    }

    void skip()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
    }

    bool accept(char c)
    {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c)
    {
        if (!accept(c))
            fail(std::string("expected '") + c + "'");
    }

    bool peek_word(const std::string& w)
    {
        skip();
        if (s_.compare(pos_, w.size(), w) != 0)
            return false;
        std::size_t end = pos_ + w.size();
        return end == s_.size() || !(std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_');
    }

    std::string identifier()
    {
        skip();
        std::size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' || s_[pos_] == '\''))
            ++pos_;
        if (start == pos_)
            fail("expected an action name");
        return s_.substr(start, pos_ - start);
    }

    Rational rational()
    {
        skip();
        std::size_t start = pos_;
        if (pos_ < s_.size() && s_[pos_] == '-')
            ++pos_;
        while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '/'))
            ++pos_;
        try {
            return parse_rational(s_.substr(start, pos_ - start));
        } catch (const Error&) {
            pos_ = start;
            fail("expected a rational");
        }
    }

    FormulaPtr trace_formula()
    {
        if (accept('(')) {
            FormulaPtr f = trace_formula();
            expect(')');
            return f;
        }
        if (accept('<')) {
            std::string a = identifier();
            expect('>');
            return Formula::diamond(a, trace_formula());
        }
        if (peek_word("T")) {
            ++pos_;
            return Formula::top();
        }
        fail("expected 'T' or '<action>'");
    }

    FormulaPtr disjunction()
    {
        FormulaPtr f = conjunction();
        while (accept('|'))
            f = Formula::disjunction(f, conjunction());
        return f;
    }

    FormulaPtr conjunction()
    {
        FormulaPtr f = unary();
        while (accept('&'))
            f = Formula::conjunction(f, unary());
        return f;
    }

    FormulaPtr unary()
    {
        if (accept('!'))
            return Formula::negation(unary());
        if (accept('<')) {
            std::string a = identifier();
            expect(':');
            Rational bound = rational();
            if (bound <= 0)
                fail("rate bound must be positive");
            expect('>');
            return Formula::diamond(a, unary(), bound);
        }
        return primary();
    }

    FormulaPtr primary()
    {
        if (accept('(')) {
            FormulaPtr f = disjunction();
            expect(')');
            return f;
        }
        if (peek_word("T")) {
            ++pos_;
            return Formula::top();
        }
        if (peek_word("nabla")) {
            pos_ += 5;
            expect('(');
            std::string a = identifier();
            expect(')');
            return Formula::nabla(a);
        }
        if (peek_word("rate")) {
            pos_ += 4;
            expect('(');
            Rational r = rational();
            expect(')');
            return Formula::rate(r);
        }
        fail("expected a formula");
    }

    const std::string& s_;
    Dialect dialect_;
    std::size_t pos_ = 0;
};

void require_single_place(const Net& net)
{
    if (net.continuous_places.size() != 1)
        throw Error("MULTI_CONTINUOUS", "fluid logics need exactly one continuous place");
}

}  // namespace

FormulaPtr parse_formula(const std::string& text, Dialect dialect)
{
    return Parser(text, dialect).parse();
}

std::string to_string(const FormulaPtr& f, Dialect dialect)
{
    using K = Formula::Kind;
    switch (f->kind) {
    case K::Top:
        return "T";
    case K::Not: {
        const auto& g = f->left;
        // Disjunctions are stored as negated conjunctions of negations; print them back as written.
        if (g->kind == K::And && g->left->kind == K::Not && g->right->kind == K::Not)
            return "(" + to_string(g->left->left, dialect) + " | " + to_string(g->right->left, dialect) + ")";
        if (g->kind == K::Not)
            return to_string(g->left, dialect);
        return "!(" + to_string(g, dialect) + ")";
    }
    case K::And:
        return "(" + to_string(f->left, dialect) + " & " + to_string(f->right, dialect) + ")";
    case K::Nabla:
        return "nabla(" + f->action + ")";
    case K::Rate:
        return "rate(" + to_string(f->value) + ")";
    case K::Diamond:
        if (dialect == Dialect::Trace)
            return "<" + f->action + ">" + to_string(f->left, dialect);
        return "<" + f->action + ":" + to_string(f->value) + ">" + to_string(f->left, dialect);
    }
    return {};
}

std::size_t depth(const FormulaPtr& f)
{
    using K = Formula::Kind;
    switch (f->kind) {
    case K::Not:
        return depth(f->left);
    case K::And:
        return std::max(depth(f->left), depth(f->right));
    case K::Diamond:
        return 1 + depth(f->left);
    default:
        return 0;
    }
}

FormulaPtr trace_formula(const std::vector<std::string>& actions)
{
    FormulaPtr f = Formula::top();
    for (auto it = actions.rbegin(); it != actions.rend(); ++it)
        f = Formula::diamond(*it, f);
    return f;
}

std::vector<std::string> trace_actions(const FormulaPtr& f)
{
    std::vector<std::string> out;
    const Formula* cur = f.get();
    while (cur->kind == Formula::Kind::Diamond) {
        out.push_back(cur->action);
        cur = cur->left.get();
    }
    if (cur->kind != Formula::Kind::Top)
        throw Error("BAD_FORMULA", "not a diamond-only formula");
    return out;
}

Rational selective_pt(const Net& net, const Drg& drg, std::size_t state, const std::vector<std::string>& actions,
                      const std::vector<ExtRational>& sojourns, const RationalVector& rates)
{
    require_single_place(net);
    const std::size_t len = actions.size();
    if (sojourns.size() != len + 1 || rates.size() != len + 1)
        return 0;
    const SojournStats stats = sojourn_stats(drg);
    const RationalVector rp = potential_rates(net, drg);

    // Forward pass: probability mass on each marking after matching the first k steps.
    RationalVector mass(drg.size(), Rational(0));
    mass[state] = 1;
    for (std::size_t k = 0; k <= len; ++k) {
        RationalVector next(drg.size(), Rational(0));
        for (std::size_t s = 0; s < drg.size(); ++s) {
            if (mass[s] == 0)
                continue;
            if (stats.sj[s] != sojourns[k] || rp[s] != rates[k]) {
                mass[s] = 0;
                continue;
            }
            if (k == len)
                continue;
            for (std::size_t e : drg.out_edges[s]) {
                const auto& edge = drg.edges[e];
                if (net.transitions[edge.transition].label == actions[k])
                    next[edge.target] += mass[s] * edge.rate / stats.re[s];
            }
        }
        if (k < len)
            mass = std::move(next);
    }
    Rational total = 0;
    for (const auto& m : mass)
        total += m;
    return total;
}

Rational interpret_flt(const Net& net, const Drg& drg, const FormulaPtr& f, const std::vector<ExtRational>& sojourns,
                       const RationalVector& rates, std::size_t state)
{
    require_single_place(net);
    const SojournStats stats = sojourn_stats(drg);
    const RationalVector rp = potential_rates(net, drg);

    auto eval = [&](auto&& self, const Formula& phi, std::size_t m, std::size_t offset) -> Rational {
        const std::size_t remaining = sojourns.size() - std::min(offset, sojourns.size());
        if (remaining == 0 || rates.size() != sojourns.size())
            return 0;
        const bool head = stats.sj[m] == sojourns[offset] && rp[m] == rates[offset];
        switch (phi.kind) {
        case Formula::Kind::Top:
            return head && remaining == 1 ? Rational(1) : Rational(0);
        case Formula::Kind::Diamond: {
            if (!head || remaining < 2)
                return 0;
            Rational sum = 0;
            for (std::size_t e : drg.out_edges[m]) {
                const auto& edge = drg.edges[e];
                if (net.transitions[edge.transition].label == phi.action)
                    sum += edge.rate / stats.re[m] * self(self, *phi.left, edge.target, offset + 1);
            }
            return sum;
        }
        default:
            throw Error("BAD_FORMULA", "trace formulas contain only T and diamonds");
        }
    };
    return eval(eval, *f, state, 0);
}

std::vector<bool> satisfaction_set(const Net& net, const Drg& drg, const FormulaPtr& f)
{
    require_single_place(net);
    const std::size_t n = drg.size();
    using K = Formula::Kind;
    std::vector<bool> out(n, false);
    switch (f->kind) {
    case K::Top:
        out.assign(n, true);
        break;
    case K::Not: {
        auto inner = satisfaction_set(net, drg, f->left);
        for (std::size_t i = 0; i < n; ++i)
            out[i] = !inner[i];
        break;
    }
    case K::And: {
        auto a = satisfaction_set(net, drg, f->left);
        auto b = satisfaction_set(net, drg, f->right);
        for (std::size_t i = 0; i < n; ++i)
            out[i] = a[i] && b[i];
        break;
    }
    case K::Nabla:
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = true;
            for (std::size_t e : drg.out_edges[i])
                if (net.transitions[drg.edges[e].transition].label == f->action)
                    out[i] = false;
        }
        break;
    case K::Rate: {
        auto rp = potential_rates(net, drg);
        for (std::size_t i = 0; i < n; ++i)
            out[i] = rp[i] == f->value;
        break;
    }
    case K::Diamond: {
        // The set of all a-successors satisfying the body maximizes RM_a, so it decides the existential.
        auto inner = satisfaction_set(net, drg, f->left);
        for (std::size_t i = 0; i < n; ++i) {
            Rational rate = 0;
            for (std::size_t e : drg.out_edges[i]) {
                const auto& edge = drg.edges[e];
                if (net.transitions[edge.transition].label == f->action && inner[edge.target])
                    rate += edge.rate;
            }
            out[i] = rate >= f->value;
        }
        break;
    }
    }
    return out;
}

bool satisfies_flb(const Net& net, const Drg& drg, std::size_t state, const FormulaPtr& f)
{
    if (state >= drg.size())
        throw Error("INDEX_OUT_OF_RANGE", "state index out of range");
    return satisfaction_set(net, drg, f)[state];
}

}  // namespace fluidnet
