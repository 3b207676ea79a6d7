#pragma once

#include "kripke.hpp"

#include <cctype>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mlgame {

enum class ml_kind : std::uint8_t { top, bot, prop, neg_prop, conj, disj, diamond, box };

/// A modal formula in negation normal form. Negation exists only on
/// propositions, so NNF holds by construction. Cheap to copy: subtrees are
/// shared and immutable.
class formula {
public:
    static formula top() { return formula(ml_kind::top); }
    static formula bot() { return formula(ml_kind::bot); }
    static formula prop(std::string p) { return formula(ml_kind::prop, std::move(p)); }
    static formula neg_prop(std::string p) { return formula(ml_kind::neg_prop, std::move(p)); }
    static formula conj(formula l, formula r) { return formula(ml_kind::conj, {}, std::move(l), std::move(r)); }
    static formula disj(formula l, formula r) { return formula(ml_kind::disj, {}, std::move(l), std::move(r)); }
    static formula diamond(formula f) { return formula(ml_kind::diamond, {}, std::move(f)); }
    static formula box(formula f) { return formula(ml_kind::box, {}, std::move(f)); }

    ml_kind kind() const { return node_->kind; }
    const std::string& name() const { return node_->prop; }
    const formula& left() const { return *node_->lhs; }
    const formula& right() const { return *node_->rhs; }
    const formula& child() const { return *node_->lhs; }

    bool is_literal() const { return kind() <= ml_kind::neg_prop; }
    bool is_binary() const { return kind() == ml_kind::conj || kind() == ml_kind::disj; }
    bool is_modal() const { return kind() == ml_kind::diamond || kind() == ml_kind::box; }

    /// Total structural order: kind, then symbol, then children left to right.
    friend std::strong_ordering operator<=>(const formula& a, const formula& b)
    {
        if (a.node_ == b.node_)
            return std::strong_ordering::equal;
        if (auto c = a.kind() <=> b.kind(); c != 0)
            return c;
        if (a.is_literal())
            return a.name() <=> b.name();
        if (auto c = a.left() <=> b.left(); c != 0)
            return c;
        if (a.is_binary())
            return a.right() <=> b.right();
        return std::strong_ordering::equal;
    }
    friend bool operator==(const formula& a, const formula& b) { return (a <=> b) == 0; }

private:
    struct node {
        ml_kind kind;
        std::string prop;
        std::shared_ptr<const formula> lhs, rhs;
    };

    explicit formula(ml_kind kind, std::string prop = {})
        : node_(std::make_shared<const node>(node{kind, std::move(prop), nullptr, nullptr}))
    {
    }
    formula(ml_kind kind, std::string prop, formula l)
        : node_(std::make_shared<const node>(
              node{kind, std::move(prop), std::make_shared<const formula>(std::move(l)), nullptr}))
    {
    }
    formula(ml_kind kind, std::string prop, formula l, formula r)
        : node_(std::make_shared<const node>(node{kind, std::move(prop),
                                                  std::make_shared<const formula>(std::move(l)),
                                                  std::make_shared<const formula>(std::move(r))}))
    {
    }

    std::shared_ptr<const node> node_;
};

struct size_report {
    int ms = 0;
    int cs = 0;
    int s = 0;
    friend bool operator==(const size_report&, const size_report&) = default;
};

inline size_report ml_sizes(const formula& f)
{
    switch (f.kind()) {
    case ml_kind::conj:
    case ml_kind::disj: {
        auto l = ml_sizes(f.left());
        auto r = ml_sizes(f.right());
        return {l.ms + r.ms, l.cs + r.cs + 1, l.s + r.s + 1};
    }
    case ml_kind::diamond:
    case ml_kind::box: {
        auto c = ml_sizes(f.child());
        return {c.ms + 1, c.cs, c.s + 1};
    }
    default:
        return {};
    }
}

inline int modal_depth(const formula& f)
{
    if (f.is_binary())
        return std::max(modal_depth(f.left()), modal_depth(f.right()));
    if (f.is_modal())
        return 1 + modal_depth(f.child());
    return 0;
}

inline void collect_props(const formula& f, std::set<std::string>& out)
{
    if (f.kind() == ml_kind::prop || f.kind() == ml_kind::neg_prop)
        out.insert(f.name());
    else if (f.is_binary()) {
        collect_props(f.left(), out);
        collect_props(f.right(), out);
    } else if (f.is_modal())
        collect_props(f.child(), out);
}

class eval_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

namespace detail {

inline void check_signature(const kripke_model& m, const formula& f)
{
    std::set<std::string> props;
    collect_props(f, props);
    for (const auto& p : props)
        if (!m.prop_index(p))
            throw eval_error("unknown proposition symbol '" + p + "'");
}

inline bool eval_at(const kripke_model& m, kripke_model::index w, const formula& f)
{
    switch (f.kind()) {
    case ml_kind::top:
        return true;
    case ml_kind::bot:
        return false;
    case ml_kind::prop:
        return m.holds(*m.prop_index(f.name()), w);
    case ml_kind::neg_prop:
        return !m.holds(*m.prop_index(f.name()), w);
    case ml_kind::conj:
        return eval_at(m, w, f.left()) && eval_at(m, w, f.right());
    case ml_kind::disj:
        return eval_at(m, w, f.left()) || eval_at(m, w, f.right());
    case ml_kind::diamond:
        for (auto v : m.successors(w))
            if (eval_at(m, v, f.child()))
                return true;
        return false;
    case ml_kind::box:
        for (auto v : m.successors(w))
            if (!eval_at(m, v, f.child()))
                return false;
        return true;
    }
    return false;
}

} // namespace detail

/// (M, w) ⊨ f.
inline bool eval_ml(const pointed_model& p, const formula& f)
{
    detail::check_signature(p.model(), f);
    return detail::eval_at(p.model(), p.point(), f);
}

/// Global model checking: the set of worlds of m satisfying f, bottom up.
inline std::vector<bool> truth_set(const kripke_model& m, const formula& f)
{
    detail::check_signature(m, f);
    std::function<std::vector<bool>(const formula&)> go = [&](const formula& g) {
        std::vector<bool> out(m.size());
        switch (g.kind()) {
        case ml_kind::top:
            out.assign(m.size(), true);
            break;
        case ml_kind::bot:
            break;
        case ml_kind::prop:
        case ml_kind::neg_prop: {
            auto i = *m.prop_index(g.name());
            for (kripke_model::index w = 0; w < m.size(); ++w)
                out[w] = m.holds(i, w) == (g.kind() == ml_kind::prop);
            break;
        }
        case ml_kind::conj:
        case ml_kind::disj: {
            auto l = go(g.left());
            auto r = go(g.right());
            for (std::size_t w = 0; w < m.size(); ++w)
                out[w] = g.kind() == ml_kind::conj ? (l[w] && r[w]) : (l[w] || r[w]);
            break;
        }
        case ml_kind::diamond:
        case ml_kind::box: {
            auto c = go(g.child());
            const bool dia = g.kind() == ml_kind::diamond;
            for (kripke_model::index w = 0; w < m.size(); ++w) {
                bool v = !dia;
                for (auto u : m.successors(w))
                    if (c[u] == dia) {
                        v = dia;
                        break;
                    }
                out[w] = v;
            }
            break;
        }
        }
        return out;
    };
    return go(f);
}

/// 𝒜 ⊨ f and ℬ ⊨ ¬f.
inline bool separates(const formula& f, const model_set& a, const model_set& b)
{
    for (const auto& p : a)
        if (!eval_ml(p, f))
            return false;
    for (const auto& q : b)
        if (eval_ml(q, f))
            return false;
    return true;
}

// ---------------------------------------------------------------------------
// Text syntax:  T | F | ident | ~ident | f & f | f | f | <>f | []f | (f)
// Unary binds tightest, then &, then |; binary operators are left-associative.

class parse_error : public std::invalid_argument {
public:
    parse_error(const std::string& msg, std::size_t pos)
        : std::invalid_argument(msg + " at position " + std::to_string(pos)), pos_(pos)
    {
    }
    std::size_t position() const { return pos_; }

private:
    std::size_t pos_;
};

namespace detail {

class ml_parser {
public:
    explicit ml_parser(std::string_view text) : text_(text) {}

    formula parse()
    {
        auto f = disjunction();
        skip_space();
        if (pos_ != text_.size())
            throw parse_error("unexpected '" + std::string(1, text_[pos_]) + "'", pos_);
        return f;
    }

private:
    formula disjunction()
    {
        auto f = conjunction();
        while (accept("|"))
            f = formula::disj(std::move(f), conjunction());
        return f;
    }

    formula conjunction()
    {
        auto f = unary();
        while (accept("&"))
            f = formula::conj(std::move(f), unary());
        return f;
    }

    formula unary()
    {
        skip_space();
        if (accept("<>"))
            return formula::diamond(unary());
        if (accept("[]"))
            return formula::box(unary());
        if (accept("(")) {
            auto f = disjunction();
            expect(")");
            return f;
        }
        if (accept("~")) {
            skip_space();
            auto at = pos_;
            auto id = identifier();
            if (id.empty() || id == "T" || id == "F")
                throw parse_error("expected a proposition after '~'", at);
            return formula::neg_prop(std::move(id));
        }
        auto id = identifier();
        if (id.empty()) {
            if (pos_ == text_.size())
                throw parse_error("unexpected end of input", pos_);
            throw parse_error("unexpected '" + std::string(1, text_[pos_]) + "'", pos_);
        }
        if (id == "T")
            return formula::top();
        if (id == "F")
            return formula::bot();
        return formula::prop(std::move(id));
    }

    std::string identifier()
    {
        auto start = pos_;
        if (pos_ < text_.size() && (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
        }
        return std::string(text_.substr(start, pos_ - start));
    }

    void skip_space()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool accept(std::string_view tok)
    {
        skip_space();
        if (text_.substr(pos_, tok.size()) == tok) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }

    void expect(std::string_view tok)
    {
        if (!accept(tok))
            throw parse_error("expected '" + std::string(tok) + "'", pos_);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

inline void print_to(std::string& out, const formula& f, int context)
{
    // context: 0 = top / inside |, 1 = inside &, 2 = operand of a unary operator
    switch (f.kind()) {
    case ml_kind::top:
        out += 'T';
        return;
    case ml_kind::bot:
        out += 'F';
        return;
    case ml_kind::prop:
        out += f.name();
        return;
    case ml_kind::neg_prop:
        out += '~';
        out += f.name();
        return;
    case ml_kind::diamond:
    case ml_kind::box:
        out += f.kind() == ml_kind::diamond ? "<>" : "[]";
        print_to(out, f.child(), 2);
        return;
    case ml_kind::conj:
    case ml_kind::disj: {
        const int level = f.kind() == ml_kind::disj ? 0 : 1;
        const bool paren = context > level;
        if (paren)
            out += '(';
        print_to(out, f.left(), level);
        out += level == 0 ? " | " : " & ";
        // left-associative: a right operand of the same operator needs parentheses
        print_to(out, f.right(), level + 1);
        if (paren)
            out += ')';
        return;
    }
    }
}

} // namespace detail

inline formula parse_ml(std::string_view text) { return detail::ml_parser(text).parse(); }

inline std::string print_ml(const formula& f)
{
    std::string out;
    detail::print_to(out, f, 0);
    return out;
}

// ---------------------------------------------------------------------------

enum class commutativity {
    canonical, ///< And/Or children in structural order, l <= r
    ordered    ///< every ordered pair of children
};

/// Every NNF formula over `signature` (plus ⊤, ⊥) with ms <= max_ms and
/// cs <= max_cs, grouped by increasing (ms, cs). Finite: such a formula has
/// cs + 1 leaves and at most max_ms modal nodes.
inline std::vector<formula> enumerate_ml(int max_ms, int max_cs,
                                         const std::vector<std::string>& signature,
                                         commutativity mode = commutativity::canonical)
{
    if (max_ms < 0 || max_cs < 0)
        throw std::invalid_argument("enumeration bounds must be non-negative");
    // exact[a][b]: formulas with ms == a and cs == b
    std::vector<std::vector<std::vector<formula>>> exact(
        max_ms + 1, std::vector<std::vector<formula>>(max_cs + 1));
    for (int b = 0; b <= max_cs; ++b) {
        for (int a = 0; a <= max_ms; ++a) {
            auto& cell = exact[a][b];
            if (a == 0 && b == 0) {
                cell.push_back(formula::top());
                cell.push_back(formula::bot());
                for (const auto& p : signature) {
                    cell.push_back(formula::prop(p));
                    cell.push_back(formula::neg_prop(p));
                }
                continue;
            }
            if (a > 0) {
                for (const auto& f : exact[a - 1][b])
                    cell.push_back(formula::diamond(f));
                for (const auto& f : exact[a - 1][b])
                    cell.push_back(formula::box(f));
            }
            if (b > 0) {
                for (auto kind : {ml_kind::conj, ml_kind::disj}) {
                    for (int a1 = 0; a1 <= a; ++a1) {
                        for (int b1 = 0; b1 < b; ++b1) {
                            const auto& ls = exact[a1][b1];
                            const auto& rs = exact[a - a1][b - 1 - b1];
                            for (const auto& l : ls)
                                for (const auto& r : rs) {
                                    if (mode == commutativity::canonical && r < l)
                                        continue;
                                    cell.push_back(kind == ml_kind::conj ? formula::conj(l, r)
                                                                         : formula::disj(l, r));
                                }
                        }
                    }
                }
            }
        }
    }
    std::vector<formula> out;
    for (int a = 0; a <= max_ms; ++a)
        for (int b = 0; b <= max_cs; ++b)
            out.insert(out.end(), exact[a][b].begin(), exact[a][b].end());
    return out;
}

} // namespace mlgame
