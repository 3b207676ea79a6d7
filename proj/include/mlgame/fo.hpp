#pragma once

#include "kripke.hpp"

#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlgame {

enum class fo_kind : std::uint8_t {
    rel,     // R(x, y)
    equal,   // x = y
    unary,   // U_p(x)
    negation,
    conj,
    disj,
    implies,
    iff,
    exists,
    forall
};

/// First-order formula over {R} plus one unary predicate per proposition.
class fo_formula {
public:
    static fo_formula rel(std::string x, std::string y) { return leaf(fo_kind::rel, {}, std::move(x), std::move(y)); }
    static fo_formula equal(std::string x, std::string y) { return leaf(fo_kind::equal, {}, std::move(x), std::move(y)); }
    static fo_formula unary(std::string p, std::string x) { return leaf(fo_kind::unary, std::move(p), std::move(x), {}); }
    static fo_formula negation(fo_formula f) { return inner(fo_kind::negation, {}, std::move(f), std::nullopt); }
    static fo_formula conj(fo_formula l, fo_formula r) { return inner(fo_kind::conj, {}, std::move(l), std::move(r)); }
    static fo_formula disj(fo_formula l, fo_formula r) { return inner(fo_kind::disj, {}, std::move(l), std::move(r)); }
    static fo_formula implies(fo_formula l, fo_formula r) { return inner(fo_kind::implies, {}, std::move(l), std::move(r)); }
    static fo_formula iff(fo_formula l, fo_formula r) { return inner(fo_kind::iff, {}, std::move(l), std::move(r)); }
    static fo_formula exists(std::string v, fo_formula body) { return inner(fo_kind::exists, std::move(v), std::move(body), std::nullopt); }
    static fo_formula forall(std::string v, fo_formula body) { return inner(fo_kind::forall, std::move(v), std::move(body), std::nullopt); }

    fo_kind kind() const { return node_->kind; }
    /// Bound variable of a quantifier, or predicate symbol of a unary atom.
    const std::string& symbol() const { return node_->symbol; }
    const std::string& var1() const { return node_->x; }
    const std::string& var2() const { return node_->y; }
    const fo_formula& left() const { return *node_->lhs; }
    const fo_formula& right() const { return *node_->rhs; }
    const fo_formula& body() const { return *node_->lhs; }

    bool is_atom() const { return kind() <= fo_kind::unary; }
    bool is_binary() const
    {
        return kind() == fo_kind::conj || kind() == fo_kind::disj || kind() == fo_kind::implies ||
               kind() == fo_kind::iff;
    }
    bool is_quantifier() const { return kind() == fo_kind::exists || kind() == fo_kind::forall; }

private:
    struct node {
        fo_kind kind;
        std::string symbol, x, y;
        std::shared_ptr<const fo_formula> lhs, rhs;
    };

    static fo_formula leaf(fo_kind k, std::string sym, std::string x, std::string y)
    {
        fo_formula f;
        f.node_ = std::make_shared<const node>(node{k, std::move(sym), std::move(x), std::move(y), nullptr, nullptr});
        return f;
    }
    static fo_formula inner(fo_kind k, std::string sym, fo_formula l, std::optional<fo_formula> r)
    {
        fo_formula f;
        f.node_ = std::make_shared<const node>(
            node{k, std::move(sym), {}, {}, std::make_shared<const fo_formula>(std::move(l)),
                 r ? std::make_shared<const fo_formula>(std::move(*r)) : nullptr});
        return f;
    }

    fo_formula() = default;
    std::shared_ptr<const node> node_;
};

class fo_eval_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class fo_size_convention {
    /// Atoms count 1, ↔ counted as (α→β)∧(β→α). Reproduces s(ψ₁) = 11.
    counted_atoms,
    /// Literals count 0 as in the recursive definition; s(ψ₁) = 7.
    strict_definition
};

/// Quantifiers and binary connectives count 1 each, ¬ is free.
inline long long fo_size(const fo_formula& f,
                         fo_size_convention conv = fo_size_convention::counted_atoms)
{
    switch (f.kind()) {
    case fo_kind::rel:
    case fo_kind::equal:
    case fo_kind::unary:
        return conv == fo_size_convention::counted_atoms ? 1 : 0;
    case fo_kind::negation:
        return fo_size(f.body(), conv);
    case fo_kind::conj:
    case fo_kind::disj:
    case fo_kind::implies:
        return fo_size(f.left(), conv) + fo_size(f.right(), conv) + 1;
    case fo_kind::iff:
        return 2 * (fo_size(f.left(), conv) + fo_size(f.right(), conv)) + 3;
    case fo_kind::exists:
    case fo_kind::forall:
        return fo_size(f.body(), conv) + 1;
    }
    return 0;
}

inline void free_variables(const fo_formula& f, std::set<std::string>& out,
                           std::set<std::string> bound = {})
{
    auto use = [&](const std::string& v) {
        if (!bound.contains(v))
            out.insert(v);
    };
    switch (f.kind()) {
    case fo_kind::rel:
    case fo_kind::equal:
        use(f.var1());
        use(f.var2());
        return;
    case fo_kind::unary:
        use(f.var1());
        return;
    case fo_kind::negation:
        free_variables(f.body(), out, bound);
        return;
    case fo_kind::exists:
    case fo_kind::forall:
        bound.insert(f.symbol());
        free_variables(f.body(), out, bound);
        return;
    default:
        free_variables(f.left(), out, bound);
        free_variables(f.right(), out, bound);
    }
}

namespace detail {

inline std::string bound_name(char base, int level)
{
    return level == 1 ? std::string(1, base) : base + std::to_string(level);
}

inline fo_formula psi(int n, const std::string& x, const std::string& y)
{
    const auto s = bound_name('s', n);
    const auto t = bound_name('t', n);
    if (n == 1)
        return fo_formula::iff(fo_formula::exists(s, fo_formula::rel(x, s)),
                               fo_formula::exists(t, fo_formula::rel(y, t)));
    auto inner = psi(n - 1, s, t);
    auto forth = fo_formula::forall(
        s, fo_formula::implies(fo_formula::rel(x, s),
                               fo_formula::exists(t, fo_formula::conj(fo_formula::rel(y, t), inner))));
    auto back = fo_formula::forall(
        t, fo_formula::implies(fo_formula::rel(y, t),
                               fo_formula::exists(s, fo_formula::conj(fo_formula::rel(x, s), inner))));
    return fo_formula::conj(std::move(forth), std::move(back));
}

} // namespace detail

/// ψₙ(x, y): holds of (u, v) iff (M, u) and (M, v) are n-bisimilar (over Φ = ∅).
/// Bound variables of recursion level j are s/t for j = 1 and s<j>/t<j> above,
/// so the nested instances never capture each other's parameters.
inline fo_formula make_psi(int n, const std::string& x = "x", const std::string& y = "y")
{
    if (n < 1)
        throw std::invalid_argument("make_psi: n must be at least 1");
    return detail::psi(n, x, y);
}

/// φₙ(x) = ∀y∀z(R(x,y) ∧ R(x,z) → ψₙ(y,z)).
inline fo_formula make_phi(int n, const std::string& x = "x")
{
    if (n < 1)
        throw std::invalid_argument("make_phi: n must be at least 1");
    return fo_formula::forall(
        "y", fo_formula::forall(
                 "z", fo_formula::implies(
                          fo_formula::conj(fo_formula::rel(x, "y"), fo_formula::rel(x, "z")),
                          make_psi(n, "y", "z"))));
}

namespace detail {

struct fo_env {
    std::vector<std::pair<std::string, kripke_model::index>> bindings;

    kripke_model::index lookup(const std::string& v) const
    {
        for (auto it = bindings.rbegin(); it != bindings.rend(); ++it)
            if (it->first == v)
                return it->second;
        throw fo_eval_error("unbound variable '" + v + "'");
    }
};

inline bool eval_fo_at(const kripke_model& m, const fo_formula& f, fo_env& env)
{
    switch (f.kind()) {
    case fo_kind::rel: {
        const auto& s = m.successors(env.lookup(f.var1()));
        return std::binary_search(s.begin(), s.end(), env.lookup(f.var2()));
    }
    case fo_kind::equal:
        return env.lookup(f.var1()) == env.lookup(f.var2());
    case fo_kind::unary: {
        auto p = m.prop_index(f.symbol());
        if (!p)
            throw fo_eval_error("unknown predicate '" + f.symbol() + "'");
        return m.holds(*p, env.lookup(f.var1()));
    }
    case fo_kind::negation:
        return !eval_fo_at(m, f.body(), env);
    case fo_kind::conj:
        return eval_fo_at(m, f.left(), env) && eval_fo_at(m, f.right(), env);
    case fo_kind::disj:
        return eval_fo_at(m, f.left(), env) || eval_fo_at(m, f.right(), env);
    case fo_kind::implies:
        return !eval_fo_at(m, f.left(), env) || eval_fo_at(m, f.right(), env);
    case fo_kind::iff:
        return eval_fo_at(m, f.left(), env) == eval_fo_at(m, f.right(), env);
    case fo_kind::exists:
    case fo_kind::forall: {
        const bool want = f.kind() == fo_kind::exists;
        bool result = !want;
        env.bindings.emplace_back(f.symbol(), 0);
        for (kripke_model::index w = 0; w < m.size(); ++w) {
            env.bindings.back().second = w;
            if (eval_fo_at(m, f.body(), env) == want) {
                result = want;
                break;
            }
        }
        env.bindings.pop_back();
        return result;
    }
    }
    return false;
}

} // namespace detail

/// M ⊨ f[env], Tarskian semantics over the finite structure (W, R, U_p).
inline bool eval_fo(const kripke_model& m, const fo_formula& f,
                    const std::map<std::string, world_id>& env)
{
    detail::fo_env e;
    for (const auto& [v, w] : env) {
        auto i = m.find(w);
        if (!i)
            throw fo_eval_error("variable '" + v + "' bound to unknown world '" + w + "'");
        e.bindings.emplace_back(v, *i);
    }
    std::set<std::string> free;
    free_variables(f, free);
    for (const auto& v : free)
        if (!env.contains(v))
            throw fo_eval_error("unbound variable '" + v + "'");
    return detail::eval_fo_at(m, f, e);
}

namespace detail {

inline int fo_precedence(fo_kind k)
{
    switch (k) {
    case fo_kind::iff:
        return 1;
    case fo_kind::implies:
        return 2;
    case fo_kind::disj:
        return 3;
    case fo_kind::conj:
        return 4;
    default:
        return 5;
    }
}

inline void print_fo_to(std::string& out, const fo_formula& f, int context)
{
    switch (f.kind()) {
    case fo_kind::rel:
        out += "R(" + f.var1() + "," + f.var2() + ")";
        return;
    case fo_kind::equal:
        out += f.var1() + "=" + f.var2();
        return;
    case fo_kind::unary:
        out += "U_" + f.symbol() + "(" + f.var1() + ")";
        return;
    case fo_kind::negation:
        out += "¬";
        print_fo_to(out, f.body(), 5);
        return;
    case fo_kind::exists:
    case fo_kind::forall:
        out += f.kind() == fo_kind::exists ? "∃" : "∀";
        out += f.symbol();
        if (f.body().is_quantifier() || f.body().kind() == fo_kind::negation) {
            print_fo_to(out, f.body(), 5);
        } else if (f.body().is_atom()) {
            out += ' ';
            print_fo_to(out, f.body(), 5);
        } else {
            out += '(';
            print_fo_to(out, f.body(), 0);
            out += ')';
        }
        return;
    default: {
        const int prec = fo_precedence(f.kind());
        const bool paren = context >= prec && context != 0;
        if (paren)
            out += '(';
        print_fo_to(out, f.left(), prec);
        switch (f.kind()) {
        case fo_kind::conj: out += " ∧ "; break;
        case fo_kind::disj: out += " ∨ "; break;
        case fo_kind::implies: out += " → "; break;
        default: out += " ↔ "; break;
        }
        print_fo_to(out, f.right(), prec);
        if (paren)
            out += ')';
    }
    }
}

} // namespace detail

/// Conventional notation. Operands of equal or lower precedence are bracketed.
inline std::string print_fo(const fo_formula& f)
{
    std::string out;
    detail::print_fo_to(out, f, 0);
    return out;
}

} // namespace mlgame
