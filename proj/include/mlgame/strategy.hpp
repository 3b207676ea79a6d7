#pragma once

#include "bisim.hpp"
#include "game.hpp"

#include <variant>
#include <vector>

namespace mlgame {

/// A winning strategy tree for S. A leaf carries the separating literal; an
/// inner node carries S's move and one continuation per outcome: two for a
/// split ([part1, part2]), one for a successor move.
struct spoiler_strategy {
    std::variant<formula, move> step;
    std::vector<spoiler_strategy> next;

    bool is_leaf() const { return std::holds_alternative<formula>(step); }
};

class strategy_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The formula a strategy spells out: left split ↦ ∨, right split ↦ ∧,
/// left successor ↦ ◇, right successor ↦ □, leaf ↦ its literal.
inline formula extract_formula(const spoiler_strategy& s)
{
    if (const auto* lit = std::get_if<formula>(&s.step)) {
        if (!lit->is_literal() || !s.next.empty())
            throw strategy_error("strategy leaf must be a single literal");
        return *lit;
    }
    const auto& mv = std::get<move>(s.step);
    if (const auto* sp = std::get_if<split_move>(&mv)) {
        if (s.next.size() != 2)
            throw strategy_error("split node needs two continuations");
        auto l = extract_formula(s.next[0]);
        auto r = extract_formula(s.next[1]);
        return sp->on == side::left ? formula::disj(std::move(l), std::move(r))
                                    : formula::conj(std::move(l), std::move(r));
    }
    if (s.next.size() != 1)
        throw strategy_error("successor node needs one continuation");
    auto c = extract_formula(s.next[0]);
    return std::get<successor_move>(mv).on == side::left ? formula::diamond(std::move(c))
                                                        : formula::box(std::move(c));
}

namespace detail {

inline spoiler_strategy strategy_for(const formula& f, const game_position& pos)
{
    if (auto t = terminal_status(pos); t.kind == terminal_kind::s_wins)
        return {*t.literal, {}};
    if (f.is_literal())
        throw strategy_error("formula does not separate the position");

    auto sub = [](const formula& g) { return ml_sizes(g); };
    spoiler_strategy out{formula::top(), {}};
    switch (f.kind()) {
    case ml_kind::disj:
    case ml_kind::conj: {
        const bool left = f.kind() == ml_kind::disj;
        const auto& whole = left ? pos.left : pos.right;
        std::vector<pointed_model> p1, p2;
        for (const auto& p : whole) {
            // ∨: members satisfying each disjunct; ∧: members refuting each conjunct
            if (eval_ml(p, f.left()) == left)
                p1.push_back(p);
            if (eval_ml(p, f.right()) == left)
                p2.push_back(p);
        }
        const auto l = sub(f.left()), r = sub(f.right());
        split_move mv{left ? side::left : side::right, l.ms, l.cs, r.ms, r.cs,
                      model_set(p1), model_set(p2)};
        // ms/cs of the formula may be below the position budgets; the slack goes to part 2
        mv.m2 = pos.m - mv.m1;
        mv.k2 = pos.k - 1 - mv.k1;
        out.step = mv;
        out.next.push_back(strategy_for(f.left(), apply_move(pos, mv, side::left)));
        out.next.push_back(strategy_for(f.right(), apply_move(pos, mv, side::right)));
        return out;
    }
    case ml_kind::diamond:
    case ml_kind::box: {
        const bool left = f.kind() == ml_kind::diamond;
        const auto& chosen = left ? pos.left : pos.right;
        successor_move mv{left ? side::left : side::right, {}};
        for (const auto& p : chosen) {
            // ◇: a successor satisfying the body; □: one refuting it
            std::optional<pointed_model> pick;
            for (const auto& q : successors(p))
                if (eval_ml(q, f.child()) == left) {
                    pick = q;
                    break;
                }
            if (!pick)
                throw strategy_error("formula does not separate the position");
            mv.choice.push_back(*pick);
        }
        out.step = mv;
        out.next.push_back(strategy_for(f.child(), apply_move(pos, mv)));
        return out;
    }
    default:
        throw strategy_error("formula does not separate the position");
    }
}

} // namespace detail

/// A winning strategy for S in EF_{ms(f),cs(f)}(a, b), read off a separating
/// formula. Stops early wherever a literal already separates.
inline spoiler_strategy strategy_from_formula(const formula& f, const model_set& a,
                                              const model_set& b)
{
    if (!separates(f, a, b))
        throw strategy_error("formula does not separate the sets");
    const auto sz = ml_sizes(f);
    return detail::strategy_for(f, {sz.ms, sz.cs, a, b});
}

/// Exhaustive playout of `s` from `pos` against every D choice: each move must
/// be legal and every leaf literal must separate its position.
inline bool validate_strategy(const game_position& pos, const spoiler_strategy& s)
{
    if (const auto* lit = std::get_if<formula>(&s.step))
        return lit->is_literal() && s.next.empty() && separates(*lit, pos.left, pos.right);
    const auto& mv = std::get<move>(s.step);
    try {
        if (std::holds_alternative<split_move>(mv)) {
            return s.next.size() == 2 &&
                   validate_strategy(apply_move(pos, mv, side::left), s.next[0]) &&
                   validate_strategy(apply_move(pos, mv, side::right), s.next[1]);
        }
        return s.next.size() == 1 && validate_strategy(apply_move(pos, mv), s.next[0]);
    } catch (const game_error&) {
        return false;
    }
}

/// D's strategy from an m-bisimilar pair (p ∈ left, q ∈ right): keep the pinned
/// pair inside the position. Splits: answer with the part containing the
/// pinned model. Successor moves: follow the chosen successor and re-pin its
/// partner through the back-and-forth clauses of the witness.
class bisim_responder {
public:
    bisim_responder(const game_position& pos, bisim_witness witness)
        : witness_(std::move(witness)), p_(witness_.left), q_(witness_.right), level_(pos.m)
    {
        if (witness_.depth < pos.m)
            throw game_error("bisimulation witness is shallower than the modal budget");
        if (!pos.left.contains(p_) || !pos.right.contains(q_))
            throw game_error("pinned models are not in the position");
    }

    const pointed_model& pinned_left() const { return p_; }
    const pointed_model& pinned_right() const { return q_; }

    /// D's answer to `mv` played at `pos`: a side for splits, nullopt for
    /// successor moves (after updating the pinned pair).
    std::optional<side> respond(const game_position& pos, const move& mv)
    {
        if (const auto* sp = std::get_if<split_move>(&mv)) {
            const auto& pinned = sp->on == side::left ? p_ : q_;
            const bool first = sp->part1.contains(pinned);
            level_ = first ? sp->m1 : sp->m2;
            return first ? side::left : side::right;
        }
        const auto& sm = std::get<successor_move>(mv);
        const auto& chosen = sm.on == side::left ? pos.left : pos.right;
        const auto& pinned = sm.on == side::left ? p_ : q_;
        auto i = chosen.position(pinned);
        if (!i || *i >= sm.choice.size() || level_ < 1)
            throw game_error("successor move does not match the position");
        const auto next = sm.choice[*i];
        const int layer = level_ - 1;
        if (sm.on == side::left) {
            for (auto v : q_.model().successors(q_.point()))
                if (witness_.related(layer, next.point(), v)) {
                    p_ = next;
                    q_ = q_.at(v);
                    level_ = layer;
                    return std::nullopt;
                }
        } else {
            for (auto v : p_.model().successors(p_.point()))
                if (witness_.related(layer, v, next.point())) {
                    p_ = p_.at(v);
                    q_ = next;
                    level_ = layer;
                    return std::nullopt;
                }
        }
        throw game_error("witness has no matching successor");
    }

private:
    bisim_witness witness_;
    pointed_model p_, q_;
    int level_;
};

/// Plays every legal S move sequence from `pos` against `responder`; true iff
/// no play reaches a position where a literal separates.
template <class Responder>
bool survives_exhaustive_spoiler(const game_position& pos, const Responder& responder)
{
    auto t = terminal_status(pos);
    if (t.kind == terminal_kind::s_wins)
        return false;
    if (t.kind == terminal_kind::d_wins)
        return true;
    for (const auto& mv : legal_moves(pos)) {
        Responder r = responder;
        auto choice = r.respond(pos, mv);
        if (!survives_exhaustive_spoiler(apply_move(pos, mv, choice), r))
            return false;
    }
    return true;
}

} // namespace mlgame
