#pragma once

#include "bisim.hpp"
#include "kripke.hpp"
#include "ml.hpp"

#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

namespace mlgame {

/// (m, k, 𝒜, ℬ): modal budget, connective budget, left and right sets.
struct game_position {
    int m = 0;
    int k = 0;
    model_set left;
    model_set right;

    friend bool operator==(const game_position&, const game_position&) = default;
};

enum class side : std::uint8_t { left, right };

inline const char* to_string(side s) { return s == side::left ? "left" : "right"; }

/// S picks budgets and two subsets covering one side; D picks which
/// continuation is played.
struct split_move {
    side on = side::left;
    int m1 = 0, k1 = 0, m2 = 0, k2 = 0;
    model_set part1, part2;
};

/// S picks a successor for every member of one side (choice[i] for the i-th
/// member in set order); the other side moves to all successors.
struct successor_move {
    side on = side::left;
    std::vector<pointed_model> choice;
};

using move = std::variant<split_move, successor_move>;

class game_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class terminal_kind : std::uint8_t { s_wins, d_wins, ongoing };

struct terminal_status_result {
    terminal_kind kind = terminal_kind::ongoing;
    std::optional<formula> literal; // set iff kind == s_wins
};

/// Literals in the order they are tried: ⊥, ⊤, then p, ¬p per symbol.
inline std::vector<formula> literals(const std::vector<std::string>& signature)
{
    std::vector<formula> out{formula::bot(), formula::top()};
    for (const auto& p : signature) {
        out.push_back(formula::prop(p));
        out.push_back(formula::neg_prop(p));
    }
    return out;
}

inline std::optional<formula> separating_literal(const model_set& a, const model_set& b)
{
    for (const auto& lit : literals(common_signature(a, b)))
        if (separates(lit, a, b))
            return lit;
    return std::nullopt;
}

inline bool successor_move_possible(const model_set& s)
{
    for (const auto& p : s)
        if (!p.has_successor())
            return false;
    return true;
}

namespace detail {

/// One representative successor per (depth)-bisimulation class, for each member.
inline std::vector<std::vector<pointed_model>> successor_representatives(const model_set& s,
                                                                         int depth)
{
    std::vector<std::vector<pointed_model>> out;
    type_table table;
    for (const auto& p : s) {
        auto& reps = out.emplace_back();
        auto types = table.types(p.shared_model(), depth);
        std::set<type_table::id> seen;
        for (const auto& q : successors(p))
            if (seen.insert(types[q.point()]).second)
                reps.push_back(q);
    }
    return out;
}

inline bool has_legal_move(const game_position& pos)
{
    if (pos.k >= 1 && (pos.left.size() >= 2 || pos.right.size() >= 2))
        return true;
    if (pos.m >= 1 && (successor_move_possible(pos.left) ||
                       successor_move_possible(pos.right)))
        return true;
    return false;
}

} // namespace detail

/// S wins if a literal separates the sides; otherwise D wins once m = k = 0 or
/// when S has no legal move left.
inline terminal_status_result terminal_status(const game_position& pos)
{
    if (auto lit = separating_literal(pos.left, pos.right))
        return {terminal_kind::s_wins, lit};
    if ((pos.m == 0 && pos.k == 0) || !detail::has_legal_move(pos))
        return {terminal_kind::d_wins, std::nullopt};
    return {terminal_kind::ongoing, std::nullopt};
}

/// Every move S may make: splits into proper partitions (part1 holds the
/// first member of the side) under every budget split, and successor moves
/// whose choice maps range over one representative per (m-1)-bisimulation
/// class of each member's successors.
inline std::vector<move> legal_moves(const game_position& pos)
{
    std::vector<move> out;
    if (pos.m < 0 || pos.k < 0)
        return out;

    if (pos.k >= 1) {
        for (auto s : {side::left, side::right}) {
            const auto& set = s == side::left ? pos.left : pos.right;
            if (set.size() < 2 || set.size() > 20)
                continue;
            const auto n = set.size();
            for (std::uint32_t mask = 1; mask < (1U << (n - 1)); ++mask) {
                std::vector<pointed_model> p1{set[0]}, p2;
                for (std::size_t i = 1; i < n; ++i)
                    ((mask >> (i - 1)) & 1U ? p2 : p1).push_back(set[i]);
                model_set part1(p1), part2(p2);
                for (int m1 = 0; m1 <= pos.m; ++m1)
                    for (int k1 = 0; k1 < pos.k; ++k1)
                        out.push_back(split_move{s, m1, k1, pos.m - m1, pos.k - 1 - k1, part1, part2});
            }
        }
    }

    if (pos.m >= 1) {
        for (auto s : {side::left, side::right}) {
            const auto& set = s == side::left ? pos.left : pos.right;
            if (!successor_move_possible(set))
                continue;
            auto reps = detail::successor_representatives(set, pos.m - 1);
            std::vector<std::size_t> digit(set.size(), 0);
            while (true) {
                successor_move mv{s, {}};
                for (std::size_t i = 0; i < set.size(); ++i)
                    mv.choice.push_back(reps[i][digit[i]]);
                out.push_back(std::move(mv));
                std::size_t i = 0;
                for (; i < set.size(); ++i) {
                    if (++digit[i] < reps[i].size())
                        break;
                    digit[i] = 0;
                }
                if (i == set.size())
                    break;
            }
        }
    }
    return out;
}

/// The position after `mv`, with D's pick for splits. Checks the move against
/// the rules: budgets add up, split parts are subsets covering the side, and
/// successor choices stay inside each member's successor set.
inline game_position apply_move(const game_position& pos, const move& mv,
                                std::optional<side> d_choice = std::nullopt)
{
    if (const auto* sp = std::get_if<split_move>(&mv)) {
        if (!d_choice)
            throw game_error("a split move needs D's choice");
        if (pos.k < 1)
            throw game_error("split move with connective budget 0");
        if (sp->m1 < 0 || sp->m2 < 0 || sp->k1 < 0 || sp->k2 < 0 || sp->m1 + sp->m2 != pos.m ||
            sp->k1 + sp->k2 + 1 != pos.k)
            throw game_error("split budgets do not add up to the position's budgets");
        const auto& whole = sp->on == side::left ? pos.left : pos.right;
        if (!sp->part1.is_subset_of(whole) || !sp->part2.is_subset_of(whole) ||
            set_union(sp->part1, sp->part2) != whole)
            throw game_error("split parts must be subsets whose union is the split side");
        const bool first = *d_choice == side::left;
        game_position next = pos;
        next.m = first ? sp->m1 : sp->m2;
        next.k = first ? sp->k1 : sp->k2;
        (sp->on == side::left ? next.left : next.right) = first ? sp->part1 : sp->part2;
        return next;
    }

    const auto& sm = std::get<successor_move>(mv);
    if (d_choice)
        throw game_error("D has no choice to make after a successor move");
    if (pos.m < 1)
        throw game_error("successor move with modal budget 0");
    const auto& chosen = sm.on == side::left ? pos.left : pos.right;
    const auto& other = sm.on == side::left ? pos.right : pos.left;
    model_set image;
    try {
        image = diamond_choice(chosen, sm.choice);
    } catch (const model_error& e) {
        throw game_error(std::string("illegal successor move: ") + e.what());
    }
    game_position next{pos.m - 1, pos.k, {}, {}};
    if (sm.on == side::left) {
        next.left = std::move(image);
        next.right = diamond_all(other);
    } else {
        next.left = diamond_all(other);
        next.right = std::move(image);
    }
    return next;
}

} // namespace mlgame
