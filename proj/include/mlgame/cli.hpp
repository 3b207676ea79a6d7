#pragma once

#include "mlgame.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace mlgame {

// Exit codes: 0 ok, 1 refusal (budget exceeded, guarded level), 2 input error.
namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int refused = 1;
inline constexpr int input_error = 2;
} // namespace exit_code

/// {"m":int, "k":int, "left":[model...], "right":[model...]}
inline game_position position_from_json(const nlohmann::json& j)
{
    try {
        game_position pos{j.at("m").get<int>(), j.at("k").get<int>(),
                          model_set_from_json(j.at("left")), model_set_from_json(j.at("right"))};
        if (pos.m < 0 || pos.k < 0)
            throw model_error("budgets must be non-negative");
        return pos;
    } catch (const nlohmann::json::exception& e) {
        throw model_error(std::string("malformed position: ") + e.what());
    }
}

inline nlohmann::json to_json(const game_position& pos)
{
    return {{"m", pos.m}, {"k", pos.k}, {"left", to_json(pos.left)}, {"right", to_json(pos.right)}};
}

inline nlohmann::json verdict_json(const verdict& v)
{
    nlohmann::json out = {{"winner", v.who == winner::spoiler ? "S" : "D"},
                          {"formula", nullptr},
                          {"ms", nullptr},
                          {"cs", nullptr},
                          {"nodes", v.nodes}};
    if (v.strategy) {
        auto f = extract_formula(*v.strategy);
        auto sz = ml_sizes(f);
        out["formula"] = print_ml(f);
        out["ms"] = sz.ms;
        out["cs"] = sz.cs;
    }
    return out;
}

inline nlohmann::json frontier_json(const std::vector<frontier_entry>& frontier)
{
    nlohmann::json out = nlohmann::json::array();
    for (const auto& e : frontier)
        out.push_back({{"m", e.m}, {"k", e.k}, {"formula", print_ml(e.separator)}});
    return out;
}

namespace detail {

/// Memo ceiling: MLGAME_MEMO_LIMIT if set, else the library default.
inline std::size_t default_node_limit()
{
    if (const char* env = std::getenv("MLGAME_MEMO_LIMIT")) {
        try {
            return static_cast<std::size_t>(std::stoull(env));
        } catch (const std::exception&) {
            throw std::invalid_argument("MLGAME_MEMO_LIMIT is not a number");
        }
    }
    return solve_options{}.node_limit;
}

inline void post_order(const formula& f, std::vector<formula>& out)
{
    if (f.is_binary()) {
        post_order(f.left(), out);
        post_order(f.right(), out);
    } else if (f.is_modal()) {
        post_order(f.child(), out);
    }
    if (std::find(out.begin(), out.end(), f) == out.end())
        out.push_back(f);
}

inline std::string describe(const pointed_model& p)
{
    std::string out = p.point_name();
    const auto& succ = p.model().successors(p.point());
    if (!succ.empty()) {
        out += " ->";
        for (auto v : succ)
            out += " " + p.model().name(v);
    }
    return out;
}

inline void show_position(std::ostream& out, const game_position& pos)
{
    out << "position m=" << pos.m << " k=" << pos.k << "\n";
    for (auto s : {side::left, side::right}) {
        const auto& set = s == side::left ? pos.left : pos.right;
        out << "  " << to_string(s) << ":" << (set.empty() ? " (empty)" : "") << "\n";
        for (std::size_t i = 0; i < set.size(); ++i)
            out << "    [" << i << "] " << describe(set[i]) << "\n";
    }
}

inline std::string describe(const move& mv)
{
    std::ostringstream out;
    if (const auto* sp = std::get_if<split_move>(&mv)) {
        out << to_string(sp->on) << " split: part 1 (m=" << sp->m1 << ", k=" << sp->k1 << ") has "
            << sp->part1.size() << " model(s), part 2 (m=" << sp->m2 << ", k=" << sp->k2
            << ") has " << sp->part2.size();
    } else {
        const auto& sm = std::get<successor_move>(mv);
        out << to_string(sm.on) << " successor move:";
        for (const auto& q : sm.choice)
            out << " " << q.point_name();
    }
    return out.str();
}

/// Parses "split left|right i,j,.. m1 k1" or "succ left|right w0 w1 ..".
inline move parse_move(const std::string& line, const game_position& pos)
{
    std::istringstream in(line);
    std::string verb, where;
    in >> verb >> where;
    if (where != "left" && where != "right")
        throw game_error("expected 'left' or 'right'");
    const auto s = where == "left" ? side::left : side::right;
    const auto& set = s == side::left ? pos.left : pos.right;
    if (verb == "split") {
        std::string indices;
        int m1 = -1, k1 = -1;
        if (!(in >> indices >> m1 >> k1))
            throw game_error("usage: split left|right i,j,... m1 k1");
        std::vector<bool> first(set.size(), false);
        std::stringstream list(indices);
        for (std::string item; std::getline(list, item, ',');) {
            std::size_t i = 0;
            try {
                i = std::stoul(item);
            } catch (const std::exception&) {
                throw game_error("bad member index '" + item + "'");
            }
            if (i >= set.size())
                throw game_error("member index out of range");
            first[i] = true;
        }
        std::vector<pointed_model> p1, p2;
        for (std::size_t i = 0; i < set.size(); ++i)
            (first[i] ? p1 : p2).push_back(set[i]);
        return split_move{s, m1, k1, pos.m - m1, pos.k - 1 - k1, model_set(p1), model_set(p2)};
    }
    if (verb == "succ") {
        successor_move sm{s, {}};
        std::string w;
        for (std::size_t i = 0; i < set.size(); ++i) {
            if (!(in >> w))
                throw game_error("give one successor world per member");
            auto v = set[i].model().find(w);
            if (!v)
                throw game_error("unknown world '" + w + "'");
            sm.choice.push_back(set[i].at(*v));
        }
        return sm;
    }
    throw game_error("unknown command '" + verb + "'");
}

/// Text-mode game against the solver. The machine plays solve-optimal moves.
inline int play(game_position pos, bool human_is_spoiler, std::istream& in, std::ostream& out,
                solve_options opts)
{
    game_solver solver(opts);
    auto prompt = [&](const char* text, std::string& line) {
        out << text << std::flush;
        if (!std::getline(in, line))
            return false;
        return line != "quit" && line != "q";
    };

    while (true) {
        show_position(out, pos);
        auto t = terminal_status(pos);
        if (t.kind == terminal_kind::s_wins) {
            out << "S wins: " << print_ml(*t.literal) << " separates the sides\n";
            return exit_code::ok;
        }
        if (t.kind == terminal_kind::d_wins) {
            out << "D wins: no literal separates and S has no move left\n";
            return exit_code::ok;
        }

        if (human_is_spoiler) {
            std::string line;
            if (!prompt("S> ", line)) {
                out << "bye\n";
                return exit_code::ok;
            }
            if (line == "help" || line.empty()) {
                out << "  split left|right i,j,... m1 k1   (listed members form part 1)\n"
                       "  succ left|right w0 w1 ...        (one successor world per member)\n"
                       "  quit\n";
                continue;
            }
            try {
                auto mv = parse_move(line, pos);
                std::optional<side> choice;
                if (std::holds_alternative<split_move>(mv)) {
                    apply_move(pos, mv, side::left); // validates before D answers
                    auto lose_first = solver.solve(apply_move(pos, mv, side::left)).who;
                    choice = lose_first == winner::duplicator ? side::left : side::right;
                    out << "D continues with part " << (choice == side::left ? 1 : 2) << "\n";
                }
                pos = apply_move(pos, mv, choice);
            } catch (const game_error& e) {
                out << "illegal move: " << e.what() << "\n";
            } catch (const model_error& e) {
                out << "illegal move: " << e.what() << "\n";
            }
            continue;
        }

        auto v = solver.solve(pos);
        move mv;
        if (v.strategy) {
            mv = std::get<move>(v.strategy->step);
        } else {
            auto moves = legal_moves(pos);
            mv = moves.front();
        }
        out << "S plays " << describe(mv) << "\n";
        if (const auto* sp = std::get_if<split_move>(&mv)) {
            const auto& whole = sp->on == side::left ? pos.left : pos.right;
            out << "  part 1:";
            for (const auto& p : sp->part1)
                out << " [" << *whole.position(p) << "]";
            out << "\n  part 2:";
            for (const auto& p : sp->part2)
                out << " [" << *whole.position(p) << "]";
            out << "\n";
            std::optional<side> choice;
            while (!choice) {
                std::string line;
                if (!prompt("D (1 or 2)> ", line)) {
                    out << "bye\n";
                    return exit_code::ok;
                }
                if (line == "1")
                    choice = side::left;
                else if (line == "2")
                    choice = side::right;
                else
                    out << "answer 1 or 2\n";
            }
            pos = apply_move(pos, mv, choice);
        } else {
            pos = apply_move(pos, mv);
        }
    }
}

} // namespace detail

/// Entry point shared by the executable and the tests.
inline int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out,
                   std::ostream& err)
{
    CLI::App app{"Formula-size game toolkit for basic modal logic"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "mlgame 1.0");

    auto* eval = app.add_subcommand("eval", "Evaluate a modal formula on a pointed model");
    std::string model_file, formula_text;
    eval->add_option("model", model_file, "Model file (JSON)")->required();
    eval->add_option("formula", formula_text, "Formula, e.g. \"[][]F | []<>T\"")->required();

    auto* bisim = app.add_subcommand("bisim", "Check n-bisimilarity of two pointed models");
    std::string file_a, file_b;
    int depth = 0;
    bool want_witness = false;
    bisim->add_option("a", file_a, "First model file")->required();
    bisim->add_option("b", file_b, "Second model file")->required();
    bisim->add_option("--depth,-n", depth, "Bisimulation depth")->required()->check(CLI::NonNegativeNumber);
    bisim->add_flag("--witness", want_witness, "Dump the witness relations");

    auto* solve_cmd = app.add_subcommand("solve", "Solve a game position");
    std::string position_file, left_file, right_file;
    int m = -1, k = -1;
    unsigned threads = 1;
    std::size_t node_limit = 0;
    solve_cmd->add_option("position", position_file, "Position file (JSON)");
    solve_cmd->add_option("--left", left_file, "Left model set file");
    solve_cmd->add_option("--right", right_file, "Right model set file");
    solve_cmd->add_option("--m", m, "Modal budget")->check(CLI::NonNegativeNumber);
    solve_cmd->add_option("--k", k, "Connective budget")->check(CLI::NonNegativeNumber);
    for (auto* cmd : {solve_cmd}) {
        cmd->add_option("--threads", threads, "Solver threads")->check(CLI::PositiveNumber);
        cmd->add_option("--node-limit", node_limit, "Memo ceiling (default: $MLGAME_MEMO_LIMIT or 1e7)");
    }

    auto* minimal = app.add_subcommand("minimal", "Pareto-minimal separating budgets");
    int max_size = 0;
    minimal->add_option("left", left_file, "Left model set file")->required();
    minimal->add_option("right", right_file, "Right model set file")->required();
    minimal->add_option("--max-size", max_size, "Bound on m + k")->required()->check(CLI::NonNegativeNumber);
    minimal->add_option("--threads", threads, "Solver threads")->check(CLI::PositiveNumber);
    minimal->add_option("--node-limit", node_limit, "Memo ceiling");

    auto* gen = app.add_subcommand("gen", "Generate hierarchy levels, model families or phi_n");
    std::optional<int> level, vv, ee, phi;
    std::string out_dir;
    bool allow_large = false;
    auto* g_level = gen->add_option("--level", level, "Print the level V_n");
    auto* g_vv = gen->add_option("--vv", vv, "The family VV_n");
    auto* g_ee = gen->add_option("--ee", ee, "The family EE_n");
    auto* g_phi = gen->add_option("--phi", phi, "The first-order formula phi_n");
    g_level->excludes(g_vv, g_ee, g_phi);
    g_vv->excludes(g_ee, g_phi);
    g_ee->excludes(g_phi);
    gen->add_option("--out", out_dir, "Write one model file per member into this directory");
    gen->add_flag("--allow-large", allow_large, "Permit level 5 (65536 sets)");

    auto* experiment = app.add_subcommand("experiment", "Succinctness report at level n");
    int n = 1;
    experiment->add_option("--n", n, "Level (1..3)")->required()->check(CLI::Range(1, 3));
    experiment->add_option("--threads", threads, "Solver threads")->check(CLI::PositiveNumber);
    experiment->add_option("--node-limit", node_limit, "Memo ceiling");

    auto* play = app.add_subcommand("play", "Play a position against the solver");
    std::string as = "D";
    play->add_option("position", position_file, "Position file (JSON)")->required();
    play->add_option("--as", as, "Your role")->check(CLI::IsMember({"S", "D"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_code::ok : exit_code::input_error;
    }

    auto options = [&] {
        solve_options o;
        o.node_limit = node_limit ? node_limit : detail::default_node_limit();
        o.threads = threads;
        return o;
    };

    try {
        if (*eval) {
            auto p = pointed_model_from_json(read_json_file(model_file));
            auto f = parse_ml(formula_text);
            nlohmann::json trace = nlohmann::json::array();
            std::vector<formula> subs;
            detail::post_order(f, subs);
            for (const auto& g : subs) {
                auto ts = truth_set(p.model(), g);
                std::vector<world_id> where;
                for (kripke_model::index w = 0; w < ts.size(); ++w)
                    if (ts[w])
                        where.push_back(p.model().name(w));
                trace.push_back({{"formula", print_ml(g)}, {"true_at", where}});
            }
            out << nlohmann::json{{"formula", print_ml(f)},
                                  {"point", p.point_name()},
                                  {"result", eval_ml(p, f)},
                                  {"trace", trace}}
                       .dump(2)
                << "\n";
            return exit_code::ok;
        }

        if (*bisim) {
            auto a = pointed_model_from_json(read_json_file(file_a));
            auto b = pointed_model_from_json(read_json_file(file_b));
            auto w = n_bisimilar(a, b, depth);
            const auto label = std::to_string(depth) + "-bisimilar";
            nlohmann::json j = {{"depth", depth},
                                {"bisimilar", w.has_value()},
                                {"message", w ? label : "not " + label}};
            if (w && want_witness) {
                nlohmann::json layers = nlohmann::json::array();
                for (const auto& z : w->layers) {
                    nlohmann::json pairs = nlohmann::json::array();
                    for (auto [v, u] : z)
                        pairs.push_back({a.model().name(v), b.model().name(u)});
                    layers.push_back(pairs);
                }
                j["witness"] = layers;
            }
            out << j.dump(2) << "\n";
            return exit_code::ok;
        }

        if (*solve_cmd) {
            game_position pos;
            if (!position_file.empty()) {
                pos = position_from_json(read_json_file(position_file));
                if (m >= 0)
                    pos.m = m;
                if (k >= 0)
                    pos.k = k;
            } else {
                if (left_file.empty() || right_file.empty() || m < 0 || k < 0) {
                    err << "solve: give a position file, or --left, --right, --m and --k\n";
                    return exit_code::input_error;
                }
                pos = {m, k, model_set_from_json(read_json_file(left_file)),
                       model_set_from_json(read_json_file(right_file))};
            }
            out << verdict_json(game_solver(options()).solve(pos)).dump(2) << "\n";
            return exit_code::ok;
        }

        if (*minimal) {
            auto a = model_set_from_json(read_json_file(left_file));
            auto b = model_set_from_json(read_json_file(right_file));
            out << frontier_json(minimal_separating(a, b, max_size, options())).dump(2) << "\n";
            return exit_code::ok;
        }

        if (*gen) {
            if (level) {
                nlohmann::json sets = nlohmann::json::array();
                for (const auto& a : v_level(*level, allow_large))
                    sets.push_back(a.to_string());
                out << nlohmann::json{{"level", *level}, {"size", sets.size()}, {"sets", sets}}.dump(2)
                    << "\n";
                return exit_code::ok;
            }
            if (vv || ee) {
                const bool is_vv = vv.has_value();
                const int which = is_vv ? *vv : *ee;
                if (is_vv && which == 4 && !allow_large)
                    throw hierarchy_error("VV_4 has 65536 members; pass --allow-large");
                auto family = is_vv ? vv_set(which) : ee_set(which);
                if (out_dir.empty()) {
                    out << to_json(family).dump(2) << "\n";
                    return exit_code::ok;
                }
                std::filesystem::create_directories(out_dir);
                nlohmann::json files = nlohmann::json::array();
                const std::string stem = std::string(is_vv ? "vv" : "ee") + std::to_string(which);
                for (std::size_t i = 0; i < family.size(); ++i) {
                    auto path = (std::filesystem::path(out_dir) /
                                 (stem + "_" + std::to_string(i) + ".json")).string();
                    std::ofstream f(path);
                    if (!f)
                        throw model_error("cannot write '" + path + "'");
                    f << to_json(family[i]).dump(2) << "\n";
                    files.push_back(path);
                }
                out << nlohmann::json{{"family", stem}, {"files", files}}.dump(2) << "\n";
                return exit_code::ok;
            }
            if (phi) {
                if (*phi < 1)
                    throw std::invalid_argument("phi_n needs n >= 1");
                auto f = make_phi(*phi);
                out << nlohmann::json{{"n", *phi},
                                      {"formula", print_fo(f)},
                                      {"size", fo_size(f)},
                                      {"size_strict", fo_size(f, fo_size_convention::strict_definition)}}
                           .dump(2)
                    << "\n";
                return exit_code::ok;
            }
            err << "gen: give one of --level, --vv, --ee, --phi\n";
            return exit_code::input_error;
        }

        if (*experiment) {
            const auto start = std::chrono::steady_clock::now();
            nlohmann::json report;
            report["n"] = n;
            auto f = make_phi(n);
            report["phi"] = {{"formula", print_fo(f)},
                             {"size", fo_size(f)},
                             {"size_strict", fo_size(f, fo_size_convention::strict_definition)},
                             {"closed_form", 3 * (1LL << (n + 2)) - 7}};

            auto vvn = vv_set(n);
            auto een = ee_set(n);
            const int chi = chromatic_number(graph_of(vvn, een));
            int k_bound = 0; // D wins whenever k < k_bound, i.e. 2^k < chi
            while ((1LL << k_bound) < chi)
                ++k_bound;
            report["chromatic"] = {{"chi", chi},
                                   {"vertices", vvn.size()},
                                   {"d_wins_for_k_below", k_bound}};

            if (n <= 2) {
                auto holds = [&](const pointed_model& p) {
                    return eval_fo(p.model(), f, {{"x", p.point_name()}});
                };
                bool all_v = std::all_of(vvn.begin(), vvn.end(), holds);
                bool none_e = std::none_of(een.begin(), een.end(), holds);
                report["separation"] = {{"holds_on_vv", all_v}, {"fails_on_ee", none_e}};

                game_solver solver(options());
                const int max_m = n == 1 ? 4 : 3;
                const int max_k = n == 1 ? 2 : 1;
                nlohmann::json grid = nlohmann::json::array();
                for (int kk = 0; kk <= max_k; ++kk)
                    for (int mm = 0; mm <= max_m; ++mm) {
                        nlohmann::json cell = {{"m", mm}, {"k", kk}};
                        try {
                            auto v = solver.solve({mm, kk, vvn, een});
                            cell["winner"] = v.who == winner::spoiler ? "S" : "D";
                            cell["nodes"] = v.nodes;
                            cell["predicted_by_chromatic_bound"] = kk < k_bound;
                        } catch (const budget_exceeded&) {
                            cell["winner"] = "budget exceeded";
                        }
                        grid.push_back(cell);
                    }
                report["grid"] = grid;
                const int frontier_budget = n == 1 ? 5 : 16;
                try {
                    report["frontier"] = frontier_json(minimal_separating(vvn, een, frontier_budget, options()));
                    report["frontier_budget"] = frontier_budget;
                } catch (const budget_exceeded&) {
                    report["frontier"] = "budget exceeded";
                }
            } else {
                report["separation"] = nullptr;
                report["grid"] = nullptr;
                report["frontier"] = nullptr;
            }
            report["seconds"] =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            out << report.dump(2) << "\n";
            return exit_code::ok;
        }

        if (*play) {
            auto pos = position_from_json(read_json_file(position_file));
            return detail::play(pos, as == "S", in, out, options());
        }
    } catch (const budget_exceeded& e) {
        err << "error: " << e.what() << "\n";
        return exit_code::refused;
    } catch (const hierarchy_error& e) {
        err << "refused: " << e.what() << "\n";
        return exit_code::refused;
    } catch (const parse_error& e) {
        err << "syntax error: " << e.what() << "\n";
        return exit_code::input_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_code::input_error;
    }
    return exit_code::ok;
}

} // namespace mlgame
