#include "mlgame/fo.hpp"
#include "mlgame/hierarchy.hpp"
#include "mlgame/ml.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

using namespace mlgame;

namespace {

const std::vector<std::string> pq{"p", "q"};

/// Sorts the children of every commutative node, bottom up.
formula canonical(const formula& f)
{
    if (f.is_modal()) {
        auto c = canonical(f.child());
        return f.kind() == ml_kind::diamond ? formula::diamond(c) : formula::box(c);
    }
    if (!f.is_binary())
        return f;
    auto l = canonical(f.left()), r = canonical(f.right());
    if (r < l)
        std::swap(l, r);
    return f.kind() == ml_kind::conj ? formula::conj(l, r) : formula::disj(l, r);
}

} // namespace

TEST(MlParse, PrecedenceAndAssociativity)
{
    EXPECT_EQ(parse_ml("p & q | ~p"),
              formula::disj(formula::conj(formula::prop("p"), formula::prop("q")), formula::neg_prop("p")));
    EXPECT_EQ(parse_ml("p | q | T"),
              formula::disj(formula::disj(formula::prop("p"), formula::prop("q")), formula::top()));
    EXPECT_EQ(parse_ml("[]<>F"), formula::box(formula::diamond(formula::bot())));
    EXPECT_EQ(parse_ml(" <> ( p | q ) "),
              formula::diamond(formula::disj(formula::prop("p"), formula::prop("q"))));
}

TEST(MlParse, Errors)
{
    for (const char* bad : {"", "p &", "(p", "p q", "~", "~T", "[", "<p>", "p ) "})
        EXPECT_THROW(parse_ml(bad), parse_error) << bad;
    try {
        parse_ml("p & & q");
        FAIL();
    } catch (const parse_error& e) {
        EXPECT_EQ(e.position(), 4u);
    }
}

TEST(MlPrint, MinimalParentheses)
{
    EXPECT_EQ(print_ml(parse_ml("[][]F | []<>T")), "[][]F | []<>T");
    EXPECT_EQ(print_ml(parse_ml("(p | q) & ~q")), "(p | q) & ~q");
    EXPECT_EQ(print_ml(parse_ml("p | (q | T)")), "p | (q | T)");
    EXPECT_EQ(print_ml(parse_ml("<>(p & q)")), "<>(p & q)");
}

TEST(MlPrint, RandomRoundTrip)
{
    std::mt19937 rng(11);
    for (int i = 0; i < 500; ++i) {
        auto f = oracle::random_formula(rng, i % 9, pq);
        EXPECT_EQ(parse_ml(print_ml(f)), f) << print_ml(f);
    }
}

TEST(MlSizes, Examples)
{
    auto s = ml_sizes(parse_ml("[][]F | []<>T"));
    EXPECT_EQ(s.ms, 4);
    EXPECT_EQ(s.cs, 1);
    EXPECT_EQ(s.s, 5);
    EXPECT_EQ(ml_sizes(formula::top()).s, 0);
    EXPECT_EQ(modal_depth(parse_ml("[][]F | []<>T")), 2);
}

TEST(MlSizes, AgreeWithDirectCount)
{
    std::mt19937 rng(12);
    for (int i = 0; i < 300; ++i) {
        auto f = oracle::random_formula(rng, i % 10, pq);
        auto [m, k] = oracle::sizes(f);
        auto s = ml_sizes(f);
        EXPECT_EQ(s.ms, m);
        EXPECT_EQ(s.cs, k);
        EXPECT_EQ(s.s, m + k);
    }
}

TEST(MlEval, HierarchyPairExample)
{
    auto e1 = ee_set(1);
    ASSERT_EQ(e1.size(), 1u);
    EXPECT_FALSE(eval_ml(e1[0], parse_ml("[][]F | []<>T")));
    for (const auto& v : vv_set(1))
        EXPECT_TRUE(eval_ml(v, parse_ml("[][]F | []<>T")));
    EXPECT_TRUE(eval_ml(model_of(hf_set(0)), parse_ml("[]F")));
}

TEST(MlEval, AgreesWithDirectTruthDefinition)
{
    std::mt19937 rng(13);
    for (int i = 0; i < 300; ++i) {
        auto m = oracle::random_model(rng, 5, pq);
        auto f = oracle::random_formula(rng, i % 8, pq);
        auto ts = truth_set(*m, f);
        for (kripke_model::index w = 0; w < m->size(); ++w) {
            EXPECT_EQ(eval_ml(pointed_model(m, w), f), oracle::holds(*m, w, f));
            EXPECT_EQ(ts[w], oracle::holds(*m, w, f));
        }
    }
}

TEST(MlEval, UnknownPropositionIsAnError)
{
    auto p = pointed_model(make_model({"a"}, {}), "a");
    EXPECT_THROW(eval_ml(p, parse_ml("p")), eval_error);
    EXPECT_THROW(separates(parse_ml("p"), model_set{p}, {}), eval_error);
}

TEST(MlSeparates, VacuousOnEmptySets)
{
    auto p = model_of(hf_set(0));
    EXPECT_TRUE(separates(formula::bot(), {}, model_set{p}));
    EXPECT_TRUE(separates(formula::top(), model_set{p}, {}));
    EXPECT_TRUE(separates(formula::bot(), {}, {}));
    EXPECT_FALSE(separates(formula::top(), model_set{p}, model_set{p}));
}

TEST(MlEnumerate, OrderedCountsMatchRecurrence)
{
    // N(a,b) = [a=b=0](2+2|Φ|) + 2 N(a-1,b) + 2 Σ N(a1,b1) N(a-a1, b-1-b1)
    const int max_m = 2, max_k = 2;
    for (std::size_t np = 0; np <= 2; ++np) {
        std::vector<std::string> sig(pq.begin(), pq.begin() + static_cast<long>(np));
        std::vector<std::vector<long>> n(max_m + 1, std::vector<long>(max_k + 1, 0));
        for (int b = 0; b <= max_k; ++b)
            for (int a = 0; a <= max_m; ++a) {
                long c = (a == 0 && b == 0) ? 2 + 2 * static_cast<long>(np) : 0;
                if (a > 0)
                    c += 2 * n[a - 1][b];
                if (b > 0)
                    for (int a1 = 0; a1 <= a; ++a1)
                        for (int b1 = 0; b1 < b; ++b1)
                            c += 2 * n[a1][b1] * n[a - a1][b - 1 - b1];
                n[a][b] = c;
            }
        long total = 0;
        for (const auto& row : n)
            for (auto c : row)
                total += c;
        auto all = enumerate_ml(max_m, max_k, sig, commutativity::ordered);
        EXPECT_EQ(static_cast<long>(all.size()), total) << np;
        EXPECT_EQ(std::set<formula>(all.begin(), all.end()).size(), all.size());
    }
}

TEST(MlEnumerate, TwoLeafExample)
{
    // cs = 1, ms = 0 over {p}: 4 literals, ordered pairs under ∧ and ∨.
    auto ordered = enumerate_ml(0, 1, {"p"}, commutativity::ordered);
    auto two_leaf = std::count_if(ordered.begin(), ordered.end(),
                                  [](const formula& f) { return f.is_binary(); });
    EXPECT_EQ(two_leaf, 32);
    auto canon = enumerate_ml(0, 1, {"p"});
    EXPECT_EQ(std::count_if(canon.begin(), canon.end(), [](const formula& f) { return f.is_binary(); }), 20);
}

TEST(MlEnumerate, CanonicalIsOrderedModuloCommutativity)
{
    for (std::size_t np = 0; np <= 2; ++np) {
        std::vector<std::string> sig(pq.begin(), pq.begin() + static_cast<long>(np));
        auto ordered = enumerate_ml(2, 2, sig, commutativity::ordered);
        std::set<formula> classes;
        for (const auto& f : ordered)
            classes.insert(canonical(f));
        auto canon = enumerate_ml(2, 2, sig);
        EXPECT_EQ(canon.size(), classes.size());
        std::set<formula> got;
        for (const auto& f : canon)
            got.insert(canonical(f));
        EXPECT_EQ(got, classes);
    }
}

TEST(MlEnumerate, WithinBoundsAndGrouped)
{
    auto all = enumerate_ml(3, 2, {"p"});
    std::pair<int, int> last{0, 0};
    for (const auto& f : all) {
        auto s = ml_sizes(f);
        EXPECT_LE(s.ms, 3);
        EXPECT_LE(s.cs, 2);
        std::pair<int, int> cur{s.ms, s.cs};
        EXPECT_LE(last, cur);
        last = cur;
    }
    EXPECT_THROW(enumerate_ml(-1, 0, {}), std::invalid_argument);
}

TEST(FoSize, ClosedForms)
{
    for (int n = 1; n <= 10; ++n) {
        const long long expect_psi = 3LL * (1LL << (n + 2)) - 13;
        EXPECT_EQ(fo_size(make_psi(n)), expect_psi) << n;
        EXPECT_EQ(fo_size(make_phi(n)), expect_psi + 6) << n;
        if (n > 1) {
            EXPECT_EQ(fo_size(make_psi(n)), 2 * fo_size(make_psi(n - 1)) + 13);
        }
    }
    EXPECT_EQ(fo_size(make_psi(1)), 11);
    EXPECT_EQ(fo_size(make_phi(1)), 17);
    EXPECT_EQ(fo_size(make_psi(1), fo_size_convention::strict_definition), 7);
    EXPECT_EQ(fo_size(make_phi(1), fo_size_convention::strict_definition), 11);
}

TEST(FoFormula, PrintingAndFreeVariables)
{
    EXPECT_EQ(print_fo(make_phi(1)), "∀y∀z(R(x,y) ∧ R(x,z) → (∃s R(y,s) ↔ ∃t R(z,t)))");
    for (int n = 1; n <= 4; ++n) {
        std::set<std::string> free;
        free_variables(make_psi(n), free);
        EXPECT_EQ(free, (std::set<std::string>{"x", "y"}));
        free.clear();
        free_variables(make_phi(n), free);
        EXPECT_EQ(free, (std::set<std::string>{"x"}));
    }
    EXPECT_THROW(make_psi(0), std::invalid_argument);
}

TEST(FoEval, PsiDefinesBoundedBisimilarity)
{
    // Over Φ = ∅, ψₙ(u, v) holds iff u and v are n-bisimilar.
    std::mt19937 rng(14);
    for (int i = 0; i < 60; ++i) {
        auto m = oracle::random_model(rng, 4, {});
        for (int n = 1; n <= 2; ++n) {
            auto psi = make_psi(n);
            for (kripke_model::index u = 0; u < m->size(); ++u)
                for (kripke_model::index v = 0; v < m->size(); ++v)
                    EXPECT_EQ(eval_fo(*m, psi, {{"x", m->name(u)}, {"y", m->name(v)}}),
                              oracle::n_bisimilar(pointed_model(m, u), pointed_model(m, v), n));
        }
    }
}

TEST(FoEval, PhiSeparatesLevelOne)
{
    auto phi = make_phi(1);
    for (const auto& p : vv_set(1))
        EXPECT_TRUE(eval_fo(p.model(), phi, {{"x", p.point_name()}}));
    for (const auto& p : ee_set(1))
        EXPECT_FALSE(eval_fo(p.model(), phi, {{"x", p.point_name()}}));
}

TEST(FoEval, Errors)
{
    auto m = make_model({"a"}, {});
    EXPECT_THROW(eval_fo(*m, make_phi(1), {}), fo_eval_error);
    EXPECT_THROW(eval_fo(*m, make_phi(1), {{"x", "nowhere"}}), fo_eval_error);
    EXPECT_THROW(eval_fo(*m, fo_formula::unary("p", "x"), {{"x", "a"}}), fo_eval_error);
    auto labelled = make_model({"a"}, {}, {{"p", {"a"}}});
    EXPECT_TRUE(eval_fo(*labelled, fo_formula::unary("p", "x"), {{"x", "a"}}));
    EXPECT_TRUE(eval_fo(*labelled, fo_formula::equal("x", "x"), {{"x", "a"}}));
}
