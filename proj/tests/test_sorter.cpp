// Copyright 2026 The psolas-sim Authors.
// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "psolas/errors.hpp"
#include "psolas/sorter.hpp"

namespace psolas {
namespace {

using Pairs = std::vector<std::pair<std::int64_t, std::int64_t>>;

ErrorModel perfect()
{
    auto e = ErrorModel::error_free();
    e.isolation_radius = 0;
    return e;
}

Pairs to_pairs(const std::vector<SiteVector>& v)
{
    Pairs out;
    for (auto s : v)
        out.emplace_back(s.x, s.y);
    return out;
}

std::vector<SiteVector> random_sites(RngStream& rng, std::size_t count, std::int64_t w, std::int64_t h)
{
    std::set<SiteVector> s;
    while (s.size() < count)
        s.insert({static_cast<std::int64_t>(rng.uniform_index(static_cast<std::uint64_t>(w))),
                  static_cast<std::int64_t>(rng.uniform_index(static_cast<std::uint64_t>(h)))});
    std::vector<SiteVector> out(s.begin(), s.end());
    for (std::size_t i = out.size(); i > 1; --i)
        std::swap(out[i - 1], out[rng.uniform_index(i)]);
    return out;
}

TEST(Matcher, ForcedAndEmptyCases)
{
    std::vector<SiteVector> atom{{0, 0}};
    std::vector<SiteVector> hole{{7, 0}};
    auto m = best_match_translation(atom, hole);
    ASSERT_TRUE(m.translation);
    EXPECT_EQ(*m.translation, (SiteVector{7, 0}));
    EXPECT_EQ(m.filled(), 1U);

    std::vector<SiteVector> none;
    EXPECT_FALSE(best_match_translation(none, hole).translation);
    EXPECT_EQ(best_match_translation(atom, none).filled(), 0U);
}

TEST(Matcher, IdentityWinsTieBreak)
{
    std::vector<SiteVector> sites{{1, 1}, {2, 1}, {4, 3}};
    auto m = best_match_translation(sites, sites);
    EXPECT_EQ(*m.translation, (SiteVector{0, 0}));
    EXPECT_EQ(m.filled(), 3U);
}

TEST(Matcher, TieBreakPrefersSmallNormThenLexicographic)
{
    // Two atoms, one defect: t = -1 and t = +1 both fill one site, then
    // (-1) comes first lexicographically.
    std::vector<SiteVector> atoms{{4, 0}, {6, 0}};
    std::vector<SiteVector> hole{{5, 0}};
    EXPECT_EQ(*best_match_translation(atoms, hole).translation, (SiteVector{-1, 0}));

    std::vector<SiteVector> a2{{0, 0}, {10, 0}};
    std::vector<SiteVector> h2{{3, 0}, {8, 0}};
    EXPECT_EQ(*best_match_translation(a2, h2).translation, (SiteVector{-2, 0}));
}

TEST(Matcher, RandomInstanceAgainstBruteForce)
{
    RngStream rng(31);
    for (int trial = 0; trial < 200; ++trial)
    {
        auto atoms = random_sites(rng, 15, 12, 12);
        auto holes = random_sites(rng, 10, 12, 12);
        auto got = best_match_translation(atoms, holes);
        auto want = oracle::brute_force_match(to_pairs(atoms), to_pairs(holes));
        ASSERT_TRUE(want.found);
        ASSERT_TRUE(got.translation);
        EXPECT_EQ(got.translation->x, want.tx);
        EXPECT_EQ(got.translation->y, want.ty);
        EXPECT_EQ(got.selected, want.selected);
    }
}

TEST(Matcher, SparseFallbackAgreesWithBruteForce)
{
    // Far-apart clusters force the hash-map path.
    std::vector<SiteVector> atoms{{0, 0}, {1, 0}, {3000000, 5}, {0, 4000000}};
    std::vector<SiteVector> holes{{5000000, 7}, {5000001, 7}, {9, 9}};
    auto got = best_match_translation(atoms, holes);
    auto want = oracle::brute_force_match(to_pairs({{0, 0}, {1, 0}}), to_pairs({{5000000, 7}, {5000001, 7}}));
    EXPECT_EQ(got.filled(), 2U);
    EXPECT_EQ(got.translation->x, want.tx);
    EXPECT_EQ(got.translation->y, want.ty);
}

TEST(Matcher, DeterministicAndOrderInsensitiveTranslation)
{
    RngStream rng(32);
    auto atoms = random_sites(rng, 20, 15, 15);
    auto holes = random_sites(rng, 20, 15, 15);
    auto a = best_match_translation(atoms, holes);
    auto b = best_match_translation(atoms, holes);
    EXPECT_EQ(a.translation, b.translation);
    EXPECT_EQ(a.selected, b.selected);
    std::reverse(holes.begin(), holes.end());
    EXPECT_EQ(best_match_translation(atoms, holes).translation, a.translation);
}

TEST(Matcher, SeparationConstraint)
{
    std::vector<SiteVector> pts{{0, 0}, {1, 0}, {3, 0}, {4, 0}};
    EXPECT_EQ(thin_by_separation(pts, 1), (std::vector<std::size_t>{0, 2}));
    EXPECT_EQ(thin_by_separation(pts, 0).size(), 4U);

    std::vector<SiteVector> holes{{10, 0}, {11, 0}, {13, 0}, {14, 0}};
    auto m = best_match_translation(pts, holes, {1});
    EXPECT_EQ(m.filled(), 2U);
    for (std::size_t i = 1; i < m.selected.size(); ++i)
        EXPECT_GT(chebyshev_norm(pts[m.selected[i]] - pts[m.selected[i - 1]]), 1);
    EXPECT_THROW(best_match_translation(pts, holes, {-1}), ParameterError);
}

TEST(Iteration, SingleTranslationFillsEverything)
{
    auto g = LatticeGeometry::square(20);
    auto target = TargetPattern::box(g, {{10, 10}, {3, 3}});
    LatticeState s(g);
    for (auto site : target.sites())
        s.add_atom(site - SiteVector{8, 6});
    RngStream rng(33);
    RegisterOps ops(perfect(), {}, rng);
    auto r = psolas_iteration(s, target, ops);
    EXPECT_EQ(r.status, IterationStatus::Moved);
    EXPECT_EQ(*r.record.translation, (SiteVector{8, 6}));
    EXPECT_EQ(r.record.actual_fills, 9U);
    EXPECT_TRUE(defects(s, target).empty());
    EXPECT_EQ(psolas_iteration(s, target, ops).status, IterationStatus::DefectFreeDetected);
}

TEST(Iteration, ReservoirExhausted)
{
    auto g = LatticeGeometry::square(10);
    auto target = TargetPattern::box(g, {{2, 2}, {2, 2}});
    LatticeState s(g);
    s.add_atom({2, 2});
    RngStream rng(34);
    RegisterOps ops(perfect(), {}, rng);
    EXPECT_EQ(psolas_iteration(s, target, ops).status, IterationStatus::ReservoirExhausted);
    auto report = psolas_sort(s, target, ops);
    EXPECT_EQ(report.outcome, SortOutcome::ReservoirExhausted);
    EXPECT_FALSE(report.success());
}

TEST(Iteration, FirstFillFractionAtLeastAlpha)
{
    auto g = LatticeGeometry::square(100);
    auto target = TargetPattern::centered_square(g, 31);
    double sum = 0;
    for (std::uint64_t k = 0; k < 100; ++k)
    {
        RngStream rng(split_seed(35, k));
        auto s = sample_initial_filling(g, g.bounds(), 0.6, rng);
        RegisterOps ops(perfect(), {}, rng);
        auto d0 = defects(s, target).size();
        auto r = psolas_iteration(s, target, ops);
        sum += static_cast<double>(r.record.actual_fills) / static_cast<double>(d0);
    }
    EXPECT_GE(sum / 100, 0.6);
}

TEST(Sort, AlreadyDefectFree)
{
    auto g = LatticeGeometry::square(10);
    auto target = TargetPattern::box(g, {{2, 2}, {3, 3}});
    LatticeState s(g);
    for (auto site : target.sites())
        s.add_atom(site);
    s.add_atom({0, 0});
    RngStream rng(36);
    RegisterOps ops(perfect(), {}, rng);
    auto r = psolas_sort(s, target, ops);
    EXPECT_EQ(r.outcome, SortOutcome::DefectFree);
    EXPECT_EQ(r.iterations, 0U);
    EXPECT_EQ(r.counts.images, 1U);
    EXPECT_EQ(r.counts.pushouts, 1U);
    EXPECT_EQ(r.cleanup.pushed_out, 1U);
    EXPECT_EQ(r.completion_time, 1.0);
    EXPECT_TRUE(r.success());
}

TEST(Sort, ErrorFreeWithinBoundAndMonotone)
{
    auto g = LatticeGeometry::square(100);
    auto target = TargetPattern::centered_square(g, 31);
    for (double alpha : {0.6, 0.4})
    {
        const auto limit = iterations_for_unity(alpha, 961) + 2;
        for (std::uint64_t k = 0; k < 30; ++k)
        {
            RngStream rng(split_seed(37, k));
            auto s = sample_initial_filling(g, g.bounds(), alpha, rng);
            RegisterOps ops(perfect(), {}, rng);
            auto r = psolas_sort(s, target, ops);
            ASSERT_TRUE(r.success());
            EXPECT_LE(r.iterations, limit);
            EXPECT_EQ(r.final_defects, 0U);
            for (std::size_t i = 1; i < r.defect_trace.size(); ++i)
                EXPECT_LT(r.defect_trace[i], r.defect_trace[i - 1]);
        }
    }
}

TEST(Sort, StopBounds)
{
    auto g = LatticeGeometry::square(40);
    auto target = TargetPattern::centered_square(g, 15);
    RngStream rng(38);
    auto s = sample_initial_filling(g, g.bounds(), 0.3, rng);
    RegisterOps ops(perfect(), {}, rng);
    auto r = psolas_sort(s, target, ops, {1});
    EXPECT_EQ(r.outcome, SortOutcome::StopBound);
    EXPECT_EQ(r.iterations, 1U);
    EXPECT_TRUE(std::isinf(r.completion_time));

    auto s2 = sample_initial_filling(g, g.bounds(), 0.3, rng);
    auto r2 = psolas_sort(s2, target, ops, {100, 0.5});
    EXPECT_EQ(r2.outcome, SortOutcome::StopBound);
    EXPECT_EQ(r2.iterations, 1U);
}

TEST(Sequential, HandPlannedExample)
{
    auto g = LatticeGeometry::line(100);
    LatticeState s(g);
    for (std::int64_t x : {0, 17, 40, 71})
        s.add_atom({x, 0});
    RngStream rng(39);
    RegisterOps ops(perfect(), {}, rng);
    auto r = sequential_sort_1d(s, equidistant_targets(0, 10), ops);
    EXPECT_EQ(r.outcome, SortOutcome::DefectFree);
    EXPECT_EQ(r.moves, 3U);
    std::vector<std::int64_t> sites;
    for (const auto& a : s.atoms())
        if (a.alive)
            sites.push_back(a.true_site.x);
    EXPECT_EQ(sites, (std::vector<std::int64_t>{0, 10, 20, 30}));
}

TEST(Sequential, AlreadySortedNeedsNoMoves)
{
    auto g = LatticeGeometry::line(50);
    LatticeState s(g);
    for (std::int64_t x : {10, 12, 14, 16})
        s.add_atom({x, 0});
    RngStream rng(40);
    RegisterOps ops(perfect(), {}, rng);
    auto r = sequential_sort_1d(s, equidistant_targets(10, 2), ops);
    EXPECT_EQ(r.outcome, SortOutcome::DefectFree);
    EXPECT_EQ(r.moves, 0U);
}

TEST(Sequential, ExcessAtomOnTargetIsRemoved)
{
    auto g = LatticeGeometry::line(50);
    LatticeState s(g);
    for (std::int64_t x : {0, 1, 2, 3, 21})
        s.add_atom({x, 0});
    RngStream rng(41);
    RegisterOps ops(perfect(), {}, rng);
    auto r = sequential_sort_1d(s, equidistant_targets(5, 5), ops);
    ASSERT_EQ(r.outcome, SortOutcome::DefectFree);
    std::vector<std::int64_t> sites;
    for (const auto& a : s.atoms())
        if (a.alive)
            sites.push_back(a.true_site.x);
    std::sort(sites.begin(), sites.end());
    EXPECT_EQ(sites, (std::vector<std::int64_t>{5, 10, 15, 20}));
}

TEST(Sequential, RandomStatesReachCommandedSeparations)
{
    auto g = LatticeGeometry::line(100);
    for (std::int64_t sep : {10, 5, 2, 1})
    {
        auto targets = equidistant_targets((100 - 3 * sep) / 2, sep);
        for (std::uint64_t k = 0; k < 100; ++k)
        {
            RngStream rng(split_seed(42 + static_cast<std::uint64_t>(sep), k));
            auto s = sample_atoms(g, 4, rng);
            RegisterOps ops(perfect(), {}, rng);
            auto r = sequential_sort_1d(s, targets, ops);
            ASSERT_EQ(r.outcome, SortOutcome::DefectFree);
            std::vector<std::int64_t> sites;
            for (const auto& a : s.atoms())
                if (a.alive)
                    sites.push_back(a.true_site.x);
            std::sort(sites.begin(), sites.end());
            ASSERT_EQ(sites.size(), 4U);
            for (std::size_t i = 1; i < 4; ++i)
                EXPECT_EQ(sites[i] - sites[i - 1], sep);
        }
    }
}

TEST(Sequential, Errors)
{
    auto g2 = LatticeGeometry::square(10);
    LatticeState s2(g2);
    RngStream rng(43);
    RegisterOps ops(perfect(), {}, rng);
    EXPECT_THROW(sequential_sort_1d(s2, equidistant_targets(0, 1), ops), GeometryError);

    auto g = LatticeGeometry::line(20);
    LatticeState s(g);
    s.add_atom({3, 0});
    auto r = sequential_sort_1d(s, equidistant_targets(0, 2), ops);
    EXPECT_EQ(r.outcome, SortOutcome::ReservoirExhausted);
}

TEST(Bound, Examples)
{
    EXPECT_DOUBLE_EQ(defect_bound(0.6, 0), 0.4);
    EXPECT_NEAR(defect_bound(0.6, 7) * 961, 0.63, 0.005);
    EXPECT_NEAR(defect_bound(0.6, 8) * 961, 0.252, 0.001);
    EXPECT_NEAR(defect_bound(0.4, 13) * 961, 0.75, 0.005);
    EXPECT_THROW(defect_bound(0.0, 1), ParameterError);
    EXPECT_THROW(defect_bound(1.0, 1), ParameterError);
}

TEST(Bound, IterationsForUnity)
{
    EXPECT_EQ(iterations_for_unity(0.6, 1), 0U);
    EXPECT_EQ(iterations_for_unity(0.3, 1), 0U);
    EXPECT_EQ(iterations_for_unity(0.6, 961), 7U);
    EXPECT_EQ(iterations_for_unity(0.4, 961), 13U);
    // Closed form: smallest n with (1 + n) > ln N / -ln(1 - a), i.e. floor of the ratio.
    for (double a : {0.2, 0.4, 0.6, 0.85})
        for (std::size_t n : {2U, 25U, 121U, 961U, 10000U})
        {
            auto closed = static_cast<std::size_t>(
                std::max(0.0, std::floor(-std::log(static_cast<double>(n)) / std::log(1 - a))));
            EXPECT_EQ(iterations_for_unity(a, n), closed) << a << ' ' << n;
        }
}

TEST(Bound, DoublingNAddsAboutConstant)
{
    for (double a : {0.4, 0.6})
    {
        auto step = std::log(2.0) / -std::log(1 - a);
        for (std::size_t n = 16; n < 100000; n *= 2)
        {
            auto d = static_cast<double>(iterations_for_unity(a, 2 * n))
                     - static_cast<double>(iterations_for_unity(a, n));
            EXPECT_LE(d, std::ceil(step));
            EXPECT_GE(d, std::floor(step));
        }
    }
}

TEST(Plan, WriterFormat)
{
    SortReport r;
    IterationRecord rec;
    rec.index = 1;
    rec.translation = SiteVector{3, -2};
    rec.selected = 5;
    rec.flipped = 4;
    rec.actual_fills = 4;
    rec.defects_after = 7;
    rec.time_after = 1.004;
    r.plan.push_back(rec);
    std::ostringstream os;
    write_plan(os, r, 2);
    EXPECT_EQ(os.str(), "# iteration t selected flipped predicted actual defects_after time_s\n"
                        "1 3,-2 5 4 5 4 7 1.004\n");
}

} // namespace
} // namespace psolas
