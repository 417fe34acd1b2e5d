// Copyright 2026 The psolas-sim Authors.
// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "psolas/errors.hpp"
#include "psolas/register_ops.hpp"

namespace psolas {
namespace {

ErrorModel perfect()
{
    auto e = ErrorModel::error_free();
    e.isolation_radius = 0;
    return e;
}

std::vector<AtomId> storage_ids(const LatticeState& s)
{
    std::vector<AtomId> ids;
    for (const auto& a : s.atoms())
        if (a.alive && a.spin == SpinState::Up)
            ids.push_back(a.id);
    return ids;
}

LatticeState filled(const LatticeGeometry& g)
{
    LatticeState s(g);
    for (std::size_t i = 0; i < g.site_count(); ++i)
        s.add_atom(g.site(i));
    return s;
}

TEST(Models, ValidationAndScaling)
{
    ErrorModel e;
    e.pump_fail_prob = 1.5;
    EXPECT_THROW(e.validate(), ParameterError);
    TimingModel t;
    t.t_shift = -1;
    EXPECT_THROW(t.validate(), ParameterError);

    TimingModel base;
    auto twice = base.scaled(2);
    EXPECT_EQ(twice.t_image, 2.0);
    EXPECT_EQ(twice.t_pump, 4e-3);
    base.addressing_mode = AddressingMode::Serial;
    EXPECT_DOUBLE_EQ(base.address_cost(10), 500e-6);
    base.addressing_mode = AddressingMode::Parallel;
    EXPECT_EQ(base.address_cost(10), 1e-3);
}

TEST(Image, ExactWithoutReconstructionError)
{
    auto g = LatticeGeometry::line(10);
    LatticeState s(g);
    for (std::int64_t x : {0, 2, 4, 6})
        s.add_atom({x, 0});
    s.add_atom({8, 0}, SpinState::Down);
    RngStream rng(1);
    RegisterOps ops(perfect(), {}, rng);
    auto rec = ops.image(s);
    ASSERT_EQ(rec.size(), 4U);
    for (const auto& r : rec)
        EXPECT_EQ(r.measured_site, s.atom(r.id).true_site);
    EXPECT_EQ(s.elapsed_time(), 1.0);
}

TEST(Image, OneDimensionalErrorSupportIsPlusMinusOne)
{
    auto g = LatticeGeometry::line(50);
    auto s = filled(g);
    auto e = perfect();
    e.reconstruct_error_prob = 1;
    RngStream rng(2);
    RegisterOps ops(e, {}, rng);
    std::set<std::int64_t> seen;
    for (int k = 0; k < 20; ++k)
        for (const auto& r : ops.image(s))
        {
            auto d = r.measured_site - s.atom(r.id).true_site;
            EXPECT_EQ(d.y, 0);
            seen.insert(d.x);
        }
    EXPECT_EQ(seen, (std::set<std::int64_t>{-1, 1}));
}

TEST(Image, TwoDimensionalErrorSupportIsEightNeighbours)
{
    auto g = LatticeGeometry::square(10);
    auto s = filled(g);
    auto e = perfect();
    e.reconstruct_error_prob = 1;
    RngStream rng(3);
    RegisterOps ops(e, {}, rng);
    std::set<SiteVector> seen;
    for (int k = 0; k < 10; ++k)
        for (const auto& r : ops.image(s))
            seen.insert(r.measured_site - s.atom(r.id).true_site);
    EXPECT_EQ(seen.size(), 8U);
    for (auto d : seen)
        EXPECT_EQ(chebyshev_norm(d), 1);
}

TEST(Image, ReconstructionRate)
{
    auto g = LatticeGeometry::line(1000);
    auto s = filled(g);
    auto e = perfect();
    e.reconstruct_error_prob = 0.016;
    RngStream rng(4);
    RegisterOps ops(e, {}, rng);
    std::size_t wrong = 0;
    std::size_t total = 0;
    for (int k = 0; k < 100; ++k)
        for (const auto& r : ops.image(s))
        {
            ++total;
            wrong += r.measured_site != s.atom(r.id).true_site;
        }
    EXPECT_EQ(total, 100000U);
    EXPECT_NEAR(static_cast<double>(wrong) / total, 0.016, 0.002);
}

TEST(Address, PerfectAndNullEfficiency)
{
    auto g = LatticeGeometry::line(10);
    auto s = filled(g);
    RngStream rng(5);
    RegisterOps ops(perfect(), {}, rng);
    std::vector<AtomId> pick{AtomId{1}, AtomId{4}};
    auto res = ops.address(s, pick);
    EXPECT_EQ(res.flipped, (std::vector<bool>{true, true}));
    EXPECT_EQ(s.atom(AtomId{1}).spin, SpinState::Down);
    EXPECT_EQ(s.alive_count(SpinState::Down), 2U);

    auto before = snapshot_string(s);
    auto e = perfect();
    e.address_efficiency = 0;
    RegisterOps none(e, {}, rng);
    std::vector<AtomId> more{AtomId{2}};
    none.address(s, more);
    auto after = snapshot_string(s);
    EXPECT_EQ(before.substr(before.find('\n', 30)), after.substr(after.find('\n', 30)));
}

TEST(Address, Preconditions)
{
    auto g = LatticeGeometry::line(10);
    auto s = filled(g);
    RngStream rng(6);
    RegisterOps ops(perfect(), {}, rng);
    std::vector<AtomId> twice{AtomId{1}, AtomId{1}};
    EXPECT_THROW(ops.address(s, twice), PreconditionError);
    std::vector<AtomId> one{AtomId{3}};
    ops.address(s, one);
    EXPECT_THROW(ops.address(s, one), PreconditionError);
    s.lose(AtomId{5});
    std::vector<AtomId> dead{AtomId{5}};
    EXPECT_THROW(ops.address(s, dead), PreconditionError);
}

TEST(Address, EfficiencyRate)
{
    for (double eps : {0.80, 0.95})
    {
        auto g = LatticeGeometry::line(1000);
        auto e = perfect();
        e.address_efficiency = eps;
        RngStream rng(7);
        RegisterOps ops(e, {}, rng);
        std::size_t ok = 0;
        for (int k = 0; k < 100; ++k)
        {
            auto s = filled(g);
            auto ids = storage_ids(s);
            for (bool f : ops.address(s, ids).flipped)
                ok += f;
        }
        EXPECT_NEAR(ok / 1e5, eps, 0.01);
    }
}

TEST(Address, CrosstalkOnlyWithinRadius)
{
    auto g = LatticeGeometry::square(30);
    LatticeState s(g);
    auto target = s.add_atom({10, 10});
    auto near = s.add_atom({13, 7});
    auto far = s.add_atom({14, 10});
    auto e = perfect();
    e.crosstalk_prob = 1;
    e.isolation_radius = 3;
    RngStream rng(8);
    RegisterOps ops(e, {}, rng);
    std::vector<AtomId> ids{target};
    auto res = ops.address(s, ids);
    EXPECT_EQ(res.crosstalk_flips, 1U);
    EXPECT_EQ(s.atom(near).spin, SpinState::Down);
    EXPECT_EQ(s.atom(far).spin, SpinState::Up);
}

TEST(Shift, IdentityAndSingleAtomMove)
{
    auto g = LatticeGeometry::line(20);
    LatticeState s(g);
    auto a = s.add_atom({5, 0});
    RngStream rng(9);
    RegisterOps ops(perfect(), {}, rng);

    std::vector<AtomId> ids{a};
    ops.address(s, ids);
    ops.shift(s, {0, 0});
    EXPECT_EQ(s.atom(a).true_site, (SiteVector{5, 0}));
    ops.shift(s, {2, 0});
    ops.pump_back(s);
    EXPECT_TRUE(s.atom(a).alive);
    EXPECT_EQ(s.atom(a).spin, SpinState::Up);
    EXPECT_EQ(s.atom(a).true_site, (SiteVector{7, 0}));
}

TEST(Shift, ForwardThenBackIsIdentity)
{
    auto g = LatticeGeometry::square(40);
    RngStream fill(10);
    auto s = sample_initial_filling(g, {{10, 10}, {20, 20}}, 0.5, fill);
    RngStream rng(11);
    RegisterOps ops(perfect(), {}, rng);
    auto ids = storage_ids(s);
    ops.address(s, ids);
    auto before = s.atoms().size();
    std::vector<SiteVector> sites;
    for (const auto& a : s.atoms())
        sites.push_back(a.true_site);
    ops.shift(s, {7, -4});
    ops.shift(s, {-7, 4});
    ASSERT_EQ(s.atoms().size(), before);
    for (std::size_t i = 0; i < before; ++i)
        EXPECT_EQ(s.atoms()[i].true_site, sites[i]);
    EXPECT_EQ(s.alive_count(), before);
}

TEST(Shift, SpinflipRateIndependentOfDistance)
{
    for (std::int64_t t : {1, 10, 100})
    {
        auto g = LatticeGeometry::line(2000);
        auto e = perfect();
        e.transport_spinflip_prob = 0.006;
        RngStream rng(12 + static_cast<std::uint64_t>(t));
        RegisterOps ops(e, {}, rng);
        std::size_t lost = 0;
        for (int k = 0; k < 100; ++k)
        {
            LatticeState s(g);
            for (std::int64_t x = 0; x < 1000; ++x)
                s.add_atom({x, 0}, SpinState::Down);
            auto r = ops.shift(s, {t, 0});
            lost += r.spinflip_lost;
            EXPECT_EQ(r.left_lattice, 0U);
        }
        EXPECT_NEAR(lost / 1e5, 0.006, 0.001) << "t = " << t;
    }
}

TEST(Pump, PerfectAndAlwaysFailing)
{
    auto g = LatticeGeometry::line(10);
    LatticeState s(g);
    s.add_atom({1, 0}, SpinState::Down);
    s.add_atom({2, 0}, SpinState::Down);
    s.add_atom({5, 0});
    RngStream rng(13);
    {
        auto copy = s;
        RegisterOps ops(perfect(), {}, rng);
        auto r = ops.pump_back(copy);
        EXPECT_EQ(r.pumped, 2U);
        EXPECT_EQ(copy.alive_count(SpinState::Up), 3U);
    }
    auto e = perfect();
    e.pump_fail_prob = 1;
    RegisterOps ops(e, {}, rng);
    ops.pump_back(s);
    EXPECT_EQ(s.alive_count(SpinState::Down), 0U);
    EXPECT_EQ(s.alive_count(SpinState::Up), 1U);
}

TEST(Pump, CollisionLosesBoth)
{
    auto g = LatticeGeometry::line(10);
    LatticeState s(g);
    s.add_atom({3, 0}, SpinState::Down);
    s.add_atom({3, 0}, SpinState::Up);
    RngStream rng(14);
    RegisterOps ops(perfect(), {}, rng);
    auto r = ops.pump_back(s);
    EXPECT_EQ(r.collision_losses, 2U);
    EXPECT_EQ(s.alive_count(), 0U);
}

TEST(Pump, FailureRate)
{
    auto g = LatticeGeometry::line(1000);
    auto e = perfect();
    e.pump_fail_prob = 0.004;
    RngStream rng(15);
    RegisterOps ops(e, {}, rng);
    std::size_t fails = 0;
    for (int k = 0; k < 100; ++k)
    {
        LatticeState s(g);
        for (std::int64_t x = 0; x < 1000; ++x)
            s.add_atom({x, 0}, SpinState::Down);
        fails += ops.pump_back(s).pump_failures;
    }
    EXPECT_NEAR(fails / 1e5, 0.004, 0.0007);
}

TEST(RemoveExcess, PerfectKeepsExactlyTargetAtoms)
{
    auto g = LatticeGeometry::square(10);
    auto target = TargetPattern::box(g, {{2, 2}, {3, 3}});
    LatticeState s(g);
    for (std::int64_t x : {2, 3, 4, 7})
        s.add_atom({x, 3});
    s.add_atom({0, 0});
    RngStream rng(16);
    RegisterOps ops(perfect(), {}, rng);
    auto r = ops.remove_excess(s, target);
    EXPECT_EQ(r.protected_atoms, 3U);
    EXPECT_EQ(r.pushed_out, 2U);
    EXPECT_EQ(r.on_target_survivors, 3U);
    EXPECT_EQ(r.off_target_survivors, 0U);
    for (const auto& a : s.atoms())
        EXPECT_EQ(a.alive, target.contains(a.true_site));
    EXPECT_EQ(s.alive_count(SpinState::Up), 3U);
}

TEST(RemoveExcess, NoExcessLeavesStateUnchanged)
{
    auto g = LatticeGeometry::square(10);
    auto target = TargetPattern::box(g, {{2, 2}, {3, 3}});
    LatticeState s(g);
    for (auto site : target.sites())
        s.add_atom(site);
    RngStream rng(17);
    RegisterOps ops(perfect(), {}, rng);
    auto r = ops.remove_excess(s, target);
    EXPECT_EQ(r.pushed_out, 0U);
    EXPECT_EQ(s.alive_count(SpinState::Up), 9U);
}

TEST(BackgroundLoss, ZeroIntervalAndArithmetic)
{
    auto g = LatticeGeometry::line(100);
    auto s = filled(g);
    RngStream rng(18);
    RegisterOps ops(ErrorModel{}, {}, rng);
    EXPECT_EQ(ops.apply_background_loss(s, 0.0), 0U);
    EXPECT_EQ(s.alive_count(), 100U);
    EXPECT_NEAR(std::exp(-1.0 / 360.0), 0.99722, 1e-5);
}

TEST(BackgroundLoss, SurvivalAtOneLifetime)
{
    auto g = LatticeGeometry::line(1000);
    auto e = perfect();
    e.background_lifetime = 2.5;
    RngStream rng(19);
    RegisterOps ops(e, {}, rng);
    std::size_t lost = 0;
    for (int k = 0; k < 100; ++k)
    {
        auto s = filled(g);
        lost += ops.apply_background_loss(s, 2.5);
    }
    EXPECT_NEAR(1 - lost / 1e5, std::exp(-1.0), 0.005);
}

TEST(Time, EveryPrimitiveAdvancesClock)
{
    auto g = LatticeGeometry::square(20);
    RngStream fill(20);
    auto s = sample_initial_filling(g, g.bounds(), 0.5, fill);
    RngStream rng(21);
    TimingModel t;
    RegisterOps ops(ErrorModel{}, t, rng);
    double last = s.elapsed_time();
    for (int round = 0; round < 5; ++round)
    {
        ops.image(s);
        EXPECT_NEAR(s.elapsed_time() - last, t.t_image, 1e-12);
        last = s.elapsed_time();
        auto ids = storage_ids(s);
        ids.resize(ids.size() / 3);
        ops.address(s, ids);
        EXPECT_GT(s.elapsed_time(), last);
        last = s.elapsed_time();
        ops.shift(s, {1, 0});
        EXPECT_NEAR(s.elapsed_time() - last, t.t_shift, 1e-12);
        last = s.elapsed_time();
        ops.pump_back(s);
        EXPECT_NEAR(s.elapsed_time() - last, t.t_pump, 1e-12);
        last = s.elapsed_time();
        ASSERT_NO_THROW(occupancy_check(s));
    }
}

TEST(Log, RecordsOperations)
{
    auto g = LatticeGeometry::line(10);
    LatticeState s(g);
    auto a = s.add_atom({1, 0});
    RngStream rng(22);
    OperationLog log;
    RegisterOps ops(perfect(), {}, rng, &log);
    ops.image(s);
    std::vector<AtomId> ids{a};
    ops.address(s, ids);
    ops.shift(s, {3, 0});
    ops.pump_back(s);
    ASSERT_EQ(log.events().size(), 4U);
    std::ostringstream os;
    log.write(os);
    auto text = os.str();
    EXPECT_NE(text.find("op=image t0=0 t1=1 affected=1"), std::string::npos);
    EXPECT_NE(text.find("op=shift"), std::string::npos);
    EXPECT_NE(text.find(" t=3 "), std::string::npos);
    EXPECT_EQ(ops.counts().shifts, 1U);
    EXPECT_EQ(ops.counts().addressed_atoms, 1U);
}

TEST(Determinism, SameSeedSameLog)
{
    auto run = [] {
        auto g = LatticeGeometry::square(20);
        RngStream rng(23);
        auto s = sample_initial_filling(g, g.bounds(), 0.6, rng);
        OperationLog log;
        RegisterOps ops(ErrorModel{}, {}, rng, &log);
        for (int k = 0; k < 3; ++k)
        {
            ops.image(s);
            auto ids = storage_ids(s);
            ids.resize(ids.size() / 2);
            ops.address(s, ids);
            ops.shift(s, {1, 1});
            ops.pump_back(s);
        }
        std::ostringstream os;
        log.write(os);
        return os.str() + snapshot_string(s);
    };
    EXPECT_EQ(run(), run());
}

} // namespace
} // namespace psolas
