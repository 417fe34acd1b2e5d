// Copyright 2026 The psolas-sim Authors.
// SPDX-License-Identifier: Apache-2.0
#include "psolas/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "psolas/errors.hpp"

namespace psolas {

const char* to_string(SpinState s) noexcept
{
    return s == SpinState::Up ? "up" : "down";
}

std::int64_t chebyshev_norm(SiteVector v) noexcept
{
    return std::max(std::abs(v.x), std::abs(v.y));
}

std::ostream& operator<<(std::ostream& os, SiteVector v)
{
    return os << '(' << v.x << ", " << v.y << ')';
}

void PhysicalLatticeParams::validate() const
{
    for (double v : {wavelength, depth_up, depth_down, omega_parallel, omega_perp, omega_recoil})
    {
        if (!(v > 0) || !std::isfinite(v))
            throw ParameterError("physical lattice parameters must be strictly positive");
    }
}

//---------------------------------------------------------------------------//
LatticeGeometry::LatticeGeometry(int dimensionality, SiteVector extent, double site_pitch)
    : dim_(dimensionality), extent_(extent), pitch_(site_pitch)
{
    if (dim_ != 1 && dim_ != 2)
        throw GeometryError(fmt::format("dimensionality must be 1 or 2, got {}", dim_));
    if (extent_.x < 1 || extent_.y < 1)
        throw GeometryError("lattice extent must be at least 1 on every axis");
    if (dim_ == 1 && extent_.y != 1)
        throw GeometryError("1D lattice must have extent.y == 1");
    if (!(pitch_ > 0))
        throw GeometryError("site pitch must be positive");
}

bool LatticeGeometry::contains(const SiteBox& b) const noexcept
{
    return b.size.x >= 1 && b.size.y >= 1 && contains(b.origin)
           && contains(b.origin + b.size - SiteVector{1, 1});
}

//---------------------------------------------------------------------------//
TargetPattern::TargetPattern(const LatticeGeometry& geometry, std::vector<SiteVector> sites)
    : geometry_(geometry), sites_(std::move(sites)), mask_(geometry.site_count(), false)
{
    if (sites_.empty())
        throw GeometryError("target pattern must not be empty");
    std::sort(sites_.begin(), sites_.end());
    sites_.erase(std::unique(sites_.begin(), sites_.end()), sites_.end());
    for (auto s : sites_)
    {
        if (!geometry_.contains(s))
            throw GeometryError(fmt::format("target site ({}, {}) outside lattice", s.x, s.y));
        mask_[geometry_.index(s)] = true;
    }
}

TargetPattern TargetPattern::box(const LatticeGeometry& geometry, const SiteBox& box)
{
    if (!geometry.contains(box))
        throw GeometryError("target box outside lattice");
    std::vector<SiteVector> sites;
    sites.reserve(static_cast<std::size_t>(box.count()));
    for (std::int64_t y = 0; y < box.size.y; ++y)
        for (std::int64_t x = 0; x < box.size.x; ++x)
            sites.push_back(box.origin + SiteVector{x, y});
    return TargetPattern(geometry, std::move(sites));
}

TargetPattern TargetPattern::centered_square(const LatticeGeometry& geometry, std::int64_t side)
{
    auto ext = geometry.extent();
    SiteVector size{side, geometry.dimensionality() == 2 ? side : 1};
    SiteVector origin{(ext.x - size.x) / 2, (ext.y - size.y) / 2};
    return box(geometry, {origin, size});
}

bool TargetPattern::contains(SiteVector s) const noexcept
{
    return geometry_.contains(s) && mask_[geometry_.index(s)];
}

//---------------------------------------------------------------------------//
LatticeState::LatticeState(LatticeGeometry geometry)
    : geometry_(std::move(geometry))
    , storage_(geometry_.site_count(), -1)
    , shift_(geometry_.site_count(), -1)
{
}

const Atom& LatticeState::atom(AtomId id) const
{
    if (to_index(id) >= atoms_.size())
        throw PreconditionError(fmt::format("unknown atom id {}", to_index(id)));
    return atoms_[to_index(id)];
}

Atom& LatticeState::mutable_atom(AtomId id)
{
    if (to_index(id) >= atoms_.size())
        throw PreconditionError(fmt::format("unknown atom id {}", to_index(id)));
    return atoms_[to_index(id)];
}

std::optional<AtomId> LatticeState::occupant(SpinState reg, SiteVector site) const noexcept
{
    if (!geometry_.contains(site))
        return std::nullopt;
    auto idx = grid(reg)[geometry_.index(site)];
    if (idx < 0)
        return std::nullopt;
    return AtomId{static_cast<std::uint32_t>(idx)};
}

std::size_t LatticeState::alive_count(SpinState reg) const noexcept
{
    return static_cast<std::size_t>(std::count_if(atoms_.begin(), atoms_.end(), [reg](const Atom& a) {
        return a.alive && a.spin == reg;
    }));
}

std::size_t LatticeState::alive_count() const noexcept
{
    return static_cast<std::size_t>(
        std::count_if(atoms_.begin(), atoms_.end(), [](const Atom& a) { return a.alive; }));
}

void LatticeState::place(Atom& a)
{
    if (!geometry_.contains(a.true_site))
    {
        a.alive = false;
        return;
    }
    auto& cell = grid(a.spin)[geometry_.index(a.true_site)];
    if (cell >= 0)
    {
        // Pair loss.
        atoms_[static_cast<std::size_t>(cell)].alive = false;
        cell = -1;
        a.alive = false;
        return;
    }
    cell = static_cast<std::int32_t>(to_index(a.id));
}

AtomId LatticeState::add_atom(SiteVector site, SpinState spin)
{
    if (!geometry_.contains(site))
        throw GeometryError(fmt::format("cannot add atom at ({}, {}): outside lattice", site.x, site.y));
    AtomId id{static_cast<std::uint32_t>(atoms_.size())};
    atoms_.push_back(Atom{id, site, site, spin, true});
    place(atoms_.back());
    return id;
}

void LatticeState::lose(AtomId id)
{
    auto& a = mutable_atom(id);
    if (!a.alive)
        return;
    grid(a.spin)[geometry_.index(a.true_site)] = -1;
    a.alive = false;
}

void LatticeState::set_spin(AtomId id, SpinState spin)
{
    auto& a = mutable_atom(id);
    if (!a.alive)
        throw PreconditionError(fmt::format("atom {} is not alive", to_index(id)));
    if (a.spin == spin)
        return;
    grid(a.spin)[geometry_.index(a.true_site)] = -1;
    a.spin = spin;
    place(a);
}

void LatticeState::translate_register(SpinState reg, SiteVector t)
{
    if (t == SiteVector{})
        return;
    auto& cells = grid(reg);
    std::vector<std::size_t> moved;
    for (auto& a : atoms_)
    {
        if (!a.alive || a.spin != reg)
            continue;
        cells[geometry_.index(a.true_site)] = -1;
        a.true_site += t;
        moved.push_back(to_index(a.id));
    }
    // A rigid translation cannot create collisions inside one register, so
    // placement only marks atoms that left the lattice.
    for (auto i : moved)
        place(atoms_[i]);
}

void LatticeState::set_measured(AtomId id, SiteVector site)
{
    mutable_atom(id).measured_site = site;
}

void LatticeState::advance_time(double dt)
{
    if (!(dt >= 0) || !std::isfinite(dt))
        throw ParameterError(fmt::format("time step must be finite and non-negative, got {}", dt));
    elapsed_ += dt;
}

OccupancyReport LatticeState::occupancy_check() const
{
    OccupancyReport report;
    std::vector<std::int32_t> up(geometry_.site_count(), -1);
    std::vector<std::int32_t> down(geometry_.site_count(), -1);
    for (const auto& a : atoms_)
    {
        if (!a.alive)
            continue;
        if (!geometry_.contains(a.true_site))
            throw ConsistencyError(fmt::format("alive atom {} outside lattice", to_index(a.id)));
        auto& cell = (a.spin == SpinState::Up ? up : down)[geometry_.index(a.true_site)];
        if (cell >= 0)
            throw ConsistencyError(fmt::format("atoms {} and {} share a {} site", cell,
                                               to_index(a.id), to_string(a.spin)));
        cell = static_cast<std::int32_t>(to_index(a.id));
        ++(a.spin == SpinState::Up ? report.storage : report.shift);
    }
    if (up != storage_ || down != shift_)
        throw ConsistencyError("occupancy index disagrees with atom roster");
    return report;
}

//---------------------------------------------------------------------------//
LatticeState sample_initial_filling(const LatticeGeometry& geometry,
                                    const SiteBox& region,
                                    double alpha,
                                    RngStream& rng)
{
    if (!(alpha >= 0 && alpha <= 1))
        throw ParameterError(fmt::format("filling probability must be in [0, 1], got {}", alpha));
    if (!geometry.contains(region))
        throw GeometryError("filling region outside lattice");
    LatticeState state(geometry);
    for (std::int64_t y = 0; y < region.size.y; ++y)
        for (std::int64_t x = 0; x < region.size.x; ++x)
            if (rng.bernoulli(alpha))
                state.add_atom(region.origin + SiteVector{x, y});
    return state;
}

LatticeState sample_atoms(const LatticeGeometry& geometry, std::size_t count, RngStream& rng)
{
    if (count > geometry.site_count())
        throw ParameterError(fmt::format("cannot place {} atoms on {} sites", count, geometry.site_count()));
    std::vector<std::size_t> chosen;
    while (chosen.size() < count)
    {
        auto i = static_cast<std::size_t>(rng.uniform_index(geometry.site_count()));
        if (std::find(chosen.begin(), chosen.end(), i) == chosen.end())
            chosen.push_back(i);
    }
    std::sort(chosen.begin(), chosen.end());
    LatticeState state(geometry);
    for (auto i : chosen)
        state.add_atom(geometry.site(i));
    return state;
}

DefectSet defects(const LatticeState& state, const TargetPattern& target)
{
    DefectSet out;
    for (auto s : target.sites())
        if (!state.occupant(SpinState::Up, s))
            out.push_back(s);
    return out;
}

void write_snapshot(std::ostream& os, const LatticeState& state)
{
    const bool two_d = state.geometry().dimensionality() == 2;
    auto ext = state.geometry().extent();
    os << "# psolas lattice snapshot\n";
    os << "# dim " << state.geometry().dimensionality() << " extent " << ext.x;
    if (two_d)
        os << ' ' << ext.y;
    os << " time " << fmt::format("{:.9f}", state.elapsed_time()) << '\n';
    os << (two_d ? "# id register x y dx dy\n" : "# id register x dx\n");
    for (const auto& a : state.atoms())
    {
        if (!a.alive)
            continue;
        auto d = a.measured_site - a.true_site;
        if (two_d)
            os << fmt::format("{} {} {} {} {} {}\n", to_index(a.id), to_string(a.spin),
                              a.true_site.x, a.true_site.y, d.x, d.y);
        else
            os << fmt::format("{} {} {} {}\n", to_index(a.id), to_string(a.spin), a.true_site.x, d.x);
    }
}

std::string snapshot_string(const LatticeState& state)
{
    std::ostringstream os;
    write_snapshot(os, state);
    return os.str();
}

} // namespace psolas
