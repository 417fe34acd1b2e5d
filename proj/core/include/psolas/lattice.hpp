// Copyright 2026 The psolas-sim Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "psolas/random.hpp"

namespace psolas {

/// Internal state of an atom, which also selects the register trapping it.
enum class SpinState : std::uint8_t
{
    Up,   //!< storage register, |F=4, m_F=4>
    Down, //!< shift register, |F=3, m_F=3>
};

const char* to_string(SpinState s) noexcept;

//---------------------------------------------------------------------------//
/*!
 * Integer lattice coordinate.
 *
 * Always two components; one-dimensional lattices keep y == 0. Coordinates
 * are signed and unbounded so translations and out-of-lattice positions are
 * representable.
 */
struct SiteVector
{
    std::int64_t x = 0;
    std::int64_t y = 0;

    friend constexpr SiteVector operator+(SiteVector a, SiteVector b) noexcept
    {
        return {a.x + b.x, a.y + b.y};
    }
    friend constexpr SiteVector operator-(SiteVector a, SiteVector b) noexcept
    {
        return {a.x - b.x, a.y - b.y};
    }
    friend constexpr SiteVector operator-(SiteVector a) noexcept { return {-a.x, -a.y}; }
    SiteVector& operator+=(SiteVector o) noexcept
    {
        x += o.x;
        y += o.y;
        return *this;
    }

    // Lexicographic: x first, then y.
    friend constexpr auto operator<=>(const SiteVector&, const SiteVector&) = default;
};

/// max(|x|, |y|)
std::int64_t chebyshev_norm(SiteVector v) noexcept;

std::ostream& operator<<(std::ostream& os, SiteVector v);

//---------------------------------------------------------------------------//
/// Documented apparatus constants. The discrete simulation never integrates
/// trap dynamics; these only feed unit conversions and reports.
struct PhysicalLatticeParams
{
    double wavelength = 866e-9;              //!< [m]
    double depth_up = 75e-6;                 //!< [K], temperature-equivalent
    double depth_down = 75e-6;               //!< [K]
    double omega_parallel = 2 * 3.14159265358979323846 * 110e3; //!< [rad/s]
    double omega_perp = 2 * 3.14159265358979323846 * 20e3;      //!< [rad/s]
    double omega_recoil = 2 * 3.14159265358979323846 * 2e3;     //!< [rad/s]

    /// Throws ParameterError unless every field is strictly positive.
    void validate() const;
    double site_pitch() const noexcept { return wavelength / 2; }
};

//---------------------------------------------------------------------------//
/// Axis-aligned box of sites: [origin, origin + size).
struct SiteBox
{
    SiteVector origin;
    SiteVector size{1, 1};

    bool contains(SiteVector s) const noexcept
    {
        return s.x >= origin.x && s.y >= origin.y && s.x < origin.x + size.x
               && s.y < origin.y + size.y;
    }
    std::int64_t count() const noexcept { return size.x * size.y; }
};

/// Lattice extent. 1D lattices have extent {width, 1}.
class LatticeGeometry
{
  public:
    /// Throws GeometryError for non-positive extent or pitch.
    LatticeGeometry(int dimensionality, SiteVector extent, double site_pitch = 433e-9);

    static LatticeGeometry line(std::int64_t width, double site_pitch = 433e-9)
    {
        return LatticeGeometry(1, {width, 1}, site_pitch);
    }
    static LatticeGeometry square(std::int64_t side, double site_pitch = 433e-9)
    {
        return LatticeGeometry(2, {side, side}, site_pitch);
    }

    int dimensionality() const noexcept { return dim_; }
    SiteVector extent() const noexcept { return extent_; }
    double site_pitch() const noexcept { return pitch_; }
    std::size_t site_count() const noexcept
    {
        return static_cast<std::size_t>(extent_.x * extent_.y);
    }
    SiteBox bounds() const noexcept { return {{0, 0}, extent_}; }

    bool contains(SiteVector s) const noexcept { return bounds().contains(s); }
    bool contains(const SiteBox& b) const noexcept;

    /// Row-major index; requires contains(s).
    std::size_t index(SiteVector s) const noexcept
    {
        return static_cast<std::size_t>(s.y * extent_.x + s.x);
    }
    SiteVector site(std::size_t index) const noexcept
    {
        auto i = static_cast<std::int64_t>(index);
        return {i % extent_.x, i / extent_.x};
    }

    friend bool operator==(const LatticeGeometry&, const LatticeGeometry&) = default;

  private:
    int dim_;
    SiteVector extent_;
    double pitch_;
};

//---------------------------------------------------------------------------//
/*!
 * Non-empty set of sites to be filled with exactly one atom each.
 *
 * Sites are stored sorted and unique; membership tests use a bitmap over the
 * owning geometry.
 */
class TargetPattern
{
  public:
    /// Throws GeometryError if empty or any site lies outside the geometry.
    TargetPattern(const LatticeGeometry& geometry, std::vector<SiteVector> sites);

    static TargetPattern box(const LatticeGeometry& geometry, const SiteBox& box);
    /// side x side square centered in a 2D geometry (or a centered segment in 1D).
    static TargetPattern centered_square(const LatticeGeometry& geometry, std::int64_t side);

    std::span<const SiteVector> sites() const noexcept { return sites_; }
    std::size_t size() const noexcept { return sites_.size(); }
    bool contains(SiteVector s) const noexcept;
    const LatticeGeometry& geometry() const noexcept { return geometry_; }

  private:
    LatticeGeometry geometry_;
    std::vector<SiteVector> sites_;
    std::vector<bool> mask_;
};

/// Target sites currently lacking an atom, in the pattern's sorted order.
using DefectSet = std::vector<SiteVector>;

//---------------------------------------------------------------------------//
enum class AtomId : std::uint32_t
{
};

constexpr std::uint32_t to_index(AtomId id) noexcept
{
    return static_cast<std::uint32_t>(id);
}

struct Atom
{
    AtomId id{};
    SiteVector true_site;
    SiteVector measured_site; //!< last reconstructed position
    SpinState spin = SpinState::Up;
    bool alive = true;
};

struct OccupancyReport
{
    std::size_t storage = 0;
    std::size_t shift = 0;

    friend bool operator==(const OccupancyReport&, const OccupancyReport&) = default;
};

/*!
 * Dual-register occupancy of one lattice plus the simulated clock.
 *
 * Every mutator keeps the invariant that each (register, site) pair holds at
 * most one alive atom: an atom arriving on an occupied pair is lost together
 * with the occupant. Alive atoms are always inside the geometry; anything
 * moved outside is marked lost.
 */
class LatticeState
{
  public:
    explicit LatticeState(LatticeGeometry geometry);

    const LatticeGeometry& geometry() const noexcept { return geometry_; }
    double elapsed_time() const noexcept { return elapsed_; }

    /// Every atom ever created, dead or alive, indexed by id.
    std::span<const Atom> atoms() const noexcept { return atoms_; }
    const Atom& atom(AtomId id) const;

    std::optional<AtomId> occupant(SpinState reg, SiteVector site) const noexcept;
    std::size_t alive_count(SpinState reg) const noexcept;
    std::size_t alive_count() const noexcept;

    /// Adds an atom with measured == true site. Throws GeometryError if the
    /// site is outside the lattice. Returns the new id even when the arrival
    /// caused pair loss.
    AtomId add_atom(SiteVector site, SpinState spin = SpinState::Up);

    void lose(AtomId id);
    /// Moves the atom to the other register at the same site.
    void set_spin(AtomId id, SpinState spin);
    /// Rigid translation of every alive atom in `reg`.
    void translate_register(SpinState reg, SiteVector t);
    void set_measured(AtomId id, SiteVector site);
    /// Throws ParameterError for negative or non-finite dt.
    void advance_time(double dt);

    /// Recomputes occupancy from the roster and compares with the indexes.
    /// Throws ConsistencyError on any disagreement.
    OccupancyReport occupancy_check() const;

  private:
    Atom& mutable_atom(AtomId id);
    std::vector<std::int32_t>& grid(SpinState reg) noexcept
    {
        return reg == SpinState::Up ? storage_ : shift_;
    }
    const std::vector<std::int32_t>& grid(SpinState reg) const noexcept
    {
        return reg == SpinState::Up ? storage_ : shift_;
    }
    void place(Atom& a);

    LatticeGeometry geometry_;
    std::vector<Atom> atoms_;
    // Occupant atom index per site, -1 if empty.
    std::vector<std::int32_t> storage_;
    std::vector<std::int32_t> shift_;
    double elapsed_ = 0;
};

//---------------------------------------------------------------------------//
/// Each site of `region` independently holds one storage atom with
/// probability alpha. Sites are visited row-major.
LatticeState sample_initial_filling(const LatticeGeometry& geometry,
                                    const SiteBox& region,
                                    double alpha,
                                    RngStream& rng);

/// Exactly `count` storage atoms on distinct sites drawn uniformly from the
/// lattice. Throws ParameterError if count exceeds the site count.
LatticeState sample_atoms(const LatticeGeometry& geometry, std::size_t count, RngStream& rng);

/// Target sites without an alive storage-register atom (ground truth).
DefectSet defects(const LatticeState& state, const TargetPattern& target);

inline OccupancyReport occupancy_check(const LatticeState& state)
{
    return state.occupancy_check();
}

/*!
 * Line-oriented snapshot of alive atoms.
 *
 * Format, one atom per line after a `#` header block:
 *   2D: `<id> <up|down> <x> <y> <dx> <dy>`
 *   1D: `<id> <up|down> <x> <dx>`
 * where (x, y) is the true site and (dx, dy) = measured - true.
 */
void write_snapshot(std::ostream& os, const LatticeState& state);
std::string snapshot_string(const LatticeState& state);

} // namespace psolas
