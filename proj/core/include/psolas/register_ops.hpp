// Copyright 2026 The psolas-sim Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "psolas/lattice.hpp"
#include "psolas/random.hpp"

namespace psolas {

/*!
 * Failure probabilities of the physical primitives.
 *
 * Defaults are the values measured on the 1D apparatus: a transport success
 * of 97.4 % split into pumping, transport spin-flip and reconstruction
 * errors; a 360 s vacuum lifetime; crosstalk below 1 % beyond 20 sites.
 */
struct ErrorModel
{
    double address_efficiency = 0.95;     //!< intended spin flip succeeds
    double crosstalk_prob = 0.01;         //!< neighbour within radius flips
    double pump_fail_prob = 0.004;        //!< lost during pump-back
    double transport_spinflip_prob = 0.006; //!< lost during a shift
    double reconstruct_error_prob = 0.016;  //!< measured site off by one
    double background_lifetime = 360.0;   //!< [s]; infinity disables loss
    std::int64_t isolation_radius = 20;   //!< [sites], Chebyshev

    /// Perfect addressing, no error channel, infinite lifetime.
    static ErrorModel error_free() noexcept;

    /// Throws ParameterError if a probability leaves [0, 1], the lifetime is
    /// not positive, or the radius is negative.
    void validate() const;

    friend bool operator==(const ErrorModel&, const ErrorModel&) = default;
};

enum class AddressingMode : std::uint8_t
{
    Serial,   //!< beam deflector, one atom after another
    Parallel, //!< spatial light modulator, all atoms at once
};

const char* to_string(AddressingMode m) noexcept;

/// Durations of each primitive, in seconds.
struct TimingModel
{
    double t_image = 1.0;
    double t_address_per_atom = 50e-6;
    double t_address_parallel_overhead = 1e-3;
    double t_shift = 1e-3;
    double t_pump = 2e-3;
    double t_pushout = 1e-3;
    AddressingMode addressing_mode = AddressingMode::Parallel;

    double address_cost(std::size_t atom_count) const noexcept;
    /// Every duration multiplied by `factor`.
    TimingModel scaled(double factor) const noexcept;
    /// Throws ParameterError for negative or non-finite durations.
    void validate() const;

    friend bool operator==(const TimingModel&, const TimingModel&) = default;
};

//---------------------------------------------------------------------------//
/// One executed primitive.
struct OpEvent
{
    std::string op;
    double time_before = 0;
    double time_after = 0;
    std::size_t affected = 0;
    std::vector<std::pair<std::string, std::string>> params;
};

/*!
 * Append-only record of executed primitives.
 *
 * Text form is one event per line of space-separated `key=value` tokens:
 * `op=<name> t0=<s> t1=<s> affected=<n>` followed by op-specific parameters.
 */
class OperationLog
{
  public:
    void append(OpEvent e) { events_.push_back(std::move(e)); }
    std::span<const OpEvent> events() const noexcept { return events_; }
    void write(std::ostream& os) const;

  private:
    std::vector<OpEvent> events_;
};

struct OpCounts
{
    std::size_t images = 0;
    std::size_t address_pulses = 0; //!< address() calls
    std::size_t addressed_atoms = 0;
    std::size_t shifts = 0;
    std::size_t pumps = 0;
    std::size_t pushouts = 0;

    OpCounts& operator+=(const OpCounts& o) noexcept;
    friend bool operator==(const OpCounts&, const OpCounts&) = default;
};

struct ImageRecord
{
    AtomId id{};
    SiteVector measured_site;
};

struct AddressResult
{
    std::vector<bool> flipped;      //!< aligned with the requested ids
    std::size_t crosstalk_flips = 0;
};

struct ShiftResult
{
    std::size_t moved = 0;
    std::size_t spinflip_lost = 0;
    std::size_t left_lattice = 0;
};

struct PumpResult
{
    std::size_t pumped = 0;
    std::size_t pump_failures = 0;
    std::size_t collision_losses = 0;
};

struct ExcessRemovalResult
{
    std::size_t protected_atoms = 0;
    std::size_t pushed_out = 0;
    std::size_t on_target_survivors = 0;
    std::size_t off_target_survivors = 0;
};

/*!
 * The four physical primitives plus excess removal and background loss.
 *
 * Each call advances the lattice clock by its TimingModel cost and then
 * applies background loss for that interval. Randomness is drawn from the
 * supplied stream in atom-id order so a fixed seed replays exactly.
 */
class RegisterOps
{
  public:
    RegisterOps(ErrorModel errors, TimingModel timing, RngStream& rng, OperationLog* log = nullptr);

    const ErrorModel& errors() const noexcept { return errors_; }
    const TimingModel& timing() const noexcept { return timing_; }
    const OpCounts& counts() const noexcept { return counts_; }

    /// Fluorescence image of the storage register.
    std::vector<ImageRecord> image(LatticeState& state);

    /// Storage -> shift spin flip of `ids`, with crosstalk onto unaddressed
    /// storage atoms within the isolation radius of any requested atom.
    /// Throws PreconditionError for a dead, shift-register or repeated id.
    AddressResult address(LatticeState& state, std::span<const AtomId> ids);
    AddressResult address(LatticeState& state, std::span<const AtomId> ids, AddressingMode mode);

    /// Rigid translation of the whole shift register. Cost is independent
    /// of |t|.
    ShiftResult shift(LatticeState& state, SiteVector t);

    /// Optical pumping of the shift register back into storage.
    PumpResult pump_back(LatticeState& state);

    /// Address storage atoms on `target`, push out every remaining storage
    /// atom, pump the protected atoms back.
    ExcessRemovalResult remove_excess(LatticeState& state, const TargetPattern& target);
    /// Same sequence protecting an explicit atom set.
    ExcessRemovalResult remove_unprotected(LatticeState& state, std::span<const AtomId> keep);

    /// Each alive atom survives with exp(-dt / lifetime). Does not advance
    /// the clock. Returns the number of atoms lost.
    std::size_t apply_background_loss(LatticeState& state, double dt);

  private:
    ExcessRemovalResult remove_excess_impl(LatticeState& state,
                                           std::span<const AtomId> keep,
                                           const TargetPattern* target);
    void log(OpEvent e);

    ErrorModel errors_;
    TimingModel timing_;
    RngStream& rng_;
    OperationLog* log_;
    OpCounts counts_;
};

} // namespace psolas
