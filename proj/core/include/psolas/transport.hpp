// Copyright 2026 The psolas-sim Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <numbers>
#include <vector>

namespace psolas {

inline constexpr double kDefaultWavelength = 866e-9; // [m]

constexpr double degrees_to_radians(double deg) noexcept
{
    return deg * std::numbers::pi / 180.0;
}

/// Lattice position [m] commanded by optical phase `phi` [rad]:
/// (wavelength / 2) * phi / (2 pi). Throws ParameterError if wavelength <= 0.
double phase_to_position(double phi, double wavelength = kDefaultWavelength);

/// Phase [rad] that displaces the lattice by `sites` lattice sites.
constexpr double sites_to_phase(double sites) noexcept
{
    return 2 * std::numbers::pi * sites;
}

/// Relative phase noise and the position jitter it implies.
struct NoiseBudget
{
    double phase_rms_deg = 0;
    double position_rms = 0; //!< [m]

    static NoiseBudget from_phase_rms(double phase_rms_deg, double wavelength = kDefaultWavelength);
};

//---------------------------------------------------------------------------//
struct PhaseSample
{
    double time = 0;  //!< [s]
    double phase = 0; //!< [rad]
};

/// Sampled phase program for one transport.
struct PhaseProfile
{
    double duration = 0;         //!< [s]
    double displacement = 0;     //!< [sites]
    std::vector<PhaseSample> samples;
};

/// Raised-cosine displacement x(t) = d (1 - cos(pi t / T)) / 2, in sites.
double ramp_displacement(double displacement, double duration, double t) noexcept;
/// dx/dt of the raised-cosine ramp, in sites per second.
double ramp_velocity(double displacement, double duration, double t) noexcept;

/*!
 * Sample a raised-cosine transport ramp.
 *
 * Samples are uniform in time over [0, duration]; the first and last samples
 * are pinned to phase 0 and 2 pi d exactly. Throws ParameterError when
 * duration <= 0 or n_samples < 2.
 */
PhaseProfile sinusoidal_ramp(double displacement_sites, double duration, std::size_t n_samples);

/// Two-column text export: a `#` header carrying displacement and duration,
/// then `time_s phase_rad` rows.
void write_phase_profile(std::ostream& os, const PhaseProfile& profile);

//---------------------------------------------------------------------------//
/// Legacy stepwise transport: p_step^(2 distance), two shift operations per
/// site.
double cumulative_stepwise_efficiency(double p_step, unsigned distance);

struct TransportErrorBudget
{
    double pump = 0;
    double spinflip = 0;
    double reconstruct = 0;
};

/// 1 - (pump + spinflip + reconstruct). Throws ParameterError when a
/// component is outside [0, 1] or the sum exceeds 1.
double distance_independent_success(const TransportErrorBudget& budget);

/// Product of the axial and the two transverse ground-state occupations.
double combined_ground_state_fraction(double p_axial, double p_transverse1, double p_transverse2);

} // namespace psolas
