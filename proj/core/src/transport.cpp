// Copyright 2026 The psolas-sim Authors.
// SPDX-License-Identifier: Apache-2.0
#include "psolas/transport.hpp"

#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "psolas/errors.hpp"
#include "psolas/text_format.hpp"

namespace psolas {
namespace {

void require_probability(double p, const char* name)
{
    if (!(p >= 0 && p <= 1))
        throw ParameterError(fmt::format("{} must be in [0, 1], got {}", name, p));
}

} // namespace

double phase_to_position(double phi, double wavelength)
{
    if (!(wavelength > 0))
        throw ParameterError("wavelength must be positive");
    return phi / (2 * std::numbers::pi) * (wavelength / 2);
}

NoiseBudget NoiseBudget::from_phase_rms(double phase_rms_deg, double wavelength)
{
    return {phase_rms_deg, phase_to_position(degrees_to_radians(phase_rms_deg), wavelength)};
}

double ramp_displacement(double displacement, double duration, double t) noexcept
{
    return displacement * (1 - std::cos(std::numbers::pi * t / duration)) / 2;
}

double ramp_velocity(double displacement, double duration, double t) noexcept
{
    return displacement * std::numbers::pi / (2 * duration) * std::sin(std::numbers::pi * t / duration);
}

PhaseProfile sinusoidal_ramp(double displacement_sites, double duration, std::size_t n_samples)
{
    if (!(duration > 0) || !std::isfinite(duration))
        throw ParameterError("ramp duration must be positive");
    if (n_samples < 2)
        throw ParameterError("ramp needs at least two samples");

    PhaseProfile profile;
    profile.duration = duration;
    profile.displacement = displacement_sites;
    profile.samples.resize(n_samples);
    const double dt = duration / static_cast<double>(n_samples - 1);
    for (std::size_t i = 0; i < n_samples; ++i)
    {
        double t = dt * static_cast<double>(i);
        profile.samples[i] = {t, sites_to_phase(ramp_displacement(displacement_sites, duration, t))};
    }
    profile.samples.front() = {0.0, 0.0};
    profile.samples.back() = {duration, sites_to_phase(displacement_sites)};
    return profile;
}

void write_phase_profile(std::ostream& os, const PhaseProfile& profile)
{
    os << "# displacement_sites " << format_double(profile.displacement) << " duration_s "
       << format_double(profile.duration) << '\n';
    for (const auto& s : profile.samples)
        os << format_double(s.time) << ' ' << format_double(s.phase) << '\n';
}

double cumulative_stepwise_efficiency(double p_step, unsigned distance)
{
    require_probability(p_step, "p_step");
    return std::pow(p_step, 2.0 * distance);
}

double distance_independent_success(const TransportErrorBudget& budget)
{
    require_probability(budget.pump, "pump error");
    require_probability(budget.spinflip, "spin-flip error");
    require_probability(budget.reconstruct, "reconstruction error");
    double total = budget.pump + budget.spinflip + budget.reconstruct;
    if (total > 1)
        throw ParameterError(fmt::format("error budget sums to {} > 1", total));
    return 1 - total;
}

double combined_ground_state_fraction(double p_axial, double p_transverse1, double p_transverse2)
{
    require_probability(p_axial, "axial occupation");
    require_probability(p_transverse1, "transverse occupation");
    require_probability(p_transverse2, "transverse occupation");
    return p_axial * p_transverse1 * p_transverse2;
}

} // namespace psolas
