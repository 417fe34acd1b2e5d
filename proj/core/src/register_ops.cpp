// Copyright 2026 The psolas-sim Authors.
// SPDX-License-Identifier: Apache-2.0
#include "psolas/register_ops.hpp"

#include <algorithm>
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

void require_duration(double t, const char* name)
{
    if (!(t >= 0) || !std::isfinite(t))
        throw ParameterError(fmt::format("{} must be finite and non-negative, got {}", name, t));
}

// 2D inclusive prefix sums over a site mask, for "any marked site within a
// Chebyshev box" queries.
class BoxCounter
{
  public:
    BoxCounter(const LatticeGeometry& g, const std::vector<std::uint8_t>& mask)
        : w_(g.extent().x), h_(g.extent().y), sums_(static_cast<std::size_t>((w_ + 1) * (h_ + 1)), 0)
    {
        for (std::int64_t y = 0; y < h_; ++y)
        {
            for (std::int64_t x = 0; x < w_; ++x)
            {
                at(x + 1, y + 1) = mask[static_cast<std::size_t>(y * w_ + x)] + at(x, y + 1)
                                   + at(x + 1, y) - at(x, y);
            }
        }
    }

    std::int64_t count(SiteVector center, std::int64_t r) const
    {
        auto x0 = std::clamp<std::int64_t>(center.x - r, 0, w_);
        auto x1 = std::clamp<std::int64_t>(center.x + r + 1, 0, w_);
        auto y0 = std::clamp<std::int64_t>(center.y - r, 0, h_);
        auto y1 = std::clamp<std::int64_t>(center.y + r + 1, 0, h_);
        return at(x1, y1) - at(x0, y1) - at(x1, y0) + at(x0, y0);
    }

  private:
    std::int64_t& at(std::int64_t x, std::int64_t y)
    {
        return sums_[static_cast<std::size_t>(y * (w_ + 1) + x)];
    }
    std::int64_t at(std::int64_t x, std::int64_t y) const
    {
        return sums_[static_cast<std::size_t>(y * (w_ + 1) + x)];
    }

    std::int64_t w_;
    std::int64_t h_;
    std::vector<std::int64_t> sums_;
};

std::string vec_text(SiteVector v, int dim)
{
    return dim == 2 ? fmt::format("{},{}", v.x, v.y) : fmt::format("{}", v.x);
}

} // namespace

//---------------------------------------------------------------------------//
ErrorModel ErrorModel::error_free() noexcept
{
    ErrorModel m;
    m.address_efficiency = 1;
    m.crosstalk_prob = 0;
    m.pump_fail_prob = 0;
    m.transport_spinflip_prob = 0;
    m.reconstruct_error_prob = 0;
    m.background_lifetime = std::numeric_limits<double>::infinity();
    return m;
}

void ErrorModel::validate() const
{
    require_probability(address_efficiency, "address_efficiency");
    require_probability(crosstalk_prob, "crosstalk_prob");
    require_probability(pump_fail_prob, "pump_fail_prob");
    require_probability(transport_spinflip_prob, "transport_spinflip_prob");
    require_probability(reconstruct_error_prob, "reconstruct_error_prob");
    if (!(background_lifetime > 0))
        throw ParameterError("background_lifetime must be positive");
    if (isolation_radius < 0)
        throw ParameterError("isolation_radius must be non-negative");
}

const char* to_string(AddressingMode m) noexcept
{
    return m == AddressingMode::Serial ? "serial" : "parallel";
}

double TimingModel::address_cost(std::size_t atom_count) const noexcept
{
    if (addressing_mode == AddressingMode::Parallel)
        return t_address_parallel_overhead;
    return t_address_per_atom * static_cast<double>(atom_count);
}

TimingModel TimingModel::scaled(double factor) const noexcept
{
    TimingModel t = *this;
    t.t_image *= factor;
    t.t_address_per_atom *= factor;
    t.t_address_parallel_overhead *= factor;
    t.t_shift *= factor;
    t.t_pump *= factor;
    t.t_pushout *= factor;
    return t;
}

void TimingModel::validate() const
{
    require_duration(t_image, "t_image");
    require_duration(t_address_per_atom, "t_address_per_atom");
    require_duration(t_address_parallel_overhead, "t_address_parallel_overhead");
    require_duration(t_shift, "t_shift");
    require_duration(t_pump, "t_pump");
    require_duration(t_pushout, "t_pushout");
}

OpCounts& OpCounts::operator+=(const OpCounts& o) noexcept
{
    images += o.images;
    address_pulses += o.address_pulses;
    addressed_atoms += o.addressed_atoms;
    shifts += o.shifts;
    pumps += o.pumps;
    pushouts += o.pushouts;
    return *this;
}

void OperationLog::write(std::ostream& os) const
{
    for (const auto& e : events_)
    {
        os << "op=" << e.op << " t0=" << format_double(e.time_before)
           << " t1=" << format_double(e.time_after) << " affected=" << e.affected;
        for (const auto& [k, v] : e.params)
            os << ' ' << k << '=' << v;
        os << '\n';
    }
}

//---------------------------------------------------------------------------//
RegisterOps::RegisterOps(ErrorModel errors, TimingModel timing, RngStream& rng, OperationLog* log)
    : errors_(errors), timing_(timing), rng_(rng), log_(log)
{
    errors_.validate();
    timing_.validate();
}

void RegisterOps::log(OpEvent e)
{
    if (log_)
        log_->append(std::move(e));
}

std::size_t RegisterOps::apply_background_loss(LatticeState& state, double dt)
{
    require_duration(dt, "dt");
    double p_loss = -std::expm1(-dt / errors_.background_lifetime);
    if (p_loss <= 0)
        return 0;
    std::size_t lost = 0;
    for (const auto& a : state.atoms())
    {
        if (a.alive && rng_.bernoulli(p_loss))
        {
            state.lose(a.id);
            ++lost;
        }
    }
    return lost;
}

std::vector<ImageRecord> RegisterOps::image(LatticeState& state)
{
    const double t0 = state.elapsed_time();
    state.advance_time(timing_.t_image);
    std::size_t lost = apply_background_loss(state, timing_.t_image);

    const bool two_d = state.geometry().dimensionality() == 2;
    std::vector<ImageRecord> records;
    std::size_t misplaced = 0;
    for (const auto& a : state.atoms())
    {
        if (!a.alive || a.spin != SpinState::Up)
            continue;
        SiteVector measured = a.true_site;
        if (rng_.bernoulli(errors_.reconstruct_error_prob))
        {
            ++misplaced;
            if (two_d)
            {
                // Eight neighbours, skipping the centre.
                auto k = static_cast<std::int64_t>(rng_.uniform_index(8));
                if (k >= 4)
                    ++k;
                measured += SiteVector{k % 3 - 1, k / 3 - 1};
            }
            else
            {
                measured += SiteVector{rng_.uniform_index(2) == 0 ? -1 : 1, 0};
            }
        }
        state.set_measured(a.id, measured);
        records.push_back({a.id, measured});
    }
    ++counts_.images;
    log({"image", t0, state.elapsed_time(), records.size(),
         {{"misreconstructed", std::to_string(misplaced)}, {"background_lost", std::to_string(lost)}}});
    return records;
}

AddressResult RegisterOps::address(LatticeState& state, std::span<const AtomId> ids)
{
    return address(state, ids, timing_.addressing_mode);
}

AddressResult RegisterOps::address(LatticeState& state, std::span<const AtomId> ids, AddressingMode mode)
{
    const auto& geo = state.geometry();
    std::vector<std::uint8_t> requested(geo.site_count(), 0);
    std::vector<bool> is_requested(state.atoms().size(), false);
    for (auto id : ids)
    {
        const auto& a = state.atom(id);
        if (!a.alive)
            throw PreconditionError(fmt::format("cannot address atom {}: not alive", to_index(id)));
        if (a.spin != SpinState::Up)
            throw PreconditionError(fmt::format("cannot address atom {}: not in storage", to_index(id)));
        if (is_requested[to_index(id)])
            throw PreconditionError(fmt::format("atom {} addressed twice", to_index(id)));
        is_requested[to_index(id)] = true;
        requested[geo.index(a.true_site)] = 1;
    }

    // Crosstalk candidates are fixed before any flip happens.
    std::vector<AtomId> crosstalk_victims;
    const std::int64_t r = errors_.isolation_radius;
    if (errors_.crosstalk_prob > 0 && r > 0 && !ids.empty())
    {
        BoxCounter counter(geo, requested);
        for (const auto& a : state.atoms())
        {
            if (a.alive && a.spin == SpinState::Up && !is_requested[to_index(a.id)]
                && counter.count(a.true_site, r) > 0)
                crosstalk_victims.push_back(a.id);
        }
    }

    AddressResult result;
    result.flipped.reserve(ids.size());
    for (auto id : ids)
    {
        bool ok = state.atom(id).alive && rng_.bernoulli(errors_.address_efficiency);
        if (ok)
            state.set_spin(id, SpinState::Down);
        result.flipped.push_back(ok);
    }
    for (auto id : crosstalk_victims)
    {
        if (state.atom(id).alive && rng_.bernoulli(errors_.crosstalk_prob))
        {
            state.set_spin(id, SpinState::Down);
            ++result.crosstalk_flips;
        }
    }

    TimingModel t = timing_;
    t.addressing_mode = mode;
    const double t0 = state.elapsed_time();
    const double cost = t.address_cost(ids.size());
    state.advance_time(cost);
    std::size_t lost = apply_background_loss(state, cost);

    ++counts_.address_pulses;
    counts_.addressed_atoms += ids.size();
    auto n_ok = static_cast<std::size_t>(std::count(result.flipped.begin(), result.flipped.end(), true));
    log({"address", t0, state.elapsed_time(), n_ok + result.crosstalk_flips,
         {{"mode", to_string(mode)},
          {"requested", std::to_string(ids.size())},
          {"flipped", std::to_string(n_ok)},
          {"crosstalk", std::to_string(result.crosstalk_flips)},
          {"background_lost", std::to_string(lost)}}});
    return result;
}

ShiftResult RegisterOps::shift(LatticeState& state, SiteVector t)
{
    ShiftResult result;
    for (const auto& a : state.atoms())
    {
        if (!a.alive || a.spin != SpinState::Down)
            continue;
        if (rng_.bernoulli(errors_.transport_spinflip_prob))
        {
            state.lose(a.id);
            ++result.spinflip_lost;
        }
    }
    std::size_t before = state.alive_count(SpinState::Down);
    state.translate_register(SpinState::Down, t);
    result.moved = state.alive_count(SpinState::Down);
    result.left_lattice = before - result.moved;

    const double t0 = state.elapsed_time();
    state.advance_time(timing_.t_shift);
    std::size_t lost = apply_background_loss(state, timing_.t_shift);
    ++counts_.shifts;
    log({"shift", t0, state.elapsed_time(), result.moved,
         {{"t", vec_text(t, state.geometry().dimensionality())},
          {"spinflip_lost", std::to_string(result.spinflip_lost)},
          {"left_lattice", std::to_string(result.left_lattice)},
          {"background_lost", std::to_string(lost)}}});
    return result;
}

PumpResult RegisterOps::pump_back(LatticeState& state)
{
    PumpResult result;
    for (const auto& a : state.atoms())
    {
        if (!a.alive || a.spin != SpinState::Down)
            continue;
        if (rng_.bernoulli(errors_.pump_fail_prob))
        {
            state.lose(a.id);
            ++result.pump_failures;
            continue;
        }
        auto occupant = state.occupant(SpinState::Up, a.true_site);
        state.set_spin(a.id, SpinState::Up);
        if (occupant)
            result.collision_losses += 2;
        else
            ++result.pumped;
    }
    const double t0 = state.elapsed_time();
    state.advance_time(timing_.t_pump);
    std::size_t lost = apply_background_loss(state, timing_.t_pump);
    ++counts_.pumps;
    log({"pump_back", t0, state.elapsed_time(), result.pumped,
         {{"pump_failures", std::to_string(result.pump_failures)},
          {"collision_losses", std::to_string(result.collision_losses)},
          {"background_lost", std::to_string(lost)}}});
    return result;
}

ExcessRemovalResult RegisterOps::remove_excess(LatticeState& state, const TargetPattern& target)
{
    if (!(target.geometry() == state.geometry()))
        throw GeometryError("target pattern belongs to a different lattice");
    std::vector<AtomId> keep;
    for (auto s : target.sites())
        if (auto id = state.occupant(SpinState::Up, s))
            keep.push_back(*id);
    std::sort(keep.begin(), keep.end());
    return remove_excess_impl(state, keep, &target);
}

ExcessRemovalResult RegisterOps::remove_unprotected(LatticeState& state, std::span<const AtomId> keep)
{
    return remove_excess_impl(state, keep, nullptr);
}

ExcessRemovalResult RegisterOps::remove_excess_impl(LatticeState& state,
                                                    std::span<const AtomId> keep,
                                                    const TargetPattern* target)
{
    ExcessRemovalResult result;
    result.protected_atoms = keep.size();
    address(state, keep);

    const double t0 = state.elapsed_time();
    for (const auto& a : state.atoms())
    {
        if (a.alive && a.spin == SpinState::Up)
        {
            state.lose(a.id);
            ++result.pushed_out;
        }
    }
    state.advance_time(timing_.t_pushout);
    std::size_t lost = apply_background_loss(state, timing_.t_pushout);
    ++counts_.pushouts;
    log({"push_out", t0, state.elapsed_time(), result.pushed_out,
         {{"background_lost", std::to_string(lost)}}});

    pump_back(state);

    std::vector<bool> kept(state.atoms().size(), false);
    for (auto id : keep)
        kept[to_index(id)] = true;
    for (const auto& a : state.atoms())
    {
        if (!a.alive || a.spin != SpinState::Up)
            continue;
        bool on = target ? target->contains(a.true_site) : static_cast<bool>(kept[to_index(a.id)]);
        ++(on ? result.on_target_survivors : result.off_target_survivors);
    }
    return result;
}

} // namespace psolas
