// Copyright 2026 The psolas-sim Authors.
// SPDX-License-Identifier: Apache-2.0
#include "psolas/sorter.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "psolas/errors.hpp"
#include "psolas/text_format.hpp"

namespace psolas {
namespace {

struct MeasuredAtom
{
    SiteVector site;
    AtomId id;
};

// One entry per measured site, lowest id first, sorted by site.
std::vector<MeasuredAtom> unique_measured(std::span<const ImageRecord> records)
{
    std::vector<MeasuredAtom> atoms;
    atoms.reserve(records.size());
    for (const auto& r : records)
        atoms.push_back({r.measured_site, r.id});
    std::sort(atoms.begin(), atoms.end(), [](const MeasuredAtom& l, const MeasuredAtom& r) {
        return l.site != r.site ? l.site < r.site : l.id < r.id;
    });
    atoms.erase(std::unique(atoms.begin(), atoms.end(),
                            [](const MeasuredAtom& l, const MeasuredAtom& r) { return l.site == r.site; }),
                atoms.end());
    return atoms;
}

OpCounts operator-(OpCounts a, const OpCounts& b)
{
    a.images -= b.images;
    a.address_pulses -= b.address_pulses;
    a.addressed_atoms -= b.addressed_atoms;
    a.shifts -= b.shifts;
    a.pumps -= b.pumps;
    a.pushouts -= b.pushouts;
    return a;
}

} // namespace

const char* to_string(SortOutcome o) noexcept
{
    switch (o)
    {
        case SortOutcome::DefectFree:
            return "defect_free";
        case SortOutcome::StopBound:
            return "stop_bound";
        case SortOutcome::ReservoirExhausted:
            return "reservoir_exhausted";
    }
    return "unknown";
}

PlanningView planning_view(std::span<const ImageRecord> records, const TargetPattern& target)
{
    const auto& geo = target.geometry();
    std::vector<bool> covered(geo.site_count(), false);
    PlanningView view;
    for (const auto& m : unique_measured(records))
    {
        if (target.contains(m.site))
        {
            covered[geo.index(m.site)] = true;
        }
        else
        {
            view.atom_sites.push_back(m.site);
            view.atom_ids.push_back(m.id);
        }
    }
    for (auto s : target.sites())
        if (!covered[geo.index(s)])
            view.defects.push_back(s);
    return view;
}

IterationResult psolas_iteration(LatticeState& state,
                                 const TargetPattern& target,
                                 RegisterOps& ops,
                                 const MatchConstraints& constraints)
{
    if (!(target.geometry() == state.geometry()))
        throw GeometryError("target pattern belongs to a different lattice");

    IterationResult result;
    auto& rec = result.record;
    auto records = ops.image(state);
    auto view = planning_view(records, target);
    rec.measured_defects = view.defects.size();
    rec.time_after = state.elapsed_time();

    if (view.defects.empty())
    {
        result.status = IterationStatus::DefectFreeDetected;
        rec.defects_after = defects(state, target).size();
        return result;
    }
    if (view.atom_sites.empty())
    {
        result.status = IterationStatus::ReservoirExhausted;
        rec.defects_after = defects(state, target).size();
        return result;
    }

    auto match = best_match_translation(view.atom_sites, view.defects, constraints);
    MoveSelection move{match.translation, {}};
    for (auto i : match.selected)
        move.selected_atom_ids.push_back(view.atom_ids[i]);
    std::sort(move.selected_atom_ids.begin(), move.selected_atom_ids.end());

    auto addressed = ops.address(state, move.selected_atom_ids);
    ops.shift(state, *move.translation);
    ops.pump_back(state);

    rec.translation = move.translation;
    rec.selected = move.filled_defects();
    rec.flipped = static_cast<std::size_t>(std::count(addressed.flipped.begin(), addressed.flipped.end(), true));
    for (auto id : move.selected_atom_ids)
    {
        const auto& a = state.atom(id);
        if (a.alive && a.spin == SpinState::Up && target.contains(a.true_site))
            ++rec.actual_fills;
    }
    rec.defects_after = defects(state, target).size();
    rec.time_after = state.elapsed_time();
    return result;
}

SortReport psolas_sort(LatticeState& state,
                       const TargetPattern& target,
                       RegisterOps& ops,
                       const StopCriteria& stop,
                       const MatchConstraints& constraints)
{
    const OpCounts counts_before = ops.counts();
    SortReport report;
    report.defect_trace.push_back(defects(state, target).size());

    for (;;)
    {
        if (report.iterations >= stop.max_iterations || state.elapsed_time() >= stop.max_time)
        {
            report.outcome = SortOutcome::StopBound;
            break;
        }
        auto step = psolas_iteration(state, target, ops, constraints);
        if (step.status == IterationStatus::DefectFreeDetected)
        {
            report.outcome = SortOutcome::DefectFree;
            report.completion_time = state.elapsed_time();
            break;
        }
        if (step.status == IterationStatus::ReservoirExhausted)
        {
            report.outcome = SortOutcome::ReservoirExhausted;
            break;
        }
        ++report.iterations;
        ++report.moves;
        step.record.index = report.iterations;
        report.defect_trace.push_back(step.record.defects_after);
        report.plan.push_back(step.record);
    }

    report.residual_defects = defects(state, target).size();
    if (report.outcome == SortOutcome::DefectFree)
        report.cleanup = ops.remove_excess(state, target);
    report.final_defects = defects(state, target).size();
    report.total_time = state.elapsed_time();
    report.counts = ops.counts() - counts_before;
    return report;
}

std::vector<SiteVector> equidistant_targets(std::int64_t start, std::int64_t separation, std::size_t count)
{
    std::vector<SiteVector> out;
    for (std::size_t i = 0; i < count; ++i)
        out.push_back({start + separation * static_cast<std::int64_t>(i), 0});
    return out;
}

SortReport sequential_sort_1d(LatticeState& state,
                              std::span<const SiteVector> targets,
                              RegisterOps& ops,
                              const SequentialOptions& options)
{
    if (state.geometry().dimensionality() != 1)
        throw GeometryError("sequential sorting needs a 1D lattice");
    TargetPattern pattern(state.geometry(), {targets.begin(), targets.end()});
    const auto goal = pattern.sites(); // sorted, unique
    const std::size_t k = goal.size();

    const OpCounts counts_before = ops.counts();
    SortReport report;
    report.defect_trace.push_back(defects(state, pattern).size());

    for (std::size_t pass = 0;; ++pass)
    {
        auto atoms = unique_measured(ops.image(state));
        bool all_covered = std::all_of(goal.begin(), goal.end(), [&](SiteVector s) {
            return std::binary_search(atoms.begin(), atoms.end(), MeasuredAtom{s, AtomId{}},
                                      [](const MeasuredAtom& l, const MeasuredAtom& r) { return l.site < r.site; });
        });
        if (all_covered)
        {
            report.outcome = SortOutcome::DefectFree;
            report.completion_time = state.elapsed_time();
            break;
        }
        if (pass >= options.max_passes)
        {
            report.outcome = SortOutcome::StopBound;
            break;
        }
        if (atoms.size() < k)
        {
            report.outcome = SortOutcome::ReservoirExhausted;
            break;
        }

        // Leftmost atoms to leftmost targets; order-preserving so no two
        // moves cross.
        std::vector<AtomId> assigned;
        for (std::size_t i = 0; i < k; ++i)
            assigned.push_back(atoms[i].id);
        bool blocked = std::any_of(atoms.begin() + static_cast<std::ptrdiff_t>(k), atoms.end(),
                                   [&](const MeasuredAtom& m) { return pattern.contains(m.site); });
        if (blocked)
        {
            std::vector<AtomId> keep = assigned;
            std::sort(keep.begin(), keep.end());
            ops.remove_unprotected(state, keep);
        }

        // Left movers left-to-right, right movers right-to-left: every
        // destination is vacated before it is used.
        std::vector<std::size_t> order;
        for (std::size_t i = 0; i < k; ++i)
            if (goal[i].x < atoms[i].site.x)
                order.push_back(i);
        for (std::size_t i = k; i-- > 0;)
            if (goal[i].x > atoms[i].site.x)
                order.push_back(i);

        IterationRecord rec;
        rec.measured_defects = static_cast<std::size_t>(std::count_if(goal.begin(), goal.end(), [&](SiteVector s) {
            return !std::binary_search(atoms.begin(), atoms.end(), MeasuredAtom{s, AtomId{}},
                                       [](const MeasuredAtom& l, const MeasuredAtom& r) { return l.site < r.site; });
        }));
        for (auto i : order)
        {
            const auto& a = state.atom(atoms[i].id);
            if (!a.alive || a.spin != SpinState::Up)
                continue;
            AtomId one[] = {a.id};
            auto res = ops.address(state, one, AddressingMode::Serial);
            ++rec.selected;
            if (!res.flipped[0] && res.crosstalk_flips == 0)
                continue;
            rec.flipped += res.flipped[0] ? 1 : 0;
            ops.shift(state, goal[i] - atoms[i].site);
            ops.pump_back(state);
            ++report.moves;
        }
        for (auto id : assigned)
        {
            const auto& a = state.atom(id);
            if (a.alive && a.spin == SpinState::Up && pattern.contains(a.true_site))
                ++rec.actual_fills;
        }
        ++report.iterations;
        rec.index = report.iterations;
        rec.defects_after = defects(state, pattern).size();
        rec.time_after = state.elapsed_time();
        report.defect_trace.push_back(rec.defects_after);
        report.plan.push_back(rec);
    }

    report.residual_defects = defects(state, pattern).size();
    if (report.outcome == SortOutcome::DefectFree && options.remove_excess
        && state.alive_count(SpinState::Up) > k)
        report.cleanup = ops.remove_excess(state, pattern);
    report.final_defects = defects(state, pattern).size();
    report.total_time = state.elapsed_time();
    report.counts = ops.counts() - counts_before;
    return report;
}

void write_plan(std::ostream& os, const SortReport& report, int dimensionality)
{
    os << "# iteration t selected flipped predicted actual defects_after time_s\n";
    for (const auto& r : report.plan)
    {
        std::string t = "-";
        if (r.translation)
            t = dimensionality == 2 ? fmt::format("{},{}", r.translation->x, r.translation->y)
                                    : fmt::format("{}", r.translation->x);
        os << fmt::format("{} {} {} {} {} {} {} {}\n", r.index, t, r.selected, r.flipped, r.selected,
                          r.actual_fills, r.defects_after, format_double(r.time_after));
    }
}

double defect_bound(double alpha, std::size_t n)
{
    if (!(alpha > 0 && alpha < 1))
        throw ParameterError(fmt::format("alpha must be in (0, 1), got {}", alpha));
    return std::pow(1 - alpha, 1.0 + static_cast<double>(n));
}

std::size_t iterations_for_unity(double alpha, std::size_t n_sites)
{
    if (n_sites < 1)
        throw ParameterError("n_sites must be at least 1");
    const auto sites = static_cast<double>(n_sites);
    std::size_t n = 0;
    while (defect_bound(alpha, n) * sites >= 1)
        ++n;
    return n;
}

} // namespace psolas
