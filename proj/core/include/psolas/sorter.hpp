// Copyright 2026 The psolas-sim Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "psolas/lattice.hpp"
#include "psolas/register_ops.hpp"

namespace psolas {

//---------------------------------------------------------------------------//
// Rigid-translation matching
//---------------------------------------------------------------------------//

struct MatchConstraints
{
    /// When positive, selected atoms must be pairwise more than this many
    /// sites apart (Chebyshev). Zero disables the constraint.
    std::int64_t min_separation = 0;

    friend bool operator==(const MatchConstraints&, const MatchConstraints&) = default;
};

/// Result of the best-match search on bare site sets.
struct TranslationMatch
{
    std::optional<SiteVector> translation; //!< empty when no move exists
    std::vector<std::size_t> selected;     //!< indices into the atom sites, ascending

    std::size_t filled() const noexcept { return selected.size(); }
};

/*!
 * Translation t maximising |{a : a + t in defects}|.
 *
 * Ties are broken by the smallest Chebyshev norm of t, then by t in
 * lexicographic (x, y) order. Without constraints the selection is the full
 * preimage of the defects under t. With `min_separation` the preimage is
 * thinned greedily in lexicographic atom order and the thinned size is
 * maximised instead.
 *
 * Sites in each input must be unique. Either input empty yields no move.
 */
TranslationMatch best_match_translation(std::span<const SiteVector> atom_sites,
                                        std::span<const SiteVector> defect_sites,
                                        const MatchConstraints& constraints = {});

/// Greedy lexicographic thinning used by the constrained matcher. Returns
/// positions into `sites` (which must be sorted) that are kept.
std::vector<std::size_t> thin_by_separation(std::span<const SiteVector> sites,
                                            std::int64_t min_separation);

//---------------------------------------------------------------------------//
// Iterative sorting
//---------------------------------------------------------------------------//

/// One planned move, in terms of atoms.
struct MoveSelection
{
    std::optional<SiteVector> translation;
    std::vector<AtomId> selected_atom_ids;

    std::size_t filled_defects() const noexcept { return selected_atom_ids.size(); }
};

enum class SortOutcome : std::uint8_t
{
    DefectFree,         //!< an image showed every target site filled
    StopBound,          //!< iteration or time limit reached first
    ReservoirExhausted, //!< defects remain but no unsorted atom is left
};

const char* to_string(SortOutcome o) noexcept;

struct IterationRecord
{
    std::size_t index = 0; //!< 1-based
    std::optional<SiteVector> translation;
    std::size_t measured_defects = 0; //!< defects seen in the planning image
    std::size_t selected = 0;         //!< = predicted fills
    std::size_t flipped = 0;          //!< selected atoms actually addressed
    std::size_t actual_fills = 0;     //!< selected atoms ending on a target site
    std::size_t defects_after = 0;    //!< ground truth
    double time_after = 0;
};

/*!
 * Outcome of a complete sort.
 *
 * `defect_trace` holds the ground-truth defect count before the first
 * iteration and after each one, so its length is iterations + 1.
 * `completion_time` is the clock reading right after the image that
 * detected a defect-free target; it is infinite for any other outcome.
 */
struct SortReport
{
    SortOutcome outcome = SortOutcome::StopBound;
    std::size_t iterations = 0;
    std::size_t moves = 0; //!< address/shift/pump triplets
    double completion_time = std::numeric_limits<double>::infinity();
    double total_time = 0;
    std::size_t residual_defects = 0; //!< ground truth when the loop stopped
    std::size_t final_defects = 0;    //!< ground truth after excess removal
    ExcessRemovalResult cleanup;
    OpCounts counts;
    std::vector<std::size_t> defect_trace;
    std::vector<IterationRecord> plan;

    /// Defect-free detected and confirmed by ground truth.
    bool success() const noexcept
    {
        return outcome == SortOutcome::DefectFree && residual_defects == 0;
    }
};

struct StopCriteria
{
    std::size_t max_iterations = 1000;
    double max_time = std::numeric_limits<double>::infinity(); //!< simulated [s]

    friend bool operator==(const StopCriteria&, const StopCriteria&) = default;
};

enum class IterationStatus : std::uint8_t
{
    Moved,
    DefectFreeDetected,
    ReservoirExhausted,
};

struct IterationResult
{
    IterationStatus status = IterationStatus::Moved;
    IterationRecord record;
};

/// Storage atoms from `records` not measured on a target site, one per
/// measured site (lowest id wins), plus the target sites no record covers.
struct PlanningView
{
    std::vector<SiteVector> atom_sites;
    std::vector<AtomId> atom_ids; //!< aligned with atom_sites
    DefectSet defects;
};

PlanningView planning_view(std::span<const ImageRecord> records, const TargetPattern& target);

/// Image, match on measured positions, address, shift, pump back.
IterationResult psolas_iteration(LatticeState& state,
                                 const TargetPattern& target,
                                 RegisterOps& ops,
                                 const MatchConstraints& constraints = {});

/// Iterate until an image shows no defects, then remove excess atoms once.
SortReport psolas_sort(LatticeState& state,
                       const TargetPattern& target,
                       RegisterOps& ops,
                       const StopCriteria& stop = {},
                       const MatchConstraints& constraints = {});

struct SequentialOptions
{
    std::size_t max_passes = 4; //!< first pass plus feedback corrections
    bool remove_excess = true;
};

/*!
 * One-atom-at-a-time sorter for 1D lattices.
 *
 * The k leftmost measured atoms are assigned in order to the k targets.
 * Each pass moves every misplaced atom with its own address/shift/pump
 * triplet, then the next image checks the result and re-plans. Excess atoms
 * sitting on a target site are pushed out before moving.
 */
SortReport sequential_sort_1d(LatticeState& state,
                              std::span<const SiteVector> targets,
                              RegisterOps& ops,
                              const SequentialOptions& options = {});

/// Four equidistant target sites starting at `start`.
std::vector<SiteVector> equidistant_targets(std::int64_t start, std::int64_t separation, std::size_t count = 4);

/// Text dump of the per-iteration plan, one line per iteration:
/// `iteration t selected flipped predicted actual defects_after time_s`.
void write_plan(std::ostream& os, const SortReport& report, int dimensionality);

//---------------------------------------------------------------------------//
// Scaling law
//---------------------------------------------------------------------------//

/// Upper bound on the defect fraction after n iterations: (1 - alpha)^(1 + n).
double defect_bound(double alpha, std::size_t n);

/// Smallest n with defect_bound(alpha, n) * n_sites < 1, by direct search.
std::size_t iterations_for_unity(double alpha, std::size_t n_sites);

} // namespace psolas
