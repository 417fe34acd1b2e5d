// Copyright 2026 The psolas-sim Authors.
// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cstdint>
#include <tuple>
#include <unordered_map>

#include "psolas/errors.hpp"
#include "psolas/sorter.hpp"

namespace psolas {
namespace {

struct Bounds
{
    SiteVector lo;
    SiteVector hi; // inclusive
};

Bounds bounds_of(std::span<const SiteVector> sites)
{
    Bounds b{sites.front(), sites.front()};
    for (auto s : sites)
    {
        b.lo = {std::min(b.lo.x, s.x), std::min(b.lo.y, s.y)};
        b.hi = {std::max(b.hi.x, s.x), std::max(b.hi.y, s.y)};
    }
    return b;
}

// Strict "a is a better candidate than b".
bool better(std::size_t count_a, SiteVector a, std::size_t count_b, SiteVector b)
{
    if (count_a != count_b)
        return count_a > count_b;
    auto na = chebyshev_norm(a);
    auto nb = chebyshev_norm(b);
    if (na != nb)
        return na < nb;
    return a < b;
}

struct Candidate
{
    SiteVector t;
    std::uint32_t count;
};

// Overlap count for every translation with at least one hit. Uses a dense
// histogram over the Minkowski-difference box when it is small enough.
std::vector<Candidate> overlap_histogram(std::span<const SiteVector> atoms,
                                         std::span<const SiteVector> defects)
{
    auto ab = bounds_of(atoms);
    auto db = bounds_of(defects);
    const SiteVector t_lo = db.lo - ab.hi;
    const SiteVector t_hi = db.hi - ab.lo;
    const std::int64_t w = t_hi.x - t_lo.x + 1;
    const std::int64_t h = t_hi.y - t_lo.y + 1;

    std::vector<Candidate> out;
    constexpr std::int64_t kDenseLimit = std::int64_t{1} << 24;
    if (w > 0 && h > 0 && w <= kDenseLimit / h)
    {
        std::vector<std::uint32_t> hist(static_cast<std::size_t>(w * h), 0);
        std::vector<std::int64_t> defect_lin(defects.size());
        for (std::size_t j = 0; j < defects.size(); ++j)
            defect_lin[j] = defects[j].y * w + defects[j].x;
        const std::int64_t base = -t_lo.y * w - t_lo.x;
        std::uint32_t* data = hist.data();
        for (auto a : atoms)
        {
            const std::int64_t offset = base - (a.y * w + a.x);
            for (auto d : defect_lin)
                ++data[offset + d];
        }
        for (std::int64_t i = 0; i < w * h; ++i)
        {
            if (hist[static_cast<std::size_t>(i)] != 0)
                out.push_back({SiteVector{t_lo.x + i % w, t_lo.y + i / w}, hist[static_cast<std::size_t>(i)]});
        }
        return out;
    }

    struct Hash
    {
        std::size_t operator()(SiteVector v) const noexcept
        {
            return static_cast<std::size_t>(mix64(static_cast<std::uint64_t>(v.x) * 0x9e3779b97f4a7c15ULL
                                                  ^ static_cast<std::uint64_t>(v.y)));
        }
    };
    std::unordered_map<SiteVector, std::uint32_t, Hash> sparse;
    for (auto a : atoms)
        for (auto d : defects)
            ++sparse[d - a];
    out.reserve(sparse.size());
    for (auto [t, c] : sparse)
        out.push_back({t, c});
    std::sort(out.begin(), out.end(), [](const Candidate& l, const Candidate& r) {
        return std::tie(l.t.y, l.t.x) < std::tie(r.t.y, r.t.x);
    });
    return out;
}

std::vector<std::size_t> preimage(std::span<const SiteVector> atoms,
                                  std::span<const SiteVector> sorted_defects,
                                  SiteVector t)
{
    std::vector<std::size_t> sel;
    for (std::size_t i = 0; i < atoms.size(); ++i)
        if (std::binary_search(sorted_defects.begin(), sorted_defects.end(), atoms[i] + t))
            sel.push_back(i);
    return sel;
}

} // namespace

std::vector<std::size_t> thin_by_separation(std::span<const SiteVector> sites, std::int64_t min_separation)
{
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < sites.size(); ++i)
    {
        bool ok = std::all_of(kept.begin(), kept.end(), [&](std::size_t k) {
            return chebyshev_norm(sites[i] - sites[k]) > min_separation;
        });
        if (ok)
            kept.push_back(i);
    }
    return kept;
}

TranslationMatch best_match_translation(std::span<const SiteVector> atom_sites,
                                        std::span<const SiteVector> defect_sites,
                                        const MatchConstraints& constraints)
{
    if (atom_sites.empty() || defect_sites.empty())
        return {};
    if (constraints.min_separation < 0)
        throw ParameterError("min_separation must be non-negative");

    std::vector<SiteVector> sorted_defects(defect_sites.begin(), defect_sites.end());
    std::sort(sorted_defects.begin(), sorted_defects.end());

    auto candidates = overlap_histogram(atom_sites, defect_sites);

    if (constraints.min_separation == 0)
    {
        const Candidate* best = &candidates.front();
        for (const auto& c : candidates)
            if (better(c.count, c.t, best->count, best->t))
                best = &c;
        return {best->t, preimage(atom_sites, sorted_defects, best->t)};
    }

    // Constrained: thinning can only shrink a candidate, so visit candidates
    // by decreasing raw overlap and stop once no remaining one can win.
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& l, const Candidate& r) {
        return better(l.count, l.t, r.count, r.t);
    });
    std::optional<SiteVector> best_t;
    std::vector<std::size_t> best_sel;
    for (const auto& c : candidates)
    {
        if (best_t && c.count < best_sel.size())
            break;
        auto raw = preimage(atom_sites, sorted_defects, c.t);
        // Thin in lexicographic atom order.
        std::sort(raw.begin(), raw.end(), [&](std::size_t l, std::size_t r) {
            return atom_sites[l] < atom_sites[r];
        });
        std::vector<SiteVector> ordered;
        ordered.reserve(raw.size());
        for (auto i : raw)
            ordered.push_back(atom_sites[i]);
        std::vector<std::size_t> sel;
        for (auto k : thin_by_separation(ordered, constraints.min_separation))
            sel.push_back(raw[k]);
        std::sort(sel.begin(), sel.end());
        if (!best_t || better(sel.size(), c.t, best_sel.size(), *best_t))
        {
            best_t = c.t;
            best_sel = std::move(sel);
        }
    }
    return {best_t, std::move(best_sel)};
}

} // namespace psolas
