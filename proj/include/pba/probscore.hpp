#ifndef PBA_PROBSCORE_HPP
#define PBA_PROBSCORE_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "pba/lattice.hpp"

namespace pba {

enum class FreqKind { Absolute, Normalized, Estimated };

inline const char* to_string(FreqKind k) {
    switch (k) {
        case FreqKind::Absolute: return "abs";
        case FreqKind::Normalized: return "norm";
        default: return "est";
    }
}

enum class CondRule { Prod, CondR, CondL, CondRL, CondAll, CondF };

inline const char* to_string(CondRule r) {
    switch (r) {
        case CondRule::Prod: return "PROD";
        case CondRule::CondR: return "CONDR";
        case CondRule::CondL: return "CONDL";
        case CondRule::CondRL: return "CONDRL";
        case CondRule::CondAll: return "CONDALL";
        default: return "CONDF";
    }
}

/// Root transform degree: either a fixed constant or the per-candidate
/// segment count (the PFSP-style varying root).
struct RootDegree {
    bool varying = false;
    double degree = 1.0;

    static RootDegree fixed(double d) { return {false, d}; }
    static RootDegree per_segment_count() { return {true, 1.0}; }
    bool is_identity() const { return !varying && degree == 1.0; }
    double resolve(int n_segments) const { return varying ? n_segments : degree; }
};

/// score^(1/d); applied to each candidate's product before collation.
inline double apply_root(double score, const RootDegree& root, int n_segments) {
    double d = root.resolve(n_segments);
    if (d == 1.0) return score;
    return std::pow(score, 1.0 / d);
}

/// Per-segment probability factor of the selected kind.
inline Fraction factor_frac(const FreqView& view, std::string_view x, std::string_view y,
                            FreqKind kind) {
    switch (kind) {
        case FreqKind::Absolute: return Fraction{view.count(x, y), 1};
        case FreqKind::Normalized: return normalized_frequency_frac(view, x, y);
        default: return estimated_probability_frac(view, x, y);
    }
}

namespace detail {

inline bool has_overlap(const Segmentation& seg, std::size_t junction) {
    // junction j sits between segments j and j+1
    if (seg.fallback_junction && static_cast<std::size_t>(*seg.fallback_junction) == junction)
        return false;
    return seg.segments[junction + 1].a == seg.segments[junction].b;
}

}  // namespace detail

/// The unconditional per-candidate mass: the product of the chosen
/// probability factors over the segments (PROB for non-overlapping
/// candidates, PROD for overlap-one candidates when kind is Estimated).
template <class Num>
Num product_mass(const Lattice& lat, const Candidate& cand, const FreqView& view, FreqKind kind) {
    const Segmentation& seg = lat.segmentations[cand.segmentation];
    Num mass = Num(1);
    for (std::size_t k = 0; k < seg.segments.size(); ++k) {
        Fraction f = factor_frac(view, lat.segment_letters(seg.segments[k]), cand.prons[k], kind);
        mass = mass * Num(f.num) / Num(f.den);
    }
    return mass;
}

/// Per-candidate mass for one processing order of the segments: each
/// segment is conditioned on the overlap phonemes fixed by the segments
/// processed before it.
template <class Num>
Num ordered_conditional_mass(const Lattice& lat, const Candidate& cand, const FreqView& view,
                             std::span<const int> order) {
    const Segmentation& seg = lat.segmentations[cand.segmentation];
    std::vector<char> done(seg.segments.size(), 0);
    Num mass = Num(1);
    for (int k : order) {
        const Segment& s = seg.segments[k];
        FixedPhonemes fixed;
        if (k > 0 && done[k - 1] && detail::has_overlap(seg, k - 1))
            fixed.emplace_back(0, cand.prons[k].front());
        if (static_cast<std::size_t>(k) + 1 < seg.segments.size() && done[k + 1] &&
            detail::has_overlap(seg, k))
            fixed.emplace_back(static_cast<std::uint32_t>(s.length() - 1), cand.prons[k].back());
        Fraction f =
            conditional_probability_frac(view, lat.segment_letters(s), cand.prons[k], fixed);
        mass = mass * Num(f.num) / Num(f.den);
        done[k] = 1;
    }
    return mass;
}

/// CONDF: every overlap phoneme of the candidate is fixed first and each
/// segment is normalized with its overlapping ends fixed.
template <class Num>
Num condf_mass(const Lattice& lat, const Candidate& cand, const FreqView& view) {
    const Segmentation& seg = lat.segmentations[cand.segmentation];
    Num mass = Num(1);
    for (std::size_t k = 0; k < seg.segments.size(); ++k) {
        const Segment& s = seg.segments[k];
        FixedPhonemes fixed;
        if (k > 0 && detail::has_overlap(seg, k - 1))
            fixed.emplace_back(0, cand.prons[k].front());
        if (k + 1 < seg.segments.size() && detail::has_overlap(seg, k))
            fixed.emplace_back(static_cast<std::uint32_t>(s.length() - 1), cand.prons[k].back());
        Fraction f =
            conditional_probability_frac(view, lat.segment_letters(s), cand.prons[k], fixed);
        mass = mass * Num(f.num) / Num(f.den);
    }
    return mass;
}

inline constexpr int kCondAllWarnSegments = 8;

/// Per-candidate mass under one of the conditional-probability rules,
/// with the root applied to each per-ordering product before averaging.
template <class Num>
Num cond_candidate_mass(CondRule rule, const Lattice& lat, const Candidate& cand,
                        const FreqView& view, const RootDegree& root = {}) {
    const int n = static_cast<int>(lat.segmentations[cand.segmentation].segments.size());
    auto rooted = [&](Num m) -> Num {
        if constexpr (std::is_same_v<Num, double>) {
            return apply_root(m, root, n);
        } else {
            return m;  // exact arithmetic supports the identity root only
        }
    };
    std::vector<int> order(n);
    switch (rule) {
        case CondRule::Prod:
            return rooted(product_mass<Num>(lat, cand, view, FreqKind::Estimated));
        case CondRule::CondF:
            return rooted(condf_mass<Num>(lat, cand, view));
        case CondRule::CondR:
            std::iota(order.begin(), order.end(), 0);
            return rooted(ordered_conditional_mass<Num>(lat, cand, view, order));
        case CondRule::CondL:
            std::iota(order.rbegin(), order.rend(), 0);
            return rooted(ordered_conditional_mass<Num>(lat, cand, view, order));
        case CondRule::CondRL: {
            std::iota(order.begin(), order.end(), 0);
            Num r = rooted(ordered_conditional_mass<Num>(lat, cand, view, order));
            std::reverse(order.begin(), order.end());
            Num l = rooted(ordered_conditional_mass<Num>(lat, cand, view, order));
            return (r + l) / Num(2);
        }
        case CondRule::CondAll: {
            if (n > kCondAllWarnSegments)
                std::fprintf(stderr, "pba: CONDALL enumerating %d! orderings for %s\n", n,
                             lat.word.c_str());
            std::iota(order.begin(), order.end(), 0);
            Num sum = Num(0);
            std::uint64_t count = 0;
            do {
                sum = sum + rooted(ordered_conditional_mass<Num>(lat, cand, view, order));
                ++count;
            } while (std::next_permutation(order.begin(), order.end()));
            return sum / Num(count);
        }
    }
    return Num(0);
}

/// Accumulated probability mass per assembled pronunciation (nulls
/// retained), sorted by pronunciation.
template <class Num>
struct Posterior {
    std::vector<std::pair<std::string, Num>> mass;
};

/// Collates per-candidate masses by assembled pronunciation.
template <class Num>
Posterior<Num> collate(const Lattice& lat, const std::vector<Num>& per_candidate) {
    std::map<std::string, Num> acc;
    for (std::size_t i = 0; i < lat.candidates.size(); ++i) {
        auto [it, fresh] = acc.emplace(lat.candidates[i].assembled, per_candidate[i]);
        if (!fresh) it->second = it->second + per_candidate[i];
    }
    Posterior<Num> p;
    p.mass.assign(acc.begin(), acc.end());
    return p;
}

/// PROB: collated product of estimated probabilities over
/// non-overlapping candidates.
template <class Num>
Posterior<Num> prob_score(const Lattice& lat, const FreqView& view,
                          FreqKind kind = FreqKind::Estimated, const RootDegree& root = {}) {
    std::vector<Num> mass(lat.candidates.size());
    for (std::size_t i = 0; i < lat.candidates.size(); ++i) {
        Num m = product_mass<Num>(lat, lat.candidates[i], view, kind);
        if constexpr (std::is_same_v<Num, double>) {
            int n = static_cast<int>(lat.segmentations[lat.candidates[i].segmentation].segments.size());
            m = apply_root(m, root, n);
        }
        mass[i] = m;
    }
    return collate(lat, mass);
}

/// Collated posterior under one of the overlap rules.
template <class Num>
Posterior<Num> cond_score(CondRule rule, const Lattice& lat, const FreqView& view,
                          const RootDegree& root = {}) {
    std::vector<Num> mass(lat.candidates.size());
    for (std::size_t i = 0; i < lat.candidates.size(); ++i)
        mass[i] = cond_candidate_mass<Num>(rule, lat, lat.candidates[i], view, root);
    return collate(lat, mass);
}

/// Pronunciations ranked by collated mass, descending; equal-mass
/// pronunciations form a tie set (smallest rank shared).
template <class Num>
std::vector<std::pair<std::string, Num>> decide(const Posterior<Num>& posterior) {
    auto ranked = posterior.mass;
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return b.second < a.second; });
    return ranked;
}

}  // namespace pba

#endif  // PBA_PROBSCORE_HPP
