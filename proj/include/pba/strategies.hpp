#ifndef PBA_STRATEGIES_HPP
#define PBA_STRATEGIES_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "pba/probscore.hpp"

namespace pba {

/// The eleven component scoring strategies, in canonical listing order
/// (bitstring bit 0 = PF).
enum class Component {
    PF,    // maximum product of arc frequencies
    SDPS,  // minimum standard deviation of arc lengths
    FSP,   // maximum number of candidates with the same pronunciation
    NDS,   // minimum sum of Hamming distances to the other candidates
    WL,    // maximum smallest arc frequency
    WPF,   // maximum weighted product of arc frequencies
    SF,    // maximum frequency of the first arc
    SL,    // maximum frequency of the last arc
    SLN,   // maximum longest-arc length, then maximum arc frequency
    SSPF,  // maximum same-phoneme support weighted by arc frequency
    PFSP,  // maximum collated geometric mean of arc frequency products
};

inline constexpr std::array<const char*, 11> kComponentNames = {
    "PF", "SDPS", "FSP", "NDS", "WL", "WPF", "SF", "SL", "SLN", "SSPF", "PFSP"};

enum class CombinationRule { Product, Sum };

/// A sortable per-candidate score; larger is always better (scores of
/// minimizing strategies are negated).
struct ScoreKey {
    double primary = 0;
    double secondary = 0;

    friend auto operator<=>(const ScoreKey&, const ScoreKey&) = default;
};

/// Scores every candidate under one component strategy.
inline std::vector<ScoreKey> score_component(Component comp, const Lattice& lat,
                                             const FreqView& view) {
    const std::size_t n_cand = lat.candidates.size();
    if (n_cand == 0) throw std::invalid_argument("score_component: no candidates");

    auto freq = [&](const Candidate& c, std::size_t k) -> double {
        const Segment& s = lat.segmentations[c.segmentation].segments[k];
        return view.count(lat.segment_letters(s), c.prons[k]);
    };
    auto n_segments = [&](const Candidate& c) {
        return lat.segmentations[c.segmentation].segments.size();
    };

    std::vector<ScoreKey> keys(n_cand);
    switch (comp) {
        case Component::PF: {
            for (std::size_t i = 0; i < n_cand; ++i) {
                const Candidate& c = lat.candidates[i];
                double p = 1;
                for (std::size_t k = 0; k < n_segments(c); ++k) p *= freq(c, k);
                keys[i].primary = p;
            }
            break;
        }
        case Component::SDPS: {
            for (std::size_t i = 0; i < n_cand; ++i) {
                const Candidate& c = lat.candidates[i];
                const auto& segs = lat.segmentations[c.segmentation].segments;
                double mean = 0;
                for (const Segment& s : segs) mean += s.length();
                mean /= segs.size();
                double var = 0;
                for (const Segment& s : segs) var += (s.length() - mean) * (s.length() - mean);
                keys[i].primary = -std::sqrt(var / segs.size());
            }
            break;
        }
        case Component::FSP: {
            std::map<std::string_view, int> classes;
            for (const Candidate& c : lat.candidates) ++classes[c.assembled];
            for (std::size_t i = 0; i < n_cand; ++i)
                keys[i].primary = classes[lat.candidates[i].assembled];
            break;
        }
        case Component::NDS: {
            for (std::size_t i = 0; i < n_cand; ++i) {
                double sum = 0;
                for (std::size_t j = 0; j < n_cand; ++j) {
                    if (j == i) continue;
                    const std::string& a = lat.candidates[i].assembled;
                    const std::string& b = lat.candidates[j].assembled;
                    for (std::size_t p = 0; p < a.size(); ++p) sum += a[p] != b[p];
                }
                keys[i].primary = -sum;
            }
            break;
        }
        case Component::WL: {
            for (std::size_t i = 0; i < n_cand; ++i) {
                const Candidate& c = lat.candidates[i];
                double w = freq(c, 0);
                for (std::size_t k = 1; k < n_segments(c); ++k) w = std::min(w, freq(c, k));
                keys[i].primary = w;
            }
            break;
        }
        case Component::WPF: {
            for (std::size_t i = 0; i < n_cand; ++i) {
                const Candidate& c = lat.candidates[i];
                double p = 1;
                for (std::size_t k = 0; k < n_segments(c); ++k) {
                    const Segment& s = lat.segmentations[c.segmentation].segments[k];
                    auto distinct = view.distinct_prons(lat.segment_letters(s));
                    p *= freq(c, k) / static_cast<double>(distinct);
                }
                keys[i].primary = p;
            }
            break;
        }
        case Component::SF: {
            for (std::size_t i = 0; i < n_cand; ++i) keys[i].primary = freq(lat.candidates[i], 0);
            break;
        }
        case Component::SL: {
            for (std::size_t i = 0; i < n_cand; ++i) {
                const Candidate& c = lat.candidates[i];
                keys[i].primary = freq(c, n_segments(c) - 1);
            }
            break;
        }
        case Component::SLN: {
            for (std::size_t i = 0; i < n_cand; ++i) {
                const Candidate& c = lat.candidates[i];
                const auto& segs = lat.segmentations[c.segmentation].segments;
                int longest = 0;
                double maxfreq = 0;
                for (std::size_t k = 0; k < segs.size(); ++k) {
                    longest = std::max(longest, segs[k].length());
                    maxfreq = std::max(maxfreq, freq(c, k));
                }
                keys[i] = {static_cast<double>(longest), maxfreq};
            }
            break;
        }
        case Component::SSPF: {
            for (std::size_t i = 0; i < n_cand; ++i) {
                const Candidate& c = lat.candidates[i];
                const auto& segs = lat.segmentations[c.segmentation].segments;
                double sum = 0;
                for (std::size_t k = 0; k < segs.size(); ++k) {
                    double f = freq(c, k);
                    for (int p = segs[k].a; p <= segs[k].b; ++p) {
                        int same = 0;
                        for (std::size_t j = 0; j < n_cand; ++j)
                            if (j != i && lat.candidates[j].assembled[p] == c.assembled[p]) ++same;
                        sum += same * f;
                    }
                }
                keys[i].primary = sum;
            }
            break;
        }
        case Component::PFSP: {
            std::map<std::string_view, double> classes;
            for (const Candidate& c : lat.candidates) {
                double p = 1;
                for (std::size_t k = 0; k < n_segments(c); ++k) p *= freq(c, k);
                classes[c.assembled] += std::pow(p, 1.0 / static_cast<double>(n_segments(c)));
            }
            for (std::size_t i = 0; i < n_cand; ++i)
                keys[i].primary = classes[lat.candidates[i].assembled];
            break;
        }
    }
    return keys;
}

/// 1-based competition ranks (ties share the smaller rank).
inline std::vector<int> ranks_from_keys(const std::vector<ScoreKey>& keys) {
    const std::size_t n = keys.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return keys[b] < keys[a]; });
    std::vector<int> ranks(n, 0);
    for (std::size_t pos = 0; pos < n; ++pos) {
        if (pos > 0 && keys[order[pos]] == keys[order[pos - 1]])
            ranks[order[pos]] = ranks[order[pos - 1]];
        else
            ranks[order[pos]] = static_cast<int>(pos) + 1;
    }
    return ranks;
}

/// Each component awards N - rank + 1 points; the combined score is the
/// product (or sum) of points over the components.
inline std::vector<double> combine_ranks(const std::vector<std::vector<int>>& component_ranks,
                                         CombinationRule rule) {
    if (component_ranks.empty()) throw std::invalid_argument("combine_ranks: no components");
    const std::size_t n = component_ranks.front().size();
    std::vector<double> combined(n, rule == CombinationRule::Product ? 1.0 : 0.0);
    for (const auto& ranks : component_ranks) {
        for (std::size_t i = 0; i < n; ++i) {
            double points = static_cast<double>(n) - ranks[i] + 1;
            if (rule == CombinationRule::Product)
                combined[i] *= points;
            else
                combined[i] += points;
        }
    }
    return combined;
}

/// Combined multi-strategy score per candidate.
inline std::vector<double> score_components(const std::array<bool, 11>& selected,
                                            CombinationRule rule, const Lattice& lat,
                                            const FreqView& view) {
    std::vector<std::vector<int>> ranks;
    for (std::size_t c = 0; c < selected.size(); ++c)
        if (selected[c])
            ranks.push_back(ranks_from_keys(score_component(static_cast<Component>(c), lat, view)));
    return combine_ranks(ranks, rule);
}

/// TP / WTP: per distinct pronunciation, the sum over its candidates of
/// the product of arc frequencies (WTP divides each product by the
/// product of segment lengths).  Returned per candidate (each candidate
/// carries its collation class value).
inline std::vector<double> tp_wtp_score(const Lattice& lat, const FreqView& view, bool weighted) {
    std::map<std::string_view, double> classes;
    for (const Candidate& c : lat.candidates) {
        const auto& segs = lat.segmentations[c.segmentation].segments;
        double p = 1;
        for (std::size_t k = 0; k < segs.size(); ++k) {
            const Segment& s = segs[k];
            p *= view.count(lat.segment_letters(s), c.prons[k]);
            if (weighted) p /= s.length();
        }
        classes[c.assembled] += p;
    }
    std::vector<double> scores;
    scores.reserve(lat.candidates.size());
    for (const Candidate& c : lat.candidates) scores.push_back(classes[c.assembled]);
    return scores;
}

}  // namespace pba

#endif  // PBA_STRATEGIES_HPP
