#ifndef PBA_LATTICE_HPP
#define PBA_LATTICE_HPP

#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pba/index.hpp"

namespace pba {

enum class Mode { OverlapOne, NonOverlap };

inline const char* to_string(Mode m) {
    return m == Mode::OverlapOne ? "overlap1" : "nonoverlap";
}

/// Inclusive index range of one segment over the padded word.
struct Segment {
    int a = 0;
    int b = 0;

    int length() const { return b - a + 1; }
    friend bool operator==(const Segment&, const Segment&) = default;
    friend auto operator<=>(const Segment&, const Segment&) = default;
};

/// An ordered cover of the padded word.  In OverlapOne mode adjacent
/// segments share exactly one position, except across the optional
/// fallback junction where they are merely adjacent.
struct Segmentation {
    std::vector<Segment> segments;
    Mode mode = Mode::OverlapOne;
    std::optional<int> fallback_junction;  // gap lies between segments[j] and segments[j+1]

    friend bool operator==(const Segmentation&, const Segmentation&) = default;
};

/// A segmentation with one pronunciation per segment whose overlaps
/// agree, plus the assembled whole-word pronunciation.
struct Candidate {
    int segmentation = 0;  // index into Lattice::segmentations
    std::vector<std::string> prons;
    std::string assembled;
};

struct Lattice {
    std::string word;  // padded
    Mode mode = Mode::OverlapOne;
    int n_segments = 0;
    bool used_fallback = false;
    std::vector<Segmentation> segmentations;
    std::vector<Candidate> candidates;

    std::string_view segment_letters(const Segment& s) const {
        return std::string_view(word).substr(s.a, s.length());
    }
};

struct LatticeLimits {
    // Diagnostic threshold; expansion is never truncated.
    std::size_t warn_candidates = 0;
};

namespace detail {

/// Enumerates all segmentations with exactly `n` segments and, in
/// fallback mode, at most one zero-overlap junction.  Deterministic
/// order: lexicographic by segment end positions.
inline std::vector<Segmentation> segmentations_exact(std::string_view word, const FreqView& view,
                                                     Mode mode, int n, bool allow_gap) {
    const int l = static_cast<int>(word.size());
    const int last = l - 1;
    std::vector<std::vector<char>> feasible(l, std::vector<char>(l, 0));
    for (int a = 0; a < l; ++a)
        for (int b = a; b < l; ++b)
            feasible[a][b] = view.contains(word.substr(a, b - a + 1)) ? 1 : 0;

    // can_finish[r][i][g]: a completion using exactly r segments exists
    // from a segment starting at i with g gap junctions already used.
    const int gdim = allow_gap ? 2 : 1;
    std::vector<std::vector<std::vector<char>>> can_finish(
        n + 1, std::vector<std::vector<char>>(l + 1, std::vector<char>(gdim, 0)));
    for (int g = 0; g < gdim; ++g)
        for (int i = 0; i < l; ++i)
            if (feasible[i][last]) can_finish[1][i][g] = 1;
    for (int r = 2; r <= n; ++r) {
        for (int i = 0; i < l; ++i) {
            for (int g = 0; g < gdim; ++g) {
                char ok = 0;
                const int bmin = mode == Mode::OverlapOne ? i + 1 : i;
                for (int b = bmin; b < last && !ok; ++b) {
                    if (!feasible[i][b]) continue;
                    const int next = mode == Mode::OverlapOne ? b : b + 1;
                    if (can_finish[r - 1][next][g]) ok = 1;
                    if (mode == Mode::OverlapOne && allow_gap && g == 0 &&
                        can_finish[r - 1][b + 1][1])
                        ok = 1;
                }
                can_finish[r][i][g] = ok;
            }
        }
    }

    std::vector<Segmentation> out;
    std::vector<Segment> stack;
    std::optional<int> gap;
    auto dfs = [&](auto&& self, int i, int r, int g) -> void {
        if (r == 1) {
            if (!feasible[i][last]) return;
            stack.push_back({i, last});
            out.push_back({stack, mode, gap});
            stack.pop_back();
            return;
        }
        const int bmin = mode == Mode::OverlapOne ? i + 1 : i;
        for (int b = bmin; b < last; ++b) {
            if (!feasible[i][b]) continue;
            stack.push_back({i, b});
            const int next = mode == Mode::OverlapOne ? b : b + 1;
            if (can_finish[r - 1][next][g]) self(self, next, r - 1, g);
            if (mode == Mode::OverlapOne && allow_gap && g == 0 && can_finish[r - 1][b + 1][1]) {
                gap = static_cast<int>(stack.size()) - 1;
                self(self, b + 1, r - 1, 1);
                gap.reset();
            }
            stack.pop_back();
        }
    };
    if (can_finish[n][0][0]) dfs(dfs, 0, n, 0);
    return out;
}

}  // namespace detail

/// All overlap-consistent per-segment pronunciation choices of one
/// segmentation, in deterministic (per-segment sorted) order.
inline std::vector<Candidate> expand_segmentation(std::string_view word, const Segmentation& seg,
                                                  const FreqView& view, int seg_index = 0) {
    std::vector<std::vector<std::string>> options(seg.segments.size());
    for (std::size_t k = 0; k < seg.segments.size(); ++k) {
        const Segment& s = seg.segments[k];
        view.visit(word.substr(s.a, s.length()),
                   [&](std::string_view pron, std::uint32_t) { options[k].emplace_back(pron); });
        if (options[k].empty()) return {};
    }

    std::vector<Candidate> out;
    std::vector<std::string> chosen(seg.segments.size());
    auto dfs = [&](auto&& self, std::size_t k) -> void {
        if (k == seg.segments.size()) {
            Candidate c;
            c.segmentation = seg_index;
            c.prons = chosen;
            c.assembled.clear();
            for (std::size_t j = 0; j < chosen.size(); ++j) {
                bool overlaps = j > 0 && seg.segments[j].a == seg.segments[j - 1].b;
                c.assembled += overlaps ? std::string_view(chosen[j]).substr(1)
                                        : std::string_view(chosen[j]);
            }
            out.push_back(std::move(c));
            return;
        }
        bool overlaps = k > 0 && seg.segments[k].a == seg.segments[k - 1].b;
        for (const std::string& pron : options[k]) {
            if (overlaps && pron.front() != chosen[k - 1].back()) continue;
            chosen[k] = pron;
            self(self, k + 1);
        }
    };
    dfs(dfs, 0);
    return out;
}

/// Builds the candidate set for a padded word: all segmentations with
/// the minimum segment count that admit at least one overlap-consistent
/// candidate.  If no overlap-one segmentation admits a candidate, the
/// search is retried allowing exactly one zero-overlap junction (the
/// silence-problem fallback).  Returns nullopt when even the fallback
/// yields nothing.
inline std::optional<Lattice> build_lattice(std::string_view word, const FreqView& view, Mode mode,
                                            const LatticeLimits& limits = {}) {
    if (word.size() < 3 || word.front() != kBoundary || word.back() != kBoundary)
        throw std::invalid_argument("build_lattice: word must be boundary-padded");

    const int l = static_cast<int>(word.size());
    auto attempt = [&](bool allow_gap) -> std::optional<Lattice> {
        const int nmax = mode == Mode::OverlapOne ? l - 1 : l;
        for (int n = 1; n <= nmax; ++n) {
            auto segs = detail::segmentations_exact(word, view, mode, n, allow_gap);
            if (segs.empty()) continue;
            Lattice lat;
            lat.word = std::string(word);
            lat.mode = mode;
            lat.n_segments = n;
            lat.used_fallback = allow_gap;
            for (const Segmentation& s : segs) {
                int idx = static_cast<int>(lat.segmentations.size());
                auto cands = expand_segmentation(word, s, view, idx);
                if (cands.empty()) continue;  // no overlap-consistent choice
                lat.segmentations.push_back(s);
                lat.candidates.insert(lat.candidates.end(), std::make_move_iterator(cands.begin()),
                                      std::make_move_iterator(cands.end()));
            }
            if (!lat.candidates.empty()) return lat;
        }
        return std::nullopt;
    };

    auto lat = attempt(false);
    if (!lat && mode == Mode::OverlapOne) lat = attempt(true);
    if (lat && limits.warn_candidates > 0 && lat->candidates.size() > limits.warn_candidates)
        std::fprintf(stderr, "pba: word %.*s expands to %zu candidates\n",
                     static_cast<int>(word.size()), word.data(), lat->candidates.size());
    return lat;
}

/// The minimal candidate-bearing segmentations of a padded word.
inline std::vector<Segmentation> enumerate_segmentations(std::string_view word,
                                                         const FreqView& view, Mode mode) {
    auto lat = build_lattice(word, view, mode);
    return lat ? lat->segmentations : std::vector<Segmentation>{};
}

}  // namespace pba

#endif  // PBA_LATTICE_HPP
