#ifndef PBA_EVALUATION_HPP
#define PBA_EVALUATION_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "pba/strategies.hpp"

namespace pba {

/// Unit-cost edit distance.
inline int levenshtein(std::string_view a, std::string_view b) {
    const std::size_t n = b.size();
    std::vector<int> row(n + 1);
    std::iota(row.begin(), row.end(), 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        int diag = row[0];
        row[0] = static_cast<int>(i);
        for (std::size_t j = 1; j <= n; ++j) {
            int next = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] != b[j - 1])});
            diag = row[j];
            row[j] = next;
        }
    }
    return row[n];
}

/// A fully resolved scoring strategy.
struct StrategySpec {
    enum class Family {
        Components,  // rank-combined subset of the eleven classics
        TP,
        WTP,
        Product,  // (rooted, optionally collated) product of per-segment factors
        Cond,     // PROD / CONDR / CONDL / CONDRL / CONDALL / CONDF
        Unit,     // every candidate scores 1 (lower bound)
        Oracle,   // minimal Levenshtein distance to the reference (upper bound)
    };

    Family family = Family::Product;
    std::array<bool, 11> components{};
    CombinationRule combination = CombinationRule::Product;
    FreqKind freq = FreqKind::Estimated;
    CondRule cond = CondRule::CondF;
    bool collate = true;
    RootDegree root;
    Mode mode = Mode::NonOverlap;
    std::string name = "PROB";
};

/// Resolves a strategy name: a component name (PF..PFSP), a 5- or
/// 11-character bitstring, TP, WTP, PROB[ABS|NORM], PROD[ABS|NORM], or
/// one of the conditional rules.  The mode defaults to the one the
/// strategy requires.
inline StrategySpec parse_strategy(std::string_view name) {
    StrategySpec spec;
    spec.name = std::string(name);

    auto is_bitstring = [&] {
        if (name.size() != 5 && name.size() != 11) return false;
        return std::all_of(name.begin(), name.end(), [](char c) { return c == '0' || c == '1'; });
    };

    if (is_bitstring()) {
        spec.family = StrategySpec::Family::Components;
        spec.mode = Mode::OverlapOne;
        bool any = false;
        for (std::size_t i = 0; i < name.size(); ++i) {
            spec.components[i] = name[i] == '1';
            any |= spec.components[i];
        }
        if (!any) throw std::invalid_argument("strategy bitstring selects no components");
        return spec;
    }
    for (std::size_t i = 0; i < kComponentNames.size(); ++i) {
        if (name == kComponentNames[i]) {
            spec.family = StrategySpec::Family::Components;
            spec.mode = Mode::OverlapOne;
            spec.components[i] = true;
            return spec;
        }
    }
    if (name == "TP" || name == "WTP") {
        spec.family = name == "TP" ? StrategySpec::Family::TP : StrategySpec::Family::WTP;
        spec.mode = Mode::OverlapOne;
        return spec;
    }

    auto product = [&](Mode mode, FreqKind kind) {
        spec.family = StrategySpec::Family::Product;
        spec.mode = mode;
        spec.freq = kind;
        return spec;
    };
    if (name == "PROB") return product(Mode::NonOverlap, FreqKind::Estimated);
    if (name == "PROBNORM") return product(Mode::NonOverlap, FreqKind::Normalized);
    if (name == "PROBABS") return product(Mode::NonOverlap, FreqKind::Absolute);
    if (name == "PRODNORM") return product(Mode::OverlapOne, FreqKind::Normalized);
    if (name == "PRODABS") return product(Mode::OverlapOne, FreqKind::Absolute);

    static constexpr std::pair<const char*, CondRule> kCondNames[] = {
        {"PROD", CondRule::Prod},       {"CONDR", CondRule::CondR},
        {"CONDL", CondRule::CondL},     {"CONDRL", CondRule::CondRL},
        {"CONDALL", CondRule::CondAll}, {"CONDF", CondRule::CondF},
    };
    for (const auto& [n, rule] : kCondNames) {
        if (name == n) {
            spec.family = StrategySpec::Family::Cond;
            spec.cond = rule;
            spec.mode = Mode::OverlapOne;
            return spec;
        }
    }
    throw std::invalid_argument("unknown strategy: " + std::string(name));
}

struct WordResult {
    std::string word;  // unpadded input side
    int tie_set_size = 0;
    int correct_in_tie = 0;
    double word_credit = 0;
    double phoneme_credit = 0;
    double mean_distance = 0;  // Levenshtein, averaged over the tie set
    int reference_length = 0;  // stripped reference
    bool silenced = false;
    std::string best;  // one best stripped pronunciation (tie minimum)
};

namespace detail {

inline constexpr double kTieRelEps = 1e-12;

/// Indices whose score ties the maximum (relative epsilon; scores are
/// nonnegative).
inline std::vector<std::size_t> argmax_ties(const std::vector<double>& scores) {
    double best = *std::max_element(scores.begin(), scores.end());
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < scores.size(); ++i)
        if (scores[i] >= best - kTieRelEps * std::max(1.0, std::abs(best))) out.push_back(i);
    return out;
}

inline std::vector<std::string> distinct_assembled(const Lattice& lat,
                                                   const std::vector<std::size_t>& cand_indices) {
    std::vector<std::string> out;
    for (std::size_t i : cand_indices) out.push_back(lat.candidates[i].assembled);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace detail

/// The tie set of best-scoring pronunciations (raw assembled strings)
/// for one word under a strategy.  `reference` is the padded reference
/// pronunciation (used by the Oracle family only).
inline std::vector<std::string> best_pronunciations(const Lattice& lat, const FreqView& view,
                                                    const StrategySpec& spec,
                                                    std::string_view reference) {
    using Family = StrategySpec::Family;
    switch (spec.family) {
        case Family::Components: {
            auto scores = score_components(spec.components, spec.combination, lat, view);
            return detail::distinct_assembled(lat, detail::argmax_ties(scores));
        }
        case Family::TP:
        case Family::WTP: {
            auto scores = tp_wtp_score(lat, view, spec.family == Family::WTP);
            return detail::distinct_assembled(lat, detail::argmax_ties(scores));
        }
        case Family::Product:
        case Family::Cond: {
            std::vector<double> mass(lat.candidates.size());
            for (std::size_t i = 0; i < lat.candidates.size(); ++i) {
                const Candidate& c = lat.candidates[i];
                if (spec.family == Family::Product) {
                    int n = static_cast<int>(lat.segmentations[c.segmentation].segments.size());
                    mass[i] = apply_root(product_mass<double>(lat, c, view, spec.freq), spec.root, n);
                } else {
                    mass[i] = cond_candidate_mass<double>(spec.cond, lat, c, view, spec.root);
                }
            }
            if (!spec.collate) return detail::distinct_assembled(lat, detail::argmax_ties(mass));
            auto posterior = collate(lat, mass);
            std::vector<double> collated;
            collated.reserve(posterior.mass.size());
            for (const auto& [_, m] : posterior.mass) collated.push_back(m);
            std::vector<std::string> out;
            for (std::size_t i : detail::argmax_ties(collated)) out.push_back(posterior.mass[i].first);
            return out;
        }
        case Family::Unit: {
            std::vector<std::size_t> all(lat.candidates.size());
            std::iota(all.begin(), all.end(), std::size_t{0});
            return detail::distinct_assembled(lat, all);
        }
        case Family::Oracle: {
            std::string ref = strip_silent(reference);
            std::vector<std::size_t> all(lat.candidates.size());
            std::iota(all.begin(), all.end(), std::size_t{0});
            auto prons = detail::distinct_assembled(lat, all);
            std::vector<double> scores;
            scores.reserve(prons.size());
            for (const std::string& p : prons)
                scores.push_back(-levenshtein(strip_silent(p), ref));
            std::vector<std::string> out;
            for (std::size_t i : detail::argmax_ties(scores)) out.push_back(prons[i]);
            return out;
        }
    }
    return {};
}

/// Leave-one-out result for one word: fractional word credit over the
/// tie set, per-word phoneme credit 1 - distance/length clamped at 0.
inline WordResult score_word(const AlignedEntry& entry, const FreqView& view,
                             const StrategySpec& spec, const LatticeLimits& limits = {}) {
    WordResult r;
    r.word = unpad(entry.letters);
    std::string ref = strip_silent(entry.phonemes);
    r.reference_length = static_cast<int>(ref.size());

    auto lat = build_lattice(entry.letters, view, spec.mode, limits);
    if (!lat) {
        r.silenced = true;
        return r;
    }
    auto tie = best_pronunciations(*lat, view, spec, entry.phonemes);
    r.tie_set_size = static_cast<int>(tie.size());
    double dist_sum = 0, credit_sum = 0;
    for (const std::string& raw : tie) {
        std::string stripped = strip_silent(raw);
        if (r.best.empty() || stripped < r.best) r.best = stripped;
        if (stripped == ref) ++r.correct_in_tie;
        int d = levenshtein(stripped, ref);
        dist_sum += d;
        credit_sum += ref.empty() ? (d == 0 ? 1.0 : 0.0)
                                  : std::max(0.0, 1.0 - static_cast<double>(d) / ref.size());
    }
    r.word_credit = static_cast<double>(r.correct_in_tie) / r.tie_set_size;
    r.mean_distance = dist_sum / r.tie_set_size;
    r.phoneme_credit = credit_sum / r.tie_set_size;
    return r;
}

enum class PhoneAggregation { PerWord, Corpus };

inline const char* to_string(PhoneAggregation a) {
    return a == PhoneAggregation::PerWord ? "perword" : "corpus";
}

struct EvaluationReport {
    std::string strategy;
    Direction direction = Direction::TextToSpeech;
    Mode mode = Mode::NonOverlap;
    std::string root = "1";
    double word_accuracy = 0;     // percent
    double phoneme_accuracy = 0;  // percent (letter accuracy for STT)
    int silenced = 0;
    std::int64_t wall_ms = 0;
    std::vector<WordResult> words;
};

struct EvalOptions {
    int jobs = 0;  // 0 = hardware concurrency
    PhoneAggregation phone_agg = PhoneAggregation::PerWord;
    bool keep_word_results = false;
    LatticeLimits limits;
};

/// Leave-one-out evaluation of every word.  Word-level parallelism with
/// order-independent aggregation; the report does not depend on the
/// worker count.
inline EvaluationReport evaluate_corpus(const Lexicon& lexicon, const SubstringIndex& index,
                                        const StrategySpec& spec, const EvalOptions& opts = {}) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t n = lexicon.entries.size();
    std::vector<WordResult> results(n);

    int jobs = opts.jobs > 0 ? opts.jobs
                             : std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min<int>(jobs, static_cast<int>(n ? n : 1));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            LeaveOneOutView view(index, lexicon.entries[i]);
            results[i] = score_word(lexicon.entries[i], view, spec, opts.limits);
        }
    };
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    EvaluationReport report;
    report.strategy = spec.name;
    report.direction = lexicon.direction;
    report.mode = spec.mode;
    report.root = spec.root.varying ? "n" : std::to_string(static_cast<int>(spec.root.degree));
    double word_sum = 0, phone_sum = 0, dist_sum = 0, len_sum = 0;
    for (const WordResult& r : results) {
        word_sum += r.word_credit;
        phone_sum += r.silenced ? 0.0 : r.phoneme_credit;
        dist_sum += r.silenced ? r.reference_length : r.mean_distance;
        len_sum += r.reference_length;
        report.silenced += r.silenced;
    }
    if (n > 0) {
        report.word_accuracy = 100.0 * word_sum / static_cast<double>(n);
        report.phoneme_accuracy = opts.phone_agg == PhoneAggregation::PerWord
                                      ? 100.0 * phone_sum / static_cast<double>(n)
                                      : 100.0 * std::max(0.0, 1.0 - dist_sum / len_sum);
    }
    report.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    if (opts.keep_word_results) report.words = std::move(results);
    return report;
}

/// Lower and upper accuracy bounds: unit score for every candidate
/// (random-guess tie credit) versus the oracle secondary heuristic
/// minimizing Levenshtein distance to the reference.
inline std::pair<EvaluationReport, EvaluationReport> bounds(const Lexicon& lexicon,
                                                            const SubstringIndex& index, Mode mode,
                                                            const EvalOptions& opts = {}) {
    StrategySpec lower;
    lower.family = StrategySpec::Family::Unit;
    lower.mode = mode;
    lower.name = "lower-bound";
    StrategySpec upper;
    upper.family = StrategySpec::Family::Oracle;
    upper.mode = mode;
    upper.name = "upper-bound";
    return {evaluate_corpus(lexicon, index, lower, opts),
            evaluate_corpus(lexicon, index, upper, opts)};
}

}  // namespace pba

#endif  // PBA_EVALUATION_HPP
