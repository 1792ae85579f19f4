#ifndef PBA_CORPUS_HPP
#define PBA_CORPUS_HPP

#include <algorithm>
#include <cctype>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pba {

// Silent word-boundary marker added at both ends of every entry.
inline constexpr char kBoundary = '#';
// Placeholder phoneme used by NETtalk to keep the letter/phoneme
// alignment one-to-one.
inline constexpr char kNullPhoneme = '-';

enum class Direction { TextToSpeech, SpeechToText };

inline const char* to_string(Direction d) {
    return d == Direction::TextToSpeech ? "tts" : "stt";
}

/// A word/pronunciation pair with one phoneme symbol per letter,
/// both sides padded with the boundary marker.
struct AlignedEntry {
    std::string letters;
    std::string phonemes;

    friend bool operator==(const AlignedEntry&, const AlignedEntry&) = default;
};

/// Exchanges the two sides of an entry (text-to-speech <-> speech-to-text).
inline AlignedEntry swap_direction(const AlignedEntry& e) {
    return AlignedEntry{e.phonemes, e.letters};
}

/// Removes boundary markers and null phonemes.
inline std::string strip_silent(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s)
        if (c != kBoundary && c != kNullPhoneme) out.push_back(c);
    return out;
}

/// The unpadded string, boundary markers removed but nulls kept.
inline std::string unpad(std::string_view s) {
    std::string out;
    for (char c : s)
        if (c != kBoundary) out.push_back(c);
    return out;
}

struct ParseDiagnostic {
    std::size_t line_no = 0;
    std::string line;
    std::string reason;
};

struct ParseResult {
    std::vector<AlignedEntry> entries;
    std::vector<ParseDiagnostic> rejected;
};

/// Parses the NETtalk plain-text format: one entry per line,
/// whitespace-separated columns "word phonemes [stress [flags]]".
/// Stress and flag columns are ignored.  Lines whose word and phoneme
/// strings have different lengths are rejected individually; an input
/// with no valid entries at all is an error.
inline ParseResult parse_nettalk(std::istream& in) {
    ParseResult result;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream fields(line);
        std::string word, phonemes;
        if (!(fields >> word >> phonemes)) {
            if (word.empty()) continue;  // blank line
            result.rejected.push_back({line_no, line, "fewer than two fields"});
            continue;
        }
        if (word.size() != phonemes.size()) {
            result.rejected.push_back(
                {line_no, line,
                 "length mismatch: " + std::to_string(word.size()) + " letters vs " +
                     std::to_string(phonemes.size()) + " phonemes"});
            continue;
        }
        std::transform(word.begin(), word.end(), word.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        AlignedEntry e;
        e.letters = kBoundary + word + kBoundary;
        e.phonemes = kBoundary + phonemes + kBoundary;
        result.entries.push_back(std::move(e));
    }
    if (result.entries.empty())
        throw std::runtime_error("corpus: no valid entries in input");
    return result;
}

/// Serializes an entry back to the two-column form accepted by
/// parse_nettalk.
inline std::string serialize_entry(const AlignedEntry& e) {
    return unpad(e.letters) + " " + unpad(e.phonemes);
}

/// How a clash group (entries sharing an output-side string) is resolved.
enum class HomophoneRule { KeepFirst, DropGroup };

/// Whether clash comparison uses the phoneme string as stored (with
/// null phonemes) or with nulls stripped.
enum class HomophoneCompare { WithNulls, Stripped };

inline const char* to_string(HomophoneRule r) {
    return r == HomophoneRule::KeepFirst ? "keep-first" : "drop-group";
}
inline const char* to_string(HomophoneCompare c) {
    return c == HomophoneCompare::WithNulls ? "with-nulls" : "stripped";
}

struct FilterConfig {
    HomophoneRule rule = HomophoneRule::KeepFirst;
    HomophoneCompare compare = HomophoneCompare::WithNulls;
};

struct Lexicon {
    std::vector<AlignedEntry> entries;
    Direction direction = Direction::TextToSpeech;
};

/// Orients entries for the requested direction (speech-to-text swaps the
/// two sides), removes one-letter words, and removes entries whose
/// output side clashes with an earlier entry (homophones for
/// text-to-speech, homographs for speech-to-text).
inline Lexicon filter_corpus(const std::vector<AlignedEntry>& parsed, Direction direction,
                             FilterConfig cfg = {}) {
    std::vector<AlignedEntry> oriented;
    oriented.reserve(parsed.size());
    for (const AlignedEntry& e : parsed) {
        AlignedEntry o = direction == Direction::SpeechToText ? swap_direction(e) : e;
        if (o.letters.size() <= 3) continue;  // exactly one non-boundary letter
        oriented.push_back(std::move(o));
    }

    auto key_of = [&](const AlignedEntry& e) {
        return cfg.compare == HomophoneCompare::WithNulls ? unpad(e.phonemes)
                                                          : strip_silent(e.phonemes);
    };

    std::unordered_map<std::string, int> seen;  // key -> occurrences
    for (const AlignedEntry& e : oriented) ++seen[key_of(e)];

    Lexicon lex;
    lex.direction = direction;
    std::unordered_map<std::string, bool> taken;
    for (AlignedEntry& e : oriented) {
        std::string key = key_of(e);
        if (cfg.rule == HomophoneRule::DropGroup) {
            if (seen[key] > 1) continue;
        } else {
            if (std::exchange(taken[key], true)) continue;
        }
        lex.entries.push_back(std::move(e));
    }
    return lex;
}

}  // namespace pba

#endif  // PBA_CORPUS_HPP
