#ifndef PBA_TESTS_FIXTURES_HPP
#define PBA_TESTS_FIXTURES_HPP

#include <cstdint>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pba/pba.hpp"

namespace pba::testing {

/// FreqView backed by hand-entered distributions; anything not listed
/// is absent.
class TableView : public FreqView {
public:
    void set(std::string letters, std::vector<std::pair<std::string, std::uint32_t>> prons) {
        std::sort(prons.begin(), prons.end());
        table_[std::move(letters)] = std::move(prons);
    }

    std::uint64_t total(std::string_view letters) const override {
        auto it = table_.find(letters);
        if (it == table_.end()) return 0;
        std::uint64_t t = 0;
        for (const auto& [_, c] : it->second) t += c;
        return t;
    }

    std::uint32_t count(std::string_view letters, std::string_view pron) const override {
        auto it = table_.find(letters);
        if (it == table_.end()) return 0;
        for (const auto& [p, c] : it->second)
            if (p == pron) return c;
        return 0;
    }

    void visit(std::string_view letters,
               const std::function<void(std::string_view, std::uint32_t)>& fn) const override {
        auto it = table_.find(letters);
        if (it == table_.end()) return;
        for (const auto& [p, c] : it->second) fn(p, c);
    }

private:
    std::map<std::string, std::vector<std::pair<std::string, std::uint32_t>>, std::less<>> table_;
};

/// The ten segments of the padded word "#longevity#" with the
/// pronunciation frequencies they have over the whole NETtalk corpus
/// with `longevity` itself excluded.  Boundary letters carry the
/// boundary phoneme internally.
inline TableView longevity_view() {
    TableView v;
    v.set("#longe", {{"#lcGg-", 1}});
    v.set("#long", {{"#lcG-", 4}, {"#lanJ", 2}, {"#lcGg", 1}});
    v.set("#lon", {{"#lcG", 5}, {"#lan", 2}, {"#lon", 1}});
    v.set("nge", {{"nJ-", 54},
                  {"nJx", 18},
                  {"Gg-", 12},
                  {"nJE", 9},
                  {"nJi", 9},
                  {"G--", 6},
                  {"NJ-", 3},
                  {"Ggx", 1},
                  {"n-i", 1}});
    v.set("ge", {{"J-", 284}, {"Jx", 105}, {"JE", 80}, {"Ji", 40}, {"Z-", 26},
                 {"g-", 19},  {"--", 16},  {"gE", 11}, {"-x", 8},  {"gx", 6},
                 {"JI", 4},   {"gA", 3},   {"gi", 3},  {"Ze", 2},  {"-i", 1},
                 {"Ja", 1},   {"Za", 1},   {"gI", 1},  {"gY", 1},  {"ge", 1}});
    v.set("ev", {{"Ev", 83}, {"Iv", 50}, {"iv", 36}, {"-v", 24}, {"xv", 15}, {"Ef", 1}});
    v.set("evi", {{"ivi", 10}, {"Evx", 8}, {"IvA", 7}, {"Ev-", 3}, {"IvI", 3}, {"ivA", 3},
                  {"xvI", 3},  {"-vI", 2}, {"iv-", 2}, {"ivI", 2}, {"-v-", 1}, {"Evi", 1},
                  {"IvY", 1},  {"ivY", 1}, {"ivy", 1}, {"xvA", 1}, {"xvY", 1}});
    v.set("evity#", {{"Evxti#", 2}});
    v.set("vity#", {{"vxti#", 22}});
    v.set("ity#", {{"xti#", 421}, {"Iti#", 2}});
    return v;
}

inline AlignedEntry make_entry(std::string_view word, std::string_view phonemes) {
    std::istringstream in(std::string(word) + " " + std::string(phonemes));
    return parse_nettalk(in).entries.at(0);
}

/// Deterministic pseudo-random toy lexicon over a tiny alphabet.
inline std::vector<AlignedEntry> random_lexicon(std::uint32_t seed, std::size_t n_words) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> len(2, 5);
    const std::string letters = "abc";
    const std::string phonemes = "AB-";
    std::vector<AlignedEntry> out;
    for (std::size_t i = 0; i < n_words; ++i) {
        int l = len(rng);
        std::string w, p;
        for (int j = 0; j < l; ++j) {
            w += letters[rng() % letters.size()];
            p += phonemes[rng() % phonemes.size()];
        }
        out.push_back(make_entry(w, p));
    }
    return out;
}

}  // namespace pba::testing

#endif  // PBA_TESTS_FIXTURES_HPP
