#ifndef PBA_INDEX_HPP
#define PBA_INDEX_HPP

#include <cstdint>
#include <functional>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pba/corpus.hpp"

namespace pba {

struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
        return std::hash<std::string_view>{}(s);
    }
    std::size_t operator()(const std::string& s) const noexcept {
        return std::hash<std::string_view>{}(std::string_view(s));
    }
};

template <class T>
using StringMap = std::unordered_map<std::string, T, StringHash, std::equal_to<>>;

/// Occurrence counts of the pronunciations of one letter string,
/// sorted by pronunciation.
struct Distribution {
    std::vector<std::pair<std::string, std::uint32_t>> prons;
    std::uint64_t total = 0;
};

/// Read interface over substring pronunciation counts.  Implementations:
/// SubstringIndex (whole corpus) and LeaveOneOutView (one entry's own
/// contribution subtracted on lookup).
class FreqView {
public:
    virtual ~FreqView() = default;

    virtual std::uint64_t total(std::string_view letters) const = 0;
    virtual std::uint32_t count(std::string_view letters, std::string_view pron) const = 0;
    /// Calls fn(pron, count) for every pronunciation with a positive
    /// count, in sorted pronunciation order.
    virtual void visit(std::string_view letters,
                       const std::function<void(std::string_view, std::uint32_t)>& fn) const = 0;

    bool contains(std::string_view letters) const { return total(letters) > 0; }

    std::size_t distinct_prons(std::string_view letters) const {
        std::size_t n = 0;
        visit(letters, [&](std::string_view, std::uint32_t) { ++n; });
        return n;
    }
};

/// Association from every letter substring of every padded entry to the
/// frequency distribution of its pronunciations over the whole corpus.
/// A substring occurring at two positions of one entry counts twice.
class SubstringIndex : public FreqView {
public:
    static SubstringIndex build(std::span<const AlignedEntry> entries) {
        SubstringIndex index;
        StringMap<StringMap<std::uint32_t>> acc;
        for (const AlignedEntry& e : entries) add_entry(acc, e);
        index.table_.reserve(acc.size());
        for (auto& [letters, prons] : acc) {
            Distribution d;
            d.prons.assign(prons.begin(), prons.end());
            std::sort(d.prons.begin(), d.prons.end());
            for (const auto& [_, c] : d.prons) d.total += c;
            index.table_.emplace(letters, std::move(d));
        }
        return index;
    }

    static SubstringIndex build(const Lexicon& lexicon) {
        return build(std::span<const AlignedEntry>(lexicon.entries));
    }

    const Distribution* find(std::string_view letters) const {
        auto it = table_.find(letters);
        return it == table_.end() ? nullptr : &it->second;
    }

    std::uint64_t total(std::string_view letters) const override {
        const Distribution* d = find(letters);
        return d ? d->total : 0;
    }

    std::uint32_t count(std::string_view letters, std::string_view pron) const override {
        const Distribution* d = find(letters);
        if (!d) return 0;
        auto it = std::lower_bound(d->prons.begin(), d->prons.end(), pron,
                                   [](const auto& p, std::string_view v) { return p.first < v; });
        return it != d->prons.end() && it->first == pron ? it->second : 0;
    }

    void visit(std::string_view letters,
               const std::function<void(std::string_view, std::uint32_t)>& fn) const override {
        const Distribution* d = find(letters);
        if (!d) return;
        for (const auto& [pron, c] : d->prons) fn(pron, c);
    }

    std::size_t size() const { return table_.size(); }

    /// Substring counts of a single entry, in the same keyed form.
    static StringMap<StringMap<std::uint32_t>> entry_counts(const AlignedEntry& e) {
        StringMap<StringMap<std::uint32_t>> acc;
        add_entry(acc, e);
        return acc;
    }

    void save(std::ostream& out) const;
    static SubstringIndex load(std::istream& in);

private:
    static void add_entry(StringMap<StringMap<std::uint32_t>>& acc, const AlignedEntry& e) {
        const std::size_t l = e.letters.size();
        for (std::size_t a = 0; a < l; ++a) {
            for (std::size_t b = a; b < l; ++b) {
                std::string_view x(e.letters.data() + a, b - a + 1);
                std::string_view y(e.phonemes.data() + a, b - a + 1);
                auto it = acc.find(x);
                if (it == acc.end()) it = acc.emplace(std::string(x), StringMap<std::uint32_t>{}).first;
                auto& prons = it->second;
                auto pit = prons.find(y);
                if (pit == prons.end())
                    prons.emplace(std::string(y), 1);
                else
                    ++pit->second;
            }
        }
    }

    StringMap<Distribution> table_;
};

/// View of a SubstringIndex with one entry's own substring counts
/// subtracted on lookup, for leave-one-out evaluation.
class LeaveOneOutView : public FreqView {
public:
    LeaveOneOutView(const SubstringIndex& base, const AlignedEntry& excluded)
        : base_(&base), delta_(SubstringIndex::entry_counts(excluded)) {
        for (auto& [letters, prons] : delta_) {
            std::uint64_t t = 0;
            for (const auto& [_, c] : prons) t += c;
            delta_totals_.emplace(letters, t);
        }
    }

    std::uint64_t total(std::string_view letters) const override {
        std::uint64_t t = base_->total(letters);
        auto it = delta_totals_.find(letters);
        if (it != delta_totals_.end()) t -= std::min<std::uint64_t>(t, it->second);
        return t;
    }

    std::uint32_t count(std::string_view letters, std::string_view pron) const override {
        std::uint32_t c = base_->count(letters, pron);
        auto it = delta_.find(letters);
        if (it != delta_.end()) {
            auto pit = it->second.find(pron);
            if (pit != it->second.end()) c -= std::min(c, pit->second);
        }
        return c;
    }

    void visit(std::string_view letters,
               const std::function<void(std::string_view, std::uint32_t)>& fn) const override {
        const StringMap<std::uint32_t>* del = nullptr;
        auto it = delta_.find(letters);
        if (it != delta_.end()) del = &it->second;
        base_->visit(letters, [&](std::string_view pron, std::uint32_t c) {
            if (del) {
                auto pit = del->find(pron);
                if (pit != del->end()) c -= std::min(c, pit->second);
            }
            if (c > 0) fn(pron, c);
        });
    }

private:
    const SubstringIndex* base_;
    StringMap<StringMap<std::uint32_t>> delta_;
    StringMap<std::uint64_t> delta_totals_;
};

namespace detail {

struct Fnv1a {
    std::uint64_t state = 0xcbf29ce484222325ull;
    void update(const void* data, std::size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            state ^= p[i];
            state *= 0x100000001b3ull;
        }
    }
};

template <class T>
void write_pod(std::ostream& out, Fnv1a& h, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
    h.update(&v, sizeof v);
}

template <class T>
T read_pod(std::istream& in, Fnv1a& h) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw std::runtime_error("index file: truncated");
    h.update(&v, sizeof v);
    return v;
}

inline void write_str(std::ostream& out, Fnv1a& h, std::string_view s) {
    write_pod<std::uint32_t>(out, h, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
    h.update(s.data(), s.size());
}

inline std::string read_str(std::istream& in, Fnv1a& h) {
    auto n = read_pod<std::uint32_t>(in, h);
    std::string s(n, '\0');
    in.read(s.data(), n);
    if (!in) throw std::runtime_error("index file: truncated");
    h.update(s.data(), s.size());
    return s;
}

}  // namespace detail

inline constexpr std::uint32_t kIndexFormatMagic = 0x31584250;  // "PBX1"
inline constexpr std::uint32_t kIndexFormatVersion = 1;

inline void SubstringIndex::save(std::ostream& out) const {
    detail::Fnv1a h;
    detail::write_pod(out, h, kIndexFormatMagic);
    detail::write_pod(out, h, kIndexFormatVersion);
    std::vector<const std::string*> keys;
    keys.reserve(table_.size());
    for (const auto& [k, _] : table_) keys.push_back(&k);
    std::sort(keys.begin(), keys.end(), [](auto* a, auto* b) { return *a < *b; });
    detail::write_pod(out, h, static_cast<std::uint64_t>(keys.size()));
    for (const std::string* k : keys) {
        const Distribution& d = table_.at(*k);
        detail::write_str(out, h, *k);
        detail::write_pod(out, h, static_cast<std::uint32_t>(d.prons.size()));
        for (const auto& [pron, c] : d.prons) {
            detail::write_str(out, h, pron);
            detail::write_pod(out, h, c);
        }
    }
    std::uint64_t checksum = h.state;
    out.write(reinterpret_cast<const char*>(&checksum), sizeof checksum);
}

inline SubstringIndex SubstringIndex::load(std::istream& in) {
    detail::Fnv1a h;
    if (detail::read_pod<std::uint32_t>(in, h) != kIndexFormatMagic)
        throw std::runtime_error("index file: bad magic");
    if (detail::read_pod<std::uint32_t>(in, h) != kIndexFormatVersion)
        throw std::runtime_error("index file: unsupported version");
    auto nkeys = detail::read_pod<std::uint64_t>(in, h);
    SubstringIndex index;
    index.table_.reserve(nkeys);
    for (std::uint64_t i = 0; i < nkeys; ++i) {
        std::string key = detail::read_str(in, h);
        auto nprons = detail::read_pod<std::uint32_t>(in, h);
        Distribution d;
        d.prons.reserve(nprons);
        for (std::uint32_t j = 0; j < nprons; ++j) {
            std::string pron = detail::read_str(in, h);
            auto c = detail::read_pod<std::uint32_t>(in, h);
            d.prons.emplace_back(std::move(pron), c);
            d.total += c;
        }
        index.table_.emplace(std::move(key), std::move(d));
    }
    std::uint64_t expected = h.state;
    std::uint64_t checksum = 0;
    in.read(reinterpret_cast<char*>(&checksum), sizeof checksum);
    if (!in || checksum != expected) throw std::runtime_error("index file: checksum mismatch");
    return index;
}

/// An exact probability value num/den.
struct Fraction {
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    friend bool operator==(const Fraction&, const Fraction&) = default;
};

/// Estimated probability count(x,y) / (total(x) + 1).  The extra one in
/// the denominator reserves mass for unseen pronunciations of x.
inline Fraction estimated_probability_frac(const FreqView& view, std::string_view x,
                                           std::string_view y) {
    return Fraction{view.count(x, y), view.total(x) + 1};
}

inline double estimated_probability(const FreqView& view, std::string_view x,
                                    std::string_view y) {
    return estimated_probability_frac(view, x, y).value();
}

/// Plain relative frequency count(x,y) / total(x); zero when x is absent.
inline Fraction normalized_frequency_frac(const FreqView& view, std::string_view x,
                                          std::string_view y) {
    std::uint64_t t = view.total(x);
    if (t == 0) return Fraction{0, 1};
    return Fraction{view.count(x, y), t};
}

/// A partial phoneme assignment over the positions of a letter string.
using FixedPhonemes = std::vector<std::pair<std::uint32_t, char>>;

/// Conditional estimated probability of pronouncing x as y given that
/// some positions of x already carry fixed phonemes: zero if y
/// disagrees with a fixed phoneme, one if the fixed phonemes cover all
/// of x and agree with y, and otherwise count(x,y) divided by one plus
/// the total count of pronunciations of x agreeing with the fixed
/// phonemes.
inline Fraction conditional_probability_frac(const FreqView& view, std::string_view x,
                                             std::string_view y, const FixedPhonemes& fixed) {
    for (const auto& [pos, ph] : fixed) {
        if (pos >= y.size()) throw std::out_of_range("fixed position beyond segment");
        if (y[pos] != ph) return Fraction{0, 1};
    }
    if (fixed.size() == x.size()) return Fraction{1, 1};
    std::uint64_t agreeing = 0;
    view.visit(x, [&](std::string_view pron, std::uint32_t c) {
        for (const auto& [pos, ph] : fixed)
            if (pron[pos] != ph) return;
        agreeing += c;
    });
    return Fraction{view.count(x, y), agreeing + 1};
}

inline double conditional_probability(const FreqView& view, std::string_view x,
                                      std::string_view y, const FixedPhonemes& fixed) {
    return conditional_probability_frac(view, x, y, fixed).value();
}

}  // namespace pba

#endif  // PBA_INDEX_HPP
