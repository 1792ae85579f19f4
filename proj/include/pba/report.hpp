#ifndef PBA_REPORT_HPP
#define PBA_REPORT_HPP

#include <cinttypes>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>

#include "pba/evaluation.hpp"

namespace pba {

inline constexpr const char* kVersion = "0.1.0";

/// Settings recorded in every report header so runs are reproducible.
struct ReportContext {
    FilterConfig filter;
    PhoneAggregation phone_agg = PhoneAggregation::PerWord;
    bool stable_output = false;  // zero wall-clock fields for byte-identical reruns

    std::string config_string() const {
        std::string s;
        s += "homophone=";
        s += to_string(filter.rule);
        s += ",homophone-cmp=";
        s += to_string(filter.compare);
        s += ",phone-agg=";
        s += to_string(phone_agg);
        return s;
    }

    std::uint64_t config_hash() const {
        detail::Fnv1a h;
        std::string s = config_string();
        h.update(s.data(), s.size());
        return h.state;
    }
};

inline std::string format_pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline void write_report_header(std::ostream& out, const ReportContext& ctx) {
    char hash[24];
    std::snprintf(hash, sizeof hash, "%016" PRIx64, ctx.config_hash());
    out << "# pba " << kVersion << " config=" << hash << " " << ctx.config_string() << "\n";
    out << "strategy\tdirection\tmode\troot\twords_pct\tphones_pct\tsilenced\twall_ms\n";
}

inline void write_report_row(std::ostream& out, const EvaluationReport& r,
                             const ReportContext& ctx) {
    out << r.strategy << '\t' << to_string(r.direction) << '\t' << to_string(r.mode) << '\t'
        << r.root << '\t' << format_pct(r.word_accuracy) << '\t' << format_pct(r.phoneme_accuracy)
        << '\t' << r.silenced << '\t' << (ctx.stable_output ? 0 : r.wall_ms) << '\n';
}

inline std::string report_row_string(const EvaluationReport& r, const ReportContext& ctx) {
    std::ostringstream os;
    write_report_row(os, r, ctx);
    std::string s = os.str();
    if (!s.empty() && s.back() == '\n') s.pop_back();
    return s;
}

inline void write_word_details(std::ostream& out, const EvaluationReport& r) {
    out << "word\ttie_size\tcorrect_in_tie\tword_credit\tphoneme_credit\tsilenced\tbest\n";
    for (const WordResult& w : r.words) {
        char credit[32], pcredit[32];
        std::snprintf(credit, sizeof credit, "%.6f", w.word_credit);
        std::snprintf(pcredit, sizeof pcredit, "%.6f", w.phoneme_credit);
        out << w.word << '\t' << w.tie_set_size << '\t' << w.correct_in_tie << '\t' << credit
            << '\t' << pcredit << '\t' << (w.silenced ? 1 : 0) << '\t' << w.best << '\n';
    }
}

}  // namespace pba

#endif  // PBA_REPORT_HPP
