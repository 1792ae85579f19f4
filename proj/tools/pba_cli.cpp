// Command-line front end: index building, single-word pronunciation,
// leave-one-out evaluation, accuracy bounds, and strategy sweeps.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pba/pba.hpp"
#include "pba/report.hpp"

namespace {

struct CommonOpts {
    std::string corpus;
    std::string direction = "tts";
    std::string homophone_rule = "keep-first";
    std::string homophone_cmp = "with-nulls";
    std::string phone_agg = "perword";
    bool stable_output = false;
    int jobs = 0;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_eval_opts) {
    cmd->add_option("--corpus", o.corpus, "aligned lexicon file (word<ws>phonemes per line)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--direction", o.direction, "tts (letters to phonemes) or stt")
        ->check(CLI::IsMember({"tts", "stt"}));
    cmd->add_option("--homophone-rule", o.homophone_rule,
                    "clash handling: keep-first or drop-group")
        ->check(CLI::IsMember({"keep-first", "drop-group"}));
    cmd->add_option("--homophone-cmp", o.homophone_cmp,
                    "clash comparison: with-nulls or stripped")
        ->check(CLI::IsMember({"with-nulls", "stripped"}));
    if (needs_eval_opts) {
        cmd->add_option("--phone-agg", o.phone_agg, "phoneme accuracy aggregation")
            ->check(CLI::IsMember({"perword", "corpus"}));
        cmd->add_option("--jobs", o.jobs, "worker threads (0 = all cores)");
        cmd->add_flag("--stable-output", o.stable_output,
                      "zero timing fields so reruns are byte-identical");
    }
}

pba::Direction parse_direction(const std::string& s) {
    return s == "stt" ? pba::Direction::SpeechToText : pba::Direction::TextToSpeech;
}

pba::FilterConfig parse_filter(const CommonOpts& o) {
    pba::FilterConfig cfg;
    cfg.rule = o.homophone_rule == "drop-group" ? pba::HomophoneRule::DropGroup
                                                : pba::HomophoneRule::KeepFirst;
    cfg.compare = o.homophone_cmp == "stripped" ? pba::HomophoneCompare::Stripped
                                                : pba::HomophoneCompare::WithNulls;
    return cfg;
}

pba::RootDegree parse_root(const std::string& s) {
    if (s == "n") return pba::RootDegree::per_segment_count();
    int d = 0;
    try {
        d = std::stoi(s);
    } catch (const std::exception&) {
        throw CLI::ValidationError("--root", "expected an integer in 1..10 or 'n'");
    }
    if (d < 1 || d > 10) throw CLI::ValidationError("--root", "expected 1..10 or 'n'");
    return pba::RootDegree::fixed(d);
}

pba::Lexicon load_lexicon(const CommonOpts& o) {
    std::ifstream in(o.corpus);
    if (!in) throw CLI::ValidationError("--corpus", "cannot open " + o.corpus);
    pba::ParseResult parsed = pba::parse_nettalk(in);
    for (const auto& d : parsed.rejected)
        std::cerr << o.corpus << ":" << d.line_no << ": skipped: " << d.reason << "\n";
    return pba::filter_corpus(parsed.entries, parse_direction(o.direction), parse_filter(o));
}

pba::SubstringIndex load_or_build_index(const pba::Lexicon& lex, const std::string& index_path) {
    if (!index_path.empty()) {
        std::ifstream in(index_path, std::ios::binary);
        if (!in) throw CLI::ValidationError("--index", "cannot open " + index_path);
        return pba::SubstringIndex::load(in);
    }
    return pba::SubstringIndex::build(lex);
}

pba::StrategySpec resolve_strategy(const std::string& name, const std::string& mode,
                                   const std::string& root, bool no_collate) {
    pba::StrategySpec spec = pba::parse_strategy(name);
    if (mode == "overlap1") spec.mode = pba::Mode::OverlapOne;
    if (mode == "nonoverlap") spec.mode = pba::Mode::NonOverlap;
    spec.root = parse_root(root);
    spec.collate = !no_collate;
    return spec;
}

pba::ReportContext make_context(const CommonOpts& o) {
    pba::ReportContext ctx;
    ctx.filter = parse_filter(o);
    ctx.phone_agg =
        o.phone_agg == "corpus" ? pba::PhoneAggregation::Corpus : pba::PhoneAggregation::PerWord;
    ctx.stable_output = o.stable_output;
    return ctx;
}

pba::EvalOptions make_eval_options(const CommonOpts& o, const pba::ReportContext& ctx) {
    pba::EvalOptions opts;
    opts.jobs = o.jobs;
    opts.phone_agg = ctx.phone_agg;
    return opts;
}

std::ostream& open_out(std::ofstream& file, const std::string& path) {
    if (path.empty()) return std::cout;
    file.open(path);
    if (!file) throw CLI::ValidationError("--out", "cannot open " + path);
    return file;
}

int run_build_index(const CommonOpts& common, const std::string& out_path) {
    pba::Lexicon lex = load_lexicon(common);
    pba::SubstringIndex index = pba::SubstringIndex::build(lex);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw CLI::ValidationError("--out", "cannot open " + out_path);
    index.save(out);
    std::cerr << "indexed " << lex.entries.size() << " entries (" << pba::to_string(lex.direction)
              << ")\n";
    return 0;
}

void explain_candidates(std::ostream& out, const pba::Lattice& lat, const pba::FreqView& view,
                        const pba::StrategySpec& spec) {
    out << "# " << lat.candidates.size() << " candidates over " << lat.segmentations.size()
        << " segmentations of " << lat.word << " (" << lat.n_segments << " segments"
        << (lat.used_fallback ? ", fallback junction" : "") << ")\n";
    for (const auto& c : lat.candidates) {
        const auto& seg = lat.segmentations[c.segmentation];
        double mass = spec.family == pba::StrategySpec::Family::Cond
                          ? pba::cond_candidate_mass<double>(spec.cond, lat, c, view, spec.root)
                          : pba::apply_root(
                                pba::product_mass<double>(lat, c, view, spec.freq), spec.root,
                                static_cast<int>(seg.segments.size()));
        out << c.assembled << "\t" << mass << "\t";
        for (std::size_t k = 0; k < seg.segments.size(); ++k) {
            std::string_view letters = lat.segment_letters(seg.segments[k]);
            pba::Fraction f = pba::estimated_probability_frac(view, letters, c.prons[k]);
            if (k) out << " ";
            out << letters << "->" << c.prons[k] << "=" << f.num << "/" << f.den;
        }
        out << "\n";
    }
}

int run_pronounce(const CommonOpts& common, const std::vector<std::string>& words,
                  const std::string& strategy, const std::string& mode, const std::string& root,
                  bool no_collate, bool no_loo, bool explain, const std::string& index_path) {
    pba::Lexicon lex = load_lexicon(common);
    pba::SubstringIndex index = load_or_build_index(lex, index_path);
    pba::StrategySpec spec = resolve_strategy(strategy, mode, root, no_collate);

    int missing = 0;
    for (const std::string& raw : words) {
        std::string word = raw;
        std::transform(word.begin(), word.end(), word.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        std::string padded = std::string(1, pba::kBoundary) + word + pba::kBoundary;

        // By default a word that is itself in the lexicon is pronounced
        // from the rest of the data, mirroring the evaluation setting.
        const pba::AlignedEntry* own = nullptr;
        if (!no_loo)
            for (const auto& e : lex.entries)
                if (e.letters == padded) {
                    own = &e;
                    break;
                }
        std::optional<pba::LeaveOneOutView> loo;
        const pba::FreqView* view = &index;
        if (own) {
            loo.emplace(index, *own);
            view = &*loo;
        }

        auto lat = pba::build_lattice(padded, *view, spec.mode);
        if (!lat) {
            std::cout << word << "\t-\tsilenced\n";
            ++missing;
            continue;
        }
        if (explain) explain_candidates(std::cout, *lat, *view, spec);
        auto tie = pba::best_pronunciations(*lat, *view, spec, "");
        std::string best;
        for (const std::string& t : tie) {
            std::string s = pba::strip_silent(t);
            if (best.empty() || s < best) best = s;
        }
        std::cout << word << "\t" << best << "\t" << tie.size() << " tied\n";
    }
    return missing == 0 ? 0 : 1;
}

int run_evaluate(const CommonOpts& common, const std::vector<std::string>& strategies,
                 const std::string& mode, const std::string& root, bool no_collate,
                 const std::string& out_path, const std::string& details_path) {
    pba::Lexicon lex = load_lexicon(common);
    pba::SubstringIndex index = pba::SubstringIndex::build(lex);
    pba::ReportContext ctx = make_context(common);
    pba::EvalOptions opts = make_eval_options(common, ctx);
    opts.keep_word_results = !details_path.empty();

    std::ofstream file;
    std::ostream& out = open_out(file, out_path);
    pba::write_report_header(out, ctx);
    for (const std::string& name : strategies) {
        pba::StrategySpec spec = resolve_strategy(name, mode, root, no_collate);
        pba::EvaluationReport report = pba::evaluate_corpus(lex, index, spec, opts);
        report.direction = lex.direction;
        pba::write_report_row(out, report, ctx);
        if (!details_path.empty()) {
            std::ofstream details(details_path);
            if (!details) throw CLI::ValidationError("--details", "cannot open " + details_path);
            pba::write_word_details(details, report);
        }
    }
    return 0;
}

int run_bounds(const CommonOpts& common, const std::string& mode, const std::string& out_path) {
    pba::Lexicon lex = load_lexicon(common);
    pba::SubstringIndex index = pba::SubstringIndex::build(lex);
    pba::ReportContext ctx = make_context(common);
    pba::EvalOptions opts = make_eval_options(common, ctx);
    pba::Mode m = mode == "nonoverlap" ? pba::Mode::NonOverlap : pba::Mode::OverlapOne;

    auto [lower, upper] = pba::bounds(lex, index, m, opts);
    std::ofstream file;
    std::ostream& out = open_out(file, out_path);
    pba::write_report_header(out, ctx);
    pba::write_report_row(out, lower, ctx);
    pba::write_report_row(out, upper, ctx);
    return 0;
}

int run_sweep(const CommonOpts& common, std::vector<std::string> strategies,
              const std::string& root, const std::string& out_path) {
    pba::Lexicon lex = load_lexicon(common);
    pba::SubstringIndex index = pba::SubstringIndex::build(lex);
    pba::ReportContext ctx = make_context(common);
    pba::EvalOptions opts = make_eval_options(common, ctx);

    if (strategies.empty())
        strategies = {"PROB", "PROD", "CONDR", "CONDL", "CONDRL", "CONDF", "TP",  "WTP",
                      "PF",   "SDPS", "FSP",   "NDS",   "WL",     "WPF",   "SF",  "SL",
                      "SLN",  "SSPF", "PFSP"};

    // Resume: rows already present in the output file are kept verbatim
    // and their strategies skipped, so an interrupted sweep picks up
    // where it stopped and a finished sweep rewrites identical bytes.
    std::map<std::string, std::string> done;
    {
        std::ifstream existing(out_path);
        std::string line;
        while (std::getline(existing, line)) {
            if (line.empty() || line[0] == '#' || line.rfind("strategy\t", 0) == 0) continue;
            done.emplace(line.substr(0, line.find('\t')), line);
        }
    }

    std::ostringstream rows;
    for (const std::string& name : strategies) {
        auto it = done.find(name);
        if (it != done.end()) {
            rows << it->second << "\n";
            continue;
        }
        pba::StrategySpec spec = resolve_strategy(name, "", root, false);
        pba::EvaluationReport report = pba::evaluate_corpus(lex, index, spec, opts);
        report.direction = lex.direction;
        std::string row = pba::report_row_string(report, ctx);
        rows << row << "\n";
        std::cerr << row << "\n";

        std::ofstream out(out_path);
        if (!out) throw CLI::ValidationError("--out", "cannot open " + out_path);
        pba::write_report_header(out, ctx);
        out << rows.str();
    }
    std::ofstream out(out_path);
    if (!out) throw CLI::ValidationError("--out", "cannot open " + out_path);
    pba::write_report_header(out, ctx);
    out << rows.str();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pronunciation by analogy over an aligned lexicon"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("pba ") + pba::kVersion);

    CommonOpts common;
    std::vector<std::string> words, strategies;
    std::string mode, root = "1", out_path, details_path, index_path;
    bool no_collate = false, no_loo = false, explain = false;

    auto* build = app.add_subcommand("build-index", "build and save a substring index");
    add_common(build, common, false);
    build->add_option("--out", out_path, "index output file")->required();

    auto* pronounce = app.add_subcommand("pronounce", "pronounce words by analogy");
    add_common(pronounce, common, false);
    pronounce->add_option("words", words, "words to pronounce")->required();
    pronounce->add_option("--strategy", strategies, "scoring strategy")->expected(1);
    pronounce->add_option("--mode", mode, "lattice mode override")
        ->check(CLI::IsMember({"overlap1", "nonoverlap"}));
    pronounce->add_option("--root", root, "root transform degree: 1..10 or n");
    pronounce->add_flag("--no-collate", no_collate, "score candidates without collation");
    pronounce->add_flag("--no-loo", no_loo, "keep the word's own entry in the index");
    pronounce->add_flag("--explain", explain, "print per-candidate factor traces");
    pronounce->add_option("--index", index_path, "load a prebuilt index instead of building");

    auto* evaluate = app.add_subcommand("evaluate", "leave-one-out accuracy of strategies");
    add_common(evaluate, common, true);
    evaluate->add_option("--strategy", strategies, "strategy names or bitstrings")->required();
    evaluate->add_option("--mode", mode, "lattice mode override")
        ->check(CLI::IsMember({"overlap1", "nonoverlap"}));
    evaluate->add_option("--root", root, "root transform degree: 1..10 or n");
    evaluate->add_flag("--no-collate", no_collate, "score candidates without collation");
    evaluate->add_option("--out", out_path, "report file (default stdout)");
    evaluate->add_option("--details", details_path, "per-word results file");

    auto* bounds_cmd = app.add_subcommand("bounds", "lower and upper accuracy bounds");
    add_common(bounds_cmd, common, true);
    bounds_cmd->add_option("--mode", mode, "lattice mode")
        ->check(CLI::IsMember({"overlap1", "nonoverlap"}))
        ->required();
    bounds_cmd->add_option("--out", out_path, "report file (default stdout)");

    auto* sweep = app.add_subcommand("sweep", "evaluate many strategies, resumably");
    add_common(sweep, common, true);
    sweep->add_option("--strategy", strategies, "strategies (default: the built-in set)");
    sweep->add_option("--root", root, "root transform degree: 1..10 or n");
    sweep->add_option("--out", out_path, "report file, also used to resume")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (build->parsed()) return run_build_index(common, out_path);
        if (pronounce->parsed())
            return run_pronounce(common, words, strategies.empty() ? "CONDF" : strategies[0],
                                 mode, root, no_collate, no_loo, explain, index_path);
        if (evaluate->parsed())
            return run_evaluate(common, strategies, mode, root, no_collate, out_path,
                                details_path);
        if (bounds_cmd->parsed()) return run_bounds(common, mode, out_path);
        if (sweep->parsed()) return run_sweep(common, strategies, root, out_path);
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "pba: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
