#pragma once

// The fraktur-bench command line: normalize, eval, errors, vote, prepare,
// report. Exit status 0 on success, 1 on data errors, 2 on usage errors.

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "fraktur_bench/analytics.hpp"
#include "fraktur_bench/codec.hpp"
#include "fraktur_bench/io.hpp"
#include "fraktur_bench/manifest.hpp"
#include "fraktur_bench/normalize.hpp"
#include "fraktur_bench/pipeline.hpp"
#include "fraktur_bench/reference.hpp"
#include "fraktur_bench/report.hpp"
#include "fraktur_bench/voting.hpp"

namespace fraktur_bench::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitData = 1;
inline constexpr int kExitUsage = 2;

namespace detail {

namespace fs = std::filesystem;

inline Codec codec_from_arg(const std::string& arg) { return arg == "default" ? default_codec() : load_codec(arg); }

inline NormalizationRuleSet rules_from_arg(const std::string& arg) {
  return arg == "default" ? default_rules() : load_rules(arg);
}

inline fs::path resolve(const std::string& p) { return p.empty() ? fs::path() : fs::absolute(p).lexically_normal(); }

inline void emit(const std::string& out_path, const std::string& content, std::ostream& out) {
  if (out_path.empty() || out_path == "-") {
    out << content;
  } else {
    write_file_atomic(resolve(out_path), content);
  }
}

inline std::vector<EngineSource> engine_sources(const std::vector<std::string>& engines,
                                                const std::vector<std::string>& preds) {
  if (engines.empty()) throw CLI::ValidationError("--engine", "at least one engine is required");
  if (preds.size() != 1 && preds.size() != engines.size()) {
    throw CLI::ValidationError("--pred", "give one prediction root, or one per --engine");
  }
  std::vector<EngineSource> out;
  for (size_t i = 0; i < engines.size(); ++i) out.push_back({engines[i], resolve(preds.size() == 1 ? preds[0] : preds[i])});
  return out;
}

inline std::vector<BookEntry> read_manifest(const std::string& path) {
  try {
    return manifest_from_json(nlohmann::json::parse(read_text_file(resolve(path))));
  } catch (const nlohmann::json::parse_error& e) {
    throw ManifestError("manifest " + path + " is not valid JSON: " + e.what());
  }
}

inline std::string json_text(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

inline nlohmann::ordered_json analytics_json(const EvaluationReport& report) {
  return report_to_json(report)["analytics"];
}

inline std::string analytics_csv(const EvaluationReport& report) {
  std::string out = "engine,gt,pred,count\n";
  for (const auto& e : report.engines) {
    for (const auto& c : report.analytics.at(e).confusion) {
      out += fraktur_bench::detail::csv_field(e) + "," + fraktur_bench::detail::csv_field(u32_to_utf8(c.gt_seq)) + "," +
             fraktur_bench::detail::csv_field(u32_to_utf8(c.pred_seq)) + "," + std::to_string(c.count) + "\n";
    }
  }
  return out;
}

inline std::string analytics_markdown(const EvaluationReport& report) {
  std::string md = emit_markdown(report);
  size_t pos = md.find("\n### Errors:");
  return pos == std::string::npos ? std::string() : md.substr(pos + 1);
}

struct EvalArgs {
  std::vector<std::string> gt;
  std::vector<std::string> pred;
  std::vector<std::string> engines;
  std::string codec = "default";
  std::string rules = "default";
  std::string on_unmapped = "fail";
  bool raw_pred = false;
  size_t top_k = 3;
  bool merge_runs = false;
  std::string nod_exclude = "S";
  std::string corpus_order = "N,O,D,S";
  std::string format = "json";
  std::string out;

  void add_to(CLI::App* cmd, bool errors_only) {
    cmd->add_option("--gt", gt, "ground-truth corpus root(s); books are its subdirectories")->required();
    cmd->add_option("--pred", pred, "prediction root (one shared, or one per --engine)")->required();
    cmd->add_option("--engine", engines, "engine id(s); files are <line>.pred.<engine>.txt")->required();
    cmd->add_option("--codec", codec, "codec file or 'default'");
    cmd->add_option("--rules", rules, "rules TSV or 'default'");
    cmd->add_option("--on-unmapped", on_unmapped, "fail | drop | replace=<char>");
    cmd->add_flag("--raw-pred", raw_pred, "do not apply the rules to predictions");
    cmd->add_option("--top-k", top_k, "entries counted in the top-k error share")->check(CLI::PositiveNumber);
    cmd->add_flag("--merge-runs", merge_runs, "merge runs of adjacent insertions/deletions");
    if (!errors_only) {
      cmd->add_option("--nod-exclude", nod_exclude, "corpus left out of the NOD aggregate");
      cmd->add_option("--corpus-order", corpus_order, "comma-separated corpus display order; others follow");
    }
    cmd->add_option("--format", format, "json | csv | markdown")->check(CLI::IsMember({"json", "csv", "markdown", "md"}));
    cmd->add_option("--out", out, "output file (default: stdout)");
  }

  EvalOptions options(std::optional<uint64_t> seed) const {
    EvalOptions o;
    for (const auto& g : gt) o.gt_roots.push_back(resolve(g));
    o.engines = engine_sources(engines, pred);
    o.codec = codec_from_arg(codec);
    o.rules = rules_from_arg(rules);
    o.on_unmapped = UnmappedPolicy::parse(on_unmapped);
    o.raw_pred = raw_pred;
    o.top_k = top_k;
    o.merge_runs = merge_runs;
    o.nod_excluded_corpus = nod_exclude;
    o.corpus_order.clear();
    std::stringstream list(corpus_order);
    for (std::string c; std::getline(list, c, ',');)
      if (!c.empty()) o.corpus_order.push_back(c);
    o.seed = seed;
    return o;
  }
};

inline void print_error_json(std::ostream& err, const std::string& kind, const std::string& message,
                             const std::vector<std::string>& details) {
  nlohmann::ordered_json j;
  j["error"] = kind;
  j["message"] = message;
  j["details"] = details;
  err << j.dump() << "\n";
}

}  // namespace detail

// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  using namespace detail;
  CLI::App app{"fraktur-bench: OCR ground-truth normalization, CER evaluation, voting and corpus manifests"};
  app.name("fraktur-bench");
  app.require_subcommand(1);
  bool error_json = false;
  std::optional<uint64_t> seed;
  app.add_flag("--error-json", error_json, "print data errors as a JSON object on stderr");
  app.add_option("--seed", seed, "seed for every random choice; recorded in outputs");

  // normalize
  auto* normalize_cmd = app.add_subcommand("normalize", "fold text files into a codec");
  std::string n_in, n_out, n_codec = "default", n_rules = "default", n_policy = "fail", n_coverage;
  normalize_cmd->add_option("--in", n_in, "input text file (one line per line) or directory of *.txt")->required();
  normalize_cmd->add_option("--out", n_out, "output file or directory")->required();
  normalize_cmd->add_option("--codec", n_codec, "codec file or 'default'");
  normalize_cmd->add_option("--rules", n_rules, "rules TSV or 'default'");
  normalize_cmd->add_option("--on-unmapped", n_policy, "fail | drop | replace=<char>");
  normalize_cmd->add_option("--coverage", n_coverage, "also write a codec coverage report (JSON) here");

  // eval / errors
  auto* eval_cmd = app.add_subcommand("eval", "CER of engine predictions against ground truth");
  EvalArgs eval_args;
  eval_args.add_to(eval_cmd, false);
  auto* errors_cmd = app.add_subcommand("errors", "confusion statistics, top-k share and whitespace error classes");
  EvalArgs errors_args;
  errors_args.add_to(errors_cmd, true);

  // vote
  auto* vote_cmd = app.add_subcommand("vote", "combine prediction sets by alignment-based majority vote");
  std::vector<std::string> v_pred, v_engines;
  size_t v_min_voters = 2;
  std::string v_tie = "first_voter", v_pivot = "longest", v_out;
  vote_cmd->add_option("--pred", v_pred, "prediction root (one shared, or one per --engine)")->required();
  vote_cmd->add_option("--engine", v_engines, "voter engine ids")->required();
  vote_cmd->add_option("--min-voters", v_min_voters, "minimum outputs per line")->check(CLI::Range(2, 1 << 20));
  vote_cmd->add_option("--tie-break", v_tie, "first_voter | confidence | abstain_to_pivot")
      ->check(CLI::IsMember({"first_voter", "confidence", "abstain_to_pivot"}));
  vote_cmd->add_option("--pivot", v_pivot, "longest | first | <engine id>");
  vote_cmd->add_option("--out", v_out, "output root for <line>.pred.voted.txt")->required();

  // prepare
  auto* prepare_cmd = app.add_subcommand("prepare", "corpus manifests, training schedules, refinement subsets");
  prepare_cmd->require_subcommand(1);
  auto* scan_cmd = prepare_cmd->add_subcommand("scan", "scan line-pair corpora into a manifest");
  std::vector<std::string> s_roots, s_corpora;
  std::optional<int> s_century;
  std::string s_lang, s_out;
  scan_cmd->add_option("--root", s_roots, "corpus root(s)")->required();
  scan_cmd->add_option("--corpus", s_corpora, "corpus id per --root")->required();
  scan_cmd->add_option("--century", s_century, "century tag for every book");
  scan_cmd->add_option("--language", s_lang, "language tag for every book");
  scan_cmd->add_option("--out", s_out, "manifest JSON (default: stdout)");

  auto* refine_cmd = prepare_cmd->add_subcommand("refine", "capped per-book refinement subset");
  std::string r_manifest, r_root, r_corpus, r_out;
  size_t r_cap = reference::kRefinementCap;
  refine_cmd->add_option("--manifest", r_manifest, "input manifest JSON");
  refine_cmd->add_option("--root", r_root, "or: corpus root to scan");
  refine_cmd->add_option("--corpus", r_corpus, "corpus id for --root");
  refine_cmd->add_option("--cap", r_cap, "lines per book")->check(CLI::PositiveNumber);
  refine_cmd->add_option("--out", r_out, "refined manifest JSON (default: stdout)");

  auto* schedule_cmd = prepare_cmd->add_subcommand("schedule", "expand the four-stage training schedule");
  std::string sc_manifest, sc_stages = "default", sc_out;
  schedule_cmd->add_option("--manifest", sc_manifest, "manifest JSON covering every scheduled corpus")->required();
  schedule_cmd->add_option("--stages", sc_stages, "schedule JSON or 'default'");
  schedule_cmd->add_option("--out", sc_out, "plan JSON (default: stdout)");

  auto* verify_cmd = prepare_cmd->add_subcommand("verify", "compare manifest book/line counts with expectations");
  std::string vf_manifest, vf_expected = "evaluation";
  verify_cmd->add_option("--manifest", vf_manifest, "manifest JSON")->required();
  verify_cmd->add_option("--expected", vf_expected, "TSV corpus_id/books/lines, or 'evaluation'");

  // report
  auto* report_cmd = app.add_subcommand("report", "re-emit a saved JSON report");
  std::string rp_in, rp_format = "markdown", rp_out;
  report_cmd->add_option("--in", rp_in, "report JSON from eval")->required();
  report_cmd->add_option("--format", rp_format, "json | csv | markdown")->check(CLI::IsMember({"json", "csv", "markdown", "md"}));
  report_cmd->add_option("--out", rp_out, "output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (normalize_cmd->parsed()) {
      const Normalizer normalizer(rules_from_arg(n_rules), codec_from_arg(n_codec));
      const UnmappedPolicy policy = UnmappedPolicy::parse(n_policy);
      const fs::path in = resolve(n_in), dest = resolve(n_out);
      std::vector<std::pair<fs::path, fs::path>> jobs;
      if (fs::is_directory(in)) {
        for (const auto& f : fs::recursive_directory_iterator(in)) {
          if (f.is_regular_file() && f.path().extension() == ".txt") jobs.push_back({f.path(), dest / fs::relative(f.path(), in)});
        }
        std::sort(jobs.begin(), jobs.end());
      } else {
        jobs.push_back({in, dest});
      }
      std::vector<TranscriptionLine> seen_lines;
      for (const auto& [src, dst] : jobs) {
        std::string text = read_text_file(src);
        std::string result;
        size_t lineno = 0;
        for (auto raw : fraktur_bench::detail::split_lines(text)) {
          ++lineno;
          auto line = TranscriptionLine::ground_truth_utf8({"", src.filename().string(), std::to_string(lineno)}, raw);
          if (!n_coverage.empty()) seen_lines.push_back(line.with_text(normalizer.apply(line.text()).text));
          result += normalize_line(line, normalizer, policy).text_utf8() + "\n";
        }
        write_file_atomic(dst, result);
      }
      if (!n_coverage.empty()) {
        CoverageReport cov = codec_coverage_report(seen_lines, normalizer.codec());
        nlohmann::ordered_json j;
        auto table = [](const std::vector<CharFrequency>& v) {
          nlohmann::ordered_json arr = nlohmann::ordered_json::array();
          for (const auto& f : v) arr.push_back({{"char", u32_to_utf8(f.character)}, {"code_point", code_point_label(f.character)}, {"count", f.count}});
          return arr;
        };
        j["codec"] = normalizer.codec().name();
        j["total"] = cov.total();
        j["in_codec"] = table(cov.in_codec);
        j["out_of_codec"] = table(cov.out_of_codec);
        write_file_atomic(resolve(n_coverage), json_text(j));
      }
      err << "normalized " << jobs.size() << " file(s)\n";
    } else if (eval_cmd->parsed()) {
      EvaluationReport report = eval_pipeline(eval_args.options(seed));
      emit(eval_args.out, emit_report(report, eval_args.format), out);
    } else if (errors_cmd->parsed()) {
      EvaluationReport report = eval_pipeline(errors_args.options(seed));
      std::string text;
      if (errors_args.format == "json") {
        text = json_text(analytics_json(report));
      } else if (errors_args.format == "csv") {
        text = analytics_csv(report);
      } else {
        text = analytics_markdown(report);
      }
      emit(errors_args.out, text, out);
    } else if (vote_cmd->parsed()) {
      VotingConfig config;
      config.min_voters = v_min_voters;
      config.tie_break = parse_tie_break(v_tie);
      config.pivot = PivotChoice::parse(v_pivot);
      size_t n = vote_directory(engine_sources(v_engines, v_pred), config, resolve(v_out));
      err << "voted " << n << " line(s)\n";
    } else if (scan_cmd->parsed()) {
      if (s_roots.size() != s_corpora.size()) throw CLI::ValidationError("--corpus", "give one --corpus per --root");
      std::vector<BookEntry> books;
      for (size_t i = 0; i < s_roots.size(); ++i) {
        ScanResult r = scan_corpus(resolve(s_roots[i]), s_corpora[i]);
        for (const auto& w : r.warnings) err << "warning: " << w << "\n";
        for (auto& b : r.books) {
          b.century = s_century;
          if (!s_lang.empty()) b.language = s_lang;
          books.push_back(std::move(b));
        }
        err << s_corpora[i] << ": " << r.books.size() << " book(s), " << r.line_count() << " line(s)\n";
      }
      emit(s_out, json_text(manifest_to_json(books)), out);
    } else if (refine_cmd->parsed()) {
      std::vector<BookEntry> books;
      if (!r_manifest.empty()) {
        books = read_manifest(r_manifest);
      } else if (!r_root.empty() && !r_corpus.empty()) {
        ScanResult r = scan_corpus(resolve(r_root), r_corpus);
        for (const auto& w : r.warnings) err << "warning: " << w << "\n";
        books = std::move(r.books);
      } else {
        throw CLI::ValidationError("refine", "give --manifest, or --root with --corpus");
      }
      const uint64_t s = seed.value_or(0);
      uint64_t total = 0;
      for (auto& b : books) {
        b.line_ids = refinement_sample(b, r_cap, s);
        total += b.line_ids.size();
      }
      auto doc = manifest_to_json(books);
      doc["refinement"] = {{"cap_per_book", r_cap}, {"seed", s}, {"line_count", total}};
      emit(r_out, json_text(doc), out);
      err << "refinement subset: " << total << " line(s) from " << books.size() << " book(s)\n";
    } else if (schedule_cmd->parsed()) {
      std::vector<BookEntry> books = read_manifest(sc_manifest);
      TrainingSchedule schedule = sc_stages == "default"
                                      ? reference::fraktur19_schedule(0)
                                      : schedule_from_json(nlohmann::json::parse(read_text_file(resolve(sc_stages))));
      if (seed) schedule.seed = *seed;
      auto plan = build_schedule(books, schedule);
      for (const auto& st : plan) err << stage_name(st.name) << ": " << st.lines.size() << " line(s)\n";
      emit(sc_out, json_text(schedule_plan_to_json(plan, schedule.seed)), out);
    } else if (verify_cmd->parsed()) {
      std::vector<BookEntry> books = read_manifest(vf_manifest);
      std::vector<ExpectedCounts> expected = vf_expected == "evaluation"
                                                 ? reference::evaluation_corpus_counts()
                                                 : parse_expected_counts(read_text_file(resolve(vf_expected)));
      auto found = verify_counts(books, expected);
      for (const auto& d : found) {
        out << d.corpus_id << "\t" << d.field << "\texpected " << d.expected << "\tactual " << d.actual << "\n";
      }
      if (!found.empty()) {
        std::vector<std::string> details;
        for (const auto& d : found) details.push_back(d.corpus_id + ":" + d.field);
        throw ManifestError(std::to_string(found.size()) + " count discrepancy(ies)", details);
      }
      out << "counts match for " << expected.size() << " corpus(es)\n";
    } else if (report_cmd->parsed()) {
      EvaluationReport report;
      try {
        report = report_from_json(nlohmann::json::parse(read_text_file(resolve(rp_in))));
      } catch (const nlohmann::json::parse_error& e) {
        throw ReportError(std::string("report is not valid JSON: ") + e.what());
      }
      emit(rp_out, emit_report(report, rp_format), out);
    }
  } catch (const CLI::ValidationError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    if (error_json) {
      print_error_json(err, e.kind(), e.what(), e.details());
    } else {
      err << "error: " << e.what() << "\n";
      for (const auto& d : e.details()) err << "  " << d << "\n";
    }
    return kExitData;
  } catch (const std::exception& e) {
    if (error_json) {
      print_error_json(err, "internal", e.what(), {});
    } else {
      err << "error: " << e.what() << "\n";
    }
    return kExitData;
  }
  return kExitOk;
}

}  // namespace fraktur_bench::cli
