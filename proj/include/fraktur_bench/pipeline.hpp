#pragma once

// Directory-level pipelines: evaluate engine predictions against ground
// truth into an EvaluationReport, and vote prediction sets into a new one.

#include <algorithm>
#include <filesystem>
#include <iterator>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fraktur_bench/alignment.hpp"
#include "fraktur_bench/io.hpp"
#include "fraktur_bench/manifest.hpp"
#include "fraktur_bench/normalize.hpp"
#include "fraktur_bench/report.hpp"
#include "fraktur_bench/voting.hpp"

namespace fraktur_bench {

struct DatasetLines {
  DatasetInfo info;
  std::vector<TranscriptionLine> lines;  // sorted by line id
};

inline std::string pred_suffix(const std::string& engine_id) { return ".pred." + engine_id + ".txt"; }
inline std::string conf_suffix(const std::string& engine_id) { return ".pred." + engine_id + ".conf"; }

// Books are the subdirectories of each root (sorted within a root, roots
// in the given order); every `<line_id>.gt.txt` inside is one line.
inline std::vector<DatasetLines> read_ground_truth(const std::vector<std::filesystem::path>& roots) {
  namespace fs = std::filesystem;
  std::vector<DatasetLines> out;
  std::set<std::string> seen;
  for (const auto& root : roots) {
    std::error_code ec;
    if (!fs::is_directory(root, ec)) throw EvaluationError("ground-truth root is not a directory: " + root.string());
    std::vector<fs::path> books;
    for (const auto& e : fs::directory_iterator(root))
      if (e.is_directory()) books.push_back(e.path());
    std::sort(books.begin(), books.end());
    for (const auto& book_dir : books) {
      const std::string book = book_dir.filename().string();
      if (!seen.insert(book).second) throw EvaluationError("dataset appears under more than one root: " + book);
      DatasetLines ds{{book, corpus_of_dataset(book)}, {}};
      std::vector<std::string> ids;
      for (const auto& f : fs::directory_iterator(book_dir)) {
        if (!f.is_regular_file()) continue;
        if (auto id = line_id_of_gt_file(f.path().filename().string())) ids.push_back(*id);
      }
      std::sort(ids.begin(), ids.end());
      for (const auto& id : ids) {
        try {
          ds.lines.push_back(TranscriptionLine::ground_truth_utf8(
              {ds.info.corpus, book, id}, read_line_file(book_dir / (id + std::string(kGtSuffix)))));
        } catch (const EncodingError&) {
          throw EncodingError("undecodable UTF-8 in " + (book_dir / (id + std::string(kGtSuffix))).string());
        }
      }
      if (!ds.lines.empty()) out.push_back(std::move(ds));
    }
  }
  if (out.empty()) throw EvaluationError("empty evaluation set: no ground-truth lines found");
  return out;
}

// All `<line_id>.pred.<engine>.txt` files under `root`, keyed by
// (book, line id).
inline std::map<std::pair<std::string, std::string>, std::filesystem::path> find_predictions(
    const std::filesystem::path& root, const std::string& engine_id) {
  namespace fs = std::filesystem;
  std::map<std::pair<std::string, std::string>, fs::path> out;
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw EvaluationError("prediction root is not a directory: " + root.string());
  const std::string suffix = pred_suffix(engine_id);
  for (const auto& book : fs::directory_iterator(root)) {
    if (!book.is_directory()) continue;
    for (const auto& f : fs::directory_iterator(book.path())) {
      const std::string name = f.path().filename().string();
      if (!f.is_regular_file() || name.size() <= suffix.size() || !name.ends_with(suffix)) continue;
      out[{book.path().filename().string(), name.substr(0, name.size() - suffix.size())}] = f.path();
    }
  }
  return out;
}

struct EngineSource {
  std::string engine_id;
  std::filesystem::path pred_root;
};

struct EvalOptions {
  std::vector<std::filesystem::path> gt_roots;
  std::vector<EngineSource> engines;
  NormalizationRuleSet rules = default_rules();
  Codec codec = default_codec();
  UnmappedPolicy on_unmapped;
  bool raw_pred = false;  // skip rule normalization of predictions (NFC only)
  size_t top_k = 3;
  bool merge_runs = false;
  std::string nod_excluded_corpus = "S";
  // Report display order of corpora (Novels, OCR-Testset, Daheim, Sanders);
  // other corpora follow in the order their roots and books were read.
  std::vector<std::string> corpus_order{"N", "O", "D", "S"};
  std::optional<uint64_t> seed;
};

// Ground truth and (unless raw_pred) predictions go through the same
// normalizer; the rule-set checksum applied to each side is recorded in
// the report metadata.
inline EvaluationReport eval_pipeline(const EvalOptions& opt) {
  if (opt.engines.empty()) throw EvaluationError("no engines given");
  const Normalizer normalizer(opt.rules, opt.codec);
  std::vector<DatasetLines> datasets = read_ground_truth(opt.gt_roots);
  order_by_corpus(datasets, opt.corpus_order, [](const DatasetLines& d) -> const std::string& { return d.info.corpus; });
  for (auto& ds : datasets) {
    for (auto& line : ds.lines) line = normalize_line(line, normalizer, opt.on_unmapped);
  }

  EvaluationReport report;
  report.nod_excluded_corpus = opt.nod_excluded_corpus;
  for (const auto& ds : datasets) report.datasets.push_back(ds.info);

  std::set<std::string> engine_ids;
  std::vector<std::string> parity;
  std::map<std::string, std::map<std::pair<std::string, std::string>, std::filesystem::path>> pred_files;
  for (const auto& eng : opt.engines) {
    if (!engine_ids.insert(eng.engine_id).second) throw EvaluationError("duplicate engine: " + eng.engine_id);
    report.engines.push_back(eng.engine_id);
    auto files = find_predictions(eng.pred_root, eng.engine_id);
    std::set<std::pair<std::string, std::string>> gt_keys;
    for (const auto& ds : datasets)
      for (const auto& l : ds.lines) gt_keys.insert({l.key().book_id, l.key().line_id});
    for (const auto& k : gt_keys)
      if (!files.count(k)) parity.push_back(eng.engine_id + ": missing prediction " + k.first + "/" + k.second);
    for (const auto& [k, path] : files)
      if (!gt_keys.count(k)) parity.push_back(eng.engine_id + ": prediction without ground truth " + k.first + "/" + k.second);
    pred_files[eng.engine_id] = std::move(files);
  }
  if (!parity.empty()) throw EvaluationError("line-id parity violated between ground truth and predictions", parity);

  for (const auto& eng : opt.engines) {
    std::vector<AlignmentResult> all_results;
    const auto& files = pred_files[eng.engine_id];
    for (const auto& ds : datasets) {
      std::vector<TranscriptionLine> preds;
      preds.reserve(ds.lines.size());
      for (const auto& g : ds.lines) {
        const auto& path = files.at({g.key().book_id, g.key().line_id});
        std::string raw;
        try {
          raw = read_line_file(path);
          auto p = TranscriptionLine::prediction_utf8(g.key(), raw, eng.engine_id);
          preds.push_back(opt.raw_pred ? p : normalize_line(p, normalizer, opt.on_unmapped));
        } catch (const EncodingError&) {
          throw EncodingError("undecodable UTF-8 in " + path.string());
        }
      }
      CorpusCer cer = corpus_cer(ds.lines, preds);
      report.set_cell(ds.info.id, eng.engine_id, cer.tally);
      std::move(cer.per_line.begin(), cer.per_line.end(), std::back_inserter(all_results));
    }
    report.analytics[eng.engine_id] = analyze_errors(all_results, opt.top_k, opt.merge_runs);
  }

  report.metadata["codec"] = opt.codec.name() + " (" + std::to_string(opt.codec.size()) + " characters)";
  report.metadata["gt_rules_checksum"] = opt.rules.checksum();
  report.metadata["pred_rules_checksum"] = opt.raw_pred ? std::string("raw") : opt.rules.checksum();
  report.metadata["on_unmapped"] = opt.on_unmapped.mode == UnmappedPolicy::Mode::fail   ? "fail"
                                   : opt.on_unmapped.mode == UnmappedPolicy::Mode::drop ? "drop"
                                                                                       : "replace";
  if (opt.seed) report.metadata["seed"] = std::to_string(*opt.seed);
  return report;
}

// Parses a confidence sidecar: whitespace-separated decimals in [0, 1].
inline std::vector<double> parse_confidences(const std::string& text, const std::string& where) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    size_t used = 0;
    double v = 0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size() || v < 0.0 || v > 1.0) throw VotingError(where + ": bad confidence value '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

// Collects each engine's predictions (and optional .conf sidecars) per line.
inline std::map<LineKey, std::vector<VoterOutput>> read_voter_outputs(const std::vector<EngineSource>& engines) {
  std::map<LineKey, std::vector<VoterOutput>> per_line;
  for (const auto& eng : engines) {
    for (const auto& [key, path] : find_predictions(eng.pred_root, eng.engine_id)) {
      VoterOutput v{eng.engine_id, to_nfc(utf8_to_u32(read_line_file(path))), std::nullopt};
      std::filesystem::path conf = path.parent_path() / (key.second + conf_suffix(eng.engine_id));
      if (std::filesystem::is_regular_file(conf)) {
        v.confidences = parse_confidences(read_text_file(conf), conf.string());
        if (v.confidences->size() != v.text.size()) {
          throw VotingError(conf.string() + ": " + std::to_string(v.confidences->size()) + " confidences for " +
                            std::to_string(v.text.size()) + " characters");
        }
      }
      per_line[{corpus_of_dataset(key.first), key.first, key.second}].push_back(std::move(v));
    }
  }
  return per_line;
}

// Writes `<out_root>/<book>/<line_id>.pred.voted.txt` for every voted line.
inline size_t vote_directory(const std::vector<EngineSource>& engines, const VotingConfig& config,
                             const std::filesystem::path& out_root) {
  if (engines.size() < config.min_voters) {
    throw VotingError("insufficient voters: " + std::to_string(engines.size()) + " prediction set(s), need " +
                      std::to_string(config.min_voters));
  }
  auto per_line = read_voter_outputs(engines);
  if (per_line.empty()) throw VotingError("no predictions found");
  auto voted = vote_corpus(per_line, config);
  for (const auto& line : voted) {
    write_file_atomic(out_root / line.key().book_id / (line.key().line_id + pred_suffix(kVotedEngineId)),
                      line.text_utf8() + "\n");
  }
  return voted.size();
}

}  // namespace fraktur_bench
