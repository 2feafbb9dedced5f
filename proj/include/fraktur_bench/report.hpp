#pragma once

// Evaluation reports: per-dataset CER cells for every engine, aggregate
// rows (<corpus>-all, NOD, All), per-engine error analytics, and the CSV,
// Markdown and JSON emitters.

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "fraktur_bench/alignment.hpp"
#include "fraktur_bench/analytics.hpp"
#include "fraktur_bench/error.hpp"

namespace fraktur_bench {

inline constexpr int kReportSchemaVersion = 1;

struct DatasetInfo {
  std::string id;      // e.g. "N-1781"
  std::string corpus;  // e.g. "N"

  bool operator==(const DatasetInfo&) const = default;
};

// "N-1781" -> "N"; ids without a dash form their own corpus.
inline std::string corpus_of_dataset(std::string_view dataset_id) {
  size_t dash = dataset_id.find('-');
  return std::string(dash == std::string_view::npos || dash == 0 ? dataset_id : dataset_id.substr(0, dash));
}

struct EngineAnalytics {
  std::vector<ConfusionEntry> confusion;  // ranked
  size_t top_k = 3;
  Ratio top_share;
  WhitespaceSummary whitespace;
  bool merged_runs = false;

  bool operator==(const EngineAnalytics&) const = default;
};

inline EngineAnalytics analyze_errors(std::span<const AlignmentResult> results, size_t top_k = 3,
                                      bool merge_runs = false) {
  EngineAnalytics a;
  a.confusion = confusion_stats(results, merge_runs);
  a.top_k = top_k;
  a.top_share = top_k_error_share(a.confusion, top_k);
  a.whitespace = classify_whitespace_errors(a.confusion);
  a.merged_runs = merge_runs;
  return a;
}

struct EvaluationReport {
  std::vector<std::string> engines;
  std::vector<DatasetInfo> datasets;  // display order
  std::map<std::pair<std::string, std::string>, CerTally> cells;  // (dataset, engine)
  std::map<std::string, EngineAnalytics> analytics;                // by engine
  std::string nod_excluded_corpus = "S";
  std::map<std::string, std::string> metadata;

  bool empty() const { return engines.empty() || datasets.empty(); }

  void set_cell(const std::string& dataset, const std::string& engine, const CerTally& tally) {
    cells[{dataset, engine}] = tally;
  }

  bool operator==(const EvaluationReport&) const = default;
};

enum class RowKind { dataset, corpus_all, nod, all };

inline const char* row_kind_name(RowKind k) {
  switch (k) {
    case RowKind::dataset: return "dataset";
    case RowKind::corpus_all: return "corpus_all";
    case RowKind::nod: return "nod";
    case RowKind::all: return "all";
  }
  return "dataset";
}

struct ReportRow {
  std::string label;
  RowKind kind;
  std::map<std::string, CerTally> cells;  // by engine
};

// Display rank of a corpus: its index in `order`, or after every listed
// corpus when it is not listed.
inline size_t corpus_rank(const std::string& corpus, const std::vector<std::string>& order) {
  auto it = std::find(order.begin(), order.end(), corpus);
  return static_cast<size_t>(it - order.begin());
}

// Groups datasets by corpus in the given corpus order; unlisted corpora
// follow in first-appearance order, and datasets keep their relative order.
template <class T, class CorpusOf>
void order_by_corpus(std::vector<T>& items, const std::vector<std::string>& order, CorpusOf&& corpus_of) {
  std::vector<std::string> full = order;
  for (const auto& item : items) {
    const std::string& c = corpus_of(item);
    if (std::find(full.begin(), full.end(), c) == full.end()) full.push_back(c);
  }
  std::stable_sort(items.begin(), items.end(), [&](const T& a, const T& b) {
    return corpus_rank(corpus_of(a), full) < corpus_rank(corpus_of(b), full);
  });
}

// Throws ReportError unless every (dataset, engine) cell is present.
inline void check_consistency(const EvaluationReport& report) {
  if (report.empty()) throw ReportError("nothing to emit");
  std::set<std::string> seen;
  for (const auto& d : report.datasets) {
    if (!seen.insert(d.id).second) throw ReportError("duplicate dataset " + d.id);
    for (const auto& e : report.engines) {
      if (!report.cells.count({d.id, e})) throw ReportError("missing cell " + d.id + " / " + e);
    }
  }
}

// Dataset rows in display order, then <corpus>-all for every corpus with at
// least two datasets (first-appearance order), then NOD when the excluded
// corpus is present alongside others, then All.
inline std::vector<ReportRow> report_rows(const EvaluationReport& report) {
  check_consistency(report);
  std::vector<ReportRow> rows;
  std::vector<std::string> corpus_order;
  std::map<std::string, std::vector<std::string>> by_corpus;
  for (const auto& d : report.datasets) {
    ReportRow row{d.id, RowKind::dataset, {}};
    for (const auto& e : report.engines) row.cells[e] = report.cells.at({d.id, e});
    rows.push_back(std::move(row));
    if (!by_corpus.count(d.corpus)) corpus_order.push_back(d.corpus);
    by_corpus[d.corpus].push_back(d.id);
  }

  auto aggregate = [&](std::string label, RowKind kind, auto&& include) {
    ReportRow row{std::move(label), kind, {}};
    for (const auto& e : report.engines) {
      CerTally t;
      for (const auto& d : report.datasets)
        if (include(d)) t.merge(report.cells.at({d.id, e}));
      row.cells[e] = t;
    }
    rows.push_back(std::move(row));
  };

  for (const auto& corpus : corpus_order) {
    if (by_corpus[corpus].size() < 2) continue;
    aggregate(corpus + "-all", RowKind::corpus_all, [&](const DatasetInfo& d) { return d.corpus == corpus; });
  }
  const bool has_excluded = by_corpus.count(report.nod_excluded_corpus) != 0;
  if (has_excluded && by_corpus.size() > 1) {
    aggregate("NOD", RowKind::nod, [&](const DatasetInfo& d) { return d.corpus != report.nod_excluded_corpus; });
  }
  aggregate("All", RowKind::all, [](const DatasetInfo&) { return true; });
  return rows;
}

// Fraction -> percent with two decimals: 0.004721 -> "0.47".
inline std::string format_percent(double fraction) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", fraction * 100.0);
  return buf;
}

enum class ReportFormat { csv, markdown, json };

inline ReportFormat parse_report_format(std::string_view name) {
  if (name == "csv") return ReportFormat::csv;
  if (name == "markdown" || name == "md") return ReportFormat::markdown;
  if (name == "json") return ReportFormat::json;
  throw ReportError("unknown report format: " + std::string(name));
}

inline std::vector<std::string> report_notes(const EvaluationReport& report) {
  return {
      "CER cells are percentages with two decimals.",
      "micro = total edit distance / total ground-truth characters; macro = mean per-line CER over lines "
      "with non-empty ground truth.",
      "<corpus>-all rows aggregate every dataset of a corpus that has at least two datasets.",
      "NOD, when shown, aggregates all datasets except corpus " + report.nod_excluded_corpus + " (the dictionary).",
      "All aggregates every dataset, weighting by characters (micro) or lines (macro).",
  };
}

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string md_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '|' || c == '\\' || c == '`') out += '\\';
    out += c;
  }
  return out;
}

inline std::string visible(const std::u32string& s) {
  if (s.empty()) return "ε";
  std::string out;
  for (char32_t c : s) out += c == U' ' ? std::string("␣") : u32_to_utf8(c);
  return out;
}

}  // namespace detail

inline std::string emit_csv(const EvaluationReport& report) {
  std::ostringstream out;
  out << "dataset,engine,micro_cer,macro_cer,lines,gt_chars,distance\n";
  for (const auto& row : report_rows(report)) {
    for (const auto& e : report.engines) {
      const CerTally& t = row.cells.at(e);
      out << detail::csv_field(row.label) << ',' << detail::csv_field(e) << ',' << format_percent(t.micro_cer()) << ','
          << format_percent(t.macro_cer()) << ',' << t.lines << ',' << t.gt_chars << ',' << t.distance << '\n';
    }
  }
  return out.str();
}

inline std::string emit_markdown(const EvaluationReport& report) {
  auto rows = report_rows(report);
  std::ostringstream out;
  out << "| Data |";
  for (const auto& e : report.engines) out << ' ' << detail::md_escape(e) << " micro | " << detail::md_escape(e) << " macro |";
  out << "\n|---|";
  for (size_t i = 0; i < report.engines.size(); ++i) out << "---:|---:|";
  out << '\n';
  for (const auto& row : rows) {
    out << "| " << detail::md_escape(row.label) << " |";
    for (const auto& e : report.engines) {
      const CerTally& t = row.cells.at(e);
      out << ' ' << format_percent(t.micro_cer()) << " | " << format_percent(t.macro_cer()) << " |";
    }
    out << '\n';
  }
  out << '\n';
  for (const auto& note : report_notes(report)) out << "- " << note << '\n';

  for (const auto& e : report.engines) {
    auto it = report.analytics.find(e);
    if (it == report.analytics.end()) continue;
    const EngineAnalytics& a = it->second;
    out << "\n### Errors: " << detail::md_escape(e) << "\n\n";
    out << "- top-" << a.top_k << " share: " << a.top_share.numerator << '/' << a.top_share.denominator << " ("
        << format_percent(a.top_share.value()) << "%)\n";
    out << "- space insertions: " << a.whitespace.space_insertions << ", space deletions: " << a.whitespace.space_deletions
        << ", other: " << a.whitespace.other << "\n\n";
    out << "| GT | Pred | Count |\n|---|---|---:|\n";
    const size_t shown = std::min<size_t>(a.confusion.size(), 10);
    for (size_t i = 0; i < shown; ++i) {
      const auto& c = a.confusion[i];
      out << "| " << detail::md_escape(detail::visible(c.gt_seq)) << " | " << detail::md_escape(detail::visible(c.pred_seq))
          << " | " << c.count << " |\n";
    }
  }
  if (!report.metadata.empty()) {
    out << '\n';
    for (const auto& [k, v] : report.metadata) out << "- " << k << ": " << v << '\n';
  }
  return out.str();
}

inline nlohmann::ordered_json tally_to_json(const CerTally& t) {
  return {
      {"micro_cer", t.micro_cer()},
      {"macro_cer", t.macro_cer()},
      {"micro_cer_percent", format_percent(t.micro_cer())},
      {"macro_cer_percent", format_percent(t.macro_cer())},
      {"lines", t.lines},
      {"gt_chars", t.gt_chars},
      {"distance", t.distance},
      {"macro_sum", t.macro_sum},
      {"macro_lines", t.macro_lines},
  };
}

inline nlohmann::ordered_json report_to_json(const EvaluationReport& report) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["engines"] = report.engines;
  ordered_json datasets = ordered_json::array();
  for (const auto& d : report.datasets) datasets.push_back({{"id", d.id}, {"corpus", d.corpus}});
  doc["datasets"] = datasets;
  doc["nod_excluded_corpus"] = report.nod_excluded_corpus;

  ordered_json rows = ordered_json::array();
  for (const auto& row : report_rows(report)) {
    ordered_json cells = ordered_json::object();
    for (const auto& e : report.engines) cells[e] = tally_to_json(row.cells.at(e));
    rows.push_back({{"label", row.label}, {"kind", row_kind_name(row.kind)}, {"cells", cells}});
  }
  doc["rows"] = rows;

  ordered_json analytics = ordered_json::object();
  for (const auto& e : report.engines) {
    auto it = report.analytics.find(e);
    if (it == report.analytics.end()) continue;
    const EngineAnalytics& a = it->second;
    ordered_json confusion = ordered_json::array();
    for (const auto& c : a.confusion) {
      confusion.push_back({{"gt", u32_to_utf8(c.gt_seq)}, {"pred", u32_to_utf8(c.pred_seq)}, {"count", c.count}});
    }
    analytics[e] = {
        {"top_k", a.top_k},
        {"top_share", {{"numerator", a.top_share.numerator}, {"denominator", a.top_share.denominator}, {"value", a.top_share.value()}}},
        {"whitespace",
         {{"space_insertions", a.whitespace.space_insertions},
          {"space_deletions", a.whitespace.space_deletions},
          {"other", a.whitespace.other}}},
        {"merged_runs", a.merged_runs},
        {"confusion", confusion},
    };
  }
  doc["analytics"] = analytics;
  doc["metadata"] = report.metadata;
  doc["notes"] = report_notes(report);
  return doc;
}

inline std::string emit_json(const EvaluationReport& report) { return report_to_json(report).dump(2) + "\n"; }

inline std::string emit_report(const EvaluationReport& report, ReportFormat format) {
  if (report.empty()) throw ReportError("nothing to emit");
  switch (format) {
    case ReportFormat::csv: return emit_csv(report);
    case ReportFormat::markdown: return emit_markdown(report);
    case ReportFormat::json: return emit_json(report);
  }
  throw ReportError("unknown report format");
}

inline std::string emit_report(const EvaluationReport& report, std::string_view format) {
  return emit_report(report, parse_report_format(format));
}

// Rebuilds a report from the JSON emitter's output (dataset rows carry the
// raw tallies; aggregates are recomputed).
inline EvaluationReport report_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || doc.value("schema_version", 0) != kReportSchemaVersion) {
    throw ReportError("unsupported report schema_version");
  }
  try {
    EvaluationReport r;
    r.engines = doc.at("engines").get<std::vector<std::string>>();
    for (const auto& d : doc.at("datasets")) r.datasets.push_back({d.at("id"), d.at("corpus")});
    r.nod_excluded_corpus = doc.value("nod_excluded_corpus", std::string("S"));
    for (const auto& row : doc.at("rows")) {
      if (row.at("kind") != "dataset") continue;
      for (const auto& e : r.engines) {
        const auto& c = row.at("cells").at(e);
        CerTally t;
        t.lines = c.at("lines");
        t.gt_chars = c.at("gt_chars");
        t.distance = c.at("distance");
        t.macro_sum = c.at("macro_sum");
        t.macro_lines = c.at("macro_lines");
        r.set_cell(row.at("label"), e, t);
      }
    }
    if (doc.contains("analytics")) {
      for (const auto& [engine, a] : doc.at("analytics").items()) {
        EngineAnalytics ea;
        ea.top_k = a.at("top_k");
        ea.top_share = {a.at("top_share").at("numerator"), a.at("top_share").at("denominator")};
        ea.whitespace = {a.at("whitespace").at("space_insertions"), a.at("whitespace").at("space_deletions"),
                         a.at("whitespace").at("other")};
        ea.merged_runs = a.value("merged_runs", false);
        for (const auto& c : a.at("confusion")) {
          ea.confusion.push_back({utf8_to_u32(c.at("gt").get<std::string>()), utf8_to_u32(c.at("pred").get<std::string>()),
                                  c.at("count").get<uint64_t>()});
        }
        r.analytics[engine] = std::move(ea);
      }
    }
    if (doc.contains("metadata")) r.metadata = doc.at("metadata").get<std::map<std::string, std::string>>();
    check_consistency(r);
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ReportError(std::string("malformed report JSON: ") + e.what());
  }
}

}  // namespace fraktur_bench
