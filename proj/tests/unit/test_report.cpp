#include <gtest/gtest.h>

#include "fraktur_bench/report.hpp"

using namespace fraktur_bench;

namespace {

CerTally tally(uint64_t distance, uint64_t gt_chars, uint64_t lines = 1) {
  CerTally t;
  t.lines = lines;
  t.gt_chars = gt_chars;
  t.distance = distance;
  t.macro_sum = lines * (static_cast<double>(distance) / gt_chars);
  t.macro_lines = lines;
  return t;
}

EvaluationReport report_of(const std::vector<std::string>& datasets, const std::vector<std::string>& engines) {
  EvaluationReport r;
  r.engines = engines;
  uint64_t d = 1;
  for (const auto& id : datasets) {
    r.datasets.push_back({id, corpus_of_dataset(id)});
    for (const auto& e : engines) r.set_cell(id, e, tally(d++, 100));
  }
  return r;
}

std::vector<std::string> labels(const EvaluationReport& r) {
  std::vector<std::string> out;
  for (const auto& row : report_rows(r)) out.push_back(row.label);
  return out;
}

}  // namespace

TEST(ReportRows, TwoDatasetsOneCorpus) {
  auto r = report_of({"N-1781", "N-1803"}, {"calamari"});
  EXPECT_EQ(labels(r), (std::vector<std::string>{"N-1781", "N-1803", "N-all", "All"}));
  auto rows = report_rows(r);
  EXPECT_EQ(rows[2].cells.at("calamari").distance, 3u);
  EXPECT_EQ(rows[2].cells.at("calamari").gt_chars, 200u);
  EXPECT_EQ(rows[2].kind, RowKind::corpus_all);
}

TEST(ReportRows, FullCorpusShape) {
  auto r = report_of({"N-1781", "N-1803", "O-1841", "O-1843", "D-1865", "D-1867", "S-1865"}, {"a", "b"});
  EXPECT_EQ(labels(r), (std::vector<std::string>{"N-1781", "N-1803", "O-1841", "O-1843", "D-1865", "D-1867", "S-1865",
                                                 "N-all", "O-all", "D-all", "NOD", "All"}));
  auto rows = report_rows(r);
  const CerTally& nod = rows[10].cells.at("a");
  const CerTally& all = rows[11].cells.at("a");
  EXPECT_EQ(nod.gt_chars, 600u);
  EXPECT_EQ(all.gt_chars, 700u);
  EXPECT_EQ(all.distance - nod.distance, r.cells.at({"S-1865", "a"}).distance);
}

TEST(ReportRows, SingleDatasetCorpusGetsNoAllRow) {
  auto r = report_of({"N-1781", "S-1865"}, {"a"});
  EXPECT_EQ(labels(r), (std::vector<std::string>{"N-1781", "S-1865", "NOD", "All"}));
  auto only_s = report_of({"S-1865"}, {"a"});
  EXPECT_EQ(labels(only_s), (std::vector<std::string>{"S-1865", "All"}));
}

TEST(ReportRows, InconsistentReports) {
  EXPECT_THROW(report_rows(EvaluationReport{}), ReportError);
  try {
    emit_report(EvaluationReport{}, ReportFormat::csv);
    FAIL();
  } catch (const ReportError& e) {
    EXPECT_NE(std::string(e.what()).find("nothing to emit"), std::string::npos);
  }
  auto r = report_of({"N-1781"}, {"a"});
  r.engines.push_back("b");
  EXPECT_THROW(report_rows(r), ReportError);
}

TEST(FormatPercent, TwoDecimals) {
  EXPECT_EQ(format_percent(0.004721), "0.47");
  EXPECT_EQ(format_percent(0.0), "0.00");
  EXPECT_EQ(format_percent(0.25), "25.00");
  EXPECT_EQ(format_percent(1.5), "150.00");
}

TEST(EmitReport, UnknownFormat) {
  auto r = report_of({"N-1781"}, {"a"});
  EXPECT_THROW(emit_report(r, "xml"), ReportError);
  EXPECT_NO_THROW(emit_report(r, "md"));
}

TEST(EmitReport, Csv) {
  auto r = report_of({"N-1781", "N-1803"}, {"a"});
  std::string csv = emit_report(r, ReportFormat::csv);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "dataset,engine,micro_cer,macro_cer,lines,gt_chars,distance");
  EXPECT_NE(csv.find("\nN-1781,a,1.00,1.00,1,100,1\n"), std::string::npos) << csv;
  EXPECT_NE(csv.find("\nN-all,a,1.50,1.50,2,200,3\n"), std::string::npos) << csv;
}

TEST(EmitReport, MarkdownHasMicroAndMacroColumns) {
  auto r = report_of({"N-1781", "N-1803"}, {"a"});
  std::string md = emit_report(r, ReportFormat::markdown);
  EXPECT_NE(md.find("| Data | a micro | a macro |"), std::string::npos) << md;
  EXPECT_NE(md.find("| N-all | 1.50 | 1.50 |"), std::string::npos) << md;
}

TEST(EmitReport, JsonRoundTripAndDeterminism) {
  auto r = report_of({"N-1781", "O-1841", "S-1865"}, {"a", "b"});
  r.metadata["seed"] = "42";
  std::vector<AlignmentResult> rs{align(U"a b", U"ab"), align(U"u", U"n")};
  r.analytics["a"] = analyze_errors(rs, 3, false);
  std::string first = emit_json(r);
  EXPECT_EQ(first, emit_json(r));
  auto doc = nlohmann::json::parse(first);
  EXPECT_EQ(doc["schema_version"], kReportSchemaVersion);
  EXPECT_EQ(doc["rows"].back()["label"], "All");
  EvaluationReport back = report_from_json(doc);
  EXPECT_EQ(back, r);
  EXPECT_EQ(emit_json(back), first);
  EXPECT_EQ(emit_report(back, ReportFormat::markdown), emit_report(r, ReportFormat::markdown));
}

TEST(EmitReport, RejectsForeignSchema) {
  EXPECT_THROW(report_from_json(nlohmann::json{{"schema_version", 99}}), ReportError);
  EXPECT_THROW(report_from_json(nlohmann::json{{"schema_version", 1}}), ReportError);
}

TEST(CorpusOfDataset, Prefix) {
  EXPECT_EQ(corpus_of_dataset("N-1781"), "N");
  EXPECT_EQ(corpus_of_dataset("OCR-TS"), "OCR");
  EXPECT_EQ(corpus_of_dataset("plain"), "plain");
}

TEST(OrderByCorpus, ListedCorporaFirstThenAppearance) {
  std::vector<DatasetInfo> ds{{"D-1865", "D"}, {"X-1", "X"}, {"N-1781", "N"}, {"S-1865", "S"}, {"N-1803", "N"}, {"O-1809", "O"}};
  order_by_corpus(ds, {"N", "O", "D", "S"}, [](const DatasetInfo& d) -> const std::string& { return d.corpus; });
  std::vector<std::string> ids;
  for (const auto& d : ds) ids.push_back(d.id);
  EXPECT_EQ(ids, (std::vector<std::string>{"N-1781", "N-1803", "O-1809", "D-1865", "S-1865", "X-1"}));
}
