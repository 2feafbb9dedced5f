#include <gtest/gtest.h>

#include <set>

#include "fraktur_bench/manifest.hpp"
#include "fraktur_bench/reference.hpp"
#include "oracles.hpp"

using namespace fraktur_bench;
namespace fs = std::filesystem;

namespace {

BookEntry book_of_size(const std::string& id, size_t n, const std::string& corpus = "C") {
  BookEntry b{id, corpus, std::nullopt, std::nullopt, {}};
  char buf[24];
  for (size_t i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof buf, "%06zu", i + 1);
    b.line_ids.push_back(buf);
  }
  return b;
}

TrainingSchedule schedule_over(const std::string& corpus, size_t cap, uint64_t seed = 1) {
  return {{{StageName::pretraining, {corpus}, std::nullopt},
           {StageName::synthetic, {}, std::nullopt},
           {StageName::real, {corpus}, std::nullopt},
           {StageName::refinement, {corpus}, cap}},
          seed};
}

}  // namespace

TEST(ScanCorpus, TwoBooksThreeLines) {
  auto root = oracle::scratch_dir("scan_basic");
  oracle::write_book(root, "b1", {{"1", "a"}, {"2", "b"}, {"3", "c"}});
  oracle::write_book(root, "b2", {{"1", "a"}, {"2", "b"}, {"3", "c"}});
  auto r = scan_corpus(root, "X");
  ASSERT_EQ(r.books.size(), 2u);
  EXPECT_EQ(r.books[0].book_id, "b1");
  EXPECT_EQ(r.books[1].line_ids, (std::vector<std::string>{"1", "2", "3"}));
  EXPECT_EQ(r.books[1].corpus_id, "X");
  EXPECT_TRUE(r.warnings.empty());
  EXPECT_EQ(r.line_count(), 6u);
}

TEST(ScanCorpus, MissingImageIsWarnedAndExcluded) {
  auto root = oracle::scratch_dir("scan_missing");
  oracle::write_book(root, "b1", {{"1", "a"}, {"2", "b"}});
  oracle::write_book(root, "b1", {{"3", "c"}}, false);
  oracle::write_file(root / "b1" / "4.gt.txt", "d\n");
  oracle::write_file(root / "b1" / "4.nrm.png", "");
  auto r = scan_corpus(root, "X");
  ASSERT_EQ(r.books.size(), 1u);
  EXPECT_EQ(r.books[0].line_ids, (std::vector<std::string>{"1", "2", "4"}));
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_NE(r.warnings[0].find("b1/3"), std::string::npos);
}

TEST(ScanCorpus, OcrTestsetShape) {
  auto root = oracle::scratch_dir("scan_ocrts");
  oracle::write_book_of_size(root, "O-1809", 223);
  oracle::write_book_of_size(root, "O-1841", 242);
  auto r = scan_corpus(root, "OCR-TS");
  EXPECT_EQ(r.books.size(), 2u);
  EXPECT_EQ(r.line_count(), 465u);
  std::vector<ExpectedCounts> want{{"OCR-TS", 2, 465}};
  EXPECT_TRUE(verify_counts(r.books, want).empty());
}

TEST(ScanCorpus, Errors) {
  EXPECT_THROW(scan_corpus("/nonexistent/corpus", "X"), ManifestError);
  auto empty = oracle::scratch_dir("scan_empty");
  EXPECT_THROW(scan_corpus(empty, "X"), ManifestError);
}

TEST(Manifest, JsonRoundTrip) {
  std::vector<BookEntry> books{book_of_size("b1", 3), book_of_size("b2", 1, "D")};
  books[0].century = 19;
  books[1].language = "ger";
  auto doc = manifest_to_json(books);
  EXPECT_EQ(doc["schema_version"], kManifestSchemaVersion);
  EXPECT_EQ(doc["books"][0]["lines"].size(), 3u);
  EXPECT_EQ(manifest_from_json(nlohmann::json::parse(doc.dump())), books);
  EXPECT_THROW(manifest_from_json(nlohmann::json{{"schema_version", 2}}), ManifestError);
}

TEST(RefinementSample, UnderAndOverCap) {
  auto small = book_of_size("b", 30);
  EXPECT_EQ(refinement_sample(small, 50, 42), small.line_ids);
  auto big = book_of_size("b", 200);
  auto s1 = refinement_sample(big, 50, 42);
  EXPECT_EQ(s1.size(), 50u);
  EXPECT_EQ(s1, refinement_sample(big, 50, 42));
  EXPECT_TRUE(std::is_sorted(s1.begin(), s1.end()));
  EXPECT_EQ(std::set<std::string>(s1.begin(), s1.end()).size(), 50u);
  EXPECT_NE(s1, refinement_sample(big, 50, 43));
  EXPECT_THROW(refinement_sample(big, 0, 42), ManifestError);
}

TEST(RefinementSample, NotJustAPrefix) {
  auto big = book_of_size("b", 200);
  auto s = refinement_sample(big, 50, 42);
  EXPECT_NE(s, std::vector<std::string>(big.line_ids.begin(), big.line_ids.begin() + 50));
}

TEST(RefinementSample, RoughlyUniform) {
  auto big = book_of_size("b", 20);
  std::vector<int> hits(20);
  for (uint64_t seed = 0; seed < 4000; ++seed) {
    for (const auto& id : refinement_sample(big, 5, seed)) ++hits[std::stoi(id) - 1];
  }
  // expected 1000 each
  for (int h : hits) {
    EXPECT_GT(h, 850);
    EXPECT_LT(h, 1150);
  }
}

TEST(RefinementSample, BoundProperty) {
  for (size_t n : {0u, 1u, 7u, 50u, 51u, 300u})
    for (size_t cap : {1u, 10u, 50u}) {
      auto s = refinement_sample(book_of_size("b", n), cap, n * 31 + cap);
      EXPECT_EQ(s.size(), std::min(n, cap));
    }
}

TEST(BuildSchedule, CapsAndConservation) {
  std::vector<BookEntry> books{book_of_size("a", 60), book_of_size("b", 50), book_of_size("c", 10)};
  auto plan = build_schedule(books, schedule_over("C", 50));
  ASSERT_EQ(plan.size(), 4u);
  EXPECT_EQ(plan[0].lines.size(), 120u);
  EXPECT_EQ(plan[1].lines.size(), 0u);
  EXPECT_EQ(plan[2].lines.size(), 120u);
  EXPECT_EQ(plan[3].lines.size(), 110u);
  EXPECT_EQ(plan[3].lines_per_corpus.at("C"), 110u);
}

TEST(BuildSchedule, ThirtyNineBooksCapFifty) {
  std::vector<BookEntry> books;
  for (int i = 0; i < 39; ++i) books.push_back(book_of_size("dta" + std::to_string(i), 50 + 7 * i, "DTA19"));
  auto plan = build_schedule(books, schedule_over("DTA19", 50, 42));
  EXPECT_EQ(plan[3].lines.size(), 1950u);
}

TEST(BuildSchedule, Errors) {
  std::vector<BookEntry> books{book_of_size("a", 5)};
  EXPECT_THROW(build_schedule(books, schedule_over("Missing", 50)), ManifestError);
  auto s = schedule_over("C", 50);
  std::swap(s.stages[0], s.stages[1]);
  EXPECT_THROW(s.validate(), ManifestError);
  s = schedule_over("C", 50);
  s.stages[2].cap_per_book = 10;
  EXPECT_THROW(s.validate(), ManifestError);
  s = schedule_over("C", 50);
  s.stages.pop_back();
  EXPECT_THROW(s.validate(), ManifestError);
  EXPECT_THROW(parse_stage_name("finetune"), ManifestError);
}

TEST(BuildSchedule, JsonSchedule) {
  auto doc = nlohmann::json::parse(R"({"seed": 9, "stages": [
      {"name": "pretraining", "corpora": ["C"]},
      {"name": "synthetic", "corpora": []},
      {"name": "real", "corpora": ["C"]},
      {"name": "refinement", "corpora": ["C"], "cap_per_book": 2}]})");
  auto s = schedule_from_json(doc);
  EXPECT_EQ(s.seed, 9u);
  EXPECT_EQ(s.stages[3].cap_per_book, std::optional<size_t>(2));
  std::vector<BookEntry> books{book_of_size("a", 5)};
  EXPECT_EQ(build_schedule(books, s)[3].lines.size(), 2u);
}

TEST(BuildSchedule, ReferenceScheduleIsValid) {
  auto s = reference::fraktur19_schedule(0);
  EXPECT_NO_THROW(s.validate());
  EXPECT_EQ(s.stages[3].cap_per_book, std::optional<size_t>(reference::kRefinementCap));
}

TEST(VerifyCounts, MatchesAndDiscrepancies) {
  std::vector<BookEntry> novels;
  const auto& ds = reference::evaluation_datasets();
  for (const auto& d : ds)
    if (d.id.starts_with("N-")) novels.push_back(book_of_size(d.id, d.lines, "Novels"));
  std::vector<ExpectedCounts> want{{"Novels", 13, 3483}};
  EXPECT_TRUE(verify_counts(novels, want).empty());

  novels.back().line_ids.pop_back();
  auto diff = verify_counts(novels, want);
  ASSERT_EQ(diff.size(), 1u);
  EXPECT_EQ(diff[0], (CountDiscrepancy{"Novels", "lines", 3483, 3482}));

  std::vector<ExpectedCounts> absent{{"Sanders", 1, 630}};
  EXPECT_EQ(verify_counts(novels, absent).size(), 2u);
}

TEST(VerifyCounts, ReferenceTotalsAreSelfConsistent) {
  std::map<std::string, std::pair<uint64_t, uint64_t>> by_prefix;
  for (const auto& d : reference::evaluation_datasets()) {
    auto& e = by_prefix[d.id.substr(0, 1)];
    ++e.first;
    e.second += d.lines;
  }
  const std::map<std::string, std::string> corpus_of{{"N", "Novels"}, {"O", "OCR-TS"}, {"D", "Daheim"}, {"S", "Sanders"}};
  for (const auto& c : reference::evaluation_corpus_counts()) {
    std::string prefix;
    for (const auto& [p, name] : corpus_of)
      if (name == c.corpus_id) prefix = p;
    ASSERT_FALSE(prefix.empty()) << c.corpus_id;
    EXPECT_EQ(by_prefix[prefix].first, c.books) << c.corpus_id;
    EXPECT_EQ(by_prefix[prefix].second, c.lines) << c.corpus_id;
  }
}

TEST(VerifyCounts, ParseExpected) {
  auto e = parse_expected_counts("# corpus\tbooks\tlines\nNovels\t13\t3483\r\n\nOCR-TS\t2\t465\n");
  ASSERT_EQ(e.size(), 2u);
  EXPECT_EQ(e[1].corpus_id, "OCR-TS");
  EXPECT_EQ(e[1].lines, 465u);
  EXPECT_THROW(parse_expected_counts("Novels\t13\n"), ManifestError);
  EXPECT_THROW(parse_expected_counts("Novels\tx\t1\n"), ManifestError);
}
