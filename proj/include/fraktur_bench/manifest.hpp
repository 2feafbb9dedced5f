#pragma once

// Book-level inventories of line-pair corpora, the staged training
// schedule built from them, and capped per-book refinement sampling.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fraktur_bench/error.hpp"
#include "fraktur_bench/line.hpp"
#include "fraktur_bench/parallel.hpp"

namespace fraktur_bench {

inline constexpr int kManifestSchemaVersion = 1;

struct BookEntry {
  std::string book_id;
  std::string corpus_id;
  std::optional<int> century;
  std::optional<std::string> language;
  std::vector<std::string> line_ids;  // sorted, unique

  bool operator==(const BookEntry&) const = default;
};

struct ScanResult {
  std::vector<BookEntry> books;
  std::vector<std::string> warnings;

  uint64_t line_count() const {
    uint64_t n = 0;
    for (const auto& b : books) n += b.line_ids.size();
    return n;
  }
};

inline constexpr std::string_view kGtSuffix = ".gt.txt";

// Image siblings accepted for `<line_id>.gt.txt`, in lookup order.
inline const std::vector<std::string>& image_suffixes() {
  static const std::vector<std::string> s{".png", ".bin.png", ".nrm.png"};
  return s;
}

inline std::optional<std::string> line_id_of_gt_file(const std::string& filename) {
  if (filename.size() <= kGtSuffix.size() || !filename.ends_with(kGtSuffix)) return std::nullopt;
  return filename.substr(0, filename.size() - kGtSuffix.size());
}

// Scans `<root>/<book_id>/<line_id>.gt.txt` with an image sibling. GT files
// without an image are reported as warnings and skipped, as are books left
// without any usable line.
inline ScanResult scan_corpus(const std::filesystem::path& root, const std::string& corpus_id) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw ManifestError("unreadable corpus root: " + root.string());

  std::vector<fs::path> book_dirs;
  for (const auto& entry : fs::directory_iterator(root, ec)) {
    if (entry.is_directory()) book_dirs.push_back(entry.path());
  }
  if (ec) throw ManifestError("unreadable corpus root: " + root.string() + ": " + ec.message());
  std::sort(book_dirs.begin(), book_dirs.end());

  std::vector<BookEntry> books(book_dirs.size());
  std::vector<std::vector<std::string>> warnings(book_dirs.size());
  parallel_for(book_dirs.size(), [&](size_t i) {
    BookEntry& book = books[i];
    book.book_id = book_dirs[i].filename().string();
    book.corpus_id = corpus_id;
    for (const auto& f : fs::directory_iterator(book_dirs[i])) {
      if (!f.is_regular_file()) continue;
      auto line_id = line_id_of_gt_file(f.path().filename().string());
      if (!line_id) continue;
      bool has_image = std::any_of(image_suffixes().begin(), image_suffixes().end(), [&](const std::string& s) {
        return fs::is_regular_file(book_dirs[i] / (*line_id + s));
      });
      if (has_image) {
        book.line_ids.push_back(*line_id);
      } else {
        warnings[i].push_back("missing image for " + book.book_id + "/" + *line_id + ", line excluded");
      }
    }
    std::sort(book.line_ids.begin(), book.line_ids.end());
    std::sort(warnings[i].begin(), warnings[i].end());
  });

  ScanResult result;
  for (size_t i = 0; i < books.size(); ++i) {
    result.warnings.insert(result.warnings.end(), warnings[i].begin(), warnings[i].end());
    if (books[i].line_ids.empty()) {
      result.warnings.push_back("book " + books[i].book_id + " has no usable lines, skipped");
      continue;
    }
    result.books.push_back(std::move(books[i]));
  }
  if (result.books.empty()) throw ManifestError("no books found under " + root.string());
  return result;
}

inline nlohmann::ordered_json manifest_to_json(std::span<const BookEntry> books) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["schema_version"] = kManifestSchemaVersion;
  ordered_json arr = ordered_json::array();
  for (const auto& b : books) {
    ordered_json meta = ordered_json::object();
    if (b.century) meta["century"] = *b.century;
    if (b.language) meta["language"] = *b.language;
    arr.push_back({{"book_id", b.book_id},
                   {"corpus_id", b.corpus_id},
                   {"path", b.book_id},
                   {"lines", b.line_ids},
                   {"metadata", meta}});
  }
  doc["books"] = arr;
  return doc;
}

inline std::vector<BookEntry> manifest_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || doc.value("schema_version", 0) != kManifestSchemaVersion) {
    throw ManifestError("unsupported manifest schema_version");
  }
  std::vector<BookEntry> books;
  try {
    for (const auto& b : doc.at("books")) {
      BookEntry e;
      e.book_id = b.at("book_id");
      e.corpus_id = b.at("corpus_id");
      e.line_ids = b.at("lines").get<std::vector<std::string>>();
      if (b.contains("metadata")) {
        const auto& m = b.at("metadata");
        if (m.contains("century")) e.century = m.at("century").get<int>();
        if (m.contains("language")) e.language = m.at("language").get<std::string>();
      }
      std::set<std::string> unique(e.line_ids.begin(), e.line_ids.end());
      if (unique.size() != e.line_ids.size()) throw ManifestError("duplicate line ids in book " + e.book_id);
      books.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw ManifestError(std::string("malformed manifest: ") + ex.what());
  }
  return books;
}

namespace detail {

inline uint64_t fnv1a(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Unbiased draw from [0, bound). std::uniform_int_distribution is
// implementation-defined, which would make samples differ across
// standard libraries.
inline uint64_t uniform_below(std::mt19937_64& rng, uint64_t bound) {
  const uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    uint64_t r = rng();
    if (r >= threshold) return r % bound;
  }
}

}  // namespace detail

// Uniform sample of min(cap, |book|) line ids without replacement, sorted.
// The stream is keyed by (seed, corpus, book) so a book's sample does not
// depend on which other books are sampled alongside it.
inline std::vector<std::string> refinement_sample(const BookEntry& book, size_t cap, uint64_t seed) {
  if (cap == 0) throw ManifestError("refinement cap must be >= 1");
  std::vector<std::string> ids = book.line_ids;
  if (ids.size() > cap) {
    std::mt19937_64 rng(detail::splitmix64(seed ^ detail::fnv1a(book.corpus_id + "/" + book.book_id)));
    for (size_t i = 0; i < cap; ++i) {
      size_t j = i + detail::uniform_below(rng, ids.size() - i);
      std::swap(ids[i], ids[j]);
    }
    ids.resize(cap);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

enum class StageName { pretraining, synthetic, real, refinement };

inline const char* stage_name(StageName s) {
  switch (s) {
    case StageName::pretraining: return "pretraining";
    case StageName::synthetic: return "synthetic";
    case StageName::real: return "real";
    case StageName::refinement: return "refinement";
  }
  return "?";
}

inline StageName parse_stage_name(std::string_view s) {
  if (s == "pretraining") return StageName::pretraining;
  if (s == "synthetic") return StageName::synthetic;
  if (s == "real") return StageName::real;
  if (s == "refinement") return StageName::refinement;
  throw ManifestError("unknown training stage: " + std::string(s));
}

struct TrainingStage {
  StageName name;
  std::vector<std::string> corpora;
  std::optional<size_t> cap_per_book;  // refinement only
};

struct TrainingSchedule {
  std::vector<TrainingStage> stages;
  uint64_t seed = 0;

  // Exactly pretraining -> synthetic -> real -> refinement, with a cap on
  // (and only on) the refinement stage.
  void validate() const {
    static constexpr StageName order[] = {StageName::pretraining, StageName::synthetic, StageName::real,
                                          StageName::refinement};
    if (stages.size() != 4) throw ManifestError("a training schedule has exactly four stages");
    for (size_t i = 0; i < 4; ++i) {
      if (stages[i].name != order[i]) {
        throw ManifestError(std::string("stage ") + std::to_string(i + 1) + " must be " + stage_name(order[i]));
      }
      const bool is_refinement = stages[i].name == StageName::refinement;
      if (stages[i].cap_per_book.has_value() != is_refinement) {
        throw ManifestError("cap_per_book is required on, and only on, the refinement stage");
      }
      if (is_refinement && *stages[i].cap_per_book == 0) throw ManifestError("refinement cap must be >= 1");
    }
  }
};

inline TrainingSchedule schedule_from_json(const nlohmann::json& doc) {
  TrainingSchedule s;
  try {
    s.seed = doc.value("seed", uint64_t{0});
    for (const auto& st : doc.at("stages")) {
      TrainingStage stage{parse_stage_name(st.at("name").get<std::string>()),
                          st.at("corpora").get<std::vector<std::string>>(), std::nullopt};
      if (st.contains("cap_per_book")) stage.cap_per_book = st.at("cap_per_book").get<size_t>();
      s.stages.push_back(std::move(stage));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw ManifestError(std::string("malformed schedule: ") + ex.what());
  }
  s.validate();
  return s;
}

struct StageSelection {
  StageName name;
  std::vector<LineKey> lines;
  std::map<std::string, uint64_t> lines_per_corpus;
};

// Expands each stage into concrete lines: every line of every book in the
// stage's corpora, or for refinement a capped sample per book. Stages are
// independent, so a line may recur across stages.
inline std::vector<StageSelection> build_schedule(std::span<const BookEntry> manifest, const TrainingSchedule& schedule) {
  schedule.validate();
  std::set<std::string> known;
  for (const auto& b : manifest) known.insert(b.corpus_id);
  std::vector<std::string> unknown;
  for (const auto& st : schedule.stages)
    for (const auto& c : st.corpora)
      if (!known.count(c)) unknown.push_back(std::string(stage_name(st.name)) + ": " + c);
  if (!unknown.empty()) throw ManifestError("schedule references unknown corpora", unknown);

  std::vector<StageSelection> out;
  for (const auto& st : schedule.stages) {
    StageSelection sel{st.name, {}, {}};
    for (const auto& corpus : st.corpora) {
      for (const auto& book : manifest) {
        if (book.corpus_id != corpus) continue;
        std::vector<std::string> ids =
            st.cap_per_book ? refinement_sample(book, *st.cap_per_book, schedule.seed) : book.line_ids;
        sel.lines_per_corpus[corpus] += ids.size();
        for (auto& id : ids) sel.lines.push_back({book.corpus_id, book.book_id, std::move(id)});
      }
    }
    out.push_back(std::move(sel));
  }
  return out;
}

inline nlohmann::ordered_json schedule_plan_to_json(std::span<const StageSelection> plan, uint64_t seed) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["schema_version"] = kManifestSchemaVersion;
  doc["seed"] = seed;
  ordered_json stages = ordered_json::array();
  for (const auto& sel : plan) {
    ordered_json lines = ordered_json::array();
    for (const auto& k : sel.lines) lines.push_back({{"corpus_id", k.corpus_id}, {"book_id", k.book_id}, {"line_id", k.line_id}});
    stages.push_back({{"name", stage_name(sel.name)},
                      {"line_count", sel.lines.size()},
                      {"lines_per_corpus", sel.lines_per_corpus},
                      {"lines", lines}});
  }
  doc["stages"] = stages;
  return doc;
}

struct ExpectedCounts {
  std::string corpus_id;
  uint64_t books = 0;
  uint64_t lines = 0;
};

struct CountDiscrepancy {
  std::string corpus_id;
  std::string field;  // "books" or "lines"
  uint64_t expected = 0;
  uint64_t actual = 0;

  bool operator==(const CountDiscrepancy&) const = default;
};

inline std::vector<CountDiscrepancy> verify_counts(std::span<const BookEntry> manifest,
                                                   std::span<const ExpectedCounts> expected) {
  std::map<std::string, std::pair<uint64_t, uint64_t>> actual;  // corpus -> (books, lines)
  for (const auto& b : manifest) {
    auto& a = actual[b.corpus_id];
    ++a.first;
    a.second += b.line_ids.size();
  }
  std::vector<CountDiscrepancy> out;
  for (const auto& e : expected) {
    auto [books, lines] = actual.count(e.corpus_id) ? actual[e.corpus_id] : std::pair<uint64_t, uint64_t>{0, 0};
    if (books != e.books) out.push_back({e.corpus_id, "books", e.books, books});
    if (lines != e.lines) out.push_back({e.corpus_id, "lines", e.lines, lines});
  }
  return out;
}

// TSV rows `corpus_id<TAB>books<TAB>lines`; '#' starts a comment line.
inline std::vector<ExpectedCounts> parse_expected_counts(std::string_view text) {
  std::vector<ExpectedCounts> out;
  size_t line_no = 0;
  size_t start = 0;
  while (start < text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    size_t t1 = line.find('\t');
    size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) throw ManifestError("expected counts line " + std::to_string(line_no) + ": need 3 columns");
    try {
      out.push_back({line.substr(0, t1), std::stoull(line.substr(t1 + 1, t2 - t1 - 1)), std::stoull(line.substr(t2 + 1))});
    } catch (const std::exception&) {
      throw ManifestError("expected counts line " + std::to_string(line_no) + ": counts must be integers");
    }
  }
  return out;
}

}  // namespace fraktur_bench
