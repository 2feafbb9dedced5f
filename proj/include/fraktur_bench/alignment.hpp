#pragma once

// Unit-cost character alignment between ground truth and prediction, CER,
// and line-to-corpus aggregation.

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fraktur_bench/error.hpp"
#include "fraktur_bench/line.hpp"
#include "fraktur_bench/parallel.hpp"

namespace fraktur_bench {

enum class OpKind : uint8_t { match, substitute, insert, remove };

// One alignment column. `gt` is unused for insertions, `pred` for deletions.
struct EditOp {
  OpKind kind;
  char32_t gt = 0;
  char32_t pred = 0;

  static EditOp match(char32_t c) { return {OpKind::match, c, c}; }
  static EditOp substitute(char32_t g, char32_t p) { return {OpKind::substitute, g, p}; }
  static EditOp insert(char32_t p) { return {OpKind::insert, 0, p}; }
  static EditOp remove(char32_t g) { return {OpKind::remove, g, 0}; }

  bool is_error() const noexcept { return kind != OpKind::match; }
  bool has_gt() const noexcept { return kind != OpKind::insert; }
  bool has_pred() const noexcept { return kind != OpKind::remove; }

  bool operator==(const EditOp&) const = default;
};

using EditScript = std::vector<EditOp>;

inline std::u32string replay_gt(const EditScript& script) {
  std::u32string out;
  for (const auto& op : script)
    if (op.has_gt()) out.push_back(op.gt);
  return out;
}

inline std::u32string replay_pred(const EditScript& script) {
  std::u32string out;
  for (const auto& op : script)
    if (op.has_pred()) out.push_back(op.pred);
  return out;
}

// CER of `distance` errors against `gt_len` reference characters. With an
// empty reference the error count itself is returned (virtual length 1).
inline double cer_of(uint64_t distance, uint64_t gt_len) {
  if (gt_len == 0) return static_cast<double>(distance);
  return static_cast<double>(distance) / static_cast<double>(gt_len);
}

struct AlignmentResult {
  EditScript script;
  uint64_t distance = 0;
  uint64_t gt_len = 0;
  uint64_t pred_len = 0;

  double cer() const { return cer_of(distance, gt_len); }
};

// Two-row dynamic program, O(|gt|*|pred|) time, O(|pred|) space.
inline uint64_t levenshtein(std::u32string_view gt, std::u32string_view pred) {
  std::vector<uint64_t> prev(pred.size() + 1), cur(pred.size() + 1);
  for (size_t j = 0; j <= pred.size(); ++j) prev[j] = j;
  for (size_t i = 1; i <= gt.size(); ++i) {
    cur[0] = i;
    for (size_t j = 1; j <= pred.size(); ++j) {
      uint64_t diag = prev[j - 1] + (gt[i - 1] == pred[j - 1] ? 0 : 1);
      cur[j] = std::min({diag, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[pred.size()];
}

// Full-matrix alignment with traceback. Ties prefer the diagonal
// (match/substitute), then deletion, then insertion.
inline AlignmentResult align(std::u32string_view gt, std::u32string_view pred) {
  const size_t n = gt.size(), m = pred.size();
  const size_t width = m + 1;
  std::vector<uint32_t> cost((n + 1) * width);
  auto at = [&](size_t i, size_t j) -> uint32_t& { return cost[i * width + j]; };
  for (size_t j = 0; j <= m; ++j) at(0, j) = static_cast<uint32_t>(j);
  for (size_t i = 1; i <= n; ++i) {
    at(i, 0) = static_cast<uint32_t>(i);
    for (size_t j = 1; j <= m; ++j) {
      uint32_t diag = at(i - 1, j - 1) + (gt[i - 1] == pred[j - 1] ? 0 : 1);
      at(i, j) = std::min({diag, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }

  AlignmentResult result;
  result.distance = at(n, m);
  result.gt_len = n;
  result.pred_len = m;
  result.script.reserve(std::max(n, m));
  size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && at(i, j) == at(i - 1, j - 1) + (gt[i - 1] == pred[j - 1] ? 0 : 1)) {
      result.script.push_back(gt[i - 1] == pred[j - 1] ? EditOp::match(gt[i - 1])
                                                        : EditOp::substitute(gt[i - 1], pred[j - 1]));
      --i;
      --j;
    } else if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      result.script.push_back(EditOp::remove(gt[i - 1]));
      --i;
    } else {
      result.script.push_back(EditOp::insert(pred[j - 1]));
      --j;
    }
  }
  std::reverse(result.script.begin(), result.script.end());
  return result;
}

// Running totals that both micro and macro CER can be read from. Merging
// is associative; feed lines in a fixed order for bit-stable macro sums.
struct CerTally {
  uint64_t lines = 0;
  uint64_t gt_chars = 0;
  uint64_t distance = 0;
  double macro_sum = 0.0;   // sum of per-line CER over lines with gt_len > 0
  uint64_t macro_lines = 0;

  void add(const AlignmentResult& r) {
    ++lines;
    gt_chars += r.gt_len;
    distance += r.distance;
    if (r.gt_len > 0) {
      macro_sum += r.cer();
      ++macro_lines;
    }
  }

  void merge(const CerTally& other) {
    lines += other.lines;
    gt_chars += other.gt_chars;
    distance += other.distance;
    macro_sum += other.macro_sum;
    macro_lines += other.macro_lines;
  }

  double micro_cer() const { return cer_of(distance, gt_chars); }
  double macro_cer() const { return macro_lines == 0 ? 0.0 : macro_sum / static_cast<double>(macro_lines); }

  bool operator==(const CerTally&) const = default;
};

struct CorpusCer {
  std::vector<LineKey> keys;  // parallel to per_line
  std::vector<AlignmentResult> per_line;
  CerTally tally;

  uint64_t total_distance() const { return tally.distance; }
  uint64_t total_gt_chars() const { return tally.gt_chars; }
  double micro_cer() const { return tally.micro_cer(); }
  double macro_cer() const { return tally.macro_cer(); }
};

// Aligns already-matched (gt, pred) pairs; every pair must share its key.
inline CorpusCer corpus_cer(std::span<const std::pair<TranscriptionLine, TranscriptionLine>> pairs) {
  if (pairs.empty()) throw EvaluationError("empty evaluation set");
  std::vector<std::string> orphans;
  for (const auto& [gt, pred] : pairs) {
    if (gt.key() != pred.key()) orphans.push_back(gt.key().str() + " <> " + pred.key().str());
  }
  if (!orphans.empty()) throw EvaluationError("mismatched line ids in evaluation pairs", orphans);

  CorpusCer out;
  out.keys.reserve(pairs.size());
  out.per_line.resize(pairs.size());
  for (const auto& p : pairs) out.keys.push_back(p.first.key());
  parallel_for(pairs.size(), [&](size_t i) { out.per_line[i] = align(pairs[i].first.text(), pairs[i].second.text()); });
  for (const auto& r : out.per_line) out.tally.add(r);
  return out;
}

// Matches predictions to ground truth by key; output follows GT order.
inline CorpusCer corpus_cer(std::span<const TranscriptionLine> gt, std::span<const TranscriptionLine> pred) {
  if (gt.empty() && pred.empty()) throw EvaluationError("empty evaluation set");
  std::map<LineKey, size_t> pred_index;
  std::vector<std::string> orphans;
  for (size_t i = 0; i < pred.size(); ++i) {
    if (!pred_index.emplace(pred[i].key(), i).second) orphans.push_back("duplicate prediction: " + pred[i].key().str());
  }

  std::vector<std::pair<TranscriptionLine, TranscriptionLine>> pairs;
  pairs.reserve(gt.size());
  for (const auto& g : gt) {
    auto it = pred_index.find(g.key());
    if (it == pred_index.end()) {
      orphans.push_back("missing prediction: " + g.key().str());
      continue;
    }
    pairs.emplace_back(g, pred[it->second]);
    pred_index.erase(it);
  }
  for (const auto& [key, idx] : pred_index) orphans.push_back("prediction without ground truth: " + key.str());
  if (!orphans.empty()) throw EvaluationError("unmatched line ids", orphans);
  return corpus_cer(std::span<const std::pair<TranscriptionLine, TranscriptionLine>>(pairs));
}

}  // namespace fraktur_bench
