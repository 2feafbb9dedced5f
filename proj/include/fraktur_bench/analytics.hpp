#pragma once

// Error analytics over alignments: ranked confusion tables, top-k error
// share and whitespace error classes.

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fraktur_bench/alignment.hpp"

namespace fraktur_bench {

// (gt_seq -> pred_seq) with an occurrence count. An empty gt_seq is an
// insertion, an empty pred_seq a deletion; never both.
struct ConfusionEntry {
  std::u32string gt_seq;
  std::u32string pred_seq;
  uint64_t count = 0;

  bool operator==(const ConfusionEntry&) const = default;
};

// Exact non-negative fraction.
struct Ratio {
  uint64_t numerator = 0;
  uint64_t denominator = 1;

  double value() const {
    return denominator == 0 ? 0.0 : static_cast<double>(numerator) / static_cast<double>(denominator);
  }

  // Equality of the represented rationals, not of the representation.
  bool operator==(const Ratio& o) const {
    return static_cast<unsigned __int128>(numerator) * o.denominator ==
           static_cast<unsigned __int128>(o.numerator) * denominator;
  }
};

// Count desc, then (gt_seq, pred_seq) by code point.
inline void rank_confusion(std::vector<ConfusionEntry>& entries) {
  std::sort(entries.begin(), entries.end(), [](const ConfusionEntry& a, const ConfusionEntry& b) {
    if (a.count != b.count) return a.count > b.count;
    if (a.gt_seq != b.gt_seq) return a.gt_seq < b.gt_seq;
    return a.pred_seq < b.pred_seq;
  });
}

// Collects every non-match op as one entry. With merge_runs, maximal runs
// of adjacent insertions (or deletions) become a single multi-character
// entry instead.
inline std::vector<ConfusionEntry> confusion_stats(std::span<const AlignmentResult> results, bool merge_runs = false) {
  std::map<std::pair<std::u32string, std::u32string>, uint64_t> counts;
  for (const auto& r : results) {
    const auto& ops = r.script;
    for (size_t i = 0; i < ops.size();) {
      const EditOp& op = ops[i];
      if (!op.is_error()) {
        ++i;
        continue;
      }
      if (op.kind == OpKind::substitute) {
        ++counts[{std::u32string(1, op.gt), std::u32string(1, op.pred)}];
        ++i;
        continue;
      }
      std::u32string run;
      size_t j = i;
      do {
        run.push_back(op.kind == OpKind::insert ? ops[j].pred : ops[j].gt);
        ++j;
      } while (merge_runs && j < ops.size() && ops[j].kind == op.kind);
      if (op.kind == OpKind::insert) {
        ++counts[{std::u32string(), run}];
      } else {
        ++counts[{run, std::u32string()}];
      }
      i = j;
    }
  }
  std::vector<ConfusionEntry> out;
  out.reserve(counts.size());
  for (auto& [key, n] : counts) out.push_back({key.first, key.second, n});
  rank_confusion(out);
  return out;
}

inline uint64_t total_error_count(std::span<const ConfusionEntry> confusion) {
  uint64_t total = 0;
  for (const auto& e : confusion) total += e.count;
  return total;
}

// Share of all error mass held by the k most frequent entries of a ranked
// list; 0/1 for an empty list.
inline Ratio top_k_error_share(std::span<const ConfusionEntry> ranked, size_t k) {
  if (k == 0) throw std::invalid_argument("top_k_error_share: k must be >= 1");
  const uint64_t total = total_error_count(ranked);
  if (total == 0) return {0, 1};
  uint64_t top = 0;
  for (size_t i = 0; i < std::min(k, ranked.size()); ++i) top += ranked[i].count;
  return {top, total};
}

struct WhitespaceSummary {
  uint64_t space_insertions = 0;
  uint64_t space_deletions = 0;
  uint64_t other = 0;

  uint64_t total() const { return space_insertions + space_deletions + other; }
  bool operator==(const WhitespaceSummary&) const = default;
};

inline bool all_spaces(const std::u32string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char32_t c) { return c == U' '; });
}

// A pure insertion or deletion of spaces merges or splits words; anything
// else, including substitutions touching a space, lands in `other`.
inline WhitespaceSummary classify_whitespace_errors(std::span<const ConfusionEntry> confusion) {
  WhitespaceSummary out;
  for (const auto& e : confusion) {
    if (e.gt_seq.empty() && all_spaces(e.pred_seq)) {
      out.space_insertions += e.count;
    } else if (e.pred_seq.empty() && all_spaces(e.gt_seq)) {
      out.space_deletions += e.count;
    } else {
      out.other += e.count;
    }
  }
  return out;
}

}  // namespace fraktur_bench
