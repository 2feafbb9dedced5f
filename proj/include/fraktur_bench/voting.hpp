#pragma once

// Line-level voting across several recognizers. Every output is aligned to
// a pivot output (star alignment); each pivot character position and each
// insertion gap between positions is then decided by plurality vote.

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fraktur_bench/alignment.hpp"
#include "fraktur_bench/error.hpp"
#include "fraktur_bench/line.hpp"
#include "fraktur_bench/parallel.hpp"

namespace fraktur_bench {

struct VoterOutput {
  std::string engine_id;
  std::u32string text;
  std::optional<std::vector<double>> confidences;  // one per character of text

  bool operator==(const VoterOutput&) const = default;
};

enum class TieBreak { confidence, first_voter, abstain_to_pivot };

inline TieBreak parse_tie_break(std::string_view name) {
  if (name == "confidence") return TieBreak::confidence;
  if (name == "first_voter" || name == "first-voter") return TieBreak::first_voter;
  if (name == "abstain_to_pivot" || name == "abstain-to-pivot") return TieBreak::abstain_to_pivot;
  throw VotingError("unknown tie-break rule: " + std::string(name));
}

struct PivotChoice {
  enum class Mode { longest, first, engine };
  Mode mode = Mode::longest;
  std::string engine_id;  // Mode::engine only

  // "longest", "first" or an engine id.
  static PivotChoice parse(std::string_view s) {
    if (s == "longest") return {};
    if (s == "first") return {Mode::first, {}};
    return {Mode::engine, std::string(s)};
  }
};

struct VotingConfig {
  size_t min_voters = 2;
  TieBreak tie_break = TieBreak::first_voter;
  PivotChoice pivot;
};

inline constexpr const char* kVotedEngineId = "voted";

namespace detail {

// One voter's opinion on one slot: the characters it puts there (possibly
// none) and their confidences.
struct SlotOpinion {
  std::u32string text;
  std::vector<double> conf;
};

struct Candidate {
  size_t votes = 0;
  double confidence = 0.0;        // sum over supporters of mean char confidence; 0 for empty
  size_t first_voter = 0;         // lowest supporting voter index
  bool pivot_supports = false;
  std::vector<double> conf_sum;   // per character, over supporters
};

inline size_t choose_pivot(std::span<const VoterOutput> outputs, const PivotChoice& pivot) {
  switch (pivot.mode) {
    case PivotChoice::Mode::first: return 0;
    case PivotChoice::Mode::engine:
      for (size_t i = 0; i < outputs.size(); ++i)
        if (outputs[i].engine_id == pivot.engine_id) return i;
      throw VotingError("pivot engine not among voters: " + pivot.engine_id);
    case PivotChoice::Mode::longest: break;
  }
  size_t best = 0;
  for (size_t i = 1; i < outputs.size(); ++i)
    if (outputs[i].text.size() > outputs[best].text.size()) best = i;
  return best;
}

// Slot 2*i is the gap before pivot position i, slot 2*i+1 is position i.
inline std::vector<SlotOpinion> project_onto_pivot(const std::u32string& pivot, const VoterOutput& voter) {
  std::vector<SlotOpinion> slots(2 * pivot.size() + 1);
  AlignmentResult aligned = align(pivot, voter.text);
  size_t pos = 0;    // pivot index
  size_t vchar = 0;  // voter character index
  auto conf_at = [&](size_t k) { return voter.confidences ? (*voter.confidences)[k] : 0.0; };
  for (const auto& op : aligned.script) {
    switch (op.kind) {
      case OpKind::insert:
        slots[2 * pos].text.push_back(op.pred);
        slots[2 * pos].conf.push_back(conf_at(vchar++));
        break;
      case OpKind::match:
      case OpKind::substitute:
        slots[2 * pos + 1].text.push_back(op.pred);
        slots[2 * pos + 1].conf.push_back(conf_at(vchar++));
        ++pos;
        break;
      case OpKind::remove:
        ++pos;
        break;
    }
  }
  return slots;
}

}  // namespace detail

inline void validate_voters(std::span<const VoterOutput> outputs, const VotingConfig& config) {
  if (config.min_voters < 2) throw VotingError("min_voters must be at least 2");
  if (outputs.size() < config.min_voters) {
    throw VotingError("insufficient voters: " + std::to_string(outputs.size()) + " < " +
                      std::to_string(config.min_voters));
  }
  for (const auto& o : outputs) {
    if (o.confidences && o.confidences->size() != o.text.size()) {
      throw VotingError("confidence count does not match text length for voter " + o.engine_id);
    }
    if (config.tie_break == TieBreak::confidence && !o.confidences) {
      throw VotingError("confidence tie-break requires confidences from every voter; missing for " + o.engine_id);
    }
  }
}

// Plurality vote per slot. Ties go to the configured rule; confidence ties
// compare summed supporter confidence (an empty opinion carries none) and
// fall back to voter order when still equal.
inline VoterOutput vote_line(std::span<const VoterOutput> outputs, const VotingConfig& config) {
  validate_voters(outputs, config);
  const size_t pivot_index = detail::choose_pivot(outputs, config.pivot);
  const std::u32string& pivot = outputs[pivot_index].text;
  const bool all_confident =
      std::all_of(outputs.begin(), outputs.end(), [](const VoterOutput& o) { return o.confidences.has_value(); });

  std::vector<std::vector<detail::SlotOpinion>> opinions;
  opinions.reserve(outputs.size());
  for (const auto& o : outputs) opinions.push_back(detail::project_onto_pivot(pivot, o));

  VoterOutput result{kVotedEngineId, {}, std::nullopt};
  std::vector<double> result_conf;
  const size_t slot_count = 2 * pivot.size() + 1;
  for (size_t s = 0; s < slot_count; ++s) {
    std::map<std::u32string, detail::Candidate> candidates;
    for (size_t v = 0; v < outputs.size(); ++v) {
      const auto& op = opinions[v][s];
      auto [it, fresh] = candidates.try_emplace(op.text);
      detail::Candidate& c = it->second;
      if (fresh) {
        c.first_voter = v;
        c.conf_sum.assign(op.text.size(), 0.0);
      }
      ++c.votes;
      c.pivot_supports |= (v == pivot_index);
      if (!op.conf.empty()) {
        double mean = 0.0;
        for (size_t k = 0; k < op.conf.size(); ++k) {
          c.conf_sum[k] += op.conf[k];
          mean += op.conf[k];
        }
        c.confidence += mean / static_cast<double>(op.conf.size());
      }
    }

    const detail::Candidate* best = nullptr;
    const std::u32string* best_text = nullptr;
    for (const auto& [text, cand] : candidates) {
      bool better = false;
      if (!best || cand.votes > best->votes) {
        better = true;
      } else if (cand.votes == best->votes) {
        switch (config.tie_break) {
          case TieBreak::confidence:
            better = cand.confidence > best->confidence ||
                     (cand.confidence == best->confidence && cand.first_voter < best->first_voter);
            break;
          case TieBreak::first_voter:
            better = cand.first_voter < best->first_voter;
            break;
          case TieBreak::abstain_to_pivot:
            better = cand.pivot_supports ||
                     (!best->pivot_supports && cand.first_voter < best->first_voter);
            break;
        }
      }
      if (better) {
        best = &cand;
        best_text = &text;
      }
    }
    result.text += *best_text;
    for (double sum : best->conf_sum) result_conf.push_back(sum / static_cast<double>(best->votes));
  }
  if (all_confident) result.confidences = std::move(result_conf);
  return result;
}

// Votes every line independently; output is ordered by line key and every
// line carries engine id "voted". Lines with fewer than min_voters outputs
// are collected into a single error.
inline std::vector<TranscriptionLine> vote_corpus(const std::map<LineKey, std::vector<VoterOutput>>& per_line,
                                                  const VotingConfig& config) {
  std::vector<const std::pair<const LineKey, std::vector<VoterOutput>>*> entries;
  std::vector<std::string> short_lines;
  for (const auto& entry : per_line) {
    entries.push_back(&entry);
    if (entry.second.size() < config.min_voters) {
      short_lines.push_back(entry.first.str() + " (" + std::to_string(entry.second.size()) + " voters)");
    }
  }
  if (!short_lines.empty()) {
    throw VotingError("insufficient voters on " + std::to_string(short_lines.size()) + " line(s), need " +
                          std::to_string(config.min_voters),
                      short_lines);
  }
  std::vector<std::optional<TranscriptionLine>> voted(entries.size());
  parallel_for(entries.size(), [&](size_t i) {
    VoterOutput v = vote_line(entries[i]->second, config);
    voted[i] = TranscriptionLine::prediction(entries[i]->first, std::move(v.text), kVotedEngineId);
  });
  std::vector<TranscriptionLine> out;
  out.reserve(voted.size());
  for (auto& v : voted) out.push_back(std::move(*v));
  return out;
}

}  // namespace fraktur_bench
