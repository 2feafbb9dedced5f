#pragma once

// Transcription regularization: ordered grapheme rewrite rules that fold
// ground truth and engine output into a codec.

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "fraktur_bench/codec.hpp"
#include "fraktur_bench/error.hpp"
#include "fraktur_bench/line.hpp"
#include "fraktur_bench/unicode.hpp"

namespace fraktur_bench {

struct RewriteRule {
  std::u32string source;  // never empty
  std::u32string target;  // empty means deletion

  bool operator==(const RewriteRule&) const = default;
};

// Ordered rewrite rules plus characters that no rule may touch.
class NormalizationRuleSet {
 public:
  NormalizationRuleSet(std::vector<RewriteRule> rules, std::u32string keep_list)
      : rules_(std::move(rules)), keep_list_(std::move(keep_list)) {
    std::set<std::u32string> sources;
    for (auto& rule : rules_) {
      rule.source = to_nfc(rule.source);
      rule.target = to_nfc(rule.target);
      if (rule.source.empty()) throw RuleError("rule with empty source");
      if (!sources.insert(rule.source).second) {
        throw RuleError("duplicate rule source: " + u32_to_utf8(rule.source));
      }
      for (char32_t k : keep_list_) {
        if (rule.source.find(k) != std::u32string::npos) {
          throw RuleError("rule source " + u32_to_utf8(rule.source) + " rewrites preserved character " +
                          u32_to_utf8(k));
        }
      }
    }
  }

  const std::vector<RewriteRule>& rules() const noexcept { return rules_; }
  const std::u32string& keep_list() const noexcept { return keep_list_; }

  // Rules file format: see parse_rules.
  std::string to_file_text() const {
    std::string out;
    if (!keep_list_.empty()) {
      out += "##keep";
      for (char32_t k : keep_list_) out += "\t" + escape_entry(std::u32string_view(&k, 1));
      out += "\n";
    }
    for (const auto& r : rules_) out += escape_entry(r.source) + "\t" + escape_entry(r.target) + "\n";
    return out;
  }

  // FNV-1a over the canonical serialization, as 16 hex digits.
  std::string checksum() const {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char b : to_file_text()) {
      h ^= b;
      h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
  }

  // Every target must consist of codec characters.
  void check_targets(const Codec& codec) const {
    std::vector<std::string> bad;
    for (const auto& r : rules_) {
      for (char32_t c : r.target) {
        if (!codec.contains(c)) bad.push_back(u32_to_utf8(r.source) + " -> " + u32_to_utf8(c));
      }
    }
    if (!bad.empty()) throw RuleError("rule targets outside codec " + codec.name(), bad);
  }

 private:
  std::vector<RewriteRule> rules_;
  std::u32string keep_list_;
};

// UTF-8 TSV, one `source<TAB>target` per line, applied top to bottom.
// Escapes as in codec files. A line `##keep<TAB>c<TAB>c...` declares
// preserved characters; other lines starting with "##" and blank lines
// are ignored.
inline NormalizationRuleSet parse_rules(std::string_view file_text, const std::string& source = "<rules>") {
  std::vector<RewriteRule> rules;
  std::u32string keep;
  auto lines = detail::split_lines(file_text);
  for (size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    const std::string where = source + ":" + std::to_string(i + 1);
    if (line.empty()) continue;
    try {
      if (line.starts_with("##keep")) {
        std::string_view rest = line.substr(6);
        size_t pos = 0;
        while (pos < rest.size()) {
          size_t tab = rest.find('\t', pos);
          if (tab == std::string_view::npos) tab = rest.size();
          if (tab > pos) keep += to_nfc(unescape_entry(rest.substr(pos, tab - pos), where));
          pos = tab + 1;
        }
        continue;
      }
      if (line.starts_with("##")) continue;
      size_t tab = line.find('\t');
      if (tab == std::string_view::npos) throw RuleError(where + ": expected source<TAB>target");
      if (line.find('\t', tab + 1) != std::string_view::npos) throw RuleError(where + ": more than one TAB");
      rules.push_back({unescape_entry(line.substr(0, tab), where), unescape_entry(line.substr(tab + 1), where)});
    } catch (const CodecError& e) {
      throw RuleError(e.what());
    } catch (const EncodingError&) {
      throw RuleError(where + ": undecodable UTF-8");
    }
  }
  return NormalizationRuleSet(std::move(rules), std::move(keep));
}

inline NormalizationRuleSet load_rules(const std::string& path) {
  return parse_rules(detail::read_file_bytes(path, "rules"), path);
}

// Regularization rules for the fraktur19 codec; data/rules/fraktur19.tsv
// holds the same table.
inline const NormalizationRuleSet& default_rules() {
  static const NormalizationRuleSet rules(
      {
          // ligatures (ß is not a ligature here)
          {U"ﬀ", U"ff"},
          {U"ﬁ", U"fi"},
          {U"ﬂ", U"fl"},
          {U"ﬃ", U"ffi"},
          {U"ﬄ", U"ffl"},
          {U"ﬅ", U"ſt"},
          {U"ﬆ", U"st"},
          {U"Ꜩ", U"Tz"},
          {U"ꜩ", U"tz"},
          {U"Æ", U"Ae"},
          {U"æ", U"ae"},
          {U"Œ", U"Oe"},
          {U"œ", U"oe"},
          {U"Ĳ", U"JJ"},
          {U"ĳ", U"ij"},
          // r rotunda
          {U"Ꝛ", U"R"},
          {U"ꝛ", U"r"},
          // umlauts written with circumflex or superscript e
          {U"â", U"ä"},
          {U"ô", U"ö"},
          {U"û", U"ü"},
          {U"Â", U"Ä"},
          {U"Ô", U"Ö"},
          {U"Û", U"Ü"},
          {U"aͤ", U"ä"},
          {U"oͤ", U"ö"},
          {U"uͤ", U"ü"},
          {U"Aͤ", U"Ä"},
          {U"Oͤ", U"Ö"},
          {U"Uͤ", U"Ü"},
          // quotation marks
          {U"„", U"\""},
          {U"“", U"\""},
          {U"”", U"\""},
          {U"‟", U"\""},
          {U"»", U"\""},
          {U"«", U"\""},
          {U"‹", U"\""},
          {U"›", U"\""},
          {U"‚", U"'"},
          {U"‘", U"'"},
          {U"’", U"'"},
          // hyphens and dashes
          {U"‐", U"-"},
          {U"‑", U"-"},
          {U"‒", U"-"},
          {U"–", U"-"},
          {U"—", U"-"},
          {U"\u00AD", U"-"},  // soft hyphen
          {U"⸗", U"-"},
          // I and J share one glyph
          {U"I", U"J"},
      },
      U"ſß");
  return rules;
}

namespace detail {

inline bool replace_all(std::u32string& text, const RewriteRule& rule) {
  size_t pos = text.find(rule.source);
  if (pos == std::u32string::npos) return false;
  std::u32string out;
  out.reserve(text.size() + rule.target.size());
  size_t from = 0;
  while (pos != std::u32string::npos) {
    out.append(text, from, pos - from);
    out += rule.target;
    from = pos + rule.source.size();
    pos = text.find(rule.source, from);
  }
  out.append(text, from, std::u32string::npos);
  text = std::move(out);
  return true;
}

}  // namespace detail

// Result of running the rules; `residual` lists characters still outside
// the codec (positions index into `text`).
struct NormalizeOutcome {
  std::u32string text;
  std::vector<Violation> residual;
};

class UnmappedCharacterError : public Error {
 public:
  UnmappedCharacterError(const std::string& line_id, std::vector<Violation> violations)
      : Error("unmapped", make_message(line_id, violations), make_details(line_id, violations)),
        line_id_(line_id),
        violations_(std::move(violations)) {}

  const std::string& line_id() const noexcept { return line_id_; }
  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  static std::vector<std::string> make_details(const std::string& line_id, const std::vector<Violation>& vs) {
    std::vector<std::string> out;
    for (const auto& v : vs) {
      out.push_back(line_id + ":" + std::to_string(v.position) + ":" + u32_to_utf8(v.character) + ":" +
                    code_point_label(v.character));
    }
    return out;
  }
  static std::string make_message(const std::string& line_id, const std::vector<Violation>& vs) {
    std::string msg = "line " + line_id + ": " + std::to_string(vs.size()) + " character(s) outside codec:";
    for (const auto& v : vs) msg += " '" + u32_to_utf8(v.character) + "' " + code_point_label(v.character);
    return msg;
  }

  std::string line_id_;
  std::vector<Violation> violations_;
};

// Binds a rule set to a codec; immutable and safe to share across threads.
class Normalizer {
 public:
  static constexpr int kMaxPasses = 8;

  Normalizer(NormalizationRuleSet rules, Codec codec) : rules_(std::move(rules)), codec_(std::move(codec)) {
    rules_.check_targets(codec_);
  }

  const NormalizationRuleSet& rules() const noexcept { return rules_; }
  const Codec& codec() const noexcept { return codec_; }

  // NFC, then the rules top to bottom, repeated until a pass changes
  // nothing. The fixed point makes the result idempotent even when a rule
  // output completes another rule's source.
  NormalizeOutcome apply(std::u32string_view input) const {
    std::u32string text = to_nfc(input);
    for (int pass = 0;; ++pass) {
      if (pass == kMaxPasses) throw RuleError("rule set does not converge on input: " + u32_to_utf8(input));
      bool changed = false;
      for (const auto& rule : rules_.rules()) changed |= detail::replace_all(text, rule);
      if (!changed) break;
      std::u32string composed = to_nfc(text);
      text = std::move(composed);
    }
    NormalizeOutcome out{std::move(text), {}};
    out.residual = validate_against_codec(out.text, codec_);
    return out;
  }

  // Throws UnmappedCharacterError if anything outside the codec survives.
  TranscriptionLine normalize(const TranscriptionLine& line) const {
    NormalizeOutcome out = apply(line.text());
    if (!out.residual.empty()) throw UnmappedCharacterError(line.key().str(), std::move(out.residual));
    return line.with_text(std::move(out.text));
  }

 private:
  NormalizationRuleSet rules_;
  Codec codec_;
};

inline TranscriptionLine normalize_line(const TranscriptionLine& line, const NormalizationRuleSet& rules,
                                        const Codec& codec) {
  return Normalizer(rules, codec).normalize(line);
}

// What to do with characters that survive the rules but are not in the codec.
struct UnmappedPolicy {
  enum class Mode { fail, drop, replace };
  Mode mode = Mode::fail;
  char32_t replacement = U'\0';

  // "fail", "drop" or "replace=<char>".
  static UnmappedPolicy parse(std::string_view spec) {
    if (spec == "fail") return {};
    if (spec == "drop") return {Mode::drop, U'\0'};
    if (spec.starts_with("replace=")) {
      std::u32string c = to_nfc(unescape_entry(spec.substr(8), "--on-unmapped"));
      if (c.size() != 1) throw RuleError("replace= expects exactly one character");
      return {Mode::replace, c.front()};
    }
    throw RuleError("unknown unmapped-character policy: " + std::string(spec));
  }
};

inline TranscriptionLine normalize_line(const TranscriptionLine& line, const Normalizer& normalizer,
                                        const UnmappedPolicy& policy) {
  NormalizeOutcome out = normalizer.apply(line.text());
  if (out.residual.empty()) return line.with_text(std::move(out.text));
  switch (policy.mode) {
    case UnmappedPolicy::Mode::fail:
      throw UnmappedCharacterError(line.key().str(), std::move(out.residual));
    case UnmappedPolicy::Mode::drop: {
      std::u32string kept;
      for (char32_t c : out.text) {
        if (normalizer.codec().contains(c)) kept.push_back(c);
      }
      return line.with_text(std::move(kept));
    }
    case UnmappedPolicy::Mode::replace: {
      if (!normalizer.codec().contains(policy.replacement)) {
        throw RuleError("replacement character " + u32_to_utf8(policy.replacement) + " is not in the codec");
      }
      for (const auto& v : out.residual) out.text[v.position] = policy.replacement;
      return line.with_text(std::move(out.text));
    }
  }
  return line;
}

}  // namespace fraktur_bench
