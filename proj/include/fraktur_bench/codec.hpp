#pragma once

// Closed character sets ("codecs") that ground truth must conform to,
// the escaped one-entry-per-line file format they are stored in, and the
// membership checks run against them.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "fraktur_bench/error.hpp"
#include "fraktur_bench/line.hpp"
#include "fraktur_bench/unicode.hpp"

namespace fraktur_bench {

namespace detail {

inline int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

inline std::string read_file_bytes(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", std::string("cannot open ") + what + " file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Splits on '\n' and strips one trailing '\r' from every line.
inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  if (!lines.empty() && lines.back().empty() && !text.empty() && text.back() == '\n') lines.pop_back();
  if (text.empty()) lines.clear();
  return lines;
}

}  // namespace detail

// Resolves the escapes shared by codec and rule files: \s (space), \t, \\, \uXXXX.
inline std::u32string unescape_entry(std::string_view raw, const std::string& where) {
  std::string bytes;
  std::u32string out;
  auto flush = [&] {
    if (!bytes.empty()) {
      out += utf8_to_u32(bytes);
      bytes.clear();
    }
  };
  for (size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] != '\\') {
      bytes.push_back(raw[i]);
      continue;
    }
    if (i + 1 >= raw.size()) throw CodecError(where + ": dangling backslash");
    char esc = raw[++i];
    flush();
    switch (esc) {
      case 's': out.push_back(U' '); break;
      case 't': out.push_back(U'\t'); break;
      case '\\': out.push_back(U'\\'); break;
      case 'u': {
        if (i + 4 >= raw.size()) {
          throw CodecError(where + ": truncated \\u escape");
        }
        char32_t cp = 0;
        for (int k = 1; k <= 4; ++k) {
          int v = detail::hex_value(raw[i + k]);
          if (v < 0) throw CodecError(where + ": malformed \\u escape");
          cp = cp * 16 + static_cast<char32_t>(v);
        }
        out.push_back(cp);
        i += 4;
        break;
      }
      default:
        throw CodecError(where + ": unknown escape \\" + std::string(1, esc));
    }
  }
  flush();
  return out;
}

// Inverse of unescape_entry for characters that would not survive a plain
// text line (space, tab, backslash, controls, combining marks).
inline std::string escape_entry(std::u32string_view text) {
  std::string out;
  for (char32_t c : text) {
    if (c == U' ') {
      out += "\\s";
    } else if (c == U'\t') {
      out += "\\t";
    } else if (c == U'\\') {
      out += "\\\\";
    } else if (c < 0x20 || (c >= 0x7F && c < 0xA0) || c == 0xAD || (c >= 0x300 && c < 0x370) ||
               (c >= 0xFE00 && c < 0xFE10)) {
      char buf[8];
      std::snprintf(buf, sizeof buf, "\\u%04X", static_cast<unsigned>(c));
      out += buf;
    } else {
      out += u32_to_utf8(c);
    }
  }
  return out;
}

class Codec {
 public:
  Codec(std::vector<char32_t> characters, std::string name = "custom", std::string version = "1")
      : characters_(std::move(characters)), name_(std::move(name)), version_(std::move(version)) {
    if (characters_.empty()) throw CodecError("empty codec");
    for (char32_t c : characters_) {
      if (!members_.insert(c).second) {
        throw CodecError("duplicate character in codec: " + u32_to_utf8(c) + " (" + code_point_label(c) + ")");
      }
    }
    if (!contains(U' ')) throw CodecError("codec lacks the space character");
  }

  bool contains(char32_t c) const { return members_.count(c) != 0; }
  size_t size() const noexcept { return characters_.size(); }
  const std::vector<char32_t>& characters() const noexcept { return characters_; }
  const std::string& name() const noexcept { return name_; }
  const std::string& version() const noexcept { return version_; }

  // Serialized form accepted by parse_codec.
  std::string to_file_text() const {
    std::string out = "## name: " + name_ + "\n## version: " + version_ + "\n";
    for (char32_t c : characters_) out += escape_entry(std::u32string_view(&c, 1)) + "\n";
    return out;
  }

 private:
  std::vector<char32_t> characters_;
  std::unordered_set<char32_t> members_;
  std::string name_;
  std::string version_;
};

// Codec file format: UTF-8, one character per line, escapes as in
// unescape_entry. Lines starting with "##" are comments; "## name: x" and
// "## version: y" set metadata. Empty lines are ignored.
inline Codec parse_codec(std::string_view file_text, const std::string& source = "<codec>") {
  std::vector<char32_t> chars;
  std::map<char32_t, size_t> seen;
  std::string name = "custom";
  std::string version = "1";
  utf8_to_u32(file_text);  // rejects undecodable bytes up front

  auto lines = detail::split_lines(file_text);
  for (size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    const std::string where = source + ":" + std::to_string(i + 1);
    if (line.empty()) continue;
    if (line.starts_with("##")) {
      std::string_view meta = line.substr(2);
      while (!meta.empty() && meta.front() == ' ') meta.remove_prefix(1);
      if (meta.starts_with("name:")) {
        name = std::string(meta.substr(5));
        name.erase(0, name.find_first_not_of(' '));
      } else if (meta.starts_with("version:")) {
        version = std::string(meta.substr(8));
        version.erase(0, version.find_first_not_of(' '));
      }
      continue;
    }
    std::u32string entry = to_nfc(unescape_entry(line, where));
    if (entry.size() != 1) {
      throw CodecError(where + ": codec entry must be exactly one character, got \"" + std::string(line) + "\"");
    }
    char32_t c = entry.front();
    if (auto [it, fresh] = seen.emplace(c, i + 1); !fresh) {
      throw CodecError(where + ": duplicate character " + u32_to_utf8(c) + " (" + code_point_label(c) +
                           "), first listed on line " + std::to_string(it->second),
                       {u32_to_utf8(c)});
    }
    chars.push_back(c);
  }
  if (chars.empty()) throw CodecError("empty codec: " + source);
  return Codec(std::move(chars), std::move(name), std::move(version));
}

inline Codec load_codec(const std::string& path) {
  return parse_codec(detail::read_file_bytes(path, "codec"), path);
}

// The 19th-century Fraktur codec: specials, digits, lowercase with long s
// and sharp s, uppercase without I, umlauts and grave/acute vowels, space.
// 91 entries; data/codec/fraktur19.codec carries the same list.
inline const std::u32string& fraktur19_codec_characters() {
  static const std::u32string chars =
      U"_!\"&'[]*,-./:;=?$%"
      U"0123456789"
      U"abcdefghijklmnopqrsſßtuvwxyz"
      U"ABCDEFGHJKLMNOPQRSTUVWXYZ"
      U"ÄÖÜäöüàèé"
      U" ";
  return chars;
}

inline const Codec& default_codec() {
  static const Codec codec(
      std::vector<char32_t>(fraktur19_codec_characters().begin(), fraktur19_codec_characters().end()),
      "fraktur19", "1");
  return codec;
}

struct Violation {
  size_t position;  // scalar index, not byte offset
  char32_t character;

  bool operator==(const Violation&) const = default;
};

inline std::vector<Violation> validate_against_codec(std::u32string_view text, const Codec& codec) {
  std::vector<Violation> out;
  for (size_t i = 0; i < text.size(); ++i) {
    if (!codec.contains(text[i])) out.push_back({i, text[i]});
  }
  return out;
}

inline std::vector<Violation> validate_against_codec(const TranscriptionLine& line, const Codec& codec) {
  return validate_against_codec(line.text(), codec);
}

struct CharFrequency {
  char32_t character;
  uint64_t count;

  bool operator==(const CharFrequency&) const = default;
};

struct CoverageReport {
  std::vector<CharFrequency> in_codec;
  std::vector<CharFrequency> out_of_codec;

  uint64_t total() const {
    uint64_t sum = 0;
    for (const auto& f : in_codec) sum += f.count;
    for (const auto& f : out_of_codec) sum += f.count;
    return sum;
  }
};

// Frequency desc, then code point asc.
inline CoverageReport codec_coverage_report(std::span<const TranscriptionLine> lines, const Codec& codec) {
  std::map<char32_t, uint64_t> counts;
  for (const auto& line : lines) {
    for (char32_t c : line.text()) ++counts[c];
  }
  CoverageReport report;
  for (const auto& [c, n] : counts) {
    (codec.contains(c) ? report.in_codec : report.out_of_codec).push_back({c, n});
  }
  auto order = [](const CharFrequency& a, const CharFrequency& b) {
    return a.count != b.count ? a.count > b.count : a.character < b.character;
  };
  std::sort(report.in_codec.begin(), report.in_codec.end(), order);
  std::sort(report.out_of_codec.begin(), report.out_of_codec.end(), order);
  return report;
}

}  // namespace fraktur_bench
