#pragma once

// Test-only reference implementations and generators. Nothing here calls
// into the library's alignment code.

#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace fraktur_bench::oracle {

// Edit distance straight from its recursive definition over suffixes,
// memoized so length-12 inputs stay fast.
inline uint64_t recursive_levenshtein(const std::u32string& a, const std::u32string& b) {
  std::unordered_map<uint64_t, uint64_t> memo;
  const uint64_t width = b.size() + 1;
  auto rec = [&](auto&& self, size_t i, size_t j) -> uint64_t {
    if (i == a.size()) return b.size() - j;
    if (j == b.size()) return a.size() - i;
    const uint64_t key = i * width + j;
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    uint64_t best = self(self, i + 1, j) + 1;
    best = std::min(best, self(self, i, j + 1) + 1);
    best = std::min(best, self(self, i + 1, j + 1) + (a[i] == b[j] ? 0 : 1));
    memo[key] = best;
    return best;
  };
  return rec(rec, 0, 0);
}

// Breadth-first search over single-character edits, alphabet drawn from
// both strings. Returns the first depth at which `b` is reached, or
// max_depth + 1 when it is not reached.
inline uint64_t bfs_edit_distance(const std::u32string& a, const std::u32string& b, uint64_t max_depth) {
  std::set<char32_t> alpha(a.begin(), a.end());
  alpha.insert(b.begin(), b.end());
  std::set<std::u32string> seen{a};
  std::vector<std::u32string> frontier{a};
  for (uint64_t depth = 0; depth <= max_depth; ++depth) {
    for (const auto& s : frontier)
      if (s == b) return depth;
    std::vector<std::u32string> next;
    for (const auto& s : frontier) {
      auto push = [&](std::u32string t) {
        if (seen.insert(t).second) next.push_back(std::move(t));
      };
      for (size_t i = 0; i < s.size(); ++i) push(s.substr(0, i) + s.substr(i + 1));
      for (size_t i = 0; i <= s.size(); ++i)
        for (char32_t c : alpha) push(s.substr(0, i) + std::u32string(1, c) + s.substr(i));
      for (size_t i = 0; i < s.size(); ++i)
        for (char32_t c : alpha)
          if (c != s[i]) {
            std::u32string t = s;
            t[i] = c;
            push(t);
          }
    }
    frontier = std::move(next);
  }
  return max_depth + 1;
}

inline std::u32string random_string(std::mt19937_64& rng, size_t max_len, const std::u32string& alphabet) {
  std::uniform_int_distribution<size_t> len_dist(0, max_len);
  std::uniform_int_distribution<size_t> ch(0, alphabet.size() - 1);
  std::u32string s(len_dist(rng), U'\0');
  for (auto& c : s) c = alphabet[ch(rng)];
  return s;
}

// Independently corrupts each character with probability p: a uniform
// choice of substitution (different character), deletion, or insertion of
// a random character after it.
inline std::u32string corrupt(const std::u32string& s, double p, std::mt19937_64& rng, const std::u32string& alphabet) {
  std::bernoulli_distribution hit(p);
  std::uniform_int_distribution<int> kind(0, 2);
  std::uniform_int_distribution<size_t> ch(0, alphabet.size() - 1);
  std::u32string out;
  for (char32_t c : s) {
    if (!hit(rng)) {
      out.push_back(c);
      continue;
    }
    switch (kind(rng)) {
      case 0: {
        char32_t r = c;
        while (r == c) r = alphabet[ch(rng)];
        out.push_back(r);
        break;
      }
      case 1:
        break;
      default:
        out.push_back(c);
        out.push_back(alphabet[ch(rng)]);
        break;
    }
  }
  return out;
}

// Strings mixing codec letters with the graphemes the Fraktur rules
// rewrite (ligatures, r rotunda, I/J, quote and dash variants, circumflex
// and superscript-e umlauts) and arbitrary other scalars, including lone
// combining marks.
inline std::u32string fuzz_transcription(std::mt19937_64& rng, size_t max_pieces = 24) {
  static const std::vector<std::u32string> pieces{
      U"a", U"e", U"n", U"s", U"t", U"J", U"I", U"i", U"j", U" ", U"  ", U"ſ", U"ß", U"ä", U"Ü", U"é",
      U"ﬀ", U"ﬁ", U"ﬂ", U"ﬃ", U"ﬄ", U"ﬅ", U"ﬆ", U"ꜩ", U"Ꜩ", U"æ", U"Œ", U"ĳ", U"Ĳ", U"ꝛ", U"Ꝛ",
      U"„", U"“", U"”", U"»", U"«", U"‹", U"›", U"‚", U"‘", U"’", U"‐", U"‑", U"‒", U"–", U"—",
      U"­", U"⸗", U"â", U"ô", U"û", U"Â", U"â", U"uͤ", U"Oͤ", U"ͤ", U"̈",
      U"\"", U"'", U"-", U"=", U".", U"9"};
  std::uniform_int_distribution<size_t> count(0, max_pieces);
  std::uniform_int_distribution<size_t> pick(0, pieces.size() - 1);
  std::uniform_int_distribution<int> wild(0, 9);
  std::uniform_int_distribution<char32_t> any_bmp(0xA0, 0x24F);
  std::u32string out;
  for (size_t n = count(rng); n > 0; --n) {
    if (wild(rng) == 0) {
      out.push_back(any_bmp(rng));
    } else {
      out += pieces[pick(rng)];
    }
  }
  return out;
}

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << content;
}

// Fresh, empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("fraktur_bench_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

// `<root>/<book>/<line>.gt.txt` plus an empty `<line>.png` sibling.
inline void write_book(const std::filesystem::path& root, const std::string& book,
                       const std::vector<std::pair<std::string, std::string>>& lines, bool images = true) {
  for (const auto& [id, text] : lines) {
    write_file(root / book / (id + ".gt.txt"), text + "\n");
    if (images) write_file(root / book / (id + ".png"), "");
  }
}

inline void write_book_of_size(const std::filesystem::path& root, const std::string& book, size_t n) {
  std::vector<std::pair<std::string, std::string>> lines;
  for (size_t i = 0; i < n; ++i) {
    char id[24];
    std::snprintf(id, sizeof id, "%06zu", i + 1);
    lines.push_back({id, "line " + std::to_string(i + 1)});
  }
  write_book(root, book, lines);
}

}  // namespace fraktur_bench::oracle
