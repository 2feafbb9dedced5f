#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fraktur_bench::oracle {

struct RuleVector {
  std::string input;
  std::string expected;
  std::string note;
};

// tests/data/rule_vectors.tsv: input<TAB>expected<TAB>note, '#' comments.
inline std::vector<RuleVector> load_rule_vectors(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::vector<RuleVector> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line.front() == '#') continue;
    size_t t1 = line.find('\t');
    size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) continue;
    out.push_back({line.substr(0, t1), line.substr(t1 + 1, t2 - t1 - 1), line.substr(t2 + 1)});
  }
  return out;
}

}  // namespace fraktur_bench::oracle
