#pragma once

// Published inventories of the 19th-century Fraktur training and
// evaluation corpora, used as count expectations and as the default
// training schedule.

#include <string>
#include <vector>

#include "fraktur_bench/manifest.hpp"

namespace fraktur_bench::reference {

struct EvaluationDataset {
  std::string id;
  std::string title;
  uint64_t lines;
};

// Evaluation sets; the prefix before '-' names the corpus (N, O, D, S).
inline const std::vector<EvaluationDataset>& evaluation_datasets() {
  static const std::vector<EvaluationDataset> d{
      {"N-1781", "Eleonore", 305},
      {"N-1803", "Liebe-Hütten", 184},
      {"N-1810", "Der Held des Nordens", 264},
      {"N-1818", "Reinhold", 253},
      {"N-1826", "Frauenwürde", 268},
      {"N-1836", "Die Ruinen im Schwarzwalde", 318},
      {"N-1848", "Levin", 269},
      {"N-1851", "Georg Volker", 264},
      {"N-1859", "Der beseelte Schatten", 260},
      {"N-1865", "Gefahrvolle Wege", 333},
      {"N-1869", "Der Arzt der Seele", 250},
      {"N-1870", "Die Bank des Verderbens", 273},
      {"N-1873", "Natürliche Magie", 242},
      {"O-1809", "Wahlverwandtschaften", 223},
      {"O-1841", "Grenzboten", 242},
      {"D-1865", "Daheim volume 1865", 134},
      {"D-1875", "Daheim volume 1875", 144},
      {"D-1882", "Daheim volume 1882", 142},
      {"D-1892", "Daheim volume 1892", 163},
      {"S-1865", "Sanders Dictionary", 630},
  };
  return d;
}

// Corpus totals for the evaluation corpora.
inline const std::vector<ExpectedCounts>& evaluation_corpus_counts() {
  static const std::vector<ExpectedCounts> c{
      {"Novels", 13, 3483},
      {"OCR-TS", 2, 465},
      {"Daheim", 4, 583},
      {"Sanders", 1, 630},
  };
  return c;
}

struct TrainingCorpus {
  std::string corpus_id;
  std::string centuries;
  uint64_t books;  // fonts for the synthetic corpus; 0 when not applicable
  uint64_t lines;
  std::string languages;
  StageName stage;
};

inline const std::vector<TrainingCorpus>& training_corpora() {
  static const std::vector<TrainingCorpus> t{
      {"ENHG", "15", 9, 24766, "ger", StageName::pretraining},
      {"Kallimachos", "15,16", 9, 20929, "ger,lat", StageName::pretraining},
      {"EML", "15-17", 12, 10288, "lat", StageName::pretraining},
      {"RIDGES", "15-19", 20, 13248, "ger", StageName::pretraining},
      {"UW3", "20", 0, 96481, "eng", StageName::pretraining},
      {"Synth", "-", 66, 99214, "ger", StageName::synthetic},
      {"DTA19", "19", 39, 243942, "ger", StageName::real},
      {"Archiscribe", "19", 103, 3430, "ger", StageName::real},
      {"JZE", "19", 8, 1636, "ger", StageName::real},
      {"DTA19", "19", 39, 1950, "ger", StageName::refinement},
      {"Archiscribe", "19", 103, 3429, "ger", StageName::refinement},
      {"JZE", "19", 8, 355, "ger", StageName::refinement},
  };
  return t;
}

inline constexpr size_t kRefinementCap = 50;

// The four-stage mixed-model schedule over the corpora above.
inline TrainingSchedule fraktur19_schedule(uint64_t seed) {
  TrainingSchedule s;
  s.seed = seed;
  s.stages = {
      {StageName::pretraining, {"ENHG", "Kallimachos", "EML", "RIDGES", "UW3"}, std::nullopt},
      {StageName::synthetic, {"Synth"}, std::nullopt},
      {StageName::real, {"DTA19", "Archiscribe", "JZE"}, std::nullopt},
      {StageName::refinement, {"DTA19", "Archiscribe", "JZE"}, kRefinementCap},
  };
  return s;
}

}  // namespace fraktur_bench::reference
