#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "offlens/corpus.hpp"

namespace offlens {

// Planted-lexicon corpus standing in for distantly supervised training data.
//
// Every document is a run of background words. Exactly round(marked * docs)
// documents also carry 1-3 offense markers (gold OFF, otherwise NOT). Each
// marked document is targeted with probability `targeted` (gold TIN, else
// UNT); a targeted document carries one target marker whose family decides
// IND, GRP or OTH (60/30/10).
//
// Scores follow the generative rule so that the default cutoffs recover the
// gold labels exactly:
//   A: marked   0.8 + 0.2 * (1 - exp(-8 * marker_density))
//      unmarked 0.02 + 0.5 * u
//   B: TIN 0.02 + 0.15 * u, UNT 0.25 + 0.7 * u
//   C: true class 0.8 + 0.19 * u, other classes 0.05 + 0.6 * u
// with u uniform in [0,1); all scores rounded to 4 decimals.
struct SynthConfig {
  std::size_t docs = 1000;
  double marked = 0.1;
  double targeted = 0.6;
  std::uint64_t seed = 7;
  std::size_t holdout = 0;  // last N documents form the test split
  std::size_t vocab_size = 400;
};

struct SynthDoc {
  std::string id;
  std::string text;
  double score_a = 0.0;
  Label gold_a = Label::NOT;
  std::optional<double> score_b;  // marked documents only
  std::optional<Label> gold_b;
  std::optional<std::vector<double>> scores_c;  // TIN documents only
  std::optional<Label> gold_c;
};

std::vector<SynthDoc> generate_synthetic(const SynthConfig& config);

struct SynthSplit {
  ScoredCorpus scored_a, scored_b, scored_c;
  LabeledCorpus gold_a, gold_b, gold_c;
};

// Task files restricted to the documents that reach each task under gold
// labels: B holds OFF documents, C holds TIN documents.
SynthSplit split_tasks(const std::vector<SynthDoc>& docs, std::size_t begin, std::size_t end);

// Writes {train,test}_{a,b,c}.{scored,gold}.tsv into `dir`.
void write_synthetic(const SynthConfig& config, const std::filesystem::path& dir);

}  // namespace offlens
