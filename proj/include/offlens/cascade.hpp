#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "offlens/corpus.hpp"
#include "offlens/glm.hpp"

namespace offlens {

struct Prediction {
  std::string id;
  Label label;

  bool operator==(const Prediction&) const = default;
};

struct CascadeResult {
  std::vector<Prediction> task_a;  // every record, corpus order
  std::vector<Prediction> task_b;  // records predicted OFF
  std::vector<Prediction> task_c;  // records predicted TIN
  std::vector<bool> entered_b;     // per record, parallel to the input
  std::vector<bool> entered_c;
};

struct CascadeModels {
  const GlmModel* task_a = nullptr;
  const GlmModel* task_b = nullptr;
  const GlmModel* task_c = nullptr;
};

// A on everything, B on the records A calls OFF, C on the records B calls TIN.
CascadeResult run_cascade(std::span<const Document> documents, const CascadeModels& models,
                          std::size_t threads = 1);

// A confusion cell named the usual way, gold first: OFF-NOT is gold OFF,
// predicted NOT.
struct Cell {
  Label gold;
  Label pred;

  bool operator==(const Cell&) const = default;
};

// Parses "GOLD:PRED" (or "GOLD-PRED").
Cell parse_cell(std::string_view text);
std::string to_string(const Cell& cell);

struct SampleReport {
  Cell cell;
  std::size_t n_per_trial = 0;
  std::size_t population = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<std::string>> trials;

  bool operator==(const SampleReport&) const = default;
};

// Each trial draws min(n, population) distinct ids from the cell by a partial
// Fisher-Yates shuffle of the cell's members (corpus order) driven by one
// SplitMix64 stream seeded with `seed`. Trials are independent of each other.
SampleReport sample_cell(std::span<const LabeledTweet> gold, std::span<const LabeledTweet> pred,
                         const Cell& cell, std::size_t n = 10, std::size_t trials = 10,
                         std::uint64_t seed = 0);

class Lexicon {
 public:
  Lexicon() = default;
  // Terms are matched case-insensitively and need at least 3 characters.
  explicit Lexicon(std::span<const std::string> terms);

  bool empty() const { return terms_.empty(); }
  bool contains(std::string_view word) const;

 private:
  std::set<std::string, std::less<>> terms_;
};

// One term per line; blank lines and '#' comments ignored.
Lexicon load_lexicon(const std::filesystem::path& path);

// Masks whole-word lexicon matches, keeping the first character and the last
// two: bitch -> b**ch, fuck -> f*ck. Everything else is left untouched.
std::string redact(std::string_view text, const Lexicon& lexicon);

struct ReviewRow {
  std::size_t trial = 0;  // 1-based
  std::string id;
  std::string gold;
  std::string pred;
  std::string text;
  std::string annotation;

  bool operator==(const ReviewRow&) const = default;
};

// Header line, then one row per sampled id: trial, id, gold, pred, text
// (redacted when the lexicon is non-empty) and an empty annotation column.
std::vector<ReviewRow> review_rows(const SampleReport& report,
                                   std::span<const LabeledTweet> texts, const Lexicon& lexicon);
void write_sample_review(const SampleReport& report, std::span<const LabeledTweet> texts,
                         const Lexicon& lexicon, const std::filesystem::path& path);
void write_review_rows(std::span<const ReviewRow> rows, std::ostream& out);
std::vector<ReviewRow> read_sample_review(const std::filesystem::path& path);

}  // namespace offlens
