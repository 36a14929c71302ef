#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "offlens/corpus.hpp"

namespace offlens {

// Maps a continuous distant-supervision score to a training label.
//
// For every task the "high" side of the cutoff is compared with >= when
// `inclusive` is set and with > otherwise:
//   A: OFF on the high side, NOT below.
//   B: UNT on the high side, TIN below.
//   C: a class qualifies when its own score is on the high side.
struct CutoffPolicy {
  TaskId task = TaskId::A;
  double cutoff = 0.8;
  bool inclusive = true;

  static CutoffPolicy defaults(TaskId task);
  void validate() const;
};

Label label_task_a(double score, const CutoffPolicy& policy);
Label label_task_b(double score, const CutoffPolicy& policy);
// Highest qualifying score wins; equal scores resolve IND > GRP > OTH.
// Returns nullopt when no class reaches the cutoff.
std::optional<Label> label_task_c(std::span<const double, 3> scores, const CutoffPolicy& policy);

struct LabelingResult {
  LabeledCorpus corpus;
  std::size_t excluded = 0;
  std::map<Label, std::size_t> counts;
};

LabelingResult apply_policy(const ScoredCorpus& corpus, const CutoffPolicy& policy);

struct Histogram {
  double bin_width = 0.1;
  std::vector<std::size_t> counts;
  std::size_t total = 0;

  std::vector<double> proportions() const;
  double lower_edge(std::size_t bin) const;
  double upper_edge(std::size_t bin) const;
};

// Bin i covers [i*w, (i+1)*w); the last bin is closed at 1.0.
Histogram score_histogram(std::span<const double> scores, double bin_width = 0.1);

struct SummaryStats {
  double median = 0.0;
  double mean = 0.0;
  double std_dev = 0.0;  // population
};

SummaryStats summary_stats(std::span<const double> scores);

}  // namespace offlens
