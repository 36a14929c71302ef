#include "offlens/labeling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "offlens/error.hpp"

namespace offlens {
namespace {

void check_score(double score) {
  if (!(score >= 0.0 && score <= 1.0)) {
    throw Error(ErrorKind::kScoreOutOfRange, "score " + format_real(score) + " outside [0,1]");
  }
}

bool on_high_side(double score, const CutoffPolicy& policy) {
  return policy.inclusive ? score >= policy.cutoff : score > policy.cutoff;
}

void check_task(const CutoffPolicy& policy, TaskId expected) {
  if (policy.task != expected) {
    throw Error(ErrorKind::kInvalidArgument,
                "policy is for task " + std::string(to_string(policy.task)) + ", expected " +
                    std::string(to_string(expected)));
  }
}

}  // namespace

CutoffPolicy CutoffPolicy::defaults(TaskId task) {
  return CutoffPolicy{task, task == TaskId::B ? 0.2 : 0.8, true};
}

void CutoffPolicy::validate() const {
  if (!(cutoff >= 0.0 && cutoff <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "cutoff " + format_real(cutoff) + " outside [0,1]");
  }
}

Label label_task_a(double score, const CutoffPolicy& policy) {
  check_task(policy, TaskId::A);
  check_score(score);
  return on_high_side(score, policy) ? Label::OFF : Label::NOT;
}

Label label_task_b(double score, const CutoffPolicy& policy) {
  check_task(policy, TaskId::B);
  check_score(score);
  return on_high_side(score, policy) ? Label::UNT : Label::TIN;
}

std::optional<Label> label_task_c(std::span<const double, 3> scores, const CutoffPolicy& policy) {
  check_task(policy, TaskId::C);
  for (double s : scores) check_score(s);
  constexpr std::array<Label, 3> order{Label::IND, Label::GRP, Label::OTH};
  std::optional<std::size_t> best;
  for (std::size_t k = 0; k < 3; ++k) {
    if (!on_high_side(scores[k], policy)) continue;
    // Strict > keeps the earlier class on ties.
    if (!best || scores[k] > scores[*best]) best = k;
  }
  if (!best) return std::nullopt;
  return order[*best];
}

LabelingResult apply_policy(const ScoredCorpus& corpus, const CutoffPolicy& policy) {
  policy.validate();
  if (corpus.task != policy.task) {
    throw Error(ErrorKind::kInvalidArgument, "corpus task " +
                                                 std::string(to_string(corpus.task)) +
                                                 " does not match policy task " +
                                                 std::string(to_string(policy.task)));
  }
  LabelingResult result;
  result.corpus.task = corpus.task;
  for (Label l : label_set(corpus.task)) result.counts[l] = 0;
  result.corpus.records.reserve(corpus.records.size());
  for (const auto& r : corpus.records) {
    if (r.scores.size() != score_count(corpus.task)) {
      throw Error(ErrorKind::kMalformedLine, "record '" + r.id + "' has wrong score count");
    }
    std::optional<Label> label;
    switch (corpus.task) {
      case TaskId::A: label = label_task_a(r.scores[0], policy); break;
      case TaskId::B: label = label_task_b(r.scores[0], policy); break;
      case TaskId::C:
        label = label_task_c(std::span<const double, 3>(r.scores.data(), 3), policy);
        break;
    }
    if (!label) {
      ++result.excluded;
      continue;
    }
    ++result.counts[*label];
    result.corpus.records.push_back({r.id, r.text, *label});
  }
  return result;
}

std::vector<double> Histogram::proportions() const {
  std::vector<double> p(counts.size(), 0.0);
  if (total == 0) return p;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    p[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
  }
  return p;
}

double Histogram::lower_edge(std::size_t bin) const {
  return static_cast<double>(bin) / static_cast<double>(counts.size());
}

double Histogram::upper_edge(std::size_t bin) const {
  return static_cast<double>(bin + 1) / static_cast<double>(counts.size());
}

Histogram score_histogram(std::span<const double> scores, double bin_width) {
  if (!(bin_width > 0.0 && bin_width <= 1.0)) {
    throw Error(ErrorKind::kBadBinWidth, "bin width " + format_real(bin_width));
  }
  const double inverse = 1.0 / bin_width;
  const double rounded = std::round(inverse);
  if (std::abs(inverse - rounded) > 1e-9 * rounded) {
    throw Error(ErrorKind::kBadBinWidth,
                "1/bin_width is not an integer for width " + format_real(bin_width));
  }
  const auto bins = static_cast<std::size_t>(rounded);
  Histogram h{bin_width, std::vector<std::size_t>(bins, 0), scores.size()};
  for (double s : scores) {
    check_score(s);
    // Multiplying by the integer bin count keeps decimal edges such as 0.3
    // in their own bin, where dividing by 0.1 would not.
    auto bin = static_cast<std::size_t>(std::floor(s * static_cast<double>(bins)));
    ++h.counts[std::min(bin, bins - 1)];
  }
  return h;
}

SummaryStats summary_stats(std::span<const double> scores) {
  if (scores.empty()) throw Error(ErrorKind::kEmptyInput, "summary of empty sequence");
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  SummaryStats stats;
  stats.median = n % 2 == 1 ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
  stats.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double s : sorted) ss += (s - stats.mean) * (s - stats.mean);
  stats.std_dev = std::sqrt(ss / static_cast<double>(n));
  return stats;
}

}  // namespace offlens
