#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace offlens {

// Predictions on rows, gold labels on columns: count(r, c) is the number of
// instances predicted labels[r] whose gold label is labels[c].
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::vector<std::string> labels);
  ConfusionMatrix(std::vector<std::string> labels, std::vector<std::vector<std::uint64_t>> counts);

  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }
  std::uint64_t count(std::size_t pred, std::size_t gold) const { return counts_[pred][gold]; }
  void add(std::size_t pred, std::size_t gold, std::uint64_t n = 1) { counts_[pred][gold] += n; }

  std::uint64_t row_total(std::size_t pred) const;
  std::uint64_t column_total(std::size_t gold) const;
  std::uint64_t trace() const;
  std::uint64_t total() const;
  std::optional<std::size_t> index_of(std::string_view label) const;

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::vector<std::string> labels_;
  std::vector<std::vector<std::uint64_t>> counts_;
};

ConfusionMatrix build_confusion(std::span<const std::string> gold,
                                std::span<const std::string> pred,
                                std::span<const std::string> labels);

struct ClassMetrics {
  std::string label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct MetricsReport {
  std::vector<ClassMetrics> per_class;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  double majority_baseline = 0.0;
};

// Undefined precision, recall or F1 (zero denominators) are reported as 0.
MetricsReport metrics(const ConfusionMatrix& cm);

// Values as printed in a published table. Any subset may be present.
struct PublishedValue {
  std::string label;   // "*" for whole-table metrics
  std::string metric;  // precision | recall | f1 | accuracy | majority | macro_f1
  double value = 0.0;
};

struct Discrepancy {
  std::string label;
  std::string metric;
  double published = 0.0;
  double computed = 0.0;
};

std::vector<Discrepancy> audit_table(const ConfusionMatrix& cm,
                                     std::span<const PublishedValue> published,
                                     double tolerance = 0.001);

// Counts file: a header "labels\t<gold labels...>" then one row per predicted
// label "<label>\t<counts...>" in the same order. '#' lines are comments.
ConfusionMatrix read_counts(std::istream& in);
ConfusionMatrix load_counts(const std::filesystem::path& path);
void write_counts(const ConfusionMatrix& cm, std::ostream& out);

// Published file: "<label>\t<metric>\t<value>" lines; '#' lines are comments.
std::vector<PublishedValue> read_published(std::istream& in);
std::vector<PublishedValue> load_published(const std::filesystem::path& path);

// Matrix in prediction-row/gold-column orientation with marginals, followed
// by P/R/F1 to 3 decimals, accuracy and majority to 3, macro-F1 to 5.
void print_report(const ConfusionMatrix& cm, const MetricsReport& report, std::ostream& out);
void print_discrepancies(std::span<const Discrepancy> found, std::ostream& out);

}  // namespace offlens
