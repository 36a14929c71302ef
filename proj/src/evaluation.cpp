#include "offlens/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "offlens/corpus.hpp"
#include "offlens/error.hpp"

namespace offlens {
namespace {

double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

std::string fixed(double v, int places) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(places) << v;
  return s.str();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool skip_line(std::string_view line) {
  line = trim(line);
  return line.empty() || line.front() == '#';
}

}  // namespace

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> labels)
    : labels_(std::move(labels)),
      counts_(labels_.size(), std::vector<std::uint64_t>(labels_.size(), 0)) {
  auto sorted = labels_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorKind::kInvalidArgument, "duplicate label in label set");
  }
}

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> labels,
                                 std::vector<std::vector<std::uint64_t>> counts)
    : ConfusionMatrix(std::move(labels)) {
  if (counts.size() != labels_.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "count rows differ from label count");
  }
  for (const auto& row : counts) {
    if (row.size() != labels_.size()) {
      throw Error(ErrorKind::kDimensionMismatch, "count columns differ from label count");
    }
  }
  counts_ = std::move(counts);
}

std::uint64_t ConfusionMatrix::row_total(std::size_t pred) const {
  std::uint64_t s = 0;
  for (auto v : counts_[pred]) s += v;
  return s;
}

std::uint64_t ConfusionMatrix::column_total(std::size_t gold) const {
  std::uint64_t s = 0;
  for (const auto& row : counts_) s += row[gold];
  return s;
}

std::uint64_t ConfusionMatrix::trace() const {
  std::uint64_t s = 0;
  for (std::size_t k = 0; k < counts_.size(); ++k) s += counts_[k][k];
  return s;
}

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t s = 0;
  for (std::size_t r = 0; r < counts_.size(); ++r) s += row_total(r);
  return s;
}

std::optional<std::size_t> ConfusionMatrix::index_of(std::string_view label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels_.begin());
}

ConfusionMatrix build_confusion(std::span<const std::string> gold,
                                std::span<const std::string> pred,
                                std::span<const std::string> labels) {
  if (gold.size() != pred.size()) {
    throw Error(ErrorKind::kLengthMismatch, "gold has " + std::to_string(gold.size()) +
                                                " labels, predictions have " +
                                                std::to_string(pred.size()));
  }
  ConfusionMatrix cm(std::vector<std::string>(labels.begin(), labels.end()));
  for (std::size_t i = 0; i < gold.size(); ++i) {
    auto g = cm.index_of(gold[i]);
    auto p = cm.index_of(pred[i]);
    if (!g) throw Error(ErrorKind::kUnknownLabel, "gold label '" + gold[i] + "'");
    if (!p) throw Error(ErrorKind::kUnknownLabel, "predicted label '" + pred[i] + "'");
    cm.add(*p, *g);
  }
  return cm;
}

MetricsReport metrics(const ConfusionMatrix& cm) {
  const auto total = cm.total();
  if (total == 0) throw Error(ErrorKind::kEmptyMatrix, "confusion matrix has no instances");
  MetricsReport report;
  double f1_sum = 0.0;
  std::uint64_t largest_column = 0;
  for (std::size_t k = 0; k < cm.size(); ++k) {
    const auto tp = cm.count(k, k);
    const auto row = cm.row_total(k);
    const auto col = cm.column_total(k);
    largest_column = std::max(largest_column, col);
    // 2PR/(P+R) reduces to 2tp/(row+col); it is 0 exactly when P+R is 0.
    ClassMetrics m{cm.labels()[k], ratio(tp, row), ratio(tp, col), ratio(2 * tp, row + col)};
    f1_sum += m.f1;
    report.per_class.push_back(std::move(m));
  }
  report.accuracy = ratio(cm.trace(), total);
  report.majority_baseline = ratio(largest_column, total);
  report.macro_f1 = cm.size() == 0 ? 0.0 : f1_sum / static_cast<double>(cm.size());
  return report;
}

std::vector<Discrepancy> audit_table(const ConfusionMatrix& cm,
                                     std::span<const PublishedValue> published, double tolerance) {
  const auto report = metrics(cm);
  std::vector<Discrepancy> found;
  for (const auto& pv : published) {
    double computed = 0.0;
    if (pv.label == "*") {
      if (pv.metric == "accuracy") {
        computed = report.accuracy;
      } else if (pv.metric == "majority") {
        computed = report.majority_baseline;
      } else if (pv.metric == "macro_f1") {
        computed = report.macro_f1;
      } else {
        throw Error(ErrorKind::kInvalidArgument, "unknown table metric '" + pv.metric + "'");
      }
    } else {
      auto k = cm.index_of(pv.label);
      if (!k) throw Error(ErrorKind::kUnknownLabel, "published label '" + pv.label + "'");
      const auto& m = report.per_class[*k];
      if (pv.metric == "precision") {
        computed = m.precision;
      } else if (pv.metric == "recall") {
        computed = m.recall;
      } else if (pv.metric == "f1") {
        computed = m.f1;
      } else {
        throw Error(ErrorKind::kInvalidArgument, "unknown class metric '" + pv.metric + "'");
      }
    }
    if (std::abs(pv.value - computed) > tolerance) {
      found.push_back({pv.label, pv.metric, pv.value, computed});
    }
  }
  return found;
}

ConfusionMatrix read_counts(std::istream& in) {
  std::string line;
  std::vector<std::string> labels;
  std::vector<std::vector<std::uint64_t>> rows;
  std::vector<std::string> row_labels;
  while (std::getline(in, line)) {
    if (skip_line(line)) continue;
    auto fields = split_tabs(trim(line));
    if (labels.empty()) {
      if (fields.size() < 2 || fields[0] != "labels") {
        throw Error(ErrorKind::kMalformedLine, "counts file must start with a 'labels' header");
      }
      for (std::size_t i = 1; i < fields.size(); ++i) labels.emplace_back(fields[i]);
      continue;
    }
    if (fields.size() != labels.size() + 1) {
      throw Error(ErrorKind::kMalformedLine, "count row has wrong width: '" + line + "'");
    }
    row_labels.emplace_back(fields[0]);
    std::vector<std::uint64_t> row;
    for (std::size_t i = 1; i < fields.size(); ++i) {
      std::uint64_t v = 0;
      auto f = fields[i];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size()) {
        throw Error(ErrorKind::kMalformedLine, "bad count '" + std::string(f) + "'");
      }
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  if (labels.empty()) throw Error(ErrorKind::kMalformedLine, "counts file has no header");
  if (row_labels != labels) {
    throw Error(ErrorKind::kMalformedLine, "row labels must repeat the header labels in order");
  }
  return ConfusionMatrix(std::move(labels), std::move(rows));
}

ConfusionMatrix load_counts(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open for reading: " + path.string());
  return read_counts(in);
}

void write_counts(const ConfusionMatrix& cm, std::ostream& out) {
  out << "labels";
  for (const auto& l : cm.labels()) out << '\t' << l;
  out << '\n';
  for (std::size_t r = 0; r < cm.size(); ++r) {
    out << cm.labels()[r];
    for (std::size_t c = 0; c < cm.size(); ++c) out << '\t' << cm.count(r, c);
    out << '\n';
  }
}

std::vector<PublishedValue> read_published(std::istream& in) {
  std::vector<PublishedValue> out;
  std::string line;
  while (std::getline(in, line)) {
    if (skip_line(line)) continue;
    auto fields = split_tabs(trim(line));
    if (fields.size() != 3) {
      throw Error(ErrorKind::kMalformedLine, "published line needs 3 fields: '" + line + "'");
    }
    double v = 0.0;
    std::string text(fields[2]);
    // Tables print values like ".896".
    if (!text.empty() && text.front() == '.') text.insert(text.begin(), '0');
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw Error(ErrorKind::kMalformedLine, "bad value '" + std::string(fields[2]) + "'");
    }
    out.push_back({std::string(fields[0]), std::string(fields[1]), v});
  }
  return out;
}

std::vector<PublishedValue> load_published(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open for reading: " + path.string());
  return read_published(in);
}

void print_report(const ConfusionMatrix& cm, const MetricsReport& report, std::ostream& out) {
  out << "pred\\gold";
  for (const auto& l : cm.labels()) out << '\t' << l;
  out << "\ttotal\n";
  for (std::size_t r = 0; r < cm.size(); ++r) {
    out << cm.labels()[r];
    for (std::size_t c = 0; c < cm.size(); ++c) out << '\t' << cm.count(r, c);
    out << '\t' << cm.row_total(r) << '\n';
  }
  out << "total";
  for (std::size_t c = 0; c < cm.size(); ++c) out << '\t' << cm.column_total(c);
  out << '\t' << cm.total() << "\n\n";
  out << "label\tP\tR\tF1\n";
  for (const auto& m : report.per_class) {
    out << m.label << '\t' << fixed(m.precision, 3) << '\t' << fixed(m.recall, 3) << '\t'
        << fixed(m.f1, 3) << '\n';
  }
  out << "\naccuracy\t" << fixed(report.accuracy, 3) << '\n';
  out << "majority\t" << fixed(report.majority_baseline, 3) << '\n';
  out << "macro_f1\t" << fixed(report.macro_f1, 5) << '\n';
}

void print_discrepancies(std::span<const Discrepancy> found, std::ostream& out) {
  if (found.empty()) {
    out << "no discrepancies\n";
    return;
  }
  out << "label\tmetric\tpublished\tcomputed\n";
  for (const auto& d : found) {
    const int places = d.metric == "macro_f1" ? 5 : 3;
    out << d.label << '\t' << d.metric << '\t' << fixed(d.published, places) << '\t'
        << fixed(d.computed, places) << '\n';
  }
}

}  // namespace offlens
