#include "offlens/corpus.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include "offlens/error.hpp"

namespace offlens {
namespace {

constexpr std::array<Label, 2> kTaskALabels{Label::OFF, Label::NOT};
constexpr std::array<Label, 2> kTaskBLabels{Label::TIN, Label::UNT};
constexpr std::array<Label, 3> kTaskCLabels{Label::IND, Label::GRP, Label::OTH};

bool is_blank(std::string_view text) {
  return std::all_of(text.begin(), text.end(), [](unsigned char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
  });
}

double parse_score(std::string_view field) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || field.empty()) {
    throw Error(ErrorKind::kMalformedLine,
                "not a decimal number: '" + std::string(field) + "'");
  }
  if (!std::isfinite(value) || value < 0.0 || value > 1.0) {
    throw Error(ErrorKind::kScoreOutOfRange,
                "score " + std::string(field) + " outside [0,1]");
  }
  return value;
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot open for writing: " + path.string());
  return out;
}

std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open for reading: " + path.string());
  return in;
}

// Shared line loop for scored and labeled files.
template <typename Record, typename ParseFn>
std::vector<Record> load_records(const std::filesystem::path& path, ParseMode mode,
                                 LoadReport* report, ParseFn parse) {
  auto in = open_for_read(path);
  std::vector<Record> records;
  std::unordered_set<std::string> seen;
  LoadReport local;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    try {
      Record record = parse(strip_cr(line));
      if (!seen.insert(record.id).second) {
        throw Error(ErrorKind::kDuplicateId, "duplicate id '" + record.id + "'");
      }
      records.push_back(std::move(record));
    } catch (const Error& e) {
      if (mode == ParseMode::kStrict) {
        throw Error(e.kind(), path.string() + ":" + std::to_string(line_number) + ": " +
                                  e.what());
      }
      local.rejected.push_back({line_number, e.what()});
    }
  }
  if (in.bad()) throw Error(ErrorKind::kIo, "read failure: " + path.string());
  local.physical_lines = line_number;
  if (report) *report = std::move(local);
  return records;
}

}  // namespace

std::string_view to_string(TaskId task) {
  switch (task) {
    case TaskId::A: return "A";
    case TaskId::B: return "B";
    case TaskId::C: return "C";
  }
  return "?";
}

std::string_view to_string(Label label) {
  switch (label) {
    case Label::OFF: return "OFF";
    case Label::NOT: return "NOT";
    case Label::TIN: return "TIN";
    case Label::UNT: return "UNT";
    case Label::IND: return "IND";
    case Label::GRP: return "GRP";
    case Label::OTH: return "OTH";
  }
  return "?";
}

std::optional<TaskId> parse_task(std::string_view text) {
  if (text == "A" || text == "a") return TaskId::A;
  if (text == "B" || text == "b") return TaskId::B;
  if (text == "C" || text == "c") return TaskId::C;
  return std::nullopt;
}

std::optional<Label> parse_label(std::string_view text) {
  for (Label label : {Label::OFF, Label::NOT, Label::TIN, Label::UNT, Label::IND,
                      Label::GRP, Label::OTH}) {
    if (to_string(label) == text) return label;
  }
  return std::nullopt;
}

std::span<const Label> label_set(TaskId task) {
  switch (task) {
    case TaskId::A: return kTaskALabels;
    case TaskId::B: return kTaskBLabels;
    case TaskId::C: return kTaskCLabels;
  }
  return {};
}

bool task_has_label(TaskId task, Label label) {
  auto labels = label_set(task);
  return std::find(labels.begin(), labels.end(), label) != labels.end();
}

std::size_t score_count(TaskId task) { return task == TaskId::C ? 3 : 1; }

std::optional<TaskId> task_for_labels(std::span<const Label> labels) {
  for (TaskId task : {TaskId::A, TaskId::B, TaskId::C}) {
    auto set = label_set(task);
    if (set.size() != labels.size()) continue;
    bool all = std::all_of(labels.begin(), labels.end(),
                           [&](Label l) { return task_has_label(task, l); });
    std::vector<Label> sorted(labels.begin(), labels.end());
    std::sort(sorted.begin(), sorted.end());
    if (all && std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end()) return task;
  }
  return std::nullopt;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find('\t', start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string format_real(double value) {
  std::array<char, 64> buffer{};
  auto [ptr, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
  return std::string(buffer.data(), ptr);
}

ScoredTweet parse_scored_line(std::string_view line, TaskId task) {
  auto fields = split_tabs(line);
  const std::size_t n_scores = score_count(task);
  const bool has_std = task != TaskId::C && fields.size() == 2 + n_scores + 1;
  if (fields.size() != 2 + n_scores && !has_std) {
    throw Error(ErrorKind::kMalformedLine,
                "expected " + std::to_string(2 + n_scores) + " fields for task " +
                    std::string(to_string(task)) + ", got " + std::to_string(fields.size()));
  }
  if (fields[0].empty()) throw Error(ErrorKind::kMalformedLine, "empty id");
  if (is_blank(fields[1])) throw Error(ErrorKind::kEmptyText, "empty text for id '" +
                                                                  std::string(fields[0]) + "'");
  ScoredTweet tweet;
  tweet.id = std::string(fields[0]);
  tweet.text = std::string(fields[1]);
  for (std::size_t i = 0; i < n_scores; ++i) tweet.scores.push_back(parse_score(fields[2 + i]));
  if (has_std) {
    double value = 0.0;
    auto f = fields.back();
    auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
    if (ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(value) || value < 0.0) {
      throw Error(ErrorKind::kMalformedLine, "bad std field '" + std::string(f) + "'");
    }
    tweet.std_dev = value;
  }
  return tweet;
}

LabeledTweet parse_labeled_line(std::string_view line, TaskId task) {
  auto fields = split_tabs(line);
  if (fields.size() != 3) {
    throw Error(ErrorKind::kMalformedLine,
                "expected 3 fields, got " + std::to_string(fields.size()));
  }
  if (fields[0].empty()) throw Error(ErrorKind::kMalformedLine, "empty id");
  if (is_blank(fields[1])) throw Error(ErrorKind::kEmptyText, "empty text for id '" +
                                                                  std::string(fields[0]) + "'");
  auto label = parse_label(fields[2]);
  if (!label || !task_has_label(task, *label)) {
    throw Error(ErrorKind::kUnknownLabel, "label '" + std::string(fields[2]) +
                                              "' not in task " + std::string(to_string(task)));
  }
  return LabeledTweet{std::string(fields[0]), std::string(fields[1]), *label};
}

ScoredCorpus load_scored(const std::filesystem::path& path, TaskId task, ParseMode mode,
                         LoadReport* report) {
  ScoredCorpus corpus{task, {}};
  corpus.records = load_records<ScoredTweet>(
      path, mode, report, [task](std::string_view line) { return parse_scored_line(line, task); });
  return corpus;
}

LabeledCorpus load_labeled(const std::filesystem::path& path, TaskId task, ParseMode mode,
                           LoadReport* report) {
  LabeledCorpus corpus{task, {}};
  corpus.records = load_records<LabeledTweet>(
      path, mode, report, [task](std::string_view line) { return parse_labeled_line(line, task); });
  return corpus;
}

std::vector<Document> load_documents(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  std::vector<Document> docs;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    auto fields = split_tabs(strip_cr(line));
    auto where = path.string() + ":" + std::to_string(line_number) + ": ";
    if (fields.size() < 2 || fields[0].empty()) {
      throw Error(ErrorKind::kMalformedLine, where + "expected at least id and text");
    }
    if (is_blank(fields[1])) throw Error(ErrorKind::kEmptyText, where + "empty text");
    if (!seen.emplace(fields[0]).second) {
      throw Error(ErrorKind::kDuplicateId, where + "duplicate id '" + std::string(fields[0]) + "'");
    }
    docs.push_back({std::string(fields[0]), std::string(fields[1])});
  }
  return docs;
}

std::string normalize_field(std::string_view text) {
  std::string out(text);
  std::replace_if(out.begin(), out.end(),
                  [](char c) { return c == '\t' || c == '\n' || c == '\r'; }, ' ');
  return out;
}

void write_labeled(const LabeledCorpus& corpus, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  for (const auto& r : corpus.records) {
    out << normalize_field(r.id) << '\t' << normalize_field(r.text) << '\t' << to_string(r.label)
        << '\n';
  }
  if (!out) throw Error(ErrorKind::kIo, "write failure: " + path.string());
}

void write_scored(const ScoredCorpus& corpus, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  for (const auto& r : corpus.records) {
    out << normalize_field(r.id) << '\t' << normalize_field(r.text);
    for (double s : r.scores) out << '\t' << format_real(s);
    if (r.std_dev && corpus.task != TaskId::C) out << '\t' << format_real(*r.std_dev);
    out << '\n';
  }
  if (!out) throw Error(ErrorKind::kIo, "write failure: " + path.string());
}

}  // namespace offlens
