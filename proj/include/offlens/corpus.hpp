#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace offlens {

enum class TaskId { A, B, C };

enum class Label { OFF, NOT, TIN, UNT, IND, GRP, OTH };

std::string_view to_string(TaskId task);
std::string_view to_string(Label label);

std::optional<TaskId> parse_task(std::string_view text);
std::optional<Label> parse_label(std::string_view text);

// Label set in canonical order: {OFF, NOT}, {TIN, UNT}, {IND, GRP, OTH}.
std::span<const Label> label_set(TaskId task);
bool task_has_label(TaskId task, Label label);
// Number of score columns a scored record carries: 1 for A and B, 3 for C.
std::size_t score_count(TaskId task);

// The task whose label set equals `labels` as a set, if any.
std::optional<TaskId> task_for_labels(std::span<const Label> labels);

struct ScoredTweet {
  std::string id;
  std::string text;
  std::vector<double> scores;
  std::optional<double> std_dev;

  bool operator==(const ScoredTweet&) const = default;
};

struct LabeledTweet {
  std::string id;
  std::string text;
  Label label;

  bool operator==(const LabeledTweet&) const = default;
};

// Only id and text; used for prediction inputs where any extra columns are
// ignored.
struct Document {
  std::string id;
  std::string text;
};

struct ScoredCorpus {
  TaskId task = TaskId::A;
  std::vector<ScoredTweet> records;

  bool operator==(const ScoredCorpus&) const = default;
};

struct LabeledCorpus {
  TaskId task = TaskId::A;
  std::vector<LabeledTweet> records;

  bool operator==(const LabeledCorpus&) const = default;
};

enum class ParseMode { kStrict, kLenient };

struct RejectedLine {
  std::size_t line_number;  // 1-based
  std::string reason;
};

// What a lenient load skipped. In strict mode `rejected` is always empty
// because the first bad line throws.
struct LoadReport {
  std::size_t physical_lines = 0;
  std::vector<RejectedLine> rejected;
};

ScoredTweet parse_scored_line(std::string_view line, TaskId task);
LabeledTweet parse_labeled_line(std::string_view line, TaskId task);

ScoredCorpus load_scored(const std::filesystem::path& path, TaskId task,
                         ParseMode mode = ParseMode::kStrict,
                         LoadReport* report = nullptr);
LabeledCorpus load_labeled(const std::filesystem::path& path, TaskId task,
                           ParseMode mode = ParseMode::kStrict,
                           LoadReport* report = nullptr);
// Reads the first two columns (id, text) of every line.
std::vector<Document> load_documents(const std::filesystem::path& path);

// Tabs, CR and LF inside text become single spaces; this is the only lossy
// step of the TSV format.
std::string normalize_field(std::string_view text);

void write_labeled(const LabeledCorpus& corpus, const std::filesystem::path& path);
void write_scored(const ScoredCorpus& corpus, const std::filesystem::path& path);

// Splits on '\t' without collapsing empty fields.
std::vector<std::string_view> split_tabs(std::string_view line);
// Shortest representation that parses back to the same double.
std::string format_real(double value);

}  // namespace offlens
