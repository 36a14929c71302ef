#include "offlens/cascade.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <ostream>
#include <unordered_map>

#include "offlens/error.hpp"
#include "offlens/parallel.hpp"
#include "offlens/rng.hpp"

namespace offlens {
namespace {

void check_model(const GlmModel* model, TaskId task) {
  const std::string name = "task " + std::string(to_string(task)) + " model";
  if (model == nullptr) throw Error(ErrorKind::kMissingModel, name + " not provided");
  if (task_for_labels(model->label_order) != task) {
    throw Error(ErrorKind::kInvalidArgument, name + " has the wrong label set");
  }
  if (model->vocabulary.size() != model->dimension()) {
    throw Error(ErrorKind::kDimensionMismatch, name + " vocabulary does not match its weights");
  }
}

std::vector<Label> predict_subset(const GlmModel& model, std::span<const Document> documents,
                                  std::span<const std::size_t> subset, std::size_t threads) {
  std::vector<Label> out(subset.size(), model.label_order.front());
  parallel_for(subset.size(), threads, [&](std::size_t k) {
    const auto& doc = documents[subset[k]];
    out[k] = predict(model, featurize(doc.text, model.vocabulary, model.text_options));
  });
  return out;
}

// Word characters for redaction: ASCII letters and digits plus non-ASCII
// code points other than quotes, dashes, ellipsis and no-break space.
bool is_redaction_word(char32_t c) {
  if (c < 0x80) {
    return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z') || (c >= U'0' && c <= U'9');
  }
  switch (c) {
    case 0x00A0: case 0x2018: case 0x2019: case 0x201C: case 0x201D:
    case 0x2013: case 0x2014: case 0x2026:
      return false;
    default:
      return true;
  }
}

// Splits UTF-8 into code points (byte length of each); malformed bytes are
// single units.
std::vector<std::pair<char32_t, std::size_t>> code_points(std::string_view s) {
  std::vector<std::pair<char32_t, std::size_t>> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto lead = static_cast<unsigned char>(s[i]);
    std::size_t len = lead >= 0xF0 ? 4 : lead >= 0xE0 ? 3 : lead >= 0xC0 ? 2 : 1;
    if (i + len > s.size()) len = 1;
    char32_t cp = len == 1 ? lead : lead & (0x7F >> len);
    for (std::size_t k = 1; k < len; ++k) {
      const auto c = static_cast<unsigned char>(s[i + k]);
      if ((c & 0xC0) != 0x80) {
        len = 1;
        cp = lead;
        break;
      }
      cp = (cp << 6) | (c & 0x3F);
    }
    out.emplace_back(cp, len);
    i += len;
  }
  return out;
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) {
    if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
  }
  return out;
}

}  // namespace

CascadeResult run_cascade(std::span<const Document> documents, const CascadeModels& models,
                          std::size_t threads) {
  check_model(models.task_a, TaskId::A);
  check_model(models.task_b, TaskId::B);
  check_model(models.task_c, TaskId::C);

  CascadeResult result;
  const std::size_t n = documents.size();
  result.entered_b.assign(n, false);
  result.entered_c.assign(n, false);

  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  const auto a = predict_subset(*models.task_a, documents, all, threads);
  std::vector<std::size_t> to_b;
  for (std::size_t i = 0; i < n; ++i) {
    result.task_a.push_back({documents[i].id, a[i]});
    if (a[i] == Label::OFF) to_b.push_back(i);
  }

  const auto b = predict_subset(*models.task_b, documents, to_b, threads);
  std::vector<std::size_t> to_c;
  for (std::size_t k = 0; k < to_b.size(); ++k) {
    result.entered_b[to_b[k]] = true;
    result.task_b.push_back({documents[to_b[k]].id, b[k]});
    if (b[k] == Label::TIN) to_c.push_back(to_b[k]);
  }

  const auto c = predict_subset(*models.task_c, documents, to_c, threads);
  for (std::size_t k = 0; k < to_c.size(); ++k) {
    result.entered_c[to_c[k]] = true;
    result.task_c.push_back({documents[to_c[k]].id, c[k]});
  }
  return result;
}

Cell parse_cell(std::string_view text) {
  auto sep = text.find_first_of(":-");
  auto fail = [&] {
    throw Error(ErrorKind::kInvalidArgument, "cell must look like GOLD:PRED, got '" +
                                                 std::string(text) + "'");
  };
  if (sep == std::string_view::npos) fail();
  auto gold = parse_label(text.substr(0, sep));
  auto pred = parse_label(text.substr(sep + 1));
  if (!gold || !pred) fail();
  return Cell{*gold, *pred};
}

std::string to_string(const Cell& cell) {
  return std::string(to_string(cell.gold)) + ":" + std::string(to_string(cell.pred));
}

SampleReport sample_cell(std::span<const LabeledTweet> gold, std::span<const LabeledTweet> pred,
                         const Cell& cell, std::size_t n, std::size_t trials, std::uint64_t seed) {
  if (gold.size() != pred.size()) {
    throw Error(ErrorKind::kLengthMismatch, "gold has " + std::to_string(gold.size()) +
                                                " records, predictions have " +
                                                std::to_string(pred.size()));
  }
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i].id != pred[i].id) {
      throw Error(ErrorKind::kUnknownId, "record " + std::to_string(i + 1) + ": gold id '" +
                                             gold[i].id + "' vs predicted id '" + pred[i].id + "'");
    }
    if (gold[i].label == cell.gold && pred[i].label == cell.pred) members.push_back(i);
  }
  if (members.empty()) throw Error(ErrorKind::kEmptyCell, "cell " + to_string(cell) + " is empty");

  SampleReport report{cell, n, members.size(), seed, {}};
  SplitMix64 rng(seed);
  const std::size_t take = std::min(n, members.size());
  for (std::size_t t = 0; t < trials; ++t) {
    auto pool = members;
    std::vector<std::string> ids;
    ids.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
      const auto j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
      std::swap(pool[i], pool[j]);
      ids.push_back(gold[pool[i]].id);
    }
    report.trials.push_back(std::move(ids));
  }
  return report;
}

Lexicon::Lexicon(std::span<const std::string> terms) {
  for (const auto& term : terms) {
    if (code_points(term).size() < 3) {
      throw Error(ErrorKind::kTermTooShort, "lexicon term '" + term + "' has fewer than 3 characters");
    }
    terms_.insert(ascii_lower(term));
  }
}

bool Lexicon::contains(std::string_view word) const {
  return terms_.find(ascii_lower(word)) != terms_.end();
}

Lexicon load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open for reading: " + path.string());
  std::vector<std::string> terms;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    std::size_t start = line.find_first_not_of(' ');
    if (start == std::string::npos || line[start] == '#') continue;
    terms.push_back(line.substr(start));
  }
  return Lexicon(terms);
}

std::string redact(std::string_view text, const Lexicon& lexicon) {
  if (lexicon.empty()) return std::string(text);
  const auto cps = code_points(text);
  std::string out;
  out.reserve(text.size());
  std::size_t byte = 0;
  std::size_t i = 0;
  while (i < cps.size()) {
    if (!is_redaction_word(cps[i].first)) {
      out.append(text.substr(byte, cps[i].second));
      byte += cps[i].second;
      ++i;
      continue;
    }
    std::size_t j = i;
    std::size_t end = byte;
    while (j < cps.size() && is_redaction_word(cps[j].first)) end += cps[j++].second;
    const auto word = text.substr(byte, end - byte);
    const std::size_t len = j - i;
    if (len >= 3 && lexicon.contains(word)) {
      std::size_t b = byte;
      for (std::size_t k = i; k < j; ++k) {
        const bool keep = k == i || k + 2 >= j;
        if (keep) {
          out.append(text.substr(b, cps[k].second));
        } else {
          out.push_back('*');
        }
        b += cps[k].second;
      }
    } else {
      out.append(word);
    }
    byte = end;
    i = j;
  }
  return out;
}

std::vector<ReviewRow> review_rows(const SampleReport& report,
                                   std::span<const LabeledTweet> texts, const Lexicon& lexicon) {
  std::unordered_map<std::string_view, const LabeledTweet*> by_id;
  for (const auto& t : texts) by_id.emplace(t.id, &t);
  std::vector<ReviewRow> rows;
  for (std::size_t t = 0; t < report.trials.size(); ++t) {
    for (const auto& id : report.trials[t]) {
      auto it = by_id.find(id);
      if (it == by_id.end()) throw Error(ErrorKind::kUnknownId, "sampled id '" + id + "' has no text");
      rows.push_back({t + 1, id, std::string(to_string(report.cell.gold)),
                      std::string(to_string(report.cell.pred)),
                      normalize_field(redact(it->second->text, lexicon)), ""});
    }
  }
  return rows;
}

void write_review_rows(std::span<const ReviewRow> rows, std::ostream& out) {
  out << "trial\tid\tgold\tpred\ttext\tannotation\n";
  for (const auto& r : rows) {
    out << r.trial << '\t' << normalize_field(r.id) << '\t' << r.gold << '\t' << r.pred << '\t'
        << normalize_field(r.text) << '\t' << normalize_field(r.annotation) << '\n';
  }
}

void write_sample_review(const SampleReport& report, std::span<const LabeledTweet> texts,
                         const Lexicon& lexicon, const std::filesystem::path& path) {
  const auto rows = review_rows(report, texts, lexicon);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot open for writing: " + path.string());
  write_review_rows(rows, out);
  if (!out) throw Error(ErrorKind::kIo, "write failure: " + path.string());
}

std::vector<ReviewRow> read_sample_review(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open for reading: " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "trial\tid\tgold\tpred\ttext\tannotation") {
    throw Error(ErrorKind::kMalformedLine, "missing review header in " + path.string());
  }
  std::vector<ReviewRow> rows;
  while (std::getline(in, line)) {
    auto f = split_tabs(line);
    if (f.size() != 6) throw Error(ErrorKind::kMalformedLine, "review row needs 6 fields");
    rows.push_back({std::stoul(std::string(f[0])), std::string(f[1]), std::string(f[2]),
                    std::string(f[3]), std::string(f[4]), std::string(f[5])});
  }
  return rows;
}

}  // namespace offlens
