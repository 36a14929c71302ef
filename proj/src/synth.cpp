#include "offlens/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "offlens/error.hpp"
#include "offlens/rng.hpp"

namespace offlens {
namespace {

constexpr std::size_t kOffenseMarkers = 8;
constexpr std::size_t kTargetMarkersPerClass = 8;
constexpr std::size_t kMinLength = 6;
constexpr std::size_t kMaxLength = 18;

std::string numbered(const char* prefix, std::size_t i, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, width, i);
  return buf;
}

double round4(double v) { return std::round(v * 1e4) / 1e4; }

void insert_at_random(std::vector<std::string>& tokens, std::string token, SplitMix64& rng) {
  const auto pos = static_cast<std::ptrdiff_t>(rng.below(tokens.size() + 1));
  tokens.insert(tokens.begin() + pos, std::move(token));
}

}  // namespace

std::vector<SynthDoc> generate_synthetic(const SynthConfig& config) {
  if (!(config.marked >= 0.0 && config.marked <= 1.0) ||
      !(config.targeted >= 0.0 && config.targeted <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "marked and targeted fractions must lie in [0,1]");
  }
  if (config.vocab_size == 0) throw Error(ErrorKind::kInvalidArgument, "vocab_size must be positive");
  if (config.holdout > config.docs) throw Error(ErrorKind::kInvalidArgument, "holdout exceeds docs");

  SplitMix64 rng(config.seed);
  const auto n_marked =
      static_cast<std::size_t>(std::llround(config.marked * static_cast<double>(config.docs)));
  std::vector<std::size_t> order(config.docs);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = 0; i < n_marked; ++i) {
    std::swap(order[i], order[i + rng.below(config.docs - i)]);
  }
  std::vector<bool> marked(config.docs, false);
  for (std::size_t i = 0; i < n_marked; ++i) marked[order[i]] = true;

  static constexpr Label kTargets[] = {Label::IND, Label::GRP, Label::OTH};
  static constexpr const char* kTargetPrefix[] = {"indmk", "grpmk", "othmk"};

  std::vector<SynthDoc> docs;
  docs.reserve(config.docs);
  for (std::size_t d = 0; d < config.docs; ++d) {
    SynthDoc doc;
    doc.id = numbered("s", d + 1, 6);
    const std::size_t length = kMinLength + rng.below(kMaxLength - kMinLength + 1);
    std::vector<std::string> tokens;
    for (std::size_t t = 0; t < length; ++t) {
      // Squaring skews draws toward low indices, a rough Zipf shape.
      const double u = rng.unit();
      const auto w = static_cast<std::size_t>(u * u * static_cast<double>(config.vocab_size));
      tokens.push_back(numbered("w", w, 4));
    }
    if (marked[d]) {
      const std::size_t markers = 1 + rng.below(3);
      for (std::size_t m = 0; m < markers; ++m) {
        insert_at_random(tokens, numbered("offmk", rng.below(kOffenseMarkers), 2), rng);
      }
      const double density = static_cast<double>(markers) / static_cast<double>(tokens.size());
      doc.score_a = round4(0.8 + 0.2 * (1.0 - std::exp(-8.0 * density)));
      doc.gold_a = Label::OFF;
      if (rng.unit() < config.targeted) {
        const double u = rng.unit();
        const std::size_t cls = u < 0.6 ? 0 : u < 0.9 ? 1 : 2;
        insert_at_random(tokens,
                         numbered(kTargetPrefix[cls], rng.below(kTargetMarkersPerClass), 1), rng);
        doc.score_b = round4(0.02 + 0.15 * rng.unit());
        doc.gold_b = Label::TIN;
        std::vector<double> scores(3);
        for (std::size_t k = 0; k < 3; ++k) {
          scores[k] = round4(k == cls ? 0.8 + 0.19 * rng.unit() : 0.05 + 0.6 * rng.unit());
        }
        doc.scores_c = std::move(scores);
        doc.gold_c = kTargets[cls];
      } else {
        doc.score_b = round4(0.25 + 0.7 * rng.unit());
        doc.gold_b = Label::UNT;
      }
    } else {
      doc.score_a = round4(0.02 + 0.5 * rng.unit());
      doc.gold_a = Label::NOT;
    }
    std::string text = rng.below(3) == 0 ? "@USER " : "";
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      if (t) text += ' ';
      text += tokens[t];
    }
    if (rng.below(4) == 0) text += "!!!";
    doc.text = std::move(text);
    docs.push_back(std::move(doc));
  }
  return docs;
}

SynthSplit split_tasks(const std::vector<SynthDoc>& docs, std::size_t begin, std::size_t end) {
  SynthSplit s;
  s.scored_a.task = s.gold_a.task = TaskId::A;
  s.scored_b.task = s.gold_b.task = TaskId::B;
  s.scored_c.task = s.gold_c.task = TaskId::C;
  for (std::size_t i = begin; i < end; ++i) {
    const auto& d = docs[i];
    s.scored_a.records.push_back({d.id, d.text, {d.score_a}, std::nullopt});
    s.gold_a.records.push_back({d.id, d.text, d.gold_a});
    if (d.gold_b) {
      s.scored_b.records.push_back({d.id, d.text, {*d.score_b}, std::nullopt});
      s.gold_b.records.push_back({d.id, d.text, *d.gold_b});
    }
    if (d.gold_c) {
      s.scored_c.records.push_back({d.id, d.text, *d.scores_c, std::nullopt});
      s.gold_c.records.push_back({d.id, d.text, *d.gold_c});
    }
  }
  return s;
}

void write_synthetic(const SynthConfig& config, const std::filesystem::path& dir) {
  const auto docs = generate_synthetic(config);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + dir.string() + ": " + ec.message());
  const std::size_t cut = docs.size() - config.holdout;
  for (auto [name, begin, end] : {std::tuple{"train", std::size_t{0}, cut},
                                  std::tuple{"test", cut, docs.size()}}) {
    const auto s = split_tasks(docs, begin, end);
    const std::string split = name;
    write_scored(s.scored_a, dir / (split + "_a.scored.tsv"));
    write_scored(s.scored_b, dir / (split + "_b.scored.tsv"));
    write_scored(s.scored_c, dir / (split + "_c.scored.tsv"));
    write_labeled(s.gold_a, dir / (split + "_a.gold.tsv"));
    write_labeled(s.gold_b, dir / (split + "_b.gold.tsv"));
    write_labeled(s.gold_c, dir / (split + "_c.gold.tsv"));
  }
}

}  // namespace offlens
