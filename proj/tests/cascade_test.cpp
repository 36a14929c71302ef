#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "offlens/cascade.hpp"
#include "offlens/error.hpp"
#include "test_util.hpp"

using namespace offlens;

namespace {

// One-feature model: records containing `trigger` go to label_order[0].
GlmModel trigger_model(std::vector<Label> labels, const std::string& trigger) {
  GlmModel m;
  m.label_order = labels;
  m.kind = labels.size() == 2 ? ModelKind::kBinary : ModelKind::kMultinomial;
  m.vocabulary = Vocabulary({trigger}, {1}, 1);
  m.params = Parameters(parameter_rows(m.kind, labels.size()), 1);
  if (m.kind == ModelKind::kBinary) {
    m.params.intercepts[0] = -5.0;
    m.params.weight(0, 0) = 10.0;
  } else {
    m.params.intercepts = {0.0, 1.0, 0.0};  // default GRP
    m.params.weight(0, 0) = 10.0;           // trigger -> IND
  }
  return m;
}

GlmModel constant_model(std::vector<Label> labels) {
  GlmModel m;
  m.label_order = labels;
  m.kind = labels.size() == 2 ? ModelKind::kBinary : ModelKind::kMultinomial;
  m.params = Parameters(parameter_rows(m.kind, labels.size()), 0);
  m.params.intercepts[0] = 5.0;
  return m;
}

std::vector<LabeledTweet> tweets(const std::vector<Label>& labels) {
  std::vector<LabeledTweet> out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out.push_back({"id" + std::to_string(i), "text number " + std::to_string(i), labels[i]});
  }
  return out;
}

}  // namespace

TEST_CASE("run_cascade forwards only OFF then TIN") {
  auto a = trigger_model({Label::OFF, Label::NOT}, "bad");
  auto b = trigger_model({Label::TIN, Label::UNT}, "you");
  auto c = trigger_model({Label::IND, Label::GRP, Label::OTH}, "him");
  std::vector<Document> docs{{"d0", "nice day"}, {"d1", "bad stuff"}, {"d2", "you are bad"},
                             {"d3", "you bad him"}};
  auto r = run_cascade(docs, {&a, &b, &c});
  REQUIRE(r.task_a.size() == 4);
  CHECK(r.task_a[0].label == Label::NOT);
  CHECK(r.task_b == std::vector<Prediction>{{"d1", Label::UNT}, {"d2", Label::TIN}, {"d3", Label::TIN}});
  CHECK(r.task_c == std::vector<Prediction>{{"d2", Label::GRP}, {"d3", Label::IND}});
  CHECK(r.entered_b == std::vector<bool>{false, true, true, true});
  CHECK(r.entered_c == std::vector<bool>{false, false, true, true});

  auto threaded = run_cascade(docs, {&a, &b, &c}, 3);
  CHECK(threaded.task_c == r.task_c);
}

TEST_CASE("run_cascade: all-forwarding models keep every record") {
  auto a = constant_model({Label::OFF, Label::NOT});
  auto b = constant_model({Label::TIN, Label::UNT});
  auto c = constant_model({Label::IND, Label::GRP, Label::OTH});
  std::vector<Document> docs;
  for (int i = 0; i < 25; ++i) docs.push_back({"d" + std::to_string(i), "anything"});
  auto r = run_cascade(docs, {&a, &b, &c});
  CHECK(r.task_c.size() == docs.size());
  CHECK(r.task_c.front().label == Label::IND);
}

TEST_CASE("run_cascade errors") {
  auto a = constant_model({Label::OFF, Label::NOT});
  auto b = constant_model({Label::TIN, Label::UNT});
  auto c = constant_model({Label::IND, Label::GRP, Label::OTH});
  std::vector<Document> docs{{"d", "x"}};
  try {
    run_cascade(docs, {&a, nullptr, &c});
    FAIL("expected MissingModel");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kMissingModel);
  }
  CHECK_THROWS_AS(run_cascade(docs, {&b, &a, &c}), Error);
  auto broken = a;
  broken.vocabulary = Vocabulary({"x", "y"}, {1, 1}, 1);
  try {
    run_cascade(docs, {&broken, &b, &c});
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kDimensionMismatch);
  }
}

TEST_CASE("parse_cell") {
  CHECK(parse_cell("OFF:NOT") == Cell{Label::OFF, Label::NOT});
  CHECK(parse_cell("TIN-UNT") == Cell{Label::TIN, Label::UNT});
  CHECK(to_string(Cell{Label::OFF, Label::NOT}) == "OFF:NOT");
  CHECK_THROWS_AS(parse_cell("OFF"), Error);
  CHECK_THROWS_AS(parse_cell("OFF:XYZ"), Error);
}

TEST_CASE("sample_cell: 540-member cell") {
  // Gold OFF / predicted NOT for 540 records, other cells filled around them.
  std::vector<Label> gold, pred;
  for (int i = 0; i < 540; ++i) { gold.push_back(Label::OFF); pred.push_back(Label::NOT); }
  for (int i = 0; i < 540; ++i) { gold.push_back(Label::OFF); pred.push_back(Label::OFF); }
  for (int i = 0; i < 100; ++i) { gold.push_back(Label::NOT); pred.push_back(Label::NOT); }
  std::mt19937_64 gen(1);
  std::vector<std::size_t> order(gold.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), gen);
  std::vector<Label> g2, p2;
  for (auto i : order) { g2.push_back(gold[i]); p2.push_back(pred[i]); }
  auto gold_t = tweets(g2);
  auto pred_t = tweets(p2);
  std::set<std::string> members;
  for (std::size_t i = 0; i < g2.size(); ++i)
    if (g2[i] == Label::OFF && p2[i] == Label::NOT) members.insert(gold_t[i].id);

  const Cell cell{Label::OFF, Label::NOT};
  auto report = sample_cell(gold_t, pred_t, cell, 10, 10, 42);
  CHECK(report.population == 540);
  REQUIRE(report.trials.size() == 10);
  for (const auto& trial : report.trials) {
    CHECK(trial.size() == 10);
    CHECK(std::set<std::string>(trial.begin(), trial.end()).size() == 10);
    for (const auto& id : trial) CHECK(members.count(id) == 1);
  }
  CHECK(sample_cell(gold_t, pred_t, cell, 10, 10, 42) == report);

  // Different seeds give different first trials (expected failures < 1 in 100).
  std::size_t same = 0;
  const auto base = sample_cell(gold_t, pred_t, cell, 10, 1, 0).trials[0];
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    same += sample_cell(gold_t, pred_t, cell, 10, 1, seed).trials[0] == base;
  }
  CHECK(same <= 1);
}

TEST_CASE("sample_cell: clamping and errors") {
  auto gold = tweets({Label::OFF, Label::OFF, Label::OFF, Label::NOT});
  auto pred = tweets({Label::NOT, Label::NOT, Label::NOT, Label::NOT});
  auto r = sample_cell(gold, pred, {Label::OFF, Label::NOT}, 10, 4, 3);
  for (const auto& t : r.trials) CHECK(t.size() == 3);
  CHECK(r.n_per_trial == 10);

  try {
    sample_cell(gold, pred, {Label::NOT, Label::OFF});
    FAIL("expected EmptyCell");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kEmptyCell);
  }
  auto shorter = tweets({Label::NOT});
  CHECK_THROWS_AS(sample_cell(gold, shorter, {Label::OFF, Label::NOT}), Error);
  auto renamed = pred;
  renamed[1].id = "other";
  CHECK_THROWS_AS(sample_cell(gold, renamed, {Label::OFF, Label::NOT}), Error);
}

TEST_CASE("redact") {
  std::vector<std::string> terms{"bitch", "fuck", "nigga"};
  Lexicon lex(terms);
  CHECK(redact("bitch", lex) == "b**ch");
  CHECK(redact("fuck", lex) == "f*ck");
  CHECK(redact("nigga", lex) == "n**ga");
  CHECK(redact("It's always that 1 Bitch", lex) == "It's always that 1 B**ch");
  CHECK(redact("ducks and fucking", lex) == "ducks and fucking");
  CHECK(redact("u dumb fuck!", lex) == "u dumb f*ck!");
  CHECK(redact("fuck", Lexicon{}) == "fuck");

  std::vector<std::string> short_terms{"ab"};
  try {
    Lexicon bad(short_terms);
    FAIL("expected TermTooShort");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kTermTooShort);
  }
}

TEST_CASE("property: redact keeps token count and lengths") {
  std::vector<std::string> terms{"bitch", "fuck", "nigga"};
  Lexicon lex(terms);
  std::vector<std::string> words{"bitch", "FUCK", "nigga", "hello", "fuckin", "#bitch", "a", "..."};
  std::mt19937_64 gen(6);
  for (int t = 0; t < 300; ++t) {
    std::string text;
    for (int k = 0; k < 8; ++k) {
      if (k) text += ' ';
      text += words[gen() % words.size()];
    }
    const auto out = redact(text, lex);
    CHECK(out.size() == text.size());
    CHECK(std::count(out.begin(), out.end(), ' ') == std::count(text.begin(), text.end(), ' '));
  }
}

TEST_CASE("review file round-trip") {
  offlens::testing::TempDir dir("review");
  auto gold = tweets({Label::OFF, Label::OFF, Label::NOT});
  gold[0].text = "what a bitch";
  auto pred = tweets({Label::NOT, Label::NOT, Label::NOT});
  auto report = sample_cell(gold, pred, {Label::OFF, Label::NOT}, 2, 1, 5);
  std::vector<std::string> terms{"bitch"};
  const auto path = dir / "review.tsv";
  write_sample_review(report, gold, Lexicon(terms), path);
  auto rows = read_sample_review(path);
  REQUIRE(rows.size() == 2);
  CHECK(rows == review_rows(report, gold, Lexicon(terms)));
  CHECK(rows[0].trial == 1);
  CHECK(rows[0].gold == "OFF");
  CHECK(rows[0].pred == "NOT");
  CHECK(rows[0].annotation.empty());
  const bool redacted = rows[0].text == "what a b**ch" || rows[1].text == "what a b**ch";
  CHECK(redacted);
  auto plain = review_rows(report, gold, Lexicon{});
  const bool raw = plain[0].text == "what a bitch" || plain[1].text == "what a bitch";
  CHECK(raw);

  std::vector<LabeledTweet> missing;
  CHECK_THROWS_AS(review_rows(report, missing, Lexicon{}), Error);
}
