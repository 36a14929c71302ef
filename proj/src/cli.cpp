#include "offlens/cli.hpp"

#include <CLI11.hpp>

#include <array>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <unordered_map>

#include "offlens/cascade.hpp"
#include "offlens/corpus.hpp"
#include "offlens/error.hpp"
#include "offlens/evaluation.hpp"
#include "offlens/glm.hpp"
#include "offlens/labeling.hpp"
#include "offlens/model_io.hpp"
#include "offlens/synth.hpp"

namespace offlens::cli {
namespace {

constexpr const char* kConfigEnv = "OFFLENS_CONFIG";

struct LabelArgs {
  std::string task;
  std::optional<double> cutoff;
  bool exclusive = false;
  std::string in, out;
  bool lenient = false;
};

struct DistArgs {
  std::string task = "A";
  std::string in;
  double bin_width = 0.1;
  bool lenient = false;
  bool stats = false;
};

struct TrainArgs {
  std::string task;
  std::string in, model;
  GlmConfig glm;
  std::size_t min_df = 2;
  bool counts = false;
  bool no_lowercase = false;
  bool inverse_weights = false;
  std::size_t threads = 1;
  bool lenient = false;
};

struct PredictArgs {
  std::string model, in, out;
  std::optional<double> threshold;
  std::size_t threads = 1;
};

struct EvaluateArgs {
  std::string gold, pred, labels, report;
};

struct AuditArgs {
  std::string counts, published;
  double tolerance = 0.001;
};

struct CascadeArgs {
  std::string test, model_a, model_b, model_c, out_dir;
  std::size_t threads = 1;
};

struct SampleArgs {
  std::string gold, pred, cell, lexicon, out;
  std::size_t n = 10, trials = 10;
  std::uint64_t seed = 0;
};

struct RedactArgs {
  std::string lexicon, in, out;
};

struct SynthArgs {
  SynthConfig config;
  std::string out_dir;
};

struct Args {
  LabelArgs label;
  DistArgs dist;
  TrainArgs train;
  PredictArgs predict;
  EvaluateArgs evaluate;
  AuditArgs audit;
  CascadeArgs cascade;
  SampleArgs sample;
  RedactArgs redact;
  SynthArgs synth;
  std::string config;
};

const CLI::Validator kTaskValidator = CLI::IsMember({"A", "B", "C"});

std::unique_ptr<CLI::App> build_app(Args& a) {
  auto app = std::make_unique<CLI::App>("Offensive-language pipeline: distant labeling, "
                                        "n-gram logistic regression, cascaded inference, "
                                        "evaluation and error analysis.",
                                        "offlens");
  app->require_subcommand(1);
  app->add_option("--config", a.config,
                  "key=value defaults file (also $OFFLENS_CONFIG); flags override it");

  auto* label = app->add_subcommand("label", "Turn scored records into labeled records by cutoff");
  label->add_option("--task", a.label.task, "Task A, B or C")->required()->check(kTaskValidator);
  label->add_option("--cutoff", a.label.cutoff, "Cutoff in [0,1] (default .8 for A/C, .2 for B)")
      ->check(CLI::Range(0.0, 1.0));
  label->add_flag("--exclusive", a.label.exclusive, "Compare with > instead of >=");
  label->add_option("--in", a.label.in, "Scored TSV")->required();
  label->add_option("--out", a.label.out, "Labeled TSV to write")->required();
  label->add_flag("--lenient", a.label.lenient, "Skip and count malformed lines");

  auto* dist = app->add_subcommand("dist", "Score distribution table in fixed-width bins");
  dist->add_option("--task", a.dist.task, "Task A, B or C")->check(kTaskValidator);
  dist->add_option("--in", a.dist.in, "Scored TSV")->required();
  dist->add_option("--bin-width", a.dist.bin_width, "Bin width; 1/width must be an integer");
  dist->add_flag("--stats", a.dist.stats, "Also print median, mean and population std");
  dist->add_flag("--lenient", a.dist.lenient, "Skip and count malformed lines");

  auto* train = app->add_subcommand("train", "Train a unigram+bigram logistic regression model");
  train->add_option("--task", a.train.task, "Task A, B or C")->required()->check(kTaskValidator);
  train->add_option("--in", a.train.in, "Labeled TSV")->required();
  train->add_option("--model", a.train.model, "Model file to write")->required();
  train->add_option("--l2", a.train.glm.l2_lambda, "L2 penalty on weights");
  train->add_option("--max-iters", a.train.glm.max_iters, "Gradient descent iterations");
  train->add_option("--tol", a.train.glm.tolerance, "Relative loss-decrease stopping tolerance");
  train->add_option("--lr", a.train.glm.learning_rate, "Initial step size");
  train->add_option("--step-growth", a.train.glm.step_growth,
                    "Step multiplier after an accepted step (1 = fixed)");
  train->add_option("--threshold", a.train.glm.decision_threshold,
                    "Binary decision threshold stored in the model");
  train->add_option("--seed", a.train.glm.seed, "Recorded seed (training is deterministic)");
  train->add_option("--min-df", a.train.min_df, "Minimum document frequency of an n-gram");
  train->add_flag("--counts", a.train.counts, "Use n-gram counts instead of presence");
  train->add_flag("--no-lowercase", a.train.no_lowercase, "Keep letter case");
  train->add_flag("--inverse-weights", a.train.inverse_weights,
                  "Weight classes by inverse frequency");
  train->add_option("--threads", a.train.threads, "Worker threads for featurization");
  train->add_flag("--lenient", a.train.lenient, "Skip and count malformed lines");

  auto* predict = app->add_subcommand("predict", "Label documents with a trained model");
  predict->add_option("--model", a.predict.model, "Model file")->required();
  predict->add_option("--in", a.predict.in, "TSV whose first two columns are id and text")
      ->required();
  predict->add_option("--out", a.predict.out, "Labeled TSV to write")->required();
  predict->add_option("--threshold", a.predict.threshold, "Override the binary threshold");
  predict->add_option("--threads", a.predict.threads, "Worker threads");

  auto* evaluate = app->add_subcommand("evaluate", "Confusion matrix and metrics");
  evaluate->add_option("--gold", a.evaluate.gold, "Gold labeled TSV")->required();
  evaluate->add_option("--pred", a.evaluate.pred, "Predicted labeled TSV, same order")->required();
  evaluate->add_option("--labels", a.evaluate.labels, "Label order, e.g. OFF,NOT")->required();
  evaluate->add_option("--report", a.evaluate.report, "Also write the report to this file");

  auto* audit = app->add_subcommand("audit", "Recompute a published table and list mismatches");
  audit->add_option("--counts", a.audit.counts, "Confusion counts file")->required();
  audit->add_option("--published", a.audit.published, "Published values file")->required();
  audit->add_option("--tolerance", a.audit.tolerance, "Allowed absolute difference");

  auto* cascade = app->add_subcommand("cascade", "Run A -> B -> C cascaded prediction");
  cascade->add_option("--test", a.cascade.test, "TSV whose first two columns are id and text")
      ->required();
  cascade->add_option("--model-a", a.cascade.model_a, "Task A model")->required();
  cascade->add_option("--model-b", a.cascade.model_b, "Task B model")->required();
  cascade->add_option("--model-c", a.cascade.model_c, "Task C model")->required();
  cascade->add_option("--out-dir", a.cascade.out_dir, "Directory for task_{a,b,c}.pred.tsv")
      ->required();
  cascade->add_option("--threads", a.cascade.threads, "Worker threads");

  auto* sample = app->add_subcommand("sample", "Seeded review samples from one confusion cell");
  sample->add_option("--gold", a.sample.gold, "Gold labeled TSV")->required();
  sample->add_option("--pred", a.sample.pred, "Predicted labeled TSV, same order")->required();
  sample->add_option("--cell", a.sample.cell, "GOLD:PRED, e.g. OFF:NOT")->required();
  sample->add_option("--n", a.sample.n, "Instances per trial");
  sample->add_option("--trials", a.sample.trials, "Number of trials");
  sample->add_option("--seed", a.sample.seed, "Seed of the sampling stream");
  sample->add_option("--lexicon", a.sample.lexicon, "Redaction lexicon for the text column");
  sample->add_option("--out", a.sample.out, "Review TSV (default stdout)");

  auto* redact = app->add_subcommand("redact", "Mask lexicon words line by line");
  redact->add_option("--lexicon", a.redact.lexicon, "One term per line")->required();
  redact->add_option("--in", a.redact.in, "Input text (default stdin)");
  redact->add_option("--out", a.redact.out, "Output text (default stdout)");

  auto* synth = app->add_subcommand("synth", "Generate a planted-lexicon synthetic corpus");
  synth->add_option("--docs", a.synth.config.docs, "Number of documents");
  synth->add_option("--marked", a.synth.config.marked, "Fraction of documents with markers")
      ->check(CLI::Range(0.0, 1.0));
  synth->add_option("--targeted", a.synth.config.targeted, "Fraction of marked documents targeted")
      ->check(CLI::Range(0.0, 1.0));
  synth->add_option("--seed", a.synth.config.seed, "Generator seed");
  synth->add_option("--holdout", a.synth.config.holdout, "Trailing documents put in test files");
  synth->add_option("--vocab-size", a.synth.config.vocab_size, "Background vocabulary size");
  synth->add_option("--out-dir", a.synth.out_dir, "Output directory")->required();

  return app;
}

TaskId task_of(const std::string& text) {
  auto t = parse_task(text);
  if (!t) throw Error(ErrorKind::kInvalidArgument, "unknown task '" + text + "'");
  return *t;
}

ParseMode mode_of(bool lenient) { return lenient ? ParseMode::kLenient : ParseMode::kStrict; }

void report_skipped(const LoadReport& report, std::ostream& err) {
  for (const auto& r : report.rejected) {
    err << "skipped line " << r.line_number << ": " << r.reason << '\n';
  }
}

std::string range_label(double lo, double hi) {
  auto fmt = [](double v) {
    std::ostringstream s;
    s << std::setprecision(6) << v;
    std::string text = s.str();
    if (text.rfind("0.", 0) == 0) text.erase(0, 1);
    if (text == "1") text = "1.0";
    return text;
  };
  return fmt(lo) + " - " + fmt(hi);
}

std::string fixed(double v, int places) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(places) << v;
  return s.str();
}

std::vector<Label> parse_label_list(const std::string& text) {
  std::vector<Label> labels;
  std::stringstream s(text);
  for (std::string item; std::getline(s, item, ',');) {
    auto l = parse_label(item);
    if (!l) throw Error(ErrorKind::kUnknownLabel, "unknown label '" + item + "'");
    labels.push_back(*l);
  }
  return labels;
}

void write_predictions(const std::vector<Document>& docs, std::span<const Prediction> preds,
                       const std::filesystem::path& path) {
  std::unordered_map<std::string_view, const Document*> by_id;
  for (const auto& d : docs) by_id.emplace(d.id, &d);
  LabeledCorpus out;
  for (const auto& p : preds) out.records.push_back({p.id, by_id.at(p.id)->text, p.label});
  write_labeled(out, path);
}

int cmd_label(const LabelArgs& a, std::ostream& out, std::ostream& err) {
  const auto task = task_of(a.task);
  auto policy = CutoffPolicy::defaults(task);
  if (a.cutoff) policy.cutoff = *a.cutoff;
  policy.inclusive = !a.exclusive;
  LoadReport load;
  const auto corpus = load_scored(a.in, task, mode_of(a.lenient), &load);
  report_skipped(load, err);
  const auto result = apply_policy(corpus, policy);
  write_labeled(result.corpus, a.out);
  for (Label l : label_set(task)) out << to_string(l) << '\t' << result.counts.at(l) << '\n';
  out << "excluded\t" << result.excluded << '\n';
  out << "skipped\t" << load.rejected.size() << '\n';
  return kExitOk;
}

int cmd_dist(const DistArgs& a, std::ostream& out, std::ostream& err) {
  const auto task = task_of(a.task);
  LoadReport load;
  const auto corpus = load_scored(a.in, task, mode_of(a.lenient), &load);
  report_skipped(load, err);
  const std::size_t columns = score_count(task);
  std::vector<std::vector<double>> scores(columns);
  for (const auto& r : corpus.records) {
    for (std::size_t k = 0; k < columns; ++k) scores[k].push_back(r.scores[k]);
  }
  std::vector<Histogram> hists;
  for (const auto& s : scores) hists.push_back(score_histogram(s, a.bin_width));

  out << "range";
  for (std::size_t k = 0; k < columns; ++k) {
    const std::string name =
        task == TaskId::C ? std::string(to_string(label_set(task)[k])) + "_" : "";
    out << '\t' << name << "percent\t" << name << "count";
  }
  out << '\n';
  const std::size_t bins = hists.front().counts.size();
  for (std::size_t b = 0; b < bins; ++b) {
    out << range_label(hists.front().lower_edge(b), hists.front().upper_edge(b));
    for (const auto& h : hists) out << '\t' << fixed(h.proportions()[b], 3) << '\t' << h.counts[b];
    out << '\n';
  }
  out << "total";
  for (const auto& h : hists) out << '\t' << fixed(h.total ? 1.0 : 0.0, 3) << '\t' << h.total;
  out << '\n';
  if (a.stats && !corpus.records.empty()) {
    for (std::size_t k = 0; k < columns; ++k) {
      const auto st = summary_stats(scores[k]);
      const std::string name =
          task == TaskId::C ? std::string(to_string(label_set(task)[k])) + "_" : "";
      out << name << "median\t" << fixed(st.median, 3) << '\n';
      out << name << "mean\t" << fixed(st.mean, 3) << '\n';
      out << name << "std\t" << fixed(st.std_dev, 3) << '\n';
    }
  }
  return kExitOk;
}

int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  const auto task = task_of(a.task);
  LoadReport load;
  const auto corpus = load_labeled(a.in, task, mode_of(a.lenient), &load);
  report_skipped(load, err);
  TextTrainOptions options;
  options.min_df = a.min_df;
  options.text.counts = a.counts;
  options.text.lowercase = !a.no_lowercase;
  options.inverse_class_weights = a.inverse_weights;
  options.threads = a.threads;
  const auto result = train_text_model(corpus, a.glm, options);
  if (result.warning) err << "warning: " << *result.warning << '\n';
  save_model(result.model, a.model);
  out << "records\t" << corpus.records.size() << '\n';
  out << "features\t" << result.model.dimension() << '\n';
  out << "iterations\t" << result.iterations << '\n';
  out << "converged\t" << (result.converged ? "yes" : "no") << '\n';
  if (!result.loss_history.empty()) {
    out << "final_loss\t" << fixed(result.loss_history.back(), 6) << '\n';
  }
  return kExitOk;
}

int cmd_predict(const PredictArgs& a, std::ostream& out, std::ostream&) {
  auto model = load_model(a.model);
  if (a.threshold) {
    if (!(*a.threshold > 0.0 && *a.threshold < 1.0)) {
      throw Error(ErrorKind::kInvalidArgument, "threshold must lie strictly inside (0,1)");
    }
    model.decision_threshold = *a.threshold;
  }
  const auto docs = load_documents(a.in);
  std::vector<std::string> texts;
  texts.reserve(docs.size());
  for (const auto& d : docs) texts.push_back(d.text);
  const auto labels = predict_texts(model, texts, a.threads);
  LabeledCorpus result;
  std::map<Label, std::size_t> counts;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    result.records.push_back({docs[i].id, docs[i].text, labels[i]});
    ++counts[labels[i]];
  }
  write_labeled(result, a.out);
  for (Label l : model.label_order) out << to_string(l) << '\t' << counts[l] << '\n';
  return kExitOk;
}

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out, std::ostream&) {
  const auto order = parse_label_list(a.labels);
  const auto task = task_for_labels(order);
  if (!task) throw Error(ErrorKind::kInvalidArgument, "--labels must be one task's label set");
  const auto gold = load_labeled(a.gold, *task);
  const auto pred = load_labeled(a.pred, *task);
  if (gold.records.size() != pred.records.size()) {
    throw Error(ErrorKind::kLengthMismatch, "gold has " + std::to_string(gold.records.size()) +
                                                " records, predictions have " +
                                                std::to_string(pred.records.size()));
  }
  std::vector<std::string> g, p, names;
  for (std::size_t i = 0; i < gold.records.size(); ++i) {
    if (gold.records[i].id != pred.records[i].id) {
      throw Error(ErrorKind::kUnknownId, "record " + std::to_string(i + 1) + ": gold id '" +
                                             gold.records[i].id + "' vs predicted id '" +
                                             pred.records[i].id + "'");
    }
    g.emplace_back(to_string(gold.records[i].label));
    p.emplace_back(to_string(pred.records[i].label));
  }
  for (Label l : order) names.emplace_back(to_string(l));
  const auto cm = build_confusion(g, p, names);
  std::ostringstream text;
  print_report(cm, metrics(cm), text);
  out << text.str();
  if (!a.report.empty()) {
    std::ofstream file(a.report, std::ios::binary | std::ios::trunc);
    if (!file) throw Error(ErrorKind::kIo, "cannot open for writing: " + a.report);
    file << text.str();
  }
  return kExitOk;
}

int cmd_audit(const AuditArgs& a, std::ostream& out, std::ostream&) {
  const auto cm = load_counts(a.counts);
  const auto published = load_published(a.published);
  const auto found = audit_table(cm, published, a.tolerance);
  print_discrepancies(found, out);
  return kExitOk;
}

int cmd_cascade(const CascadeArgs& a, std::ostream& out, std::ostream&) {
  const auto docs = load_documents(a.test);
  const auto model_a = load_model(a.model_a);
  const auto model_b = load_model(a.model_b);
  const auto model_c = load_model(a.model_c);
  const auto result = run_cascade(docs, {&model_a, &model_b, &model_c}, a.threads);
  std::filesystem::path dir(a.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + dir.string() + ": " + ec.message());
  write_predictions(docs, result.task_a, dir / "task_a.pred.tsv");
  write_predictions(docs, result.task_b, dir / "task_b.pred.tsv");
  write_predictions(docs, result.task_c, dir / "task_c.pred.tsv");
  out << "task_a\t" << result.task_a.size() << '\n';
  out << "task_b\t" << result.task_b.size() << '\n';
  out << "task_c\t" << result.task_c.size() << '\n';
  return kExitOk;
}

int cmd_sample(const SampleArgs& a, std::ostream& out, std::ostream&) {
  const auto cell = parse_cell(a.cell);
  std::array<Label, 2> pair{cell.gold, cell.pred};
  std::optional<TaskId> task;
  for (TaskId t : {TaskId::A, TaskId::B, TaskId::C}) {
    if (task_has_label(t, pair[0]) && task_has_label(t, pair[1])) task = t;
  }
  if (!task) throw Error(ErrorKind::kInvalidArgument, "cell labels belong to different tasks");
  const auto gold = load_labeled(a.gold, *task);
  const auto pred = load_labeled(a.pred, *task);
  const auto report = sample_cell(gold.records, pred.records, cell, a.n, a.trials, a.seed);
  const Lexicon lexicon = a.lexicon.empty() ? Lexicon() : load_lexicon(a.lexicon);
  if (a.out.empty()) {
    write_review_rows(review_rows(report, gold.records, lexicon), out);
  } else {
    write_sample_review(report, gold.records, lexicon, a.out);
    out << "cell\t" << to_string(cell) << "\npopulation\t" << report.population << "\ntrials\t"
        << report.trials.size() << '\n';
  }
  return kExitOk;
}

int cmd_redact(const RedactArgs& a, std::ostream& out, std::ostream&) {
  const auto lexicon = load_lexicon(a.lexicon);
  std::ifstream file_in;
  std::istream* in = &std::cin;
  if (!a.in.empty()) {
    file_in.open(a.in, std::ios::binary);
    if (!file_in) throw Error(ErrorKind::kIo, "cannot open for reading: " + a.in);
    in = &file_in;
  }
  std::ofstream file_out;
  std::ostream* dst = &out;
  if (!a.out.empty()) {
    file_out.open(a.out, std::ios::binary | std::ios::trunc);
    if (!file_out) throw Error(ErrorKind::kIo, "cannot open for writing: " + a.out);
    dst = &file_out;
  }
  for (std::string line; std::getline(*in, line);) *dst << redact(line, lexicon) << '\n';
  return kExitOk;
}

int cmd_synth(const SynthArgs& a, std::ostream& out, std::ostream&) {
  write_synthetic(a.config, a.out_dir);
  out << "docs\t" << a.config.docs << "\nholdout\t" << a.config.holdout << '\n';
  return kExitOk;
}

bool is_truthy(const std::string& v) { return v == "1" || v == "true" || v == "yes" || v == "on"; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot read config file " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

bool mentions_flag(std::span<const std::string> args, const std::string& flag) {
  for (const auto& arg : args) {
    if (arg == flag || arg.rfind(flag + "=", 0) == 0) return true;
  }
  return false;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> parse_config(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::istringstream in(text);
  std::size_t line_number = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_number;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::kMalformedLine,
                  "config line " + std::to_string(line_number) + " is not key=value");
    }
    entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return entries;
}

std::vector<std::string> subcommands() {
  Args a;
  auto app = build_app(a);
  std::vector<std::string> names;
  for (const auto* sub : app->get_subcommands({})) names.push_back(sub->get_name());
  return names;
}

std::vector<std::string> subcommand_flags(const std::string& name) {
  Args a;
  auto app = build_app(a);
  std::vector<std::string> flags;
  for (const auto* opt : app->get_subcommand(name)->get_options()) {
    for (const auto& l : opt->get_lnames()) {
      if (l != "help") flags.push_back("--" + l);
    }
  }
  return flags;
}

std::string subcommand_help(const std::string& name) {
  Args a;
  auto app = build_app(a);
  return app->get_subcommand(name)->help();
}

int run(std::span<const std::string> raw_args, std::ostream& out, std::ostream& err) {
  Args a;
  auto app = build_app(a);

  // --config is handled here, before CLI11 sees the arguments, so it may
  // appear anywhere on the line.
  std::vector<std::string> args;
  std::string config_path;
  for (std::size_t i = 0; i < raw_args.size(); ++i) {
    const auto& arg = raw_args[i];
    if (arg == "--config") {
      if (i + 1 >= raw_args.size()) {
        err << "--config requires a file argument\n" << app->help();
        return kExitUsage;
      }
      config_path = raw_args[++i];
    } else if (arg.rfind("--config=", 0) == 0) {
      config_path = arg.substr(9);
    } else {
      args.push_back(arg);
    }
  }
  if (config_path.empty()) {
    if (const char* env = std::getenv(kConfigEnv); env && *env) config_path = env;
  }

  CLI::App* selected = nullptr;
  for (auto* sub : app->get_subcommands({})) {
    if (!args.empty() && sub->get_name() == args.front()) selected = sub;
  }
  if (!selected && !args.empty() && args.front().rfind('-', 0) != 0) {
    err << "usage error: unknown subcommand '" << args.front() << "'\n\n" << app->help();
    return kExitUsage;
  }

  try {
    if (selected && !config_path.empty()) {
      std::vector<std::string> injected;
      for (const auto& [key, value] : parse_config(read_file(config_path))) {
        const std::string flag = "--" + key;
        const CLI::Option* opt = nullptr;
        for (const auto* o : selected->get_options()) {
          for (const auto& l : o->get_lnames()) {
            if (l == key) opt = o;
          }
        }
        if (!opt || key == "help" || mentions_flag(args, flag)) continue;
        if (opt->get_expected_min() == 0) {
          if (is_truthy(value)) injected.push_back(flag);
        } else {
          injected.push_back(flag);
          injected.push_back(value);
        }
      }
      args.insert(args.begin() + 1, injected.begin(), injected.end());
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  }

  try {
    // CLI11 expects arguments in reverse order.
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app->parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << (selected ? selected->help() : app->help());
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app->help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n\n" << (selected ? selected->help() : app->help());
    return kExitUsage;
  }

  for (auto* sub : app->get_subcommands()) selected = sub;
  if (selected == nullptr) {
    err << "usage error: a subcommand is required\n\n" << app->help();
    return kExitUsage;
  }
  try {
    const std::string name = selected->get_name();
    if (name == "label") return cmd_label(a.label, out, err);
    if (name == "dist") return cmd_dist(a.dist, out, err);
    if (name == "train") return cmd_train(a.train, out, err);
    if (name == "predict") return cmd_predict(a.predict, out, err);
    if (name == "evaluate") return cmd_evaluate(a.evaluate, out, err);
    if (name == "audit") return cmd_audit(a.audit, out, err);
    if (name == "cascade") return cmd_cascade(a.cascade, out, err);
    if (name == "sample") return cmd_sample(a.sample, out, err);
    if (name == "redact") return cmd_redact(a.redact, out, err);
    if (name == "synth") return cmd_synth(a.synth, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  }
  return kExitUsage;
}

}  // namespace offlens::cli
