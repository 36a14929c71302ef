#include "offlens/model_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "offlens/error.hpp"

namespace offlens {
namespace {

constexpr std::string_view kMagic = "offlens-model 1";

[[noreturn]] void format_error(const std::string& what) {
  throw Error(ErrorKind::kModelFormat, what);
}

double parse_real(std::string_view text) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    format_error("bad real '" + std::string(text) + "'");
  }
  return v;
}

std::size_t parse_size(std::string_view text) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    format_error("bad integer '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string> words(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

// Reads "key v1 v2 ..." and returns the values.
std::vector<std::string> expect_line(std::istream& in, std::string_view key) {
  std::string line;
  if (!std::getline(in, line)) format_error("missing '" + std::string(key) + "' line");
  auto w = words(line);
  if (w.empty() || w[0] != key) format_error("expected '" + std::string(key) + "', got '" + line + "'");
  w.erase(w.begin());
  return w;
}

std::string single(std::istream& in, std::string_view key) {
  auto v = expect_line(in, key);
  if (v.size() != 1) format_error("'" + std::string(key) + "' takes one value");
  return v[0];
}

bool parse_flag(const std::string& v) {
  if (v == "1") return true;
  if (v == "0") return false;
  format_error("bad flag '" + v + "'");
}

}  // namespace

void write_model(const GlmModel& model, std::ostream& out) {
  const auto& p = model.params;
  out << kMagic << '\n';
  out << "kind " << (model.kind == ModelKind::kBinary ? "binary" : "multinomial") << '\n';
  out << "labels";
  for (Label l : model.label_order) out << ' ' << to_string(l);
  out << '\n';
  out << "dimension " << p.dimension << '\n';
  out << "l2_lambda " << format_real(model.l2_lambda) << '\n';
  out << "threshold " << format_real(model.decision_threshold) << '\n';
  out << "lowercase " << (model.text_options.lowercase ? 1 : 0) << '\n';
  out << "counts " << (model.text_options.counts ? 1 : 0) << '\n';
  out << "intercepts";
  for (double b : p.intercepts) out << ' ' << format_real(b);
  out << '\n';
  std::size_t nnz = 0;
  for (double w : p.weights) nnz += w != 0.0 ? 1 : 0;
  out << "weights " << nnz << '\n';
  for (std::size_t r = 0; r < p.rows; ++r) {
    for (std::size_t j = 0; j < p.dimension; ++j) {
      const double w = p.weight(r, j);
      if (w != 0.0) out << r << '\t' << j << '\t' << format_real(w) << '\n';
    }
  }
  out << "vocabulary " << model.vocabulary.size() << ' ' << model.vocabulary.min_df() << '\n';
  model.vocabulary.write(out);
  out << "end\n";
}

void save_model(const GlmModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot open for writing: " + path.string());
  write_model(model, out);
  if (!out) throw Error(ErrorKind::kIo, "write failure: " + path.string());
}

GlmModel read_model(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kMagic) format_error("not an offlens model file");
  GlmModel model;
  const auto kind = single(in, "kind");
  if (kind == "binary") {
    model.kind = ModelKind::kBinary;
  } else if (kind == "multinomial") {
    model.kind = ModelKind::kMultinomial;
  } else {
    format_error("unknown kind '" + kind + "'");
  }
  for (const auto& name : expect_line(in, "labels")) {
    auto label = parse_label(name);
    if (!label) format_error("unknown label '" + name + "'");
    model.label_order.push_back(*label);
  }
  if (!task_for_labels(model.label_order)) format_error("label order is not a task label set");
  if (model.kind == ModelKind::kBinary && model.label_order.size() != 2) {
    format_error("binary model with " + std::to_string(model.label_order.size()) + " labels");
  }
  const std::size_t dimension = parse_size(single(in, "dimension"));
  model.l2_lambda = parse_real(single(in, "l2_lambda"));
  model.decision_threshold = parse_real(single(in, "threshold"));
  model.text_options.lowercase = parse_flag(single(in, "lowercase"));
  model.text_options.counts = parse_flag(single(in, "counts"));
  model.params = Parameters(parameter_rows(model.kind, model.label_order.size()), dimension);
  const auto intercepts = expect_line(in, "intercepts");
  if (intercepts.size() != model.params.rows) format_error("intercept count mismatch");
  for (std::size_t r = 0; r < intercepts.size(); ++r) model.params.intercepts[r] = parse_real(intercepts[r]);

  const std::size_t nnz = parse_size(single(in, "weights"));
  for (std::size_t k = 0; k < nnz; ++k) {
    if (!std::getline(in, line)) format_error("weights truncated");
    auto fields = split_tabs(line);
    if (fields.size() != 3) format_error("bad weight line '" + line + "'");
    const auto r = parse_size(fields[0]);
    const auto j = parse_size(fields[1]);
    if (r >= model.params.rows || j >= dimension) format_error("weight index out of range");
    model.params.weight(r, j) = parse_real(fields[2]);
  }
  const auto vocab_header = expect_line(in, "vocabulary");
  if (vocab_header.size() != 2) format_error("bad vocabulary header");
  const auto entries = parse_size(vocab_header[0]);
  if (entries != dimension) format_error("vocabulary size differs from dimension");
  model.vocabulary = Vocabulary::read(in, entries, parse_size(vocab_header[1]));
  if (!std::getline(in, line) || line != "end") format_error("missing 'end'");
  return model;
}

GlmModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open for reading: " + path.string());
  try {
    return read_model(in);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

}  // namespace offlens
