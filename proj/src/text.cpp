#include "offlens/text.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <unordered_set>

#include "offlens/corpus.hpp"
#include "offlens/error.hpp"

namespace offlens {
namespace {

struct CodePoint {
  char32_t value;
  std::string_view bytes;
};

// Lenient UTF-8 decoding: an invalid lead byte is passed through as a single
// code point so text is never dropped.
std::vector<CodePoint> decode(std::string_view text) {
  std::vector<CodePoint> out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto lead = static_cast<unsigned char>(text[i]);
    std::size_t len = 1;
    char32_t cp = lead;
    if (lead >= 0xF0 && lead < 0xF8) {
      len = 4;
      cp = lead & 0x07;
    } else if (lead >= 0xE0) {
      len = 3;
      cp = lead & 0x0F;
    } else if (lead >= 0xC0) {
      len = 2;
      cp = lead & 0x1F;
    }
    if (i + len > text.size()) len = 1;
    bool valid = true;
    for (std::size_t k = 1; k < len; ++k) {
      const auto c = static_cast<unsigned char>(text[i + k]);
      if ((c & 0xC0) != 0x80) {
        valid = false;
        break;
      }
      cp = (cp << 6) | (c & 0x3F);
    }
    if (!valid) {
      len = 1;
      cp = lead;
    }
    out.push_back({cp, text.substr(i, len)});
    i += len;
  }
  return out;
}

bool is_space(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' || c == U'\v' ||
         c == 0x00A0 || c == 0x2581;
}

bool is_ascii_alnum(char32_t c) {
  return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z') || (c >= U'0' && c <= U'9');
}

bool is_digit(char32_t c) { return c >= U'0' && c <= U'9'; }

bool is_connector(char32_t c) { return c == U'*' || c == U'\'' || c == U'-' || c == 0x2019; }

bool is_word(char32_t c) {
  if (c < 0x80) return is_ascii_alnum(c) || c == U'@' || c == U'#' || c == U'_';
  switch (c) {
    case 0x2018: case 0x2019: case 0x201C: case 0x201D:
    case 0x2013: case 0x2014: case 0x2026:
      return false;
    default:
      return !is_space(c);
  }
}

bool is_period(char32_t c) { return c == U'.' || c == 0x2026; }
bool is_terminal(char32_t c) { return c == U'!' || c == U'?'; }

bool is_placeholder(std::string_view token) { return token == "@USER" || token == "URL"; }

bool is_url_chunk(std::string_view chunk) {
  return chunk.starts_with("http://") || chunk.starts_with("https://") ||
         chunk.starts_with("www.");
}

void clean_chunk(const std::vector<CodePoint>& cps, const TextOptions& options,
                 std::vector<std::string>& tokens) {
  const std::size_t n = cps.size();
  std::size_t i = 0;
  while (i < n) {
    const char32_t c = cps[i].value;
    if (is_word(c)) {
      std::string word;
      std::size_t j = i;
      while (j < n) {
        if (is_word(cps[j].value)) {
          word += cps[j].bytes;
          ++j;
          continue;
        }
        std::size_t k = j;
        while (k < n && is_connector(cps[k].value)) ++k;
        if (k > j && k < n && is_word(cps[k].value)) {
          for (; j < k; ++j) word += cps[j].bytes;
          continue;
        }
        if ((cps[j].value == U'.' || cps[j].value == U',') && j + 1 < n &&
            is_digit(cps[j - 1].value) && is_digit(cps[j + 1].value)) {
          word += cps[j].bytes;
          ++j;
          continue;
        }
        break;
      }
      if (options.lowercase && !is_placeholder(word)) {
        std::transform(word.begin(), word.end(), word.begin(), [](char ch) {
          return (ch >= 'A' && ch <= 'Z') ? static_cast<char>(ch - 'A' + 'a') : ch;
        });
      }
      tokens.push_back(std::move(word));
      i = j;
    } else if (is_period(c)) {
      std::size_t j = i;
      while (j < n && is_period(cps[j].value)) ++j;
      tokens.emplace_back(j - i == 1 && c == U'.' ? "." : "...");
      i = j;
    } else if (is_terminal(c)) {
      std::size_t j = i;
      while (j < n && is_terminal(cps[j].value)) ++j;
      tokens.emplace_back(cps[i].bytes);
      i = j;
    } else {
      tokens.emplace_back(cps[i].bytes);
      ++i;
    }
  }
}

}  // namespace

std::string clean(std::string_view text, const TextOptions& options) {
  const auto cps = decode(text);
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < cps.size()) {
    if (is_space(cps[i].value)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < cps.size() && !is_space(cps[j].value)) ++j;
    std::vector<CodePoint> chunk(cps.begin() + static_cast<std::ptrdiff_t>(i),
                                 cps.begin() + static_cast<std::ptrdiff_t>(j));
    const std::size_t begin = static_cast<std::size_t>(chunk.front().bytes.data() - text.data());
    const std::size_t end =
        static_cast<std::size_t>(chunk.back().bytes.data() - text.data()) + chunk.back().bytes.size();
    const auto raw = text.substr(begin, end - begin);
    if (is_url_chunk(raw)) {
      tokens.emplace_back(raw);
    } else {
      clean_chunk(chunk, options, tokens);
    }
    i = j;
  }
  std::string out;
  for (std::size_t k = 0; k < tokens.size(); ++k) {
    if (k) out += ' ';
    out += tokens[k];
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view cleaned) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  auto space = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
  };
  while (i < cleaned.size()) {
    while (i < cleaned.size() && space(cleaned[i])) ++i;
    std::size_t j = i;
    while (j < cleaned.size() && !space(cleaned[j])) ++j;
    if (j > i) tokens.emplace_back(cleaned.substr(i, j - i));
    i = j;
  }
  return tokens;
}

std::vector<std::string> extract_ngrams(std::span<const std::string> tokens) {
  std::vector<std::string> ngrams(tokens.begin(), tokens.end());
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    std::string bigram;
    bigram.reserve(tokens[i].size() + kBigramSeparator.size() + tokens[i + 1].size());
    bigram += tokens[i];
    bigram += kBigramSeparator;
    bigram += tokens[i + 1];
    ngrams.push_back(std::move(bigram));
  }
  return ngrams;
}

Vocabulary::Vocabulary(std::vector<std::string> terms, std::vector<std::size_t> doc_freq,
                       std::size_t min_df)
    : terms_(std::move(terms)), doc_freq_(std::move(doc_freq)), min_df_(min_df) {
  if (terms_.size() != doc_freq_.size()) {
    throw Error(ErrorKind::kInvalidArgument, "vocabulary terms and frequencies differ in length");
  }
  index_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i > 0 && !(terms_[i - 1] < terms_[i])) {
      throw Error(ErrorKind::kInvalidArgument, "vocabulary terms not strictly sorted");
    }
    index_.emplace(terms_[i], static_cast<std::uint32_t>(i));
  }
}

std::int64_t Vocabulary::index_of(std::string_view ngram) const {
  auto it = index_.find(std::string(ngram));
  return it == index_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

void Vocabulary::write(std::ostream& out) const {
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    out << terms_[i] << '\t' << i << '\t' << doc_freq_[i] << '\n';
  }
}

Vocabulary Vocabulary::read(std::istream& in, std::size_t entries, std::size_t min_df) {
  std::vector<std::string> terms;
  std::vector<std::size_t> dfs;
  terms.reserve(entries);
  dfs.reserve(entries);
  std::string line;
  for (std::size_t i = 0; i < entries; ++i) {
    if (!std::getline(in, line)) {
      throw Error(ErrorKind::kModelFormat, "vocabulary truncated at entry " + std::to_string(i));
    }
    auto fields = split_tabs(line);
    if (fields.size() != 3 || fields[1] != std::to_string(i)) {
      throw Error(ErrorKind::kModelFormat, "bad vocabulary entry " + std::to_string(i));
    }
    terms.emplace_back(fields[0]);
    dfs.push_back(std::stoull(std::string(fields[2])));
  }
  return Vocabulary(std::move(terms), std::move(dfs), min_df);
}

Vocabulary fit_vocabulary(std::span<const std::vector<std::string>> documents,
                          std::size_t min_df) {
  if (min_df < 1) throw Error(ErrorKind::kInvalidArgument, "min_df must be >= 1");
  std::unordered_map<std::string, std::size_t> df;
  for (const auto& doc : documents) {
    auto ngrams = extract_ngrams(doc);
    std::sort(ngrams.begin(), ngrams.end());
    ngrams.erase(std::unique(ngrams.begin(), ngrams.end()), ngrams.end());
    for (auto& g : ngrams) ++df[std::move(g)];
  }
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [term, count] : df) {
    if (count >= min_df) kept.emplace_back(term, count);
  }
  std::sort(kept.begin(), kept.end());
  std::vector<std::string> terms;
  std::vector<std::size_t> dfs;
  terms.reserve(kept.size());
  dfs.reserve(kept.size());
  for (auto& [term, count] : kept) {
    terms.push_back(std::move(term));
    dfs.push_back(count);
  }
  return Vocabulary(std::move(terms), std::move(dfs), min_df);
}

SparseVector vectorize(std::span<const std::string> tokens, const Vocabulary& vocabulary,
                       const TextOptions& options) {
  std::map<std::uint32_t, double> hits;
  for (const auto& g : extract_ngrams(tokens)) {
    auto idx = vocabulary.index_of(g);
    if (idx < 0) continue;
    auto& v = hits[static_cast<std::uint32_t>(idx)];
    v = options.counts ? v + 1.0 : 1.0;
  }
  SparseVector x;
  x.dimension = vocabulary.size();
  x.indices.reserve(hits.size());
  x.values.reserve(hits.size());
  for (auto [i, v] : hits) {
    x.indices.push_back(i);
    x.values.push_back(v);
  }
  return x;
}

SparseVector featurize(std::string_view text, const Vocabulary& vocabulary,
                       const TextOptions& options) {
  return vectorize(tokenize(clean(text, options)), vocabulary, options);
}

}  // namespace offlens
