#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace offlens {

// Joins the two tokens of a bigram (U+2581). clean() treats it as whitespace,
// so it never occurs inside a token.
inline constexpr std::string_view kBigramSeparator = "\xE2\x96\x81";

struct TextOptions {
  bool lowercase = true;
  bool counts = false;  // term counts instead of binary presence

  bool operator==(const TextOptions&) const = default;
};

// Light tweet normalization:
//  - ASCII letters lowercased (when enabled); other characters unchanged
//  - whitespace runs collapse to one space
//  - runs of ! and ? collapse to their first mark; runs of '.' or U+2026
//    of length >= 2 become "..."; each becomes its own token
//  - remaining punctuation is split off as single-character tokens, except
//    * ' - and U+2019 between word characters (f**ck, don't, 6’9) and
//    . , between digits (2.5)
//  - "@USER", "URL" and http(s)/www chunks are kept verbatim
// clean(clean(t)) == clean(t).
std::string clean(std::string_view text, const TextOptions& options = {});

std::vector<std::string> tokenize(std::string_view cleaned);

// All unigrams, then all adjacent bigrams. Duplicates are kept.
std::vector<std::string> extract_ngrams(std::span<const std::string> tokens);

struct SparseVector {
  std::vector<std::uint32_t> indices;  // strictly increasing
  std::vector<double> values;
  std::size_t dimension = 0;

  std::size_t nnz() const { return indices.size(); }
  bool operator==(const SparseVector&) const = default;
};

class Vocabulary {
 public:
  Vocabulary() = default;
  // `terms` must be sorted and unique; `doc_freq` parallel to it.
  Vocabulary(std::vector<std::string> terms, std::vector<std::size_t> doc_freq,
             std::size_t min_df);

  std::size_t size() const { return terms_.size(); }
  std::size_t min_df() const { return min_df_; }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<std::size_t>& doc_freq() const { return doc_freq_; }
  // -1 when the n-gram is not in the vocabulary.
  std::int64_t index_of(std::string_view ngram) const;

  // One "ngram\tindex\tdf" line per entry.
  void write(std::ostream& out) const;
  static Vocabulary read(std::istream& in, std::size_t entries, std::size_t min_df);

  bool operator==(const Vocabulary& other) const {
    return terms_ == other.terms_ && doc_freq_ == other.doc_freq_ && min_df_ == other.min_df_;
  }

 private:
  std::vector<std::string> terms_;
  std::vector<std::size_t> doc_freq_;
  std::size_t min_df_ = 1;
  std::unordered_map<std::string, std::uint32_t> index_;
};

// `documents` are token lists. Keeps n-grams seen in at least `min_df`
// documents; indices follow the
// byte-wise lexicographic order of the n-gram strings.
Vocabulary fit_vocabulary(std::span<const std::vector<std::string>> documents,
                          std::size_t min_df = 2);

SparseVector vectorize(std::span<const std::string> tokens, const Vocabulary& vocabulary,
                       const TextOptions& options = {});

// clean -> tokenize -> vectorize
SparseVector featurize(std::string_view text, const Vocabulary& vocabulary,
                       const TextOptions& options = {});

}  // namespace offlens
