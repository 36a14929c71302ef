#pragma once

#include <filesystem>
#include <iosfwd>

#include "offlens/glm.hpp"

namespace offlens {

// Plain-text model file. Reals are written in shortest round-trip form, so a
// loaded model predicts bit-identically to the saved one.
//
//   offlens-model 1
//   kind binary|multinomial
//   labels OFF NOT
//   dimension <D>
//   l2_lambda <r>
//   threshold <r>
//   lowercase 0|1
//   counts 0|1
//   intercepts <r>...
//   weights <nnz>
//   <row>\t<col>\t<value>        (nonzero weights, row-major order)
//   vocabulary <D> <min_df>
//   <ngram>\t<index>\t<df>
//   end
void write_model(const GlmModel& model, std::ostream& out);
void save_model(const GlmModel& model, const std::filesystem::path& path);
GlmModel read_model(std::istream& in);
GlmModel load_model(const std::filesystem::path& path);

}  // namespace offlens
