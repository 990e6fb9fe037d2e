#pragma once

#include <stdexcept>
#include <string>

#include "qglab/groupoid.hpp"
#include "qglab/models.hpp"

namespace qg {

enum class ModelKind { kFunction, kConvolution, kBoth };

// Raised on any input the schema rejects: malformed JSON, wrong field types,
// unresolved arrow or unit ids, duplicate ids, missing inverses, non-positive
// weights, compose keys whose endpoints do not match. The message names the
// offending field or arrow. Callers map this to process exit code 2.
struct SpecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParsedSpec {
  FiniteGroupoid groupoid;
  HaarWeights weights;
  ModelKind model = ModelKind::kFunction;
  Tamper tamper;
};

// A composable pair absent from the compose table is accepted here (the pair
// is treated as non-composable) and surfaces later as a failed groupoid
// check, not a parse error.
ParsedSpec parse_spec_text(const std::string& text, const std::string& origin = "<string>");
ParsedSpec parse_spec(const std::string& path);

std::string model_name(ModelKind kind);
ModelKind model_from_name(const std::string& name);

// Serializes a groupoid description in the same schema parse_spec reads.
std::string write_spec(const FiniteGroupoid& g, const HaarWeights& hw, ModelKind model);

}  // namespace qg
