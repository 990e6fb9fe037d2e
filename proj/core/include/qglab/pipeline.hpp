#pragma once

#include <memory>
#include <optional>
#include <string>

#include "qglab/antipode.hpp"
#include "qglab/qgroupoid.hpp"
#include "qglab/regular_reps.hpp"
#include "qglab/spec_io.hpp"

namespace qg {

// Everything the check pipeline constructs, kept alive together because the
// later objects hold pointers into the earlier ones. Heap-allocate and do
// not move: build_all wires the internal pointers against the final
// addresses.
struct BuiltObjects {
  QGTuple tuple;
  std::optional<QGContext> ctx;
  GammaMaps gm;
  QMaps qm;
  RegReps rr;
  KOperator ko;
  AntipodeBundle ab;
};

// Constructs the full derived stack for one model without recording checks.
// Throws on construction failure.
std::unique_ptr<BuiltObjects> build_all(QGTuple tuple);

struct PipelineResult {
  CheckReport report;
  std::unique_ptr<BuiltObjects> built;  // null iff a construction stage threw
};

// Runs groupoid validation, model construction and every check suite in a
// fixed order. A throwing stage contributes a failing
// "<module>.buildfailure.1" row and stops the pipeline; rows recorded up to
// that point are kept. model must be kFunction or kConvolution.
PipelineResult run_pipeline(const FiniteGroupoid& g, const HaarWeights& hw, ModelKind model,
                            const Tamper& tamper, Real tol);

// Derived matrices for the derive verb, keyed by S, R, tau, W, V, K, L,
// nabla, E; t only affects tau. Throws std::invalid_argument on an unknown
// key. The header lines name the coordinates the matrix is written in.
Mat derived_object(const BuiltObjects& b, const std::string& what, Real t);
std::string derived_header(const BuiltObjects& b, const std::string& what, Real t);

// Plain-text serialization: '#'-prefixed header lines, then one matrix row
// per line with entries as [re, im] pairs at 17 significant digits.
std::string format_matrix_text(const std::string& header, const Mat& m);

}  // namespace qg
