#pragma once

#include <string>
#include <variant>
#include <vector>

#include "coorddet/dataset.hpp"

namespace coorddet {

// Closed-form agent objectives over beta in R^2 (all concave and
// componentwise nondecreasing on the nonnegative orthant).
enum class ClosedFormUtility {
  Det,       // beta1 * beta2
  Trace,     // beta1 + beta2
  SqrtProd,  // sqrt(beta1) * beta2
};

// One supporting hyperplane of a reconstructed utility:
//   offset + slope_scale * probe' (beta - anchor).
struct AffinePiece {
  double offset = 0.0;       // u_t
  double slope_scale = 1.0;  // lambda_t, > 0
  Probe probe;               // alpha_t, strictly positive
  Response anchor;           // beta_t
};

// Concave, componentwise nondecreasing min-of-affine function; the output of
// utility reconstruction.
struct PiecewiseAffineUtility {
  std::vector<AffinePiece> pieces;  // nonempty
};

using UtilityKind = std::variant<ClosedFormUtility, PiecewiseAffineUtility>;

// Evaluates the utility at beta. Closed forms require dimension 2; SqrtProd
// throws std::domain_error for beta1 < 0; piecewise-affine utilities require
// a nonempty piece list with matching dimensions.
double eval_utility(const UtilityKind& utility, const Response& beta);

// Stable names used by the CLI and serialized configs:
// "det", "trace", "sqrt-prod", "piecewise-affine".
std::string utility_name(const UtilityKind& utility);

// Inverse of utility_name for the closed forms; throws std::invalid_argument
// on anything else.
ClosedFormUtility closed_form_from_name(const std::string& name);

}  // namespace coorddet
