#include "coorddet/utility.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace coorddet {

namespace {

double eval_closed_form(ClosedFormUtility u, const Response& beta) {
  if (beta.size() != 2)
    throw std::invalid_argument("closed-form utilities are defined for n = 2");
  switch (u) {
    case ClosedFormUtility::Det:
      return beta(0) * beta(1);
    case ClosedFormUtility::Trace:
      return beta(0) + beta(1);
    case ClosedFormUtility::SqrtProd:
      if (beta(0) < 0.0)
        throw std::domain_error("sqrt-prod utility requires beta1 >= 0");
      return std::sqrt(beta(0)) * beta(1);
  }
  throw std::invalid_argument("unknown closed-form utility");
}

double eval_piecewise(const PiecewiseAffineUtility& u, const Response& beta) {
  if (u.pieces.empty())
    throw std::invalid_argument("piecewise-affine utility has no pieces");
  double best = std::numeric_limits<double>::infinity();
  for (const AffinePiece& p : u.pieces) {
    if (p.probe.size() != beta.size() || p.anchor.size() != beta.size())
      throw std::invalid_argument("piecewise-affine utility dimension mismatch");
    const double v = p.offset + p.slope_scale * p.probe.dot(beta - p.anchor);
    if (v < best) best = v;
  }
  return best;
}

}  // namespace

double eval_utility(const UtilityKind& utility, const Response& beta) {
  if (const auto* cf = std::get_if<ClosedFormUtility>(&utility))
    return eval_closed_form(*cf, beta);
  return eval_piecewise(std::get<PiecewiseAffineUtility>(utility), beta);
}

std::string utility_name(const UtilityKind& utility) {
  if (const auto* cf = std::get_if<ClosedFormUtility>(&utility)) {
    switch (*cf) {
      case ClosedFormUtility::Det:
        return "det";
      case ClosedFormUtility::Trace:
        return "trace";
      case ClosedFormUtility::SqrtProd:
        return "sqrt-prod";
    }
  }
  return "piecewise-affine";
}

ClosedFormUtility closed_form_from_name(const std::string& name) {
  if (name == "det") return ClosedFormUtility::Det;
  if (name == "trace") return ClosedFormUtility::Trace;
  if (name == "sqrt-prod") return ClosedFormUtility::SqrtProd;
  throw std::invalid_argument("unknown utility name '" + name + "'");
}

}  // namespace coorddet
