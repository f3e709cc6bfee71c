#pragma once

#include <Eigen/Core>
#include <vector>

#include "json.hpp"

#include "coorddet/dataset.hpp"
#include "coorddet/utility.hpp"

namespace coorddet::afriat {

// A feasible point of the rationalizability system for one agent:
//   u_s - u_t - lambda_t * alpha_t'(beta_s - beta_t) <= 0  for all s != t,
// with u > 0 and lambda >= 1 (the system is positively homogeneous, so
// lambda is normalized to >= 1 and u shifted to min(u) = 1).
struct AfriatCertificate {
  int radar = 0;  // agent index, 0-based
  Eigen::VectorXd u;
  Eigen::VectorXd lambda;
};

struct RationalizabilityVerdict {
  bool consistent = false;
  // One certificate per agent when consistent; empty otherwise.
  std::vector<AfriatCertificate> certificates;
};

// Pairwise evaluation matrix a(t,s) = alpha_t'(beta_s^radar - beta_t^radar);
// zero diagonal. Throws std::out_of_range for a bad agent index.
Eigen::MatrixXd afriat_matrix(const ProbeResponseDataset& ds, int radar);

// LP feasibility of the (phi-relaxed) rationalizability system
//   u_s - u_t - lambda_t * (a(t,s) + phi) <= 0, lambda >= 1, u free,
// built from a pairwise matrix. Returns the certificate (u shifted to
// min(u) = 1) when feasible. Exposed so the detector can reuse one builder.
struct SystemFeasibility {
  bool feasible = false;
  Eigen::VectorXd u;
  Eigen::VectorXd lambda;
  int lp_iterations = 0;
};
SystemFeasibility relaxed_system_feasible(const Eigen::MatrixXd& a, double phi);

// True verdict with certificates iff every agent's responses are jointly
// rationalizable by some nondecreasing concave utility (exact LP test; no
// relaxation). Works on noisy datasets too — the test is agnostic to how
// the numbers were produced.
RationalizabilityVerdict test_rationalizable(const ProbeResponseDataset& ds);

// Combinatorial revealed-preference oracle for the same question, computed
// without linear programming: true iff no revealed-preference cycle with a
// strict edge exists for this agent.
bool garp_oracle(const ProbeResponseDataset& ds, int radar);

// Corollary utility U(beta) = min_t [u_t + lambda_t * alpha_t'(beta -
// beta_t^radar)]: concave, componentwise nondecreasing, and on clean
// consistent data it rationalizes the observed choices with U(beta_t) = u_t.
PiecewiseAffineUtility reconstruct_utility(const AfriatCertificate& cert,
                                           const ProbeResponseDataset& ds);

// max over s != t of u_s - u_t - lambda_t * a(t,s); <= kFeasTol-ish for a
// valid certificate, and <= lambda-weighted phi slack for relaxed ones.
double certificate_residual(const AfriatCertificate& cert,
                            const ProbeResponseDataset& ds);

nlohmann::json certificate_to_json(const AfriatCertificate& cert);
AfriatCertificate certificate_from_json(const nlohmann::json& j);

}  // namespace coorddet::afriat
