#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace coorddet {

// A probe is the emitter-side weight vector alpha_t (strictly positive); a
// response is one agent's allocation beta_t^i (componentwise nonnegative,
// unless observed in noise).
using Probe = Eigen::VectorXd;
using Response = Eigen::VectorXd;

// T probes, each answered by M agents with n-dimensional responses.
// `responses[t][i]` is agent i's answer to probe t. `noisy` marks data
// observed through additive noise, for which nonnegativity of responses is
// not an invariant.
struct ProbeResponseDataset {
  int T = 0;
  int M = 0;
  int n = 0;
  std::vector<Probe> probes;
  std::vector<std::vector<Response>> responses;
  bool noisy = false;
};

// One broken dataset invariant. Indices are 1-based to match the file
// format; -1 means "not applicable".
struct Violation {
  std::string what;
  int t = -1;
  int i = -1;
  int component = -1;
};

// Pure structural check: shape consistency, probe positivity, and (for clean
// data only) response nonnegativity. Returns an empty vector iff valid.
std::vector<Violation> validate_dataset(const ProbeResponseDataset& ds);

// Componentwise comparison within an absolute-plus-relative tolerance; also
// requires identical shape and the same `noisy` flag.
bool datasets_close(const ProbeResponseDataset& a, const ProbeResponseDataset& b,
                    double tol = 1e-15);

// A point on the probability simplex. Weights must be componentwise >= 0 and
// sum to 1 within 1e-12; boundary points are admitted so that zero-weight
// agents can be modeled, with `strictly_positive()` identifying the interior.
class SimplexWeights {
 public:
  explicit SimplexWeights(Eigen::VectorXd mu);
  static SimplexWeights uniform(int m);

  const Eigen::VectorXd& mu() const { return mu_; }
  double operator[](int i) const { return mu_(i); }
  int size() const { return static_cast<int>(mu_.size()); }
  bool strictly_positive() const;

 private:
  Eigen::VectorXd mu_;
};

// Additive observation noise, i.i.d. per response component.
struct NoiseModel {
  enum class Kind { GaussianIid };
  Kind kind = Kind::GaussianIid;
  double sigma = 0.0;  // standard deviation, >= 0
};

// Joint resource budget: sum_i alpha_t' beta_t^i <= p_star at every t.
struct BudgetSpec {
  double p_star = 1.0;  // > 0
};

}  // namespace coorddet
