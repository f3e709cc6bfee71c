#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "json.hpp"

#include "coorddet/dataset.hpp"
#include "coorddet/utility.hpp"

namespace coorddet::forward {

// Probe components are i.i.d. uniform on [kProbeLow, kProbeHigh].
inline constexpr double kProbeLow = 0.1;
inline constexpr double kProbeHigh = 1.1;

// Raised when coordinated generation cannot produce a valid allocation
// (e.g. no ascent restart converges).
struct generation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class GenerationMode {
  // Each agent i independently maximizes its own utility over the budget
  // slice mu_i * p_star (exact closed forms; the default).
  BudgetShare,
  // All agents' responses are chosen together by projected gradient ascent
  // on the mu-weighted social objective over the joint budget set.
  JointAscent,
};

struct GenerationConfig {
  int T = 10;
  int M = 3;
  int n = 2;
  std::vector<UtilityKind> utilities;  // one per agent
  SimplexWeights weights = SimplexWeights::uniform(3);
  BudgetSpec budget{};
  GenerationMode mode = GenerationMode::BudgetShare;
  std::uint64_t seed = 0;
};

// The reference simulation setup: T=10, M=3, n=2, objectives
// (det, trace, sqrt-prod), weights (0.4, 0.4, 0.3), p_star=1, BudgetShare.
GenerationConfig reference_config(std::uint64_t seed);

// T probes with components ~ U[kProbeLow, kProbeHigh], consuming `rng`.
std::vector<Probe> sample_probes(int T, int n, std::mt19937_64& rng);

// argmax of `utility` over {beta >= 0 : alpha' beta <= budget}, in closed
// form. Requires alpha > 0 and budget >= 0 (zero budget yields the zero
// response); piecewise-affine utilities are reconstructions, not
// generators, and are rejected.
Response solve_radar_budget(const UtilityKind& utility, const Probe& alpha,
                            double budget);

// Noiseless coordinated dataset: probes from sample_probes, responses
// Pareto-coordinated under the joint budget per `cfg.mode`. Deterministic in
// cfg.seed. The budget binds at every t: |alpha_t' sum_i beta_t^i - p_star|
// <= 1e-9, and mu_i = 0 implies beta_t^i = 0.
ProbeResponseDataset generate_coordinated(const GenerationConfig& cfg);

// Null model: same probe law, responses i.i.d. uniform on [0,1]^n with no
// budget tie. Deterministic in seed.
ProbeResponseDataset generate_noncoordinated(int T, int M, int n,
                                             std::uint64_t seed);

// The noise realization underlying one add_noise call: eps[t][i] in R^n.
struct NoiseDraws {
  std::vector<std::vector<Eigen::VectorXd>> eps;
};

// Additive observation noise on responses only (probes untouched); the
// input must be clean (noisy = false). sigma = 0 returns the input with
// only the noisy flag set. Deterministic in seed.
ProbeResponseDataset add_noise(const ProbeResponseDataset& ds,
                               const NoiseModel& noise, std::uint64_t seed);

// Same draw stream as add_noise, additionally returning the realized eps so
// tests can compare detector statistics against their noise-level bound.
std::pair<ProbeResponseDataset, NoiseDraws> add_noise_with_draws(
    const ProbeResponseDataset& ds, const NoiseModel& noise,
    std::uint64_t seed);

nlohmann::json config_to_json(const GenerationConfig& cfg);
GenerationConfig config_from_json(const nlohmann::json& j);

// Euclidean projection onto {x >= 0 : w'x <= budget} for w > 0 (exposed for
// tests of the ascent machinery).
Eigen::VectorXd project_budget(const Eigen::VectorXd& x,
                               const Eigen::VectorXd& w, double budget);

}  // namespace coorddet::forward
