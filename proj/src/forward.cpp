#include "coorddet/forward.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "coorddet/rng.hpp"

namespace coorddet::forward {

namespace {

constexpr int kAscentRestarts = 20;
constexpr int kAscentMaxIters = 10000;
constexpr double kAscentResidTol = 1e-6;
constexpr double kSaturationTol = 1e-9;

void check_generation_config(const GenerationConfig& cfg) {
  if (cfg.T < 1 || cfg.M < 1 || cfg.n < 1)
    throw std::invalid_argument("generation requires T, M, n >= 1");
  if (static_cast<int>(cfg.utilities.size()) != cfg.M)
    throw std::invalid_argument("need one utility per agent");
  if (cfg.weights.size() != cfg.M)
    throw std::invalid_argument("need one weight per agent");
  if (!(cfg.budget.p_star > 0.0))
    throw std::invalid_argument("budget p_star must be > 0");
  for (const UtilityKind& u : cfg.utilities) {
    if (!std::holds_alternative<ClosedFormUtility>(u))
      throw std::invalid_argument(
          "piecewise-affine utilities are reconstructions, not generators");
  }
  if (cfg.n != 2)
    throw std::invalid_argument("closed-form generation requires n = 2");
}

// Gradient of a closed-form utility on the nonnegative orthant. SqrtProd's
// first partial blows up at beta1 = 0; it is clamped so ascent iterates can
// cross the boundary without producing infinities.
Eigen::Vector2d closed_form_gradient(ClosedFormUtility u, const Eigen::Vector2d& beta) {
  switch (u) {
    case ClosedFormUtility::Det:
      return {beta(1), beta(0)};
    case ClosedFormUtility::Trace:
      return {1.0, 1.0};
    case ClosedFormUtility::SqrtProd: {
      const double b1 = std::max(beta(0), 1e-12);
      return {beta(1) / (2.0 * std::sqrt(b1)), std::sqrt(std::max(beta(0), 0.0))};
    }
  }
  throw std::invalid_argument("unknown closed-form utility");
}

}  // namespace

GenerationConfig reference_config(std::uint64_t seed) {
  GenerationConfig cfg;
  cfg.T = 10;
  cfg.M = 3;
  cfg.n = 2;
  cfg.utilities = {ClosedFormUtility::Det, ClosedFormUtility::Trace,
                   ClosedFormUtility::SqrtProd};
  // Agent budget slices of (0.4, 0.4, 0.3), expressed as unit-simplex
  // weights times the total budget. The factorization is exact in doubles:
  // (0.4 / 1.1) * 1.1 == 0.4 and (0.3 / 1.1) * 1.1 == 0.3.
  cfg.weights =
      SimplexWeights((Eigen::VectorXd(3) << 0.4, 0.4, 0.3).finished() / 1.1);
  cfg.budget = BudgetSpec{1.1};
  cfg.mode = GenerationMode::BudgetShare;
  cfg.seed = seed;
  return cfg;
}

std::vector<Probe> sample_probes(int T, int n, std::mt19937_64& rng) {
  if (T < 1 || n < 1) throw std::invalid_argument("sample_probes requires T, n >= 1");
  std::uniform_real_distribution<double> dist(kProbeLow, kProbeHigh);
  std::vector<Probe> probes(T, Probe::Zero(n));
  for (int t = 0; t < T; ++t)
    for (int c = 0; c < n; ++c) probes[t](c) = dist(rng);
  return probes;
}

Response solve_radar_budget(const UtilityKind& utility, const Probe& alpha,
                            double budget) {
  const auto* cf = std::get_if<ClosedFormUtility>(&utility);
  if (cf == nullptr)
    throw std::invalid_argument(
        "piecewise-affine utilities are reconstructions, not generators");
  if (alpha.size() != 2)
    throw std::invalid_argument("closed-form utilities require n = 2");
  if (!((alpha.array() > 0.0).all()))
    throw std::invalid_argument("probe must be strictly positive");
  if (budget < 0.0) throw std::invalid_argument("budget must be >= 0");

  Response beta = Response::Zero(2);
  switch (*cf) {
    case ClosedFormUtility::Det:
      // Symmetric Cobb-Douglas: half the budget on each component.
      beta(0) = budget / (2.0 * alpha(0));
      beta(1) = budget / (2.0 * alpha(1));
      break;
    case ClosedFormUtility::Trace: {
      // Linear objective: all budget on the cheapest component(s); ties
      // within 1e-12 split the budget equally.
      const double amin = alpha.minCoeff();
      std::vector<int> argmin;
      for (int c = 0; c < 2; ++c)
        if (alpha(c) <= amin + 1e-12) argmin.push_back(c);
      for (int c : argmin)
        beta(c) = budget / (static_cast<double>(argmin.size()) * alpha(c));
      break;
    }
    case ClosedFormUtility::SqrtProd:
      // Cobb-Douglas exponents (1/2, 1): budget shares 1/3 and 2/3.
      beta(0) = budget / (3.0 * alpha(0));
      beta(1) = 2.0 * budget / (3.0 * alpha(1));
      break;
  }
  return beta;
}

Eigen::VectorXd project_budget(const Eigen::VectorXd& x, const Eigen::VectorXd& w,
                               double budget) {
  if (x.size() != w.size() || !(w.array() > 0.0).all() || budget < 0.0)
    throw std::invalid_argument("projection requires w > 0, budget >= 0");
  Eigen::VectorXd z = x.cwiseMax(0.0);
  if (w.dot(z) <= budget) return z;

  // Find theta > 0 with sum_j w_j * max(x_j - theta w_j, 0) = budget. The
  // left side is piecewise linear and decreasing in theta; scan its
  // breakpoints x_j / w_j in ascending order.
  const int n = static_cast<int>(x.size());
  std::vector<int> idx;
  for (int j = 0; j < n; ++j)
    if (x(j) > 0.0) idx.push_back(j);
  std::sort(idx.begin(), idx.end(),
            [&](int a, int b) { return x(a) / w(a) < x(b) / w(b); });
  double sum_wx = 0.0, sum_ww = 0.0;
  for (int j : idx) {
    sum_wx += w(j) * x(j);
    sum_ww += w(j) * w(j);
  }
  double theta = 0.0;
  for (std::size_t k = 0; k <= idx.size(); ++k) {
    // Active set: idx[k..]; candidate theta for this segment.
    theta = sum_ww > 0.0 ? (sum_wx - budget) / sum_ww : 0.0;
    const double seg_end = k < idx.size() ? x(idx[k]) / w(idx[k])
                                          : std::numeric_limits<double>::infinity();
    if (theta <= seg_end) break;
    sum_wx -= w(idx[k]) * x(idx[k]);
    sum_ww -= w(idx[k]) * w(idx[k]);
  }
  Eigen::VectorXd out(n);
  for (int j = 0; j < n; ++j) out(j) = std::max(x(j) - theta * w(j), 0.0);
  return out;
}

namespace {

// Stacked social objective over the joint budget set for one probe:
// x concatenates all agents' responses, w repeats alpha per block.
struct JointProblem {
  const GenerationConfig& cfg;
  Eigen::VectorXd w;
  Probe alpha;

  double value(const Eigen::VectorXd& x) const {
    double v = 0.0;
    for (int i = 0; i < cfg.M; ++i) {
      const double mu = cfg.weights[i];
      if (mu == 0.0) continue;
      v += mu * eval_utility(cfg.utilities[i],
                             x.segment(2 * i, 2).cwiseMax(0.0));
    }
    return v;
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
    for (int i = 0; i < cfg.M; ++i) {
      const double mu = cfg.weights[i];
      if (mu == 0.0) continue;
      const Eigen::Vector2d block = x.segment(2 * i, 2).cwiseMax(0.0);
      g.segment(2 * i, 2) =
          mu * closed_form_gradient(std::get<ClosedFormUtility>(cfg.utilities[i]),
                                    block);
    }
    return g;
  }

  // Norm of the projected-gradient fixed-point map at a small trial step:
  // zero exactly at KKT points of max value s.t. x >= 0, w'x <= p_star.
  double residual(const Eigen::VectorXd& x) const {
    const double s = 1e-3;
    return (x - project_budget(x + s * gradient(x), w, cfg.budget.p_star)).norm() / s;
  }
};

Eigen::VectorXd joint_ascent_probe(const JointProblem& jp, int t) {
  const GenerationConfig& cfg = jp.cfg;
  const double pstar = cfg.budget.p_star;

  // Warm start: the per-agent budget-share allocation (already feasible and
  // keeps zero-weight blocks exactly at zero, since projection only shrinks).
  Eigen::VectorXd warm = Eigen::VectorXd::Zero(2 * cfg.M);
  for (int i = 0; i < cfg.M; ++i)
    warm.segment(2 * i, 2) =
        solve_radar_budget(cfg.utilities[i], jp.alpha, cfg.weights[i] * pstar);

  bool any_converged = false;
  double best_value = 0.0;
  Eigen::VectorXd best_x;
  for (int r = 0; r < kAscentRestarts; ++r) {
    Eigen::VectorXd x;
    if (r == 0) {
      x = warm;
    } else {
      auto rng = rng::substream(cfg.seed, rng::Stream::kAscent, t, r);
      std::uniform_real_distribution<double> u01(0.0, 1.0);
      Eigen::VectorXd x0(2 * cfg.M);
      for (int j = 0; j < x0.size(); ++j) x0(j) = u01(rng);
      // Zero-weight blocks start at zero and stay there: their gradient is
      // zero and projection only shrinks, so beta^i = 0 holds exactly.
      for (int i = 0; i < cfg.M; ++i)
        if (cfg.weights[i] == 0.0) x0.segment(2 * i, 2).setZero();
      x = project_budget(x0, jp.w, pstar);
    }

    int used = 0;
    const double s0 = 0.5 * pstar / (1.0 + jp.gradient(x).norm());
    for (int k = 1; k <= kAscentMaxIters / 2; ++k, ++used) {
      x = project_budget(x + (s0 / k) * jp.gradient(x), jp.w, pstar);
      if (k % 25 == 0 && jp.residual(x) <= kAscentResidTol) break;
    }
    // Diminishing steps redistribute mass across the budget face too slowly
    // to finish (and stall near vertex solutions), so the second half of the
    // iteration budget is a monotone adaptive-step polish: accepted steps
    // grow the step size, rejected ones shrink it.
    double s = s0;
    for (; used < kAscentMaxIters && s > 1e-14; ++used) {
      if (used % 10 == 0 && jp.residual(x) <= 0.5 * kAscentResidTol) break;
      const Eigen::VectorXd cand =
          project_budget(x + s * jp.gradient(x), jp.w, pstar);
      if (jp.value(cand) > jp.value(x)) {
        x = cand;
        s *= 1.25;
      } else {
        s *= 0.5;
      }
    }
    // Snap onto the budget face. All three objectives are nondecreasing
    // under upscaling, so this never loses value and enforces saturation.
    const double spend = jp.w.dot(x);
    if (spend > 0.0 && spend < pstar) x *= pstar / spend;

    if (jp.residual(x) <= kAscentResidTol) {
      const double v = jp.value(x);
      if (!any_converged || v > best_value) {
        any_converged = true;
        best_value = v;
        best_x = x;
      }
    }
  }
  if (!any_converged)
    throw generation_error("joint ascent did not converge at t=" +
                           std::to_string(t + 1));
  return best_x.cwiseMax(0.0);
}

}  // namespace

ProbeResponseDataset generate_coordinated(const GenerationConfig& cfg) {
  check_generation_config(cfg);
  ProbeResponseDataset ds;
  ds.T = cfg.T;
  ds.M = cfg.M;
  ds.n = cfg.n;
  ds.noisy = false;
  auto probe_rng = rng::substream(cfg.seed, rng::Stream::kProbes);
  ds.probes = sample_probes(cfg.T, cfg.n, probe_rng);
  ds.responses.assign(cfg.T, std::vector<Response>(cfg.M));

  const double pstar = cfg.budget.p_star;
  for (int t = 0; t < cfg.T; ++t) {
    if (cfg.mode == GenerationMode::BudgetShare) {
      for (int i = 0; i < cfg.M; ++i)
        ds.responses[t][i] = solve_radar_budget(cfg.utilities[i], ds.probes[t],
                                                cfg.weights[i] * pstar);
    } else {
      JointProblem jp{cfg, Eigen::VectorXd(2 * cfg.M), ds.probes[t]};
      for (int i = 0; i < cfg.M; ++i) jp.w.segment(2 * i, 2) = ds.probes[t];
      const Eigen::VectorXd x = joint_ascent_probe(jp, t);
      for (int i = 0; i < cfg.M; ++i) {
        ds.responses[t][i] = x.segment(2 * i, 2);
        if (cfg.weights[i] == 0.0) ds.responses[t][i].setZero();
      }
    }
    const double spend =
        std::accumulate(ds.responses[t].begin(), ds.responses[t].end(), 0.0,
                        [&](double acc, const Response& b) {
                          return acc + ds.probes[t].dot(b);
                        });
    if (std::abs(spend - pstar) > kSaturationTol)
      throw generation_error("budget not saturated at t=" + std::to_string(t + 1));
  }
  return ds;
}

ProbeResponseDataset generate_noncoordinated(int T, int M, int n,
                                             std::uint64_t seed) {
  if (T < 1 || M < 1 || n < 1)
    throw std::invalid_argument("generation requires T, M, n >= 1");
  ProbeResponseDataset ds;
  ds.T = T;
  ds.M = M;
  ds.n = n;
  ds.noisy = false;
  auto probe_rng = rng::substream(seed, rng::Stream::kProbes);
  ds.probes = sample_probes(T, n, probe_rng);
  ds.responses.assign(T, std::vector<Response>(M, Response::Zero(n)));
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int t = 0; t < T; ++t) {
    auto rng = rng::substream(seed, rng::Stream::kNonCoordinated, t);
    for (int i = 0; i < M; ++i)
      for (int c = 0; c < n; ++c) ds.responses[t][i](c) = u01(rng);
  }
  return ds;
}

std::pair<ProbeResponseDataset, NoiseDraws> add_noise_with_draws(
    const ProbeResponseDataset& ds, const NoiseModel& noise,
    std::uint64_t seed) {
  if (ds.noisy)
    throw std::invalid_argument("add_noise input must be a clean dataset");
  if (noise.sigma < 0.0 || !std::isfinite(noise.sigma))
    throw std::invalid_argument("noise sigma must be finite and >= 0");
  ProbeResponseDataset out = ds;
  out.noisy = true;
  NoiseDraws draws;
  draws.eps.assign(ds.T, std::vector<Eigen::VectorXd>(
                             ds.M, Eigen::VectorXd::Zero(ds.n)));
  if (noise.sigma == 0.0) return {out, draws};
  std::normal_distribution<double> gauss(0.0, noise.sigma);
  for (int t = 0; t < ds.T; ++t) {
    auto rng = rng::substream(seed, rng::Stream::kNoise, t);
    for (int i = 0; i < ds.M; ++i) {
      for (int c = 0; c < ds.n; ++c) {
        const double e = gauss(rng);
        draws.eps[t][i](c) = e;
        out.responses[t][i](c) += e;
      }
    }
  }
  return {out, draws};
}

ProbeResponseDataset add_noise(const ProbeResponseDataset& ds,
                               const NoiseModel& noise, std::uint64_t seed) {
  return add_noise_with_draws(ds, noise, seed).first;
}

nlohmann::json config_to_json(const GenerationConfig& cfg) {
  nlohmann::json j;
  j["T"] = cfg.T;
  j["M"] = cfg.M;
  j["n"] = cfg.n;
  j["probe_law"] = {{"kind", "uniform"}, {"low", kProbeLow}, {"high", kProbeHigh}};
  nlohmann::json utils = nlohmann::json::array();
  for (const UtilityKind& u : cfg.utilities) utils.push_back(utility_name(u));
  j["utilities"] = utils;
  j["weights"] = std::vector<double>(cfg.weights.mu().data(),
                                     cfg.weights.mu().data() + cfg.weights.size());
  j["budget"] = {{"p_star", cfg.budget.p_star}};
  j["mode"] = cfg.mode == GenerationMode::BudgetShare ? "budget-share" : "joint-ascent";
  j["seed"] = cfg.seed;
  return j;
}

GenerationConfig config_from_json(const nlohmann::json& j) {
  GenerationConfig cfg;
  cfg.T = j.at("T").get<int>();
  cfg.M = j.at("M").get<int>();
  cfg.n = j.at("n").get<int>();
  if (j.contains("probe_law")) {
    const auto& pl = j.at("probe_law");
    if (pl.at("kind").get<std::string>() != "uniform" ||
        pl.at("low").get<double>() != kProbeLow ||
        pl.at("high").get<double>() != kProbeHigh)
      throw std::invalid_argument("unsupported probe law");
  }
  cfg.utilities.clear();
  for (const auto& name : j.at("utilities"))
    cfg.utilities.push_back(closed_form_from_name(name.get<std::string>()));
  const auto wv = j.at("weights").get<std::vector<double>>();
  cfg.weights = SimplexWeights(
      Eigen::Map<const Eigen::VectorXd>(wv.data(), static_cast<int>(wv.size())));
  cfg.budget.p_star = j.at("budget").at("p_star").get<double>();
  const std::string mode = j.at("mode").get<std::string>();
  if (mode == "budget-share")
    cfg.mode = GenerationMode::BudgetShare;
  else if (mode == "joint-ascent")
    cfg.mode = GenerationMode::JointAscent;
  else
    throw std::invalid_argument("unknown generation mode '" + mode + "'");
  cfg.seed = j.at("seed").get<std::uint64_t>();
  return cfg;
}

}  // namespace coorddet::forward
