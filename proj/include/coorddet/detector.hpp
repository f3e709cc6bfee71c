#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "json.hpp"

#include "coorddet/afriat.hpp"
#include "coorddet/dataset.hpp"
#include "coorddet/forward.hpp"

namespace coorddet::detector {

// Lower floor for the relaxation search; datasets whose minimal relaxation
// would fall below this report the floor with `degenerate` set.
inline constexpr double kPhiFloor = -1e6;

// Minimal uniform relaxation phi that makes one agent's system feasible,
// located by bisection over the monotone feasibility boundary. `certificate`
// is feasible at value + tol. T = 1 is vacuously consistent (value 0,
// degenerate).
struct PhiHat {
  double value = 0.0;
  afriat::AfriatCertificate certificate;
  bool degenerate = false;
};
PhiHat phi_hat(const ProbeResponseDataset& ds, int radar, double tol = 1e-9);

// Per-agent minimal relaxations, their max, and the certificates achieving
// each (the certificate set handed to reconstruction).
struct RelaxedStatistic {
  Eigen::VectorXd per_radar;
  double phi_star = 0.0;
  std::vector<afriat::AfriatCertificate> certificates;
  std::vector<bool> degenerate;
};
RelaxedStatistic phi_star(const ProbeResponseDataset& ds, double tol = 1e-9);

// Sorted empirical sample of the noise functional Psi under an assumed
// noise level, conditioned on the realized probes.
struct EmpiricalCdf {
  std::vector<double> samples;  // ascending
};

// L independent draws of Psi = max_i max_{t != s} alpha_t'(eps_t^i -
// eps_s^i) with eps ~ the noise model. Deterministic in seed.
EmpiricalCdf sample_psi(const std::vector<Probe>& probes, int M,
                        const NoiseModel& noise, int L, std::uint64_t seed);

// Psi^i for one agent's realized draws (eps_for_radar has T entries); the
// pair max is empty for T = 1, defined as 0.
double psi_from_draws(const std::vector<Probe>& probes,
                      const std::vector<Eigen::VectorXd>& eps_for_radar);

// Right-continuous empirical CDF value: fraction of samples <= x.
double cdf_value(const EmpiricalCdf& cdf, double x);

enum class Hypothesis { H0, H1 };

struct DetectorDecision {
  double statistic = 0.0;  // 1 - F_Psi(phi_star)
  double gamma = 0.0;
  Hypothesis hypothesis = Hypothesis::H0;
};

// Decision rule: H0 (coordination not rejected) iff statistic > gamma.
// gamma must lie in (0,1).
DetectorDecision decide(double phi_star_value, const EmpiricalCdf& cdf,
                        double gamma);

// Convenience composition: phi_star on ds, then decide.
DetectorDecision detect(const ProbeResponseDataset& ds, const EmpiricalCdf& cdf,
                        double gamma, double tol = 1e-9);

// Monte-Carlo Type-I error estimate: fraction of freshly generated
// coordinated datasets (noised at `noise`) that the detector rejects at
// level gamma with L calibration draws per trial. Deterministic in seed.
double type1_mc(const forward::GenerationConfig& cfg, const NoiseModel& noise,
                double gamma, int trials, int L, std::uint64_t seed);

// Everything a detect run reports, serialized as JSON. Certificates ride
// along so reconstruction can run from the report alone.
struct DetectorReport {
  Eigen::VectorXd phi_per_radar;
  double phi_star = 0.0;
  double statistic = 0.0;
  double gamma = 0.0;
  Hypothesis hypothesis = Hypothesis::H0;
  int L = 0;
  std::uint64_t seed = 0;
  std::vector<afriat::AfriatCertificate> certificates;
};

nlohmann::json report_to_json(const DetectorReport& report);
DetectorReport report_from_json(const nlohmann::json& j);
void write_report(const DetectorReport& report, const std::filesystem::path& path);
DetectorReport read_report(const std::filesystem::path& path);

}  // namespace coorddet::detector
