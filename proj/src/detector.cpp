#include "coorddet/detector.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "coorddet/rng.hpp"

namespace coorddet::detector {

PhiHat phi_hat(const ProbeResponseDataset& ds, int radar, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be > 0");
  const Eigen::MatrixXd a = afriat::afriat_matrix(ds, radar);
  const int T = ds.T;
  PhiHat out;
  out.certificate.radar = radar;
  if (T == 1) {
    out.value = 0.0;
    out.certificate.u = Eigen::VectorXd::Ones(1);
    out.certificate.lambda = Eigen::VectorXd::Ones(1);
    out.degenerate = true;
    return out;
  }

  // Feasibility of the relaxed system is monotone in phi (lambda > 0), so
  // the minimal relaxation is a bisection over a feasibility boundary.
  // phi = max(0, max_{s!=t} -a(t,s)) is always feasible: constant u and
  // lambda = 1 give a(t,s) + phi >= 0.
  double hi = 0.0;
  for (int t = 0; t < T; ++t)
    for (int s = 0; s < T; ++s)
      if (s != t) hi = std::max(hi, -a(t, s));
  afriat::SystemFeasibility best = afriat::relaxed_system_feasible(a, hi);
  if (!best.feasible)
    throw std::runtime_error("relaxation upper bound unexpectedly infeasible");

  double lo = -hi - 1.0;
  for (afriat::SystemFeasibility f; (f = afriat::relaxed_system_feasible(a, lo)).feasible;) {
    best = f;
    hi = lo;
    if (lo <= kPhiFloor) {
      out.value = lo;
      out.certificate.u = best.u;
      out.certificate.lambda = best.lambda;
      out.degenerate = true;
      return out;
    }
    lo = 2.0 * lo - 1.0;
  }

  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    afriat::SystemFeasibility f = afriat::relaxed_system_feasible(a, mid);
    if (f.feasible) {
      best = f;
      hi = mid;
    } else {
      lo = mid;
    }
  }
  out.value = hi;
  out.certificate.u = best.u;
  out.certificate.lambda = best.lambda;
  out.degenerate = false;
  return out;
}

RelaxedStatistic phi_star(const ProbeResponseDataset& ds, double tol) {
  if (ds.M < 1) throw std::invalid_argument("dataset has no agents");
  RelaxedStatistic out;
  out.per_radar = Eigen::VectorXd::Zero(ds.M);
  for (int i = 0; i < ds.M; ++i) {
    PhiHat ph = phi_hat(ds, i, tol);
    out.per_radar(i) = ph.value;
    out.certificates.push_back(std::move(ph.certificate));
    out.degenerate.push_back(ph.degenerate);
  }
  out.phi_star = out.per_radar.maxCoeff();
  return out;
}

double psi_from_draws(const std::vector<Probe>& probes,
                      const std::vector<Eigen::VectorXd>& eps_for_radar) {
  const int T = static_cast<int>(probes.size());
  if (static_cast<int>(eps_for_radar.size()) != T)
    throw std::invalid_argument("need one noise draw per probe");
  if (T == 1) return 0.0;  // empty pair max
  double worst = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < T; ++t)
    for (int s = 0; s < T; ++s)
      if (s != t)
        worst = std::max(worst, probes[t].dot(eps_for_radar[t] - eps_for_radar[s]));
  return worst;
}

EmpiricalCdf sample_psi(const std::vector<Probe>& probes, int M,
                        const NoiseModel& noise, int L, std::uint64_t seed) {
  if (probes.empty()) throw std::invalid_argument("need at least one probe");
  if (M < 1) throw std::invalid_argument("M must be >= 1");
  if (L < 1) throw std::invalid_argument("L must be >= 1");
  if (noise.sigma < 0.0 || !std::isfinite(noise.sigma))
    throw std::invalid_argument("noise sigma must be finite and >= 0");
  const int T = static_cast<int>(probes.size());
  const int n = static_cast<int>(probes[0].size());

  EmpiricalCdf cdf;
  cdf.samples.resize(L);
  std::vector<Eigen::VectorXd> eps(T, Eigen::VectorXd::Zero(n));
  for (int l = 0; l < L; ++l) {
    auto rng = rng::substream(seed, rng::Stream::kPsi, l);
    double psi = -std::numeric_limits<double>::infinity();
    if (noise.sigma == 0.0) {
      psi = 0.0;  // all draws are exactly zero
    } else {
      std::normal_distribution<double> gauss(0.0, noise.sigma);
      for (int i = 0; i < M; ++i) {
        for (int t = 0; t < T; ++t)
          for (int c = 0; c < n; ++c) eps[t](c) = gauss(rng);
        psi = std::max(psi, psi_from_draws(probes, eps));
      }
    }
    cdf.samples[l] = psi;
  }
  std::sort(cdf.samples.begin(), cdf.samples.end());
  return cdf;
}

double cdf_value(const EmpiricalCdf& cdf, double x) {
  if (cdf.samples.empty()) throw std::invalid_argument("empty calibration sample");
  const auto it = std::upper_bound(cdf.samples.begin(), cdf.samples.end(), x);
  return static_cast<double>(it - cdf.samples.begin()) /
         static_cast<double>(cdf.samples.size());
}

DetectorDecision decide(double phi_star_value, const EmpiricalCdf& cdf,
                        double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("gamma must lie in (0, 1)");
  DetectorDecision d;
  d.gamma = gamma;
  d.statistic = 1.0 - cdf_value(cdf, phi_star_value);
  d.hypothesis = d.statistic > gamma ? Hypothesis::H0 : Hypothesis::H1;
  return d;
}

DetectorDecision detect(const ProbeResponseDataset& ds, const EmpiricalCdf& cdf,
                        double gamma, double tol) {
  return decide(phi_star(ds, tol).phi_star, cdf, gamma);
}

double type1_mc(const forward::GenerationConfig& cfg, const NoiseModel& noise,
                double gamma, int trials, int L, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("gamma must lie in (0, 1)");
  int rejections = 0;
  for (int k = 0; k < trials; ++k) {
    auto trial_rng = rng::substream(seed, rng::Stream::kTrial, k);
    forward::GenerationConfig c = cfg;
    c.seed = trial_rng();
    const std::uint64_t noise_seed = trial_rng();
    const std::uint64_t psi_seed = trial_rng();
    const ProbeResponseDataset clean = forward::generate_coordinated(c);
    const ProbeResponseDataset noisy = forward::add_noise(clean, noise, noise_seed);
    const EmpiricalCdf cdf = sample_psi(noisy.probes, noisy.M, noise, L, psi_seed);
    const DetectorDecision d = decide(phi_star(noisy).phi_star, cdf, gamma);
    if (d.hypothesis == Hypothesis::H1) ++rejections;
  }
  return static_cast<double>(rejections) / static_cast<double>(trials);
}

nlohmann::json report_to_json(const DetectorReport& report) {
  nlohmann::json j;
  j["phi_per_radar"] = std::vector<double>(
      report.phi_per_radar.data(),
      report.phi_per_radar.data() + report.phi_per_radar.size());
  j["phi_star"] = report.phi_star;
  j["statistic"] = report.statistic;
  j["gamma"] = report.gamma;
  j["hypothesis"] = report.hypothesis == Hypothesis::H0 ? "H0" : "H1";
  j["L"] = report.L;
  j["seed"] = report.seed;
  nlohmann::json certs = nlohmann::json::array();
  for (const auto& cert : report.certificates)
    certs.push_back(afriat::certificate_to_json(cert));
  j["certificates"] = certs;
  return j;
}

DetectorReport report_from_json(const nlohmann::json& j) {
  DetectorReport report;
  const auto phis = j.at("phi_per_radar").get<std::vector<double>>();
  report.phi_per_radar = Eigen::Map<const Eigen::VectorXd>(
      phis.data(), static_cast<int>(phis.size()));
  report.phi_star = j.at("phi_star").get<double>();
  report.statistic = j.at("statistic").get<double>();
  report.gamma = j.at("gamma").get<double>();
  const std::string hyp = j.at("hypothesis").get<std::string>();
  if (hyp != "H0" && hyp != "H1")
    throw std::invalid_argument("hypothesis must be H0 or H1");
  report.hypothesis = hyp == "H0" ? Hypothesis::H0 : Hypothesis::H1;
  report.L = j.at("L").get<int>();
  report.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& cj : j.at("certificates"))
    report.certificates.push_back(afriat::certificate_from_json(cj));
  return report;
}

void write_report(const DetectorReport& report, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  f << report_to_json(report).dump(2) << '\n';
}

DetectorReport read_report(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path.string() + "'");
  nlohmann::json j;
  f >> j;
  return report_from_json(j);
}

}  // namespace coorddet::detector
