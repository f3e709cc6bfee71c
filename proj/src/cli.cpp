#include "coorddet/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "coorddet/afriat.hpp"
#include "coorddet/dataset_io.hpp"
#include "coorddet/detector.hpp"
#include "coorddet/forward.hpp"
#include "coorddet/rng.hpp"

namespace coorddet::cli {

namespace {

// Fills options that were not passed on the command line from a JSON config
// whose keys mirror the long flag names; explicit flags always win.
struct ConfigMerge {
  const CLI::App* cmd = nullptr;
  nlohmann::json j = nlohmann::json::object();

  template <typename T>
  void merge(const std::string& flag, T& var) const {
    const std::string key = flag.substr(2);  // strip leading "--"
    if (cmd->count(flag) == 0 && j.contains(key)) var = j.at(key).get<T>();
  }
};

nlohmann::json load_config(const std::string& path) {
  if (path.empty()) return nlohmann::json::object();
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config '" + path + "'");
  nlohmann::json j;
  f >> j;
  if (!j.is_object()) throw std::runtime_error("config must be a JSON object");
  return j;
}

forward::GenerationMode parse_mode(const std::string& mode) {
  if (mode == "budget-share") return forward::GenerationMode::BudgetShare;
  if (mode == "joint-ascent") return forward::GenerationMode::JointAscent;
  throw std::runtime_error("unknown mode '" + mode +
                           "' (expected budget-share or joint-ascent)");
}

// Coordinated generation setup for a given table size: the reference radar
// mix and budget for M = 3, otherwise closed-form objectives repeating
// cyclically with uniform weights and unit budget. `pstar` overrides the
// default budget when finite (NaN = not passed).
forward::GenerationConfig make_generation_config(int T, int M, int n,
                                                 const std::string& mode,
                                                 double pstar,
                                                 std::uint64_t seed) {
  forward::GenerationConfig cfg = forward::reference_config(seed);
  cfg.T = T;
  cfg.n = n;
  cfg.mode = parse_mode(mode);
  if (M != 3) {
    static constexpr ClosedFormUtility kCycle[] = {ClosedFormUtility::Det,
                                                   ClosedFormUtility::Trace,
                                                   ClosedFormUtility::SqrtProd};
    cfg.M = M;
    cfg.utilities.clear();
    for (int i = 0; i < M; ++i) cfg.utilities.push_back(kCycle[i % 3]);
    cfg.weights = SimplexWeights::uniform(M);
    cfg.budget.p_star = 1.0;
  }
  if (!std::isnan(pstar)) {
    if (!(pstar > 0.0)) throw std::runtime_error("--pstar must be > 0");
    cfg.budget.p_star = pstar;
  }
  return cfg;
}

int report_dataset_violations(const std::vector<Violation>& violations,
                              std::ostream& err) {
  for (const Violation& v : violations) {
    err << "invalid dataset: " << v.what;
    if (v.t > 0) err << " [t=" << v.t;
    if (v.i > 0) err << " i=" << v.i;
    if (v.component > 0) err << " component=" << v.component;
    if (v.t > 0) err << "]";
    err << '\n';
  }
  return kUsage;
}

struct SimulateArgs {
  int T = 10, M = 3, n = 2;
  double sigma = 0.0;
  double pstar = std::numeric_limits<double>::quiet_NaN();  // NaN = default
  std::uint64_t seed = 0;
  std::string mode = "budget-share";
  std::string out = "dataset";
  std::string config;
  bool coordinated = false, noncoordinated = false;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  if (a.sigma < 0.0) {
    err << "error: --sigma must be >= 0\n";
    return kUsage;
  }
  if (a.T < 1 || a.M < 1 || a.n < 1) {
    err << "error: --T, --M, --n must be >= 1\n";
    return kUsage;
  }
  const bool coordinated = !a.noncoordinated;

  ProbeResponseDataset ds;
  double pstar_used = 0.0;
  if (coordinated) {
    const forward::GenerationConfig cfg =
        make_generation_config(a.T, a.M, a.n, a.mode, a.pstar, a.seed);
    pstar_used = cfg.budget.p_star;
    ds = forward::generate_coordinated(cfg);
  } else {
    ds = forward::generate_noncoordinated(a.T, a.M, a.n, a.seed);
  }

  out << "seed: " << a.seed << '\n';
  const std::string clean_path = a.out + "_clean.csv";
  write_dataset(ds, clean_path);
  out << "wrote " << clean_path << '\n';
  if (coordinated) {
    double worst = 0.0;
    for (int t = 0; t < ds.T; ++t) {
      double spend = 0.0;
      for (int i = 0; i < ds.M; ++i) spend += ds.probes[t].dot(ds.responses[t][i]);
      worst = std::max(worst, std::abs(spend - pstar_used));
    }
    out << "budget saturation: max_t |alpha_t' sum_i beta_t^i - p_star| = "
        << format_double(worst) << '\n';
  } else {
    out << "regime: noncoordinated (responses i.i.d. uniform on [0,1]^n)\n";
  }
  if (a.sigma > 0.0) {
    const ProbeResponseDataset noisy =
        forward::add_noise(ds, NoiseModel{NoiseModel::Kind::GaussianIid, a.sigma},
                           a.seed);
    const std::string noisy_path = a.out + "_noisy.csv";
    write_dataset(noisy, noisy_path);
    out << "wrote " << noisy_path << " (sigma = " << format_double(a.sigma)
        << ")\n";
  }
  return kOk;
}

struct DetectArgs {
  std::string dataset;
  double gamma = 0.05;
  int L = 500;
  double sigma_assumed = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t seed = 0;
  double tol = 1e-9;
  std::string report = "report.json";
  std::string config;
};

int cmd_detect(const DetectArgs& a, std::ostream& out, std::ostream& err) {
  if (std::isnan(a.sigma_assumed)) {
    err << "error: --sigma-assumed is required (flag or config key)\n";
    return kUsage;
  }
  if (a.sigma_assumed < 0.0) {
    err << "error: --sigma-assumed must be >= 0\n";
    return kUsage;
  }
  if (!(a.gamma > 0.0 && a.gamma < 1.0)) {
    err << "error: --gamma must lie in (0, 1)\n";
    return kUsage;
  }
  if (a.L < 1) {
    err << "error: --L must be >= 1\n";
    return kUsage;
  }
  const ProbeResponseDataset ds = read_dataset(a.dataset);
  const auto violations = validate_dataset(ds);
  if (!violations.empty()) return report_dataset_violations(violations, err);

  const detector::RelaxedStatistic rs = detector::phi_star(ds, a.tol);
  const NoiseModel noise{NoiseModel::Kind::GaussianIid, a.sigma_assumed};
  const detector::EmpiricalCdf cdf =
      detector::sample_psi(ds.probes, ds.M, noise, a.L, a.seed);
  const detector::DetectorDecision d = detector::decide(rs.phi_star, cdf, a.gamma);

  detector::DetectorReport report;
  report.phi_per_radar = rs.per_radar;
  report.phi_star = rs.phi_star;
  report.statistic = d.statistic;
  report.gamma = d.gamma;
  report.hypothesis = d.hypothesis;
  report.L = a.L;
  report.seed = a.seed;
  report.certificates = rs.certificates;
  detector::write_report(report, a.report);

  out << "phi_per_radar:";
  for (int i = 0; i < rs.per_radar.size(); ++i)
    out << ' ' << format_double(rs.per_radar(i));
  out << '\n';
  out << "phi_star: " << format_double(rs.phi_star) << '\n';
  out << "statistic: " << format_double(d.statistic) << '\n';
  out << "gamma: " << format_double(d.gamma) << '\n';
  out << "hypothesis: "
      << (d.hypothesis == detector::Hypothesis::H0 ? "H0" : "H1") << '\n';
  out << "wrote " << a.report << '\n';
  return d.hypothesis == detector::Hypothesis::H0 ? kOk : kRejected;
}

struct ReconstructArgs {
  std::string dataset;
  std::string report;
  std::string out = "utility";
  std::string true_utilities;  // comma-separated closed-form names
  std::string config;
};

void write_grid_csv(const std::string& path, const UtilityKind& utility,
                    std::ostream& out) {
  // 50 x 50 evaluation grid on [0.01, 1]^2, row-major in (beta_1, beta_2).
  std::ostringstream body;
  body << "beta_1,beta_2,value\n";
  for (int k1 = 0; k1 < 50; ++k1) {
    const double b1 = 0.01 + (1.0 - 0.01) * k1 / 49.0;
    for (int k2 = 0; k2 < 50; ++k2) {
      const double b2 = 0.01 + (1.0 - 0.01) * k2 / 49.0;
      const double v = eval_utility(utility, (Eigen::VectorXd(2) << b1, b2).finished());
      body << format_double(b1) << ',' << format_double(b2) << ','
           << format_double(v) << '\n';
    }
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << body.str();
  out << "wrote " << path << '\n';
}

int cmd_reconstruct(const ReconstructArgs& a, std::ostream& out,
                    std::ostream& err) {
  const ProbeResponseDataset ds = read_dataset(a.dataset);
  const auto violations = validate_dataset(ds);
  if (!violations.empty()) return report_dataset_violations(violations, err);
  const detector::DetectorReport report = detector::read_report(a.report);

  if (static_cast<int>(report.certificates.size()) != ds.M) {
    err << "error: report has " << report.certificates.size()
        << " certificates but dataset has M = " << ds.M << '\n';
    return kUsage;
  }
  if (ds.n != 2) {
    err << "error: utility grids require n = 2\n";
    return kUsage;
  }
  std::vector<ClosedFormUtility> true_forms;
  if (!a.true_utilities.empty()) {
    std::stringstream ss(a.true_utilities);
    std::string name;
    while (std::getline(ss, name, ','))
      true_forms.push_back(closed_form_from_name(name));
    if (static_cast<int>(true_forms.size()) != ds.M) {
      err << "error: --true-utilities must name one utility per agent\n";
      return kUsage;
    }
  }

  if (ds.noisy)
    out << "note: dataset is noisy; certificates give a heuristic "
           "reconstruction, not an exact rationalization\n";
  for (int i = 0; i < ds.M; ++i) {
    const afriat::AfriatCertificate& cert = report.certificates[i];
    if (cert.radar != i || cert.u.size() != ds.T) {
      err << "error: certificate " << (i + 1)
          << " does not match the dataset (radar index or T)\n";
      return kUsage;
    }
    const PiecewiseAffineUtility util = afriat::reconstruct_utility(cert, ds);
    write_grid_csv(a.out + "_radar" + std::to_string(i + 1) + "_reconstructed.csv",
                   UtilityKind{util}, out);
    if (!true_forms.empty())
      write_grid_csv(a.out + "_radar" + std::to_string(i + 1) + "_true.csv",
                     UtilityKind{true_forms[i]}, out);
  }
  return kOk;
}

struct SweepArgs {
  std::vector<double> sigmas;
  int trials = 50;
  int T = 10, M = 3, n = 2;
  int L = 500;
  double pstar = std::numeric_limits<double>::quiet_NaN();  // NaN = default
  std::uint64_t seed = 0;
  std::string mode = "budget-share";
  std::string out = "sweep.csv";
  std::string config;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
  if (a.sigmas.empty()) {
    err << "error: --sigmas is required (flag or config key)\n";
    return kUsage;
  }
  if (a.trials < 1 || a.T < 1 || a.M < 1 || a.n < 1 || a.L < 1) {
    err << "error: --trials, --T, --M, --n, --L must be >= 1\n";
    return kUsage;
  }
  for (double s : a.sigmas) {
    if (s < 0.0) {
      err << "error: sweep sigmas must be >= 0\n";
      return kUsage;
    }
  }

  std::ostringstream body;
  body << "sigma,regime,mean_statistic,std_statistic,trials\n";
  int rows = 0;
  for (std::size_t si = 0; si < a.sigmas.size(); ++si) {
    const NoiseModel noise{NoiseModel::Kind::GaussianIid, a.sigmas[si]};
    for (int regime = 0; regime < 2; ++regime) {  // 0: coordinated, 1: not
      std::vector<double> stats;
      stats.reserve(a.trials);
      for (int k = 0; k < a.trials; ++k) {
        const std::uint64_t item =
            (static_cast<std::uint64_t>(si) * 2 + regime) *
                static_cast<std::uint64_t>(a.trials) +
            static_cast<std::uint64_t>(k);
        auto trial_rng = rng::substream(a.seed, rng::Stream::kTrial, item);
        const std::uint64_t gen_seed = trial_rng();
        const std::uint64_t noise_seed = trial_rng();
        const std::uint64_t psi_seed = trial_rng();
        ProbeResponseDataset clean =
            regime == 0
                ? forward::generate_coordinated(make_generation_config(
                      a.T, a.M, a.n, a.mode, a.pstar, gen_seed))
                : forward::generate_noncoordinated(a.T, a.M, a.n, gen_seed);
        const ProbeResponseDataset observed =
            forward::add_noise(clean, noise, noise_seed);
        const detector::EmpiricalCdf cdf = detector::sample_psi(
            observed.probes, observed.M, noise, a.L, psi_seed);
        stats.push_back(
            1.0 - detector::cdf_value(cdf, detector::phi_star(observed).phi_star));
      }
      double mean = 0.0;
      for (double s : stats) mean += s;
      mean /= stats.size();
      double var = 0.0;
      for (double s : stats) var += (s - mean) * (s - mean);
      const double stddev =
          stats.size() > 1 ? std::sqrt(var / (stats.size() - 1)) : 0.0;
      body << format_double(a.sigmas[si]) << ','
           << (regime == 0 ? "coordinated" : "noncoordinated") << ','
           << format_double(mean) << ',' << format_double(stddev) << ','
           << a.trials << '\n';
      ++rows;
    }
  }
  std::ofstream f(a.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + a.out + "'");
  f << body.str();
  out << "wrote " << a.out << " (" << rows << " rows)\n";
  return kOk;
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pareto-coordination detection in multi-agent response data"};
  app.name("coorddet");
  app.require_subcommand(1);

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Generate coordinated or noncoordinated datasets");
  simulate->add_flag("--coordinated", sim.coordinated,
                     "Pareto-coordinated responses (default)");
  simulate->add_flag("--noncoordinated", sim.noncoordinated,
                     "independent uniform responses");
  simulate->add_option("--T", sim.T, "number of probes");
  simulate->add_option("--M", sim.M, "number of agents");
  simulate->add_option("--n", sim.n, "response dimension");
  simulate->add_option("--sigma", sim.sigma, "noise level for the noisy copy");
  simulate->add_option("--pstar", sim.pstar, "joint budget");
  simulate->add_option("--seed", sim.seed, "rng seed");
  simulate->add_option("--mode", sim.mode, "budget-share or joint-ascent");
  simulate->add_option("--out", sim.out, "output path prefix");
  simulate->add_option("--config", sim.config, "JSON config mirroring flags");

  DetectArgs det;
  CLI::App* detect =
      app.add_subcommand("detect", "Run the coordination detector on a dataset");
  detect->add_option("dataset", det.dataset, "dataset CSV")->required();
  detect->add_option("--gamma", det.gamma, "significance level in (0,1)");
  detect->add_option("--L", det.L, "calibration sample size");
  detect->add_option("--sigma-assumed", det.sigma_assumed,
                     "assumed observation noise level");
  detect->add_option("--seed", det.seed, "rng seed for calibration draws");
  detect->add_option("--tol", det.tol, "bisection tolerance");
  detect->add_option("--report", det.report, "report JSON output path");
  detect->add_option("--config", det.config, "JSON config mirroring flags");

  ReconstructArgs rec;
  CLI::App* reconstruct = app.add_subcommand(
      "reconstruct", "Evaluate rationalizing utilities from a detect report");
  reconstruct->add_option("dataset", rec.dataset, "dataset CSV")->required();
  reconstruct->add_option("report", rec.report, "detect report JSON")->required();
  reconstruct->add_option("--out", rec.out, "output path prefix");
  reconstruct->add_option("--true-utilities", rec.true_utilities,
                          "comma-separated generator names for comparison grids");
  reconstruct->add_option("--config", rec.config, "JSON config mirroring flags");

  SweepArgs sw;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Mean detector statistic across noise levels and regimes");
  sweep->add_option("--sigmas", sw.sigmas, "noise levels")->delimiter(',');
  sweep->add_option("--trials", sw.trials, "trials per (sigma, regime)");
  sweep->add_option("--T", sw.T, "number of probes");
  sweep->add_option("--M", sw.M, "number of agents");
  sweep->add_option("--n", sw.n, "response dimension");
  sweep->add_option("--L", sw.L, "calibration sample size");
  sweep->add_option("--pstar", sw.pstar, "joint budget");
  sweep->add_option("--seed", sw.seed, "rng seed");
  sweep->add_option("--mode", sw.mode, "budget-share or joint-ascent");
  sweep->add_option("--out", sw.out, "output CSV path");
  sweep->add_option("--config", sw.config, "JSON config mirroring flags");

  std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (app.got_subcommand(simulate)) {
      ConfigMerge cm{simulate, load_config(sim.config)};
      cm.merge("--T", sim.T);
      cm.merge("--M", sim.M);
      cm.merge("--n", sim.n);
      cm.merge("--sigma", sim.sigma);
      cm.merge("--pstar", sim.pstar);
      cm.merge("--seed", sim.seed);
      cm.merge("--mode", sim.mode);
      cm.merge("--out", sim.out);
      cm.merge("--coordinated", sim.coordinated);
      cm.merge("--noncoordinated", sim.noncoordinated);
      if (sim.coordinated && sim.noncoordinated) {
        err << "error: --coordinated and --noncoordinated are exclusive\n";
        return kUsage;
      }
      return cmd_simulate(sim, out, err);
    }
    if (app.got_subcommand(detect)) {
      ConfigMerge cm{detect, load_config(det.config)};
      cm.merge("--gamma", det.gamma);
      cm.merge("--L", det.L);
      cm.merge("--sigma-assumed", det.sigma_assumed);
      cm.merge("--seed", det.seed);
      cm.merge("--tol", det.tol);
      cm.merge("--report", det.report);
      return cmd_detect(det, out, err);
    }
    if (app.got_subcommand(reconstruct)) {
      ConfigMerge cm{reconstruct, load_config(rec.config)};
      cm.merge("--out", rec.out);
      cm.merge("--true-utilities", rec.true_utilities);
      return cmd_reconstruct(rec, out, err);
    }
    ConfigMerge cm{sweep, load_config(sw.config)};
    cm.merge("--sigmas", sw.sigmas);
    cm.merge("--trials", sw.trials);
    cm.merge("--T", sw.T);
    cm.merge("--M", sw.M);
    cm.merge("--n", sw.n);
    cm.merge("--L", sw.L);
    cm.merge("--pstar", sw.pstar);
    cm.merge("--seed", sw.seed);
    cm.merge("--mode", sw.mode);
    cm.merge("--out", sw.out);
    return cmd_sweep(sw, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace coorddet::cli
