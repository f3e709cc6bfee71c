// Python bindings for the coordination-detection core. The API mirrors the
// C++ namespaces closely; functions that consume RNG state in C++ take plain
// integer seeds here.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <random>
#include <sstream>
#include <variant>

#include "coorddet/afriat.hpp"
#include "coorddet/cli.hpp"
#include "coorddet/dataset_io.hpp"
#include "coorddet/detector.hpp"
#include "coorddet/forward.hpp"
#include "coorddet/tracking.hpp"

namespace py = pybind11;
using namespace coorddet;

namespace {

UtilityKind utility_from_name(const std::string& name) {
  return closed_form_from_name(name);
}

forward::GenerationConfig build_config(int T, int M, int n,
                                       const std::vector<std::string>& utilities,
                                       const Eigen::VectorXd& weights,
                                       double p_star, const std::string& mode,
                                       std::uint64_t seed) {
  forward::GenerationConfig cfg;
  cfg.T = T;
  cfg.M = M;
  cfg.n = n;
  for (const auto& name : utilities) cfg.utilities.push_back(utility_from_name(name));
  cfg.weights = SimplexWeights(weights);
  cfg.budget.p_star = p_star;
  if (mode == "budget-share")
    cfg.mode = forward::GenerationMode::BudgetShare;
  else if (mode == "joint-ascent")
    cfg.mode = forward::GenerationMode::JointAscent;
  else
    throw std::invalid_argument("mode must be budget-share or joint-ascent");
  cfg.seed = seed;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Pareto-coordination detection in multi-agent response data";

  py::class_<ProbeResponseDataset>(m, "Dataset")
      .def(py::init<>())
      .def_readwrite("T", &ProbeResponseDataset::T)
      .def_readwrite("M", &ProbeResponseDataset::M)
      .def_readwrite("n", &ProbeResponseDataset::n)
      .def_readwrite("probes", &ProbeResponseDataset::probes)
      .def_readwrite("responses", &ProbeResponseDataset::responses)
      .def_readwrite("noisy", &ProbeResponseDataset::noisy)
      .def("__repr__", [](const ProbeResponseDataset& ds) {
        std::ostringstream ss;
        ss << "Dataset(T=" << ds.T << ", M=" << ds.M << ", n=" << ds.n
           << ", noisy=" << (ds.noisy ? "True" : "False") << ")";
        return ss.str();
      });

  py::class_<Violation>(m, "Violation")
      .def_readonly("what", &Violation::what)
      .def_readonly("t", &Violation::t)
      .def_readonly("i", &Violation::i)
      .def_readonly("component", &Violation::component);

  m.def("validate_dataset", &validate_dataset, py::arg("dataset"));
  m.def("datasets_close", &datasets_close, py::arg("a"), py::arg("b"),
        py::arg("tol") = 1e-15);
  m.def("read_dataset", &read_dataset, py::arg("path"));
  m.def("write_dataset", &write_dataset, py::arg("dataset"), py::arg("path"));

  m.def(
      "generate_coordinated",
      [](int T, int M, int n, const std::vector<std::string>& utilities,
         const Eigen::VectorXd& weights, double p_star, const std::string& mode,
         std::uint64_t seed) {
        return forward::generate_coordinated(
            build_config(T, M, n, utilities, weights, p_star, mode, seed));
      },
      py::arg("T"), py::arg("M"), py::arg("n"), py::arg("utilities"),
      py::arg("weights"), py::arg("p_star") = 1.0,
      py::arg("mode") = "budget-share", py::arg("seed") = 0);
  m.def(
      "generate_reference",
      [](std::uint64_t seed, int T) {
        auto cfg = forward::reference_config(seed);
        cfg.T = T;
        return forward::generate_coordinated(cfg);
      },
      py::arg("seed") = 0, py::arg("T") = 10);
  m.def("generate_noncoordinated", &forward::generate_noncoordinated,
        py::arg("T"), py::arg("M"), py::arg("n"), py::arg("seed") = 0);
  m.def(
      "add_noise",
      [](const ProbeResponseDataset& ds, double sigma, std::uint64_t seed) {
        return forward::add_noise(ds, {NoiseModel::Kind::GaussianIid, sigma},
                                  seed);
      },
      py::arg("dataset"), py::arg("sigma"), py::arg("seed") = 0);
  m.def(
      "solve_radar_budget",
      [](const std::string& utility, const Eigen::VectorXd& alpha, double budget) {
        return forward::solve_radar_budget(utility_from_name(utility), alpha,
                                           budget);
      },
      py::arg("utility"), py::arg("alpha"), py::arg("budget"));

  py::class_<afriat::AfriatCertificate>(m, "Certificate")
      .def_readonly("radar", &afriat::AfriatCertificate::radar)
      .def_readonly("u", &afriat::AfriatCertificate::u)
      .def_readonly("lambda_", &afriat::AfriatCertificate::lambda);

  py::class_<afriat::RationalizabilityVerdict>(m, "Verdict")
      .def_readonly("consistent", &afriat::RationalizabilityVerdict::consistent)
      .def_readonly("certificates",
                    &afriat::RationalizabilityVerdict::certificates);

  m.def("test_rationalizable", &afriat::test_rationalizable, py::arg("dataset"));
  m.def("garp_oracle", &afriat::garp_oracle, py::arg("dataset"), py::arg("radar"));
  m.def("afriat_matrix", &afriat::afriat_matrix, py::arg("dataset"),
        py::arg("radar"));
  m.def(
      "reconstruct_utility_values",
      [](const afriat::AfriatCertificate& cert, const ProbeResponseDataset& ds,
         const std::vector<Eigen::VectorXd>& betas) {
        const auto util = afriat::reconstruct_utility(cert, ds);
        std::vector<double> values;
        values.reserve(betas.size());
        for (const auto& beta : betas)
          values.push_back(eval_utility(UtilityKind{util}, beta));
        return values;
      },
      py::arg("certificate"), py::arg("dataset"), py::arg("betas"),
      "Evaluate the certificate's piecewise-affine utility at each beta.");

  m.def(
      "phi_hat",
      [](const ProbeResponseDataset& ds, int radar, double tol) {
        const auto ph = detector::phi_hat(ds, radar, tol);
        return py::make_tuple(ph.value, ph.certificate, ph.degenerate);
      },
      py::arg("dataset"), py::arg("radar"), py::arg("tol") = 1e-9,
      "Returns (value, certificate, degenerate).");
  m.def(
      "phi_star",
      [](const ProbeResponseDataset& ds, double tol) {
        const auto rs = detector::phi_star(ds, tol);
        return py::make_tuple(rs.phi_star, rs.per_radar, rs.certificates);
      },
      py::arg("dataset"), py::arg("tol") = 1e-9,
      "Returns (phi_star, per_radar, certificates).");
  m.def(
      "detect",
      [](const ProbeResponseDataset& ds, double sigma_assumed, double gamma,
         int L, std::uint64_t seed, double tol) {
        const auto cdf = detector::sample_psi(
            ds.probes, ds.M, {NoiseModel::Kind::GaussianIid, sigma_assumed}, L,
            seed);
        const auto d = detector::detect(ds, cdf, gamma, tol);
        py::dict out;
        out["statistic"] = d.statistic;
        out["gamma"] = d.gamma;
        out["hypothesis"] = d.hypothesis == detector::Hypothesis::H0 ? "H0" : "H1";
        return out;
      },
      py::arg("dataset"), py::arg("sigma_assumed"), py::arg("gamma") = 0.05,
      py::arg("L") = 500, py::arg("seed") = 0, py::arg("tol") = 1e-9);
  m.def(
      "sample_psi",
      [](const std::vector<Probe>& probes, int M, double sigma, int L,
         std::uint64_t seed) {
        return detector::sample_psi(probes, M,
                                    {NoiseModel::Kind::GaussianIid, sigma}, L,
                                    seed)
            .samples;
      },
      py::arg("probes"), py::arg("M"), py::arg("sigma"), py::arg("L") = 500,
      py::arg("seed") = 0);
  m.def(
      "type1_mc",
      [](int trials, double sigma, double gamma, int L, std::uint64_t seed) {
        return detector::type1_mc(forward::reference_config(0),
                                  {NoiseModel::Kind::GaussianIid, sigma}, gamma,
                                  trials, L, seed);
      },
      py::arg("trials"), py::arg("sigma") = 0.05, py::arg("gamma") = 0.1,
      py::arg("L") = 500, py::arg("seed") = 0);

  py::class_<tracking::TrackingModel>(m, "TrackingModel")
      .def(py::init([](const std::string& name, const Eigen::MatrixXd& A,
                       const std::vector<Eigen::MatrixXd>& C) {
             tracking::TrackingModel model;
             model.name = name;
             model.A = A;
             model.C = C;
             tracking::check_model(model);
             return model;
           }),
           py::arg("name"), py::arg("A"), py::arg("C"))
      .def_readonly("name", &tracking::TrackingModel::name)
      .def_readonly("A", &tracking::TrackingModel::A)
      .def_readonly("C", &tracking::TrackingModel::C);

  m.def("load_model", &tracking::load_model, py::arg("path"));
  m.def("solve_are", &tracking::solve_are, py::arg("model"), py::arg("radar"),
        py::arg("alpha"), py::arg("beta"), py::arg("tol") = 1e-12);
  m.def("are_residual", &tracking::are_residual, py::arg("model"),
        py::arg("radar"), py::arg("alpha"), py::arg("beta"), py::arg("cov"));
  m.def("precision_monotone_check", &tracking::precision_monotone_check,
        py::arg("model"), py::arg("radar"), py::arg("alpha"),
        py::arg("beta_low"), py::arg("beta_high"));
  m.def(
      "kalman_step",
      [](const tracking::TrackingModel& model, int radar,
         const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
         const Eigen::VectorXd& y, const Eigen::VectorXd& alpha,
         const Eigen::VectorXd& beta) {
        const auto step = tracking::kalman_step(model, radar, {mean, cov}, y,
                                                alpha, beta);
        py::dict out;
        out["posterior_mean"] = step.posterior.mean;
        out["posterior_cov"] = step.posterior.cov;
        out["next_mean"] = step.next_predicted.mean;
        out["next_cov"] = step.next_predicted.cov;
        return out;
      },
      py::arg("model"), py::arg("radar"), py::arg("mean"), py::arg("cov"),
      py::arg("y"), py::arg("alpha"), py::arg("beta"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run the command-line interface in-process; returns "
                       "(exit_code, stdout, stderr).");
}
