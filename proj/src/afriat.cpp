#include "coorddet/afriat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "coorddet/lp.hpp"

namespace coorddet::afriat {

namespace {

void check_radar_index(const ProbeResponseDataset& ds, int radar) {
  if (radar < 0 || radar >= ds.M)
    throw std::out_of_range("agent index " + std::to_string(radar) +
                            " out of range for M = " + std::to_string(ds.M));
}

}  // namespace

Eigen::MatrixXd afriat_matrix(const ProbeResponseDataset& ds, int radar) {
  check_radar_index(ds, radar);
  const int T = ds.T;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(T, T);
  for (int t = 0; t < T; ++t)
    for (int s = 0; s < T; ++s)
      if (s != t)
        a(t, s) = ds.probes[t].dot(ds.responses[s][radar] - ds.responses[t][radar]);
  return a;
}

SystemFeasibility relaxed_system_feasible(const Eigen::MatrixXd& a, double phi) {
  const int T = static_cast<int>(a.rows());
  if (a.cols() != T || T < 1)
    throw std::invalid_argument("pairwise matrix must be square and nonempty");
  SystemFeasibility out;
  if (T == 1) {
    // No cross terms: any u > 0, lambda >= 1 works.
    out.feasible = true;
    out.u = Eigen::VectorXd::Ones(1);
    out.lambda = Eigen::VectorXd::Ones(1);
    return out;
  }

  // Variables [u_1..u_T, lambda_1..lambda_T]; one row per ordered pair
  // (t, s):  u_s - u_t - lambda_t * (a(t,s) + phi) <= 0.  The system is
  // positively homogeneous, so lambda >= 1 loses no generality and u is
  // shifted afterwards.
  const int ncols = 2 * T;
  const int nrows = T * (T - 1);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nrows, ncols);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(nrows);
  int row = 0;
  for (int t = 0; t < T; ++t) {
    for (int s = 0; s < T; ++s) {
      if (s == t) continue;
      A(row, s) = 1.0;
      A(row, t) = -1.0;
      A(row, T + t) = -(a(t, s) + phi);
      ++row;
    }
  }
  Eigen::VectorXd lb(ncols), ub(ncols);
  lb.head(T).setConstant(-lp::kInf);
  lb.tail(T).setOnes();
  ub.setConstant(lp::kInf);

  const lp::Feasibility f = lp::feasible(A, b, lb, ub);
  out.lp_iterations = f.iterations;
  out.feasible = f.feasible;
  if (f.feasible) {
    out.u = f.witness.head(T);
    out.lambda = f.witness.tail(T);
    out.u.array() += 1.0 - out.u.minCoeff();  // normalize to min(u) = 1 > 0
  }
  return out;
}

RationalizabilityVerdict test_rationalizable(const ProbeResponseDataset& ds) {
  RationalizabilityVerdict verdict;
  verdict.consistent = true;
  for (int i = 0; i < ds.M; ++i) {
    const SystemFeasibility f = relaxed_system_feasible(afriat_matrix(ds, i), 0.0);
    if (!f.feasible) {
      verdict.consistent = false;
      verdict.certificates.clear();
      return verdict;
    }
    verdict.certificates.push_back({i, f.u, f.lambda});
  }
  return verdict;
}

bool garp_oracle(const ProbeResponseDataset& ds, int radar) {
  check_radar_index(ds, radar);
  const int T = ds.T;
  // spend(t, s) = alpha_t' beta_s; t directly reveals preference over s when
  // beta_s was affordable at t's choice (weak), strictly so when cheaper.
  Eigen::MatrixXd spend(T, T);
  for (int t = 0; t < T; ++t)
    for (int s = 0; s < T; ++s)
      spend(t, s) = ds.probes[t].dot(ds.responses[s][radar]);

  std::vector<std::vector<bool>> reach(T, std::vector<bool>(T, false));
  for (int t = 0; t < T; ++t)
    for (int s = 0; s < T; ++s)
      reach[t][s] = t == s || spend(t, s) <= spend(t, t);
  for (int k = 0; k < T; ++k)
    for (int t = 0; t < T; ++t)
      for (int s = 0; s < T; ++s)
        if (reach[t][k] && reach[k][s]) reach[t][s] = true;

  // A violation is a strict direct revelation x over y together with a weak
  // revealed-preference path back from y to x.
  for (int x = 0; x < T; ++x)
    for (int y = 0; y < T; ++y)
      if (x != y && spend(x, y) < spend(x, x) && reach[y][x]) return false;
  return true;
}

PiecewiseAffineUtility reconstruct_utility(const AfriatCertificate& cert,
                                           const ProbeResponseDataset& ds) {
  check_radar_index(ds, cert.radar);
  if (cert.u.size() != ds.T || cert.lambda.size() != ds.T)
    throw std::invalid_argument("certificate length does not match dataset T");
  PiecewiseAffineUtility util;
  util.pieces.reserve(ds.T);
  for (int t = 0; t < ds.T; ++t) {
    if (!(cert.lambda(t) > 0.0))
      throw std::invalid_argument("certificate lambda must be > 0");
    util.pieces.push_back(
        {cert.u(t), cert.lambda(t), ds.probes[t], ds.responses[t][cert.radar]});
  }
  return util;
}

double certificate_residual(const AfriatCertificate& cert,
                            const ProbeResponseDataset& ds) {
  const Eigen::MatrixXd a = afriat_matrix(ds, cert.radar);
  if (cert.u.size() != ds.T || cert.lambda.size() != ds.T)
    throw std::invalid_argument("certificate length does not match dataset T");
  double worst = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < ds.T; ++t)
    for (int s = 0; s < ds.T; ++s)
      if (s != t)
        worst = std::max(worst,
                         cert.u(s) - cert.u(t) - cert.lambda(t) * a(t, s));
  return ds.T > 1 ? worst : 0.0;
}

nlohmann::json certificate_to_json(const AfriatCertificate& cert) {
  nlohmann::json j;
  j["i"] = cert.radar + 1;  // 1-based in artifacts, as in the CSV format
  j["u"] = std::vector<double>(cert.u.data(), cert.u.data() + cert.u.size());
  j["lambda"] = std::vector<double>(cert.lambda.data(),
                                    cert.lambda.data() + cert.lambda.size());
  return j;
}

AfriatCertificate certificate_from_json(const nlohmann::json& j) {
  AfriatCertificate cert;
  cert.radar = j.at("i").get<int>() - 1;
  const auto u = j.at("u").get<std::vector<double>>();
  const auto lam = j.at("lambda").get<std::vector<double>>();
  if (u.size() != lam.size() || u.empty())
    throw std::invalid_argument("certificate u and lambda must match and be nonempty");
  cert.u = Eigen::Map<const Eigen::VectorXd>(u.data(), static_cast<int>(u.size()));
  cert.lambda =
      Eigen::Map<const Eigen::VectorXd>(lam.data(), static_cast<int>(lam.size()));
  return cert;
}

}  // namespace coorddet::afriat
