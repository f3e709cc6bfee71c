#include "coorddet/tracking.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace coorddet::tracking {

namespace {

constexpr int kMaxAreSweeps = 100000;
constexpr double kAreResidualBound = 1e-10;

void check_radar_index(const TrackingModel& model, int radar) {
  if (radar < 0 || radar >= static_cast<int>(model.C.size()))
    throw std::invalid_argument("model '" + model.name + "': agent index " +
                                std::to_string(radar) + " out of range");
}

void check_state_shapes(const TrackingModel& model) {
  const int X = static_cast<int>(model.A.rows());
  if (X < 1 || model.A.cols() != X)
    throw std::invalid_argument("model '" + model.name + "': A must be square");
  if (model.C.empty())
    throw std::invalid_argument("model '" + model.name + "': needs at least one C");
  for (const auto& C : model.C)
    if (C.rows() < 1 || C.cols() != X)
      throw std::invalid_argument("model '" + model.name +
                                  "': C must have X columns");
}

Eigen::MatrixXd process_cov(const TrackingModel& model, const Probe& alpha) {
  if (alpha.size() != model.A.rows())
    throw std::invalid_argument("model '" + model.name +
                                "': alpha must have one entry per state");
  if (!(alpha.array() >= 0.0).all())
    throw std::invalid_argument("process noise weights must be >= 0");
  return alpha.asDiagonal();
}

Eigen::MatrixXd measurement_cov(const TrackingModel& model, int radar,
                                const Response& beta) {
  if (beta.size() != model.C[radar].rows())
    throw std::invalid_argument("model '" + model.name +
                                "': beta must have one entry per measurement");
  if (!(beta.array() > 0.0).all())
    throw std::invalid_argument("measurement precision must be > 0");
  return beta.cwiseInverse().asDiagonal();
}

// One sweep of the predicted-covariance Riccati map.
Eigen::MatrixXd riccati_map(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C,
                            const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                            const Eigen::MatrixXd& sigma) {
  const Eigen::MatrixXd S = C * sigma * C.transpose() + R;
  const Eigen::MatrixXd gain = S.ldlt().solve(C * sigma).transpose();  // sigma C' S^-1
  const Eigen::MatrixXd post = sigma - gain * C * sigma;
  Eigen::MatrixXd next = A * post * A.transpose() + Q;
  return 0.5 * (next + next.transpose());
}

}  // namespace

void check_model(const TrackingModel& model) {
  check_state_shapes(model);
  const int X = static_cast<int>(model.A.rows());
  // PBH: (A, C_i) is detectable iff [A - z I; C_i] has full column rank at
  // every eigenvalue z of A with |z| >= 1.
  const Eigen::EigenSolver<Eigen::MatrixXd> es(model.A);
  for (int e = 0; e < X; ++e) {
    const std::complex<double> z = es.eigenvalues()(e);
    if (std::abs(z) < 1.0 - 1e-9) continue;
    for (std::size_t i = 0; i < model.C.size(); ++i) {
      const int Y = static_cast<int>(model.C[i].rows());
      Eigen::MatrixXcd P(X + Y, X);
      P.topRows(X) = model.A.cast<std::complex<double>>() -
                     z * Eigen::MatrixXcd::Identity(X, X);
      P.bottomRows(Y) = model.C[i].cast<std::complex<double>>();
      const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(P);
      const auto& sv = svd.singularValues();
      if (sv(sv.size() - 1) <= 1e-9 * sv(0))
        throw std::invalid_argument(
            "model '" + model.name + "': (A, C_" + std::to_string(i + 1) +
            ") is not detectable at eigenvalue of modulus " +
            std::to_string(std::abs(z)));
    }
  }
}

TrackerState measurement_update(const TrackingModel& model, int radar,
                                const TrackerState& predicted,
                                const Eigen::VectorXd& y, const Response& beta) {
  check_state_shapes(model);
  check_radar_index(model, radar);
  const Eigen::MatrixXd& C = model.C[radar];
  const int X = static_cast<int>(model.A.rows());
  if (predicted.mean.size() != X || predicted.cov.rows() != X ||
      predicted.cov.cols() != X)
    throw std::invalid_argument("predicted state has wrong dimension");
  if (y.size() != C.rows())
    throw std::invalid_argument("measurement has wrong dimension");
  const Eigen::MatrixXd R = measurement_cov(model, radar, beta);

  const Eigen::MatrixXd S = C * predicted.cov * C.transpose() + R;
  const Eigen::MatrixXd gain =
      S.ldlt().solve(C * predicted.cov).transpose();  // cov C' S^-1
  TrackerState post;
  post.mean = predicted.mean + gain * (y - C * predicted.mean);
  post.cov = predicted.cov - gain * C * predicted.cov;
  post.cov = 0.5 * (post.cov + post.cov.transpose()).eval();
  return post;
}

TrackerState time_update(const TrackingModel& model, const TrackerState& posterior,
                         const Probe& alpha) {
  check_state_shapes(model);
  const Eigen::MatrixXd Q = process_cov(model, alpha);
  TrackerState next;
  next.mean = model.A * posterior.mean;
  next.cov = model.A * posterior.cov * model.A.transpose() + Q;
  next.cov = 0.5 * (next.cov + next.cov.transpose()).eval();
  return next;
}

KalmanStep kalman_step(const TrackingModel& model, int radar,
                       const TrackerState& predicted, const Eigen::VectorXd& y,
                       const Probe& alpha, const Response& beta) {
  KalmanStep step;
  step.posterior = measurement_update(model, radar, predicted, y, beta);
  step.next_predicted = time_update(model, step.posterior, alpha);
  return step;
}

Eigen::MatrixXd solve_are(const TrackingModel& model, int radar,
                          const Probe& alpha, const Response& beta, double tol) {
  check_model(model);
  check_radar_index(model, radar);
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be > 0");
  const Eigen::MatrixXd Q = process_cov(model, alpha);
  const Eigen::MatrixXd R = measurement_cov(model, radar, beta);
  const Eigen::MatrixXd& C = model.C[radar];
  const int X = static_cast<int>(model.A.rows());

  Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(X, X);
  bool converged = false;
  for (int k = 0; k < kMaxAreSweeps; ++k) {
    const Eigen::MatrixXd next = riccati_map(model.A, C, Q, R, sigma);
    const double delta = (next - sigma).cwiseAbs().maxCoeff();
    sigma = next;
    if (delta < tol) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw std::runtime_error("model '" + model.name +
                             "': Riccati iteration did not converge");
  const double resid = are_residual(model, radar, alpha, beta, sigma);
  if (resid >= kAreResidualBound)
    throw std::runtime_error("model '" + model.name +
                             "': Riccati fixed point residual " +
                             std::to_string(resid) + " too large");
  return sigma;
}

double are_residual(const TrackingModel& model, int radar, const Probe& alpha,
                    const Response& beta, const Eigen::MatrixXd& cov) {
  check_state_shapes(model);
  check_radar_index(model, radar);
  const Eigen::MatrixXd Q = process_cov(model, alpha);
  const Eigen::MatrixXd R = measurement_cov(model, radar, beta);
  return (riccati_map(model.A, model.C[radar], Q, R, cov) - cov)
      .cwiseAbs()
      .maxCoeff();
}

bool precision_monotone_check(const TrackingModel& model, int radar,
                              const Probe& alpha, const Response& beta_low,
                              const Response& beta_high) {
  if (beta_low.size() != beta_high.size() ||
      !((beta_high - beta_low).array() >= 0.0).all())
    throw std::invalid_argument("need beta_high >= beta_low componentwise");
  const Eigen::MatrixXd lo = solve_are(model, radar, alpha, beta_low);
  const Eigen::MatrixXd hi = solve_are(model, radar, alpha, beta_high);
  Eigen::MatrixXd diff = hi.inverse() - lo.inverse();
  diff = 0.5 * (diff + diff.transpose()).eval();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(diff);
  return es.eigenvalues().minCoeff() >= -1e-10;
}

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty())
    throw std::invalid_argument("matrix JSON must be a nonempty array of rows");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j.at(0).size());
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const auto& row = j.at(r);
    if (static_cast<int>(row.size()) != cols)
      throw std::invalid_argument("matrix JSON rows have uneven lengths");
    for (int c = 0; c < cols; ++c) m(r, c) = row.at(c).get<double>();
  }
  return m;
}

}  // namespace

nlohmann::json model_to_json(const TrackingModel& model) {
  nlohmann::json j;
  j["name"] = model.name;
  j["A"] = matrix_to_json(model.A);
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& C : model.C) cs.push_back(matrix_to_json(C));
  j["C"] = cs;
  return j;
}

TrackingModel model_from_json(const nlohmann::json& j) {
  TrackingModel model;
  model.name = j.value("name", "unnamed");
  model.A = matrix_from_json(j.at("A"));
  for (const auto& cj : j.at("C")) model.C.push_back(matrix_from_json(cj));
  check_state_shapes(model);
  return model;
}

TrackingModel load_model(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path.string() + "'");
  nlohmann::json j;
  f >> j;
  return model_from_json(j);
}

void save_model(const TrackingModel& model, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  f << model_to_json(model).dump(2) << '\n';
}

}  // namespace coorddet::tracking
