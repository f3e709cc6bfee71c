#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "coorddet/dataset.hpp"

namespace coorddet::tracking {

// Linear-Gaussian target model x_{k+1} = A x_k + w, y = C_i x + v, where the
// process noise covariance is Q(alpha) = diag(alpha) and agent i's
// measurement noise covariance is R_i(beta) = diag(beta)^{-1} — larger
// response components mean more precise measurements.
struct TrackingModel {
  std::string name = "unnamed";
  Eigen::MatrixXd A;               // X x X
  std::vector<Eigen::MatrixXd> C;  // per agent, Y_i x X
};

// Shape checks plus PBH detectability of (A, C_i) for every agent; throws
// std::invalid_argument naming the model and the failing agent/eigenvalue.
void check_model(const TrackingModel& model);

struct TrackerState {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;  // symmetric PSD
};

// One measurement update followed by one time update. beta > 0 sizes R,
// alpha >= 0 sizes Q. Posterior covariance never exceeds the predicted one
// (Loewner order), and covariances depend on beta but not on y.
struct KalmanStep {
  TrackerState posterior;       // after absorbing y
  TrackerState next_predicted;  // after propagating through A, Q(alpha)
};
KalmanStep kalman_step(const TrackingModel& model, int radar,
                       const TrackerState& predicted, const Eigen::VectorXd& y,
                       const Probe& alpha, const Response& beta);

// The two halves, usable separately.
TrackerState measurement_update(const TrackingModel& model, int radar,
                                const TrackerState& predicted,
                                const Eigen::VectorXd& y, const Response& beta);
TrackerState time_update(const TrackingModel& model, const TrackerState& posterior,
                         const Probe& alpha);

// Steady-state predicted covariance: the fixed point of the Riccati update,
// by iteration from the identity to within `tol` in the max norm (at most
// 1e5 sweeps). Requires beta > 0 and a model passing check_model; the fixed
// point is verified to a residual below 1e-10 before being returned.
Eigen::MatrixXd solve_are(const TrackingModel& model, int radar,
                          const Probe& alpha, const Response& beta,
                          double tol = 1e-12);

// Max-norm residual of the Riccati map at `cov` (how far cov is from being
// the fixed point).
double are_residual(const TrackingModel& model, int radar, const Probe& alpha,
                    const Response& beta, const Eigen::MatrixXd& cov);

// True iff raising every response component (beta_high >= beta_low > 0,
// componentwise) does not lose steady-state information:
// eigmin(Sigma_high^{-1} - Sigma_low^{-1}) >= -1e-10.
bool precision_monotone_check(const TrackingModel& model, int radar,
                              const Probe& alpha, const Response& beta_low,
                              const Response& beta_high);

nlohmann::json model_to_json(const TrackingModel& model);
TrackingModel model_from_json(const nlohmann::json& j);
TrackingModel load_model(const std::filesystem::path& path);
void save_model(const TrackingModel& model, const std::filesystem::path& path);

}  // namespace coorddet::tracking
