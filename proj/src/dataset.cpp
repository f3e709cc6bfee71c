#include "coorddet/dataset.hpp"

#include <cmath>
#include <stdexcept>

namespace coorddet {

namespace {

void note(std::vector<Violation>& out, std::string what, int t = -1, int i = -1,
          int component = -1) {
  out.push_back({std::move(what), t, i, component});
}

}  // namespace

std::vector<Violation> validate_dataset(const ProbeResponseDataset& ds) {
  std::vector<Violation> out;
  if (ds.T < 1) note(out, "T must be >= 1");
  if (ds.M < 1) note(out, "M must be >= 1");
  if (ds.n < 1) note(out, "n must be >= 1");
  if (!out.empty()) return out;

  if (static_cast<int>(ds.probes.size()) != ds.T)
    note(out, "probe count does not equal T");
  if (static_cast<int>(ds.responses.size()) != ds.T)
    note(out, "response row count does not equal T");
  if (!out.empty()) return out;

  for (int t = 0; t < ds.T; ++t) {
    if (ds.probes[t].size() != ds.n) {
      note(out, "probe dimension does not equal n", t + 1);
      continue;
    }
    for (int c = 0; c < ds.n; ++c) {
      const double v = ds.probes[t](c);
      if (!std::isfinite(v) || v <= 0.0)
        note(out, "probe component must be finite and > 0", t + 1, -1, c + 1);
    }
  }
  for (int t = 0; t < ds.T; ++t) {
    if (static_cast<int>(ds.responses[t].size()) != ds.M) {
      note(out, "response column count does not equal M", t + 1);
      continue;
    }
    for (int i = 0; i < ds.M; ++i) {
      const Response& b = ds.responses[t][i];
      if (b.size() != ds.n) {
        note(out, "response dimension does not equal n", t + 1, i + 1);
        continue;
      }
      for (int c = 0; c < ds.n; ++c) {
        const double v = b(c);
        if (!std::isfinite(v))
          note(out, "response component must be finite", t + 1, i + 1, c + 1);
        else if (!ds.noisy && v < 0.0)
          note(out, "clean response component must be >= 0", t + 1, i + 1, c + 1);
      }
    }
  }
  return out;
}

bool datasets_close(const ProbeResponseDataset& a, const ProbeResponseDataset& b,
                    double tol) {
  if (a.T != b.T || a.M != b.M || a.n != b.n || a.noisy != b.noisy) return false;
  auto close = [tol](double x, double y) {
    return std::abs(x - y) <= tol * (1.0 + std::abs(x));
  };
  for (int t = 0; t < a.T; ++t) {
    for (int c = 0; c < a.n; ++c)
      if (!close(a.probes[t](c), b.probes[t](c))) return false;
    for (int i = 0; i < a.M; ++i)
      for (int c = 0; c < a.n; ++c)
        if (!close(a.responses[t][i](c), b.responses[t][i](c))) return false;
  }
  return true;
}

SimplexWeights::SimplexWeights(Eigen::VectorXd mu) : mu_(std::move(mu)) {
  if (mu_.size() < 1)
    throw std::invalid_argument("simplex weights must be nonempty");
  for (int i = 0; i < mu_.size(); ++i) {
    if (!std::isfinite(mu_(i)) || mu_(i) < 0.0)
      throw std::invalid_argument("simplex weights must be finite and >= 0");
  }
  if (std::abs(mu_.sum() - 1.0) > 1e-12)
    throw std::invalid_argument("simplex weights must sum to 1 (within 1e-12)");
}

SimplexWeights SimplexWeights::uniform(int m) {
  if (m < 1) throw std::invalid_argument("simplex weights must be nonempty");
  return SimplexWeights(Eigen::VectorXd::Constant(m, 1.0 / m));
}

bool SimplexWeights::strictly_positive() const {
  return (mu_.array() > 0.0).all();
}

}  // namespace coorddet
