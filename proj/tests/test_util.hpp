#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "coorddet/dataset.hpp"

namespace testutil {

// Fresh scratch directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() /
            ("coorddet-test-" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path file(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline void spit(const std::filesystem::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary);
  f << content;
}

// The hand-checked two-probe instance that no concave nondecreasing utility
// can rationalize: each choice is strictly cheaper at the other's prices.
inline coorddet::ProbeResponseDataset violation_instance() {
  coorddet::ProbeResponseDataset ds;
  ds.T = 2;
  ds.M = 1;
  ds.n = 2;
  ds.probes = {(Eigen::VectorXd(2) << 1.0, 0.5).finished(),
               (Eigen::VectorXd(2) << 0.5, 1.0).finished()};
  ds.responses = {{(Eigen::VectorXd(2) << 1.0, 0.2).finished()},
                  {(Eigen::VectorXd(2) << 0.2, 1.0).finished()}};
  return ds;
}

}  // namespace testutil
