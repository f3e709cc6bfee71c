#include "coorddet/detector.hpp"

#include <algorithm>
#include <cmath>

#include "doctest.h"

#include "test_util.hpp"

using namespace coorddet;

TEST_CASE("phi_hat on the crossed instance is exactly the violation size") {
  const auto ds = testutil::violation_instance();
  const auto ph = detector::phi_hat(ds, 0);
  // Both pairwise terms equal -0.4, so feasibility needs a(t,s) + phi >= 0
  // somewhere along every cycle; the minimal uniform relaxation is 0.4.
  CHECK(ph.value == doctest::Approx(0.4).epsilon(1e-9));
  CHECK(!ph.degenerate);
  // The certificate is feasible slightly above the reported minimum...
  const auto a = afriat::afriat_matrix(ds, 0);
  CHECK(afriat::relaxed_system_feasible(a, ph.value + 1e-6).feasible);
  // ...and the system is infeasible clearly below it.
  CHECK(!afriat::relaxed_system_feasible(a, ph.value - 1e-3).feasible);
}

TEST_CASE("phi_hat is nonpositive on clean coordinated data") {
  const auto ds = forward::generate_coordinated(forward::reference_config(13));
  for (int i = 0; i < ds.M; ++i) {
    const auto ph = detector::phi_hat(ds, i);
    CHECK(ph.value <= 1e-12);
    CHECK(!ph.degenerate);
    CHECK(ph.certificate.u.size() == ds.T);
  }
}

TEST_CASE("phi_hat with a single probe is zero and degenerate") {
  ProbeResponseDataset ds;
  ds.T = 1;
  ds.M = 1;
  ds.n = 2;
  ds.probes = {(Eigen::VectorXd(2) << 1.0, 1.0).finished()};
  ds.responses = {{(Eigen::VectorXd(2) << 0.5, 0.5).finished()}};
  const auto ph = detector::phi_hat(ds, 0);
  CHECK(ph.value == 0.0);
  CHECK(ph.degenerate);
}

TEST_CASE("phi_star is the max of the per-agent relaxations") {
  auto ds = forward::generate_coordinated(forward::reference_config(14));
  const auto rs = detector::phi_star(ds);
  REQUIRE(rs.per_radar.size() == 3);
  CHECK(rs.phi_star == doctest::Approx(rs.per_radar.maxCoeff()));
  REQUIRE(rs.certificates.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(rs.per_radar(i) == doctest::Approx(detector::phi_hat(ds, i).value));
    CHECK(rs.certificates[i].radar == i);
    CHECK(!rs.degenerate[i]);
  }
}

TEST_CASE("phi_hat certificates remain near-feasible at the reported value") {
  auto ds = forward::generate_coordinated(forward::reference_config(15));
  ds = forward::add_noise(ds, {NoiseModel::Kind::GaussianIid, 0.05}, 3);
  for (int i = 0; i < ds.M; ++i) {
    const auto ph = detector::phi_hat(ds, i);
    const auto a = afriat::afriat_matrix(ds, i);
    double worst = -1e300;
    for (int t = 0; t < ds.T; ++t)
      for (int s = 0; s < ds.T; ++s) {
        if (s == t) continue;
        worst = std::max(worst,
                         ph.certificate.u(s) - ph.certificate.u(t) -
                             ph.certificate.lambda(t) * (a(t, s) + ph.value));
      }
    // The witness was computed at value + tol, so allow lambda * tol slack.
    CHECK(worst <= ph.certificate.lambda.maxCoeff() * 1e-6);
  }
}

TEST_CASE("sample_psi at sigma 0 is identically zero") {
  const auto ds = forward::generate_coordinated(forward::reference_config(16));
  const auto cdf = detector::sample_psi(ds.probes, ds.M,
                                        {NoiseModel::Kind::GaussianIid, 0.0},
                                        50, 4);
  REQUIRE(static_cast<int>(cdf.samples.size()) == 50);
  for (double v : cdf.samples) CHECK(v == 0.0);
}

TEST_CASE("psi_from_draws reproduces a hand-computed value") {
  std::vector<Probe> probes = {(Eigen::VectorXd(2) << 1.0, 1.0).finished(),
                               (Eigen::VectorXd(2) << 1.0, 2.0).finished()};
  std::vector<Eigen::VectorXd> eps = {
      (Eigen::VectorXd(2) << 0.1, 0.0).finished(),
      (Eigen::VectorXd(2) << 0.0, -0.1).finished()};
  // t=1,s=2: alpha_1'(eps_1-eps_2) = (1,1)'(0.1,0.1) = 0.2
  // t=2,s=1: alpha_2'(eps_2-eps_1) = (1,2)'(-0.1,-0.1) = -0.3
  CHECK(detector::psi_from_draws(probes, eps) == doctest::Approx(0.2));
  CHECK(detector::psi_from_draws({probes[0]}, {eps[0]}) == 0.0);
}

TEST_CASE("sample_psi is sorted, nonnegative-ish, and deterministic") {
  const auto ds = forward::generate_coordinated(forward::reference_config(17));
  const NoiseModel nm{NoiseModel::Kind::GaussianIid, 0.05};
  const auto cdf = detector::sample_psi(ds.probes, ds.M, nm, 200, 9);
  const auto cdf2 = detector::sample_psi(ds.probes, ds.M, nm, 200, 9);
  REQUIRE(cdf.samples.size() == 200);
  CHECK(std::is_sorted(cdf.samples.begin(), cdf.samples.end()));
  CHECK(cdf.samples == cdf2.samples);
  // Psi is a max over pairs of zero-mean terms including both signs of each
  // difference, so with T=10, M=3 every draw is positive in practice.
  CHECK(cdf.samples.front() >= -1e-12);
  CHECK(cdf.samples.back() > 0.0);
  const auto other = detector::sample_psi(ds.probes, ds.M, nm, 200, 10);
  CHECK(cdf.samples != other.samples);
}

TEST_CASE("cdf_value counts the fraction of samples at or below x") {
  detector::EmpiricalCdf cdf;
  cdf.samples = {1.0, 2.0, 3.0};
  CHECK(detector::cdf_value(cdf, 0.5) == 0.0);
  CHECK(detector::cdf_value(cdf, 2.0) == doctest::Approx(2.0 / 3.0));
  CHECK(detector::cdf_value(cdf, 2.5) == doctest::Approx(2.0 / 3.0));
  CHECK(detector::cdf_value(cdf, 10.0) == 1.0);
}

TEST_CASE("decide applies the strict threshold rule") {
  detector::EmpiricalCdf cdf;
  cdf.samples = {0.1, 0.2, 0.3};
  const auto d = detector::decide(0.15, cdf, 0.5);
  CHECK(d.statistic == doctest::Approx(2.0 / 3.0));
  CHECK(d.hypothesis == detector::Hypothesis::H0);
  // Exactly at the threshold the strict rule rejects (0.5 is exact in
  // binary, so statistic == gamma here).
  detector::EmpiricalCdf half;
  half.samples = {0.25, 0.75};
  const auto at = detector::decide(0.5, half, 0.5);
  CHECK(at.statistic == 0.5);
  CHECK(at.hypothesis == detector::Hypothesis::H1);
  const auto high = detector::decide(0.6, cdf, 0.5);
  CHECK(high.statistic == 0.0);
  CHECK(high.hypothesis == detector::Hypothesis::H1);
  CHECK_THROWS_AS(detector::decide(0.15, cdf, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(detector::decide(0.15, cdf, 1.0), std::invalid_argument);
}

TEST_CASE("the statistic is nonincreasing in phi_star") {
  detector::EmpiricalCdf cdf;
  cdf.samples = {0.05, 0.1, 0.2, 0.4};
  double prev = 2.0;
  for (double phi : {-1.0, 0.05, 0.15, 0.3, 0.5}) {
    const double stat = detector::decide(phi, cdf, 0.5).statistic;
    CHECK(stat <= prev);
    prev = stat;
  }
}

TEST_CASE("clean coordinated data passes the detector at any sensible gamma") {
  const auto ds = forward::generate_coordinated(forward::reference_config(18));
  const auto cdf = detector::sample_psi(ds.probes, ds.M,
                                        {NoiseModel::Kind::GaussianIid, 0.05},
                                        300, 5);
  const auto d = detector::detect(ds, cdf, 0.1);
  // phi_star <= 0 on clean data while every Psi draw is positive, so the
  // statistic is 1.
  CHECK(d.statistic == doctest::Approx(1.0));
  CHECK(d.hypothesis == detector::Hypothesis::H0);
}

TEST_CASE("type1_mc is deterministic and within [0,1]") {
  const auto cfg = forward::reference_config(0);
  const NoiseModel nm{NoiseModel::Kind::GaussianIid, 0.05};
  const double r1 = detector::type1_mc(cfg, nm, 0.1, 5, 60, 100);
  const double r2 = detector::type1_mc(cfg, nm, 0.1, 5, 60, 100);
  CHECK(r1 == r2);
  CHECK(r1 >= 0.0);
  CHECK(r1 <= 1.0);
  const double single = detector::type1_mc(cfg, nm, 0.1, 1, 40, 3);
  CHECK((single == 0.0 || single == 1.0));
}

TEST_CASE("detector report JSON round trip") {
  detector::DetectorReport r;
  r.phi_per_radar = (Eigen::VectorXd(2) << -0.1, 0.02).finished();
  r.phi_star = 0.02;
  r.statistic = 0.85;
  r.gamma = 0.1;
  r.hypothesis = detector::Hypothesis::H0;
  r.L = 500;
  r.seed = 42;
  afriat::AfriatCertificate cert;
  cert.radar = 1;
  cert.u = (Eigen::VectorXd(2) << 1.0, 2.0).finished();
  cert.lambda = (Eigen::VectorXd(2) << 1.0, 1.0).finished();
  r.certificates = {cert};
  testutil::TempDir tmp;
  detector::write_report(r, tmp.file("report.json"));
  const auto back = detector::read_report(tmp.file("report.json"));
  CHECK((back.phi_per_radar - r.phi_per_radar).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.phi_star == r.phi_star);
  CHECK(back.statistic == r.statistic);
  CHECK(back.gamma == r.gamma);
  CHECK(back.hypothesis == r.hypothesis);
  CHECK(back.L == r.L);
  CHECK(back.seed == r.seed);
  REQUIRE(back.certificates.size() == 1);
  CHECK(back.certificates[0].radar == 1);
}

TEST_CASE("full pipeline is reproducible end to end") {
  const auto run_once = [] {
    auto ds = forward::generate_coordinated(forward::reference_config(77));
    ds = forward::add_noise(ds, {NoiseModel::Kind::GaussianIid, 0.05}, 78);
    const auto cdf = detector::sample_psi(
        ds.probes, ds.M, {NoiseModel::Kind::GaussianIid, 0.05}, 150, 79);
    return detector::detect(ds, cdf, 0.1).statistic;
  };
  CHECK(run_once() == run_once());
}
