#include <doctest.h>

#include "vacfield/moments.hpp"
#include "vacfield/rng.hpp"
#include "vacfield/stochastic.hpp"

using namespace vacfield;
using stochastic::AmplitudeKind;
using stochastic::AmplitudeModel;

namespace {

model::BasisSet small_basis(int n, std::uint64_t seed) {
  return model::build_basis(model::Lattice(n), moments::random_wavefunction(n, seed));
}

}  // namespace

TEST_CASE("amplitude draws are deterministic in the seed") {
  for (auto kind : {AmplitudeKind::complex_gaussian, AmplitudeKind::fixed_magnitude_phase}) {
    auto a = stochastic::draw_amplitudes(12, {kind}, 77);
    auto b = stochastic::draw_amplitudes(12, {kind}, 77);
    auto c = stochastic::draw_amplitudes(12, {kind}, 78);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a - c).cwiseAbs().maxCoeff() > 0.0);
    CHECK(a(0) == std::complex<double>(1.0, 0.0));
  }
}

TEST_CASE("fixed-magnitude amplitudes sit on the half-power circle") {
  auto a = stochastic::draw_amplitudes(16, {AmplitudeKind::fixed_magnitude_phase}, 5);
  for (int i = 1; i < 16; ++i)
    CHECK(std::abs(a(i)) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("gaussian amplitudes have mean square one half") {
  double acc = 0;
  long count = 0;
  for (std::uint64_t s = 0; s < 400; ++s) {
    auto a = stochastic::draw_amplitudes(16, {AmplitudeKind::complex_gaussian}, derive_seed(1, s));
    for (int i = 1; i < 16; ++i) {
      acc += std::norm(a(i));
      ++count;
    }
  }
  // var(|a|^2) = 1/4 for complex gaussian with <|a|^2> = 1/2
  const double se = 0.5 / std::sqrt(double(count));
  CHECK(std::abs(acc / count - 0.5) < 5 * se);
}

TEST_CASE("zero vacuum amplitudes give the bare density") {
  auto basis = small_basis(8, 31);
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(8);
  a(0) = 1.0;
  auto r = stochastic::realize(basis, a);
  Eigen::VectorXd bare = basis.mode(0).cwiseAbs2().real().transpose();
  CHECK((r.density - bare).cwiseAbs().maxCoeff() < 1e-14);

  auto v = moments::random_subvolume(8, 32);
  double m = model::overlap_matrix(basis, v).m();
  CHECK(r.count(v) == doctest::Approx(m).epsilon(1e-12));
}

TEST_CASE("vacuum background is the half sum of unoccupied mode weights") {
  auto basis = small_basis(6, 41);
  auto v = moments::random_subvolume(6, 42);
  double expected = 0;
  for (int i = 1; i < 6; ++i)
    for (int x : v.sites) expected += 0.5 * std::norm(basis.modes()(i, x));
  CHECK(stochastic::vacuum_background(basis, v) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("parallel and serial ensembles agree bit for bit") {
  auto basis = small_basis(10, 51);
  auto v = moments::random_subvolume(10, 52);
  for (auto kind : {AmplitudeKind::complex_gaussian, AmplitudeKind::fixed_magnitude_phase}) {
    auto p = stochastic::ensemble_statistics(basis, {kind}, v, 5000, 9, true);
    auto s = stochastic::ensemble_statistics_serial(basis, {kind}, v, 5000, 9);
    CHECK((p.mean_density - s.mean_density).cwiseAbs().maxCoeff() == 0.0);
    CHECK(p.raw_mean == s.raw_mean);
    CHECK(p.sub_mean == s.sub_mean);
    CHECK(p.raw_hist == s.raw_hist);
    CHECK(p.argmax_hist == s.argmax_hist);
  }
}

TEST_CASE("ensemble means match the mean-field law within five sigma") {
  auto basis = small_basis(12, 61);
  auto v = moments::random_subvolume(12, 62);
  for (auto kind : {AmplitudeKind::complex_gaussian, AmplitudeKind::fixed_magnitude_phase}) {
    auto s = stochastic::ensemble_statistics(basis, {kind}, v, 20000, 17);
    CHECK(s.max_density_sigmas() < 5.0);
    CHECK(s.subtracted_mean_sigmas() < 5.0);
    CHECK(s.sub_mean == doctest::Approx(s.m).epsilon(0.1));
  }
}

TEST_CASE("localization metrics are coherent") {
  auto basis = small_basis(8, 71);
  auto r = stochastic::sample_realization(basis, {AmplitudeKind::complex_gaussian}, 72);
  auto lm = stochastic::localization_metrics(basis, r);
  CHECK(lm.argmax_site >= 0);
  CHECK(lm.argmax_site < 8);
  int expected_argmax = 0;
  r.density.maxCoeff(&expected_argmax);
  CHECK(lm.argmax_site == expected_argmax);
  CHECK(lm.ipr >= 1.0 / 8 - 1e-12);
  CHECK(lm.ipr <= 1.0 + 1e-12);
}

TEST_CASE("summary json and density csv emit") {
  auto basis = small_basis(6, 81);
  auto v = moments::random_subvolume(6, 82);
  auto s = stochastic::ensemble_statistics(basis, {AmplitudeKind::complex_gaussian}, v, 500, 3);
  auto j = stochastic::to_json(s);
  CHECK(j["n_samples"] == 500);
  CHECK(j.contains("subtracted_mean"));
  auto r = stochastic::sample_realization(basis, {AmplitudeKind::complex_gaussian}, 83);
  CHECK(stochastic::density_csv(r).find("site,density") == 0);
}
