#include <doctest.h>

#include "vacfield/measurement.hpp"
#include "vacfield/moments.hpp"
#include "vacfield/oracle.hpp"
#include "vacfield/rng.hpp"

using namespace vacfield;
using algebra::Statistics;
using measurement::Observable;

TEST_CASE("filtering against the basis itself is the identity") {
  auto basis = model::build_basis(model::Lattice(6), moments::random_wavefunction(6, 8));
  Observable obs;
  obs.eigenfunctions = basis.modes();
  obs.eigenvalues = Eigen::VectorXd::LinSpaced(6, 0, 5);
  auto fc = measurement::filter_coefficients(basis, obs);
  CHECK((fc.f - Eigen::MatrixXcd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("two-site equal superposition measured in the position basis") {
  Eigen::VectorXcd f0(2);
  f0 << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  auto basis = model::build_basis(model::Lattice(2), f0);
  auto fc = measurement::filter_coefficients(basis, Observable::position_basis(2));
  CHECK(std::abs(fc.f(0, 0)) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(std::abs(fc.f(0, 1)) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  auto dist = measurement::outcome_distribution(fc, Observable::position_basis(2));
  CHECK(dist[0].second == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(dist[1].second == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("filter columns have unit norm for a complete observable") {
  auto basis = model::build_basis(model::Lattice(8), moments::random_wavefunction(8, 17));
  auto obs = Observable::random(8, 18);
  auto fc = measurement::filter_coefficients(basis, obs);
  CHECK(fc.column_norm_defect() < 1e-12);
}

TEST_CASE("mismatched lattices are rejected") {
  auto basis = model::build_basis(model::Lattice(6), moments::random_wavefunction(6, 2));
  CHECK_THROWS_AS(measurement::filter_coefficients(basis, Observable::position_basis(5)),
                  std::invalid_argument);
}

TEST_CASE("degenerate observables are rejected") {
  Observable obs = Observable::position_basis(4);
  obs.eigenvalues(2) = obs.eigenvalues(1);
  CHECK_THROWS_AS(obs.validate(), std::invalid_argument);
}

TEST_CASE("first filtered moment is |f_0n|^2 and all orders agree") {
  auto basis = model::build_basis(model::Lattice(8), moments::random_wavefunction(8, 23));
  auto obs = Observable::random(8, 24);
  auto fc = measurement::filter_coefficients(basis, obs);
  for (int n : {0, 3, 7}) {
    const double expected = std::norm(fc.f(0, n));
    auto moments_k = measurement::filtered_moments(fc, n, 4, Statistics::fermion);
    CHECK(moments_k[0] == doctest::Approx(expected).epsilon(1e-12));
    for (double mk : moments_k) CHECK(mk == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("f0 equal to an eigenfunction detects a full particle") {
  auto obs = Observable::random(6, 41);
  Eigen::VectorXcd f0 = obs.eigenfunctions.row(2).transpose();
  auto basis = model::build_basis(model::Lattice(6), f0);
  auto fc = measurement::filter_coefficients(basis, obs);
  auto dist = measurement::outcome_distribution(fc, obs);
  for (int n = 0; n < 6; ++n)
    CHECK(dist[n].second == doctest::Approx(n == 2 ? 1.0 : 0.0).epsilon(1e-10));
  auto moments_k = measurement::filtered_moments(fc, 2, 3, Statistics::fermion);
  for (double mk : moments_k) CHECK(mk == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("outcome probabilities sum to one") {
  auto basis = model::build_basis(model::Lattice(8), moments::random_wavefunction(8, 57));
  auto obs = Observable::random(8, 58);
  auto fc = measurement::filter_coefficients(basis, obs);
  double total = 0;
  for (const auto& [ev, p] : measurement::outcome_distribution(fc, obs)) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("position-basis filtering reassembles the subvolume overlap") {
  auto basis = model::build_basis(model::Lattice(6), moments::random_wavefunction(6, 67));
  auto v = moments::random_subvolume(6, 68);
  auto fc = measurement::filter_coefficients(basis, Observable::position_basis(6));
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(6, 6);
  for (int x : v.sites) sum += measurement::filter_overlap(fc, x);
  auto V = model::overlap_matrix(basis, v).entries;
  CHECK((sum - V).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("outcome csv has one row per eigenvalue") {
  auto basis = model::build_basis(model::Lattice(4), moments::random_wavefunction(4, 71));
  auto obs = Observable::random(4, 72);
  auto fc = measurement::filter_coefficients(basis, obs);
  auto csv = measurement::outcome_csv(fc, obs, 2, Statistics::fermion);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);  // header + 4 outcomes
}
