#include <doctest.h>

#include "vacfield/moments.hpp"
#include "vacfield/rng.hpp"

using namespace vacfield;
using algebra::Statistics;

TEST_CASE("fermion suite: all moments equal m") {
  auto reports = moments::run_moment_suite(Statistics::fermion, 10, 4, 5, 7);
  REQUIRE(reports.size() == 5);
  for (const auto& rep : reports) {
    for (const auto& row : rep.rows) {
      CHECK(std::abs(row.symbolic - rep.m) < 1e-12);
      CHECK(row.abs_diff < 1e-10);
    }
    auto check = moments::bernoulli_check(rep);
    CHECK(check.pass);
  }
}

TEST_CASE("full-lattice subvolume gives m = 1 and unit moments") {
  auto basis = model::build_basis(model::Lattice(6), moments::random_wavefunction(6, 3));
  auto rep = moments::report_for_instance(basis, model::Subvolume::all(6), Statistics::fermion, 4, 0);
  CHECK(rep.m == doctest::Approx(1.0).epsilon(1e-12));
  for (const auto& row : rep.rows) CHECK(row.oracle == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("m = 0 instance passes with all moments zero") {
  // f_0 supported on sites 0..2, subvolume on sites 3..5.
  Eigen::VectorXcd f0 = Eigen::VectorXcd::Zero(6);
  f0(0) = 0.6;
  f0(1) = 0.8;
  auto basis = model::build_basis(model::Lattice(6), f0);
  auto rep = moments::report_for_instance(basis, model::Subvolume{{3, 4, 5}},
                                          Statistics::fermion, 4, 0);
  CHECK(rep.m == doctest::Approx(0.0).epsilon(1e-12));
  auto check = moments::bernoulli_check(rep);
  CHECK(check.pass);
  for (const auto& row : rep.rows) CHECK(std::abs(row.oracle) < 1e-10);
}

TEST_CASE("boson suite: symbolic engine agrees with the oracle") {
  auto reports = moments::run_moment_suite(Statistics::boson, 6, 3, 3, 11);
  for (const auto& rep : reports)
    for (const auto& row : rep.rows) CHECK(row.abs_diff < 1e-10);
}

TEST_CASE("coherent suite: symbolic engine agrees with the oracle") {
  auto reports = moments::run_moment_suite(Statistics::coherent_zero_mode, 6, 3, 3, 13);
  for (const auto& rep : reports)
    for (const auto& row : rep.rows) CHECK(row.abs_diff < 1e-10);
}

TEST_CASE("incomplete basis fails the Bernoulli check") {
  auto basis = model::build_basis(model::Lattice(8), moments::random_wavefunction(8, 21));
  auto reduced = basis.without_row(5);
  auto v = moments::random_subvolume(8, 22);
  auto rep = moments::report_for_instance(reduced, v, Statistics::fermion, 4, 0);
  auto check = moments::bernoulli_check(rep);
  CHECK_FALSE(check.pass);
  CHECK(check.max_deviation > 1e-6);
}

TEST_CASE("reports are deterministic and independent of parallelism") {
  auto a = moments::run_moment_suite(Statistics::fermion, 8, 3, 4, 99, true);
  auto b = moments::run_moment_suite(Statistics::fermion, 8, 3, 4, 99, false);
  REQUIRE(a.size() == b.size());
  for (std::size_t t = 0; t < a.size(); ++t) {
    CHECK(a[t].m == b[t].m);
    CHECK(a[t].subvolume == b[t].subvolume);
    for (std::size_t r = 0; r < a[t].rows.size(); ++r)
      CHECK(a[t].rows[r].oracle == b[t].rows[r].oracle);
  }
}

TEST_CASE("report is invariant under a different orthonormal completion") {
  const int n = 8;
  auto f0 = moments::random_wavefunction(n, 311);
  auto basis = model::build_basis(model::Lattice(n), f0);
  auto v = moments::random_subvolume(n, 312);

  Eigen::MatrixXcd g(n - 1, n - 1);
  SmallRng rng(313);
  for (int r = 0; r < n - 1; ++r)
    for (int c = 0; c < n - 1; ++c) g(r, c) = {rng.next_gaussian(), rng.next_gaussian()};
  Eigen::MatrixXcd q = Eigen::HouseholderQR<Eigen::MatrixXcd>(g).householderQ();
  Eigen::MatrixXcd rotated = basis.modes();
  rotated.bottomRows(n - 1) = q * basis.modes().bottomRows(n - 1);
  model::BasisSet other(model::Lattice(n), rotated);

  auto rep1 = moments::report_for_instance(basis, v, Statistics::fermion, 4, 0);
  auto rep2 = moments::report_for_instance(other, v, Statistics::fermion, 4, 0);
  CHECK(rep1.m == doctest::Approx(rep2.m).epsilon(1e-12));
  for (std::size_t r = 0; r < rep1.rows.size(); ++r)
    CHECK(rep1.rows[r].oracle == doctest::Approx(rep2.rows[r].oracle).epsilon(1e-10));
}

TEST_CASE("json and table emitters include the seed") {
  auto reports = moments::run_moment_suite(Statistics::fermion, 6, 2, 1, 55);
  auto j = moments::to_json(reports[0]);
  CHECK(j.contains("seed"));
  CHECK(j["moments"].size() == 2);
  CHECK(moments::to_table(reports).find("symbolic") != std::string::npos);
}
