#include <doctest.h>

#include "vacfield/algebra.hpp"
#include "vacfield/model.hpp"
#include "vacfield/moments.hpp"
#include "vacfield/rng.hpp"

using namespace vacfield;
using namespace vacfield::algebra;

namespace {

Term string_term(std::vector<OperatorSymbol> ops) {
  Term t;
  t.ops = std::move(ops);
  return t;
}

OperatorSymbol a(ModeIndex i) { return OperatorSymbol::annihilate(i); }
OperatorSymbol c(ModeIndex i) { return OperatorSymbol::make_create(i); }

MPolynomial just_m() { return MPolynomial::monomial(1); }

}  // namespace

TEST_CASE("fermion contraction b_i b_j+ = delta_ij - b_j+ b_i") {
  auto e = normal_order(string_term({a(ModeIndex::sym(5)), c(ModeIndex::sym(7))}),
                        Statistics::fermion);
  REQUIRE(e.terms.size() == 2);
  bool saw_delta = false, saw_swapped = false;
  for (const auto& t : e.terms) {
    if (t.ops.empty()) {
      saw_delta = t.coeff == RationalComplex(1) && t.deltas.size() == 1;
    } else {
      saw_swapped = t.coeff == RationalComplex(-1) && t.ops.size() == 2 && t.ops[0].create &&
                    !t.ops[1].create;
    }
  }
  CHECK(saw_delta);
  CHECK(saw_swapped);
}

TEST_CASE("boson contraction keeps the plus sign") {
  auto e = normal_order(string_term({a(ModeIndex::sym(5)), c(ModeIndex::sym(7))}),
                        Statistics::boson);
  REQUIRE(e.terms.size() == 2);
  for (const auto& t : e.terms)
    if (!t.ops.empty()) CHECK(t.coeff == RationalComplex(1));
}

TEST_CASE("already normal-ordered strings are unchanged") {
  Term t = string_term({c(ModeIndex::sym(1)), a(ModeIndex::sym(2))});
  auto e = normal_order(t, Statistics::fermion);
  REQUIRE(e.terms.size() == 1);
  CHECK(e.terms[0].ops == t.ops);
  CHECK(e.terms[0].coeff == RationalComplex(1));
}

TEST_CASE("fermion like-kind swap carries a minus sign") {
  // b_7 b_5 = -b_5 b_7 under canonical index order
  auto e = normal_order(string_term({a(ModeIndex::sym(7)), a(ModeIndex::sym(5))}),
                        Statistics::fermion);
  REQUIRE(e.terms.size() == 1);
  CHECK(e.terms[0].coeff == RationalComplex(-1));
  CHECK(e.terms[0].ops[0].index == ModeIndex::sym(5));
  CHECK(e.terms[0].ops[1].index == ModeIndex::sym(7));
}

TEST_CASE("fermion equal-index pair vanishes") {
  auto e = normal_order(string_term({a(ModeIndex::mode(2)), a(ModeIndex::mode(2))}),
                        Statistics::fermion);
  CHECK(e.terms.empty());
}

TEST_CASE("normal ordering is idempotent") {
  SmallRng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    Term t;
    const int len = 1 + static_cast<int>(rng.next_below(5));
    for (int i = 0; i < len; ++i) {
      ModeIndex idx;
      switch (rng.next_below(3)) {
        case 0: idx = ModeIndex::occ(); break;
        case 1: idx = ModeIndex::sym(static_cast<int>(rng.next_below(3))); break;
        default: idx = ModeIndex::mode(static_cast<int>(rng.next_below(3))); break;
      }
      t.ops.push_back(rng.next_below(2) ? c(idx) : a(idx));
    }
    for (auto stats : {Statistics::fermion, Statistics::boson}) {
      auto once = normal_order(t, stats);
      auto twice = normal_order(once, stats);
      CHECK(once.terms == twice.terms);
    }
  }
}

TEST_CASE("fermion double swap restores the original term") {
  Term t = string_term({a(ModeIndex::sym(1)), a(ModeIndex::sym(2))});
  auto once = normal_order(t, Statistics::fermion);
  REQUIRE(once.terms.size() == 1);
  // Swapping back by hand and re-normal-ordering must reproduce the term: sign^2 = 1.
  Term back = once.terms[0];
  std::swap(back.ops[0], back.ops[1]);
  back.coeff *= RationalComplex(Rational(-1));
  auto again = normal_order(back, Statistics::fermion);
  CHECK(again.terms == once.terms);
}

TEST_CASE("vacuum expectation of b_i b_j+ is delta_ij") {
  auto e = vacuum_expectation(string_term({a(ModeIndex::sym(0)), c(ModeIndex::sym(1))}),
                              Statistics::fermion);
  REQUIRE(e.terms.size() == 1);
  CHECK(e.terms[0].ops.empty());
  CHECK(e.terms[0].coeff == RationalComplex(1));
  REQUIRE(e.terms[0].deltas.size() == 1);
}

TEST_CASE("vacuum expectation of b_i+ b_j is zero") {
  auto e = vacuum_expectation(string_term({c(ModeIndex::sym(0)), a(ModeIndex::sym(1))}),
                              Statistics::fermion);
  CHECK(e.terms.empty());
}

TEST_CASE("reduction: restricted pair sum gives m - m^2") {
  Term t;
  t.v_factors = {{ModeIndex::occ(), ModeIndex::sym(0)}, {ModeIndex::sym(0), ModeIndex::occ()}};
  t.sums = {0};
  MPolynomial expected;
  expected += MPolynomial::monomial(1);
  expected += MPolynomial::monomial(2, -1);
  CHECK(reduce_to_m_polynomial(Expression{{t}}) == expected);
}

TEST_CASE("reduction: V_00^4 is m^4") {
  Term t;
  for (int i = 0; i < 4; ++i) t.v_factors.push_back({ModeIndex::occ(), ModeIndex::occ()});
  CHECK(reduce_to_m_polynomial(Expression{{t}}) == MPolynomial::monomial(4));
}

TEST_CASE("reduction: three-index chain matches the fourth-moment table") {
  Term t;
  t.v_factors = {{ModeIndex::occ(), ModeIndex::sym(0)},
                 {ModeIndex::sym(0), ModeIndex::sym(1)},
                 {ModeIndex::sym(1), ModeIndex::sym(2)},
                 {ModeIndex::sym(2), ModeIndex::occ()}};
  t.sums = {0, 1, 2};
  MPolynomial expected;
  expected += MPolynomial::monomial(1);
  expected += MPolynomial::monomial(2, -3);
  expected += MPolynomial::monomial(3, 3);
  expected += MPolynomial::monomial(4, -1);
  CHECK(reduce_to_m_polynomial(Expression{{t}}) == expected);
}

TEST_CASE("reduction matches numerical summation on random overlap matrices") {
  for (int n : {8, 12}) {
    auto basis = model::build_basis(model::Lattice(n), moments::random_wavefunction(n, n * 17));
    auto v = moments::random_subvolume(n, n * 17 + 1);
    Eigen::MatrixXcd V = model::overlap_matrix(basis, v).entries;
    const double m = V(0, 0).real();

    // sum_{i != 0} V_0i V_i0
    std::complex<double> pair_sum = 0;
    for (int i = 1; i < n; ++i) pair_sum += V(0, i) * V(i, 0);
    Term pair;
    pair.v_factors = {{ModeIndex::occ(), ModeIndex::sym(0)}, {ModeIndex::sym(0), ModeIndex::occ()}};
    pair.sums = {0};
    CHECK(reduce_to_m_polynomial(Expression{{pair}}).eval(m) ==
          doctest::Approx(pair_sum.real()).epsilon(1e-10));

    // sum_{i,j,k != 0} V_0i V_ij V_jk V_k0
    std::complex<double> chain_sum = 0;
    for (int i = 1; i < n; ++i)
      for (int j = 1; j < n; ++j)
        for (int k = 1; k < n; ++k) chain_sum += V(0, i) * V(i, j) * V(j, k) * V(k, 0);
    Term chain;
    chain.v_factors = {{ModeIndex::occ(), ModeIndex::sym(0)},
                       {ModeIndex::sym(0), ModeIndex::sym(1)},
                       {ModeIndex::sym(1), ModeIndex::sym(2)},
                       {ModeIndex::sym(2), ModeIndex::occ()}};
    chain.sums = {0, 1, 2};
    CHECK(reduce_to_m_polynomial(Expression{{chain}}).eval(m) ==
          doctest::Approx(chain_sum.real()).epsilon(1e-10));
  }
}

TEST_CASE("reduction rejects input outside the V/delta grammar") {
  Term trace;
  trace.v_factors = {{ModeIndex::sym(0), ModeIndex::sym(0)}};
  trace.sums = {0};
  CHECK_THROWS_AS(reduce_to_m_polynomial(Expression{{trace}}), UnsupportedExpression);

  Term with_ops;
  with_ops.ops = {a(ModeIndex::occ())};
  CHECK_THROWS_AS(reduce_to_m_polynomial(Expression{{with_ops}}), UnsupportedExpression);
}

TEST_CASE("fermion moments equal m for k = 1..6") {
  for (int k = 1; k <= 6; ++k) CHECK(moment_expression(k, Statistics::fermion) == just_m());
}

TEST_CASE("moment expression rejects out-of-range k") {
  CHECK_THROWS_AS(moment_expression(0, Statistics::fermion), std::invalid_argument);
  CHECK_THROWS_AS(moment_expression(7, Statistics::fermion), std::invalid_argument);
}

TEST_CASE("table 1 reproduces the fourth-moment bookkeeping") {
  auto report = table1_report();
  REQUIRE(report.rows.size() == 5);
  CHECK(report.rows[0].term_count == 1);
  CHECK(report.rows[1].term_count == 3);
  CHECK(report.rows[2].term_count == 2);
  CHECK(report.rows[3].term_count == 1);
  CHECK(report.rows[4].term_count == 1);

  auto poly = [](std::initializer_list<std::pair<int, int>> cs) {
    MPolynomial p;
    for (auto [pw, cf] : cs) p += MPolynomial::monomial(pw, cf);
    return p;
  };
  CHECK(report.rows[0].poly == poly({{4, 1}}));
  CHECK(report.rows[1].poly == poly({{3, 3}, {4, -3}}));
  CHECK(report.rows[2].poly == poly({{2, 2}, {3, -4}, {4, 2}}));
  CHECK(report.rows[3].poly == poly({{2, 1}, {3, -2}, {4, 1}}));
  CHECK(report.rows[4].poly == poly({{1, 1}, {2, -3}, {3, 3}, {4, -1}}));
  CHECK(report.total == just_m());
  CHECK(report.total == moment_expression(4, Statistics::fermion));
}

TEST_CASE("expression json carries exact coefficients") {
  Term t;
  t.coeff = RationalComplex(Rational(1, 3), Rational(-2, 5));
  t.ops = {c(ModeIndex::mode(1)), a(ModeIndex::mode(0))};
  auto j = to_json(Expression{{t}});
  CHECK(j["terms"][0]["coeff"][0] == "1/3");
  CHECK(j["terms"][0]["coeff"][1] == "-2/5");
  CHECK(j["terms"][0]["ops"][0][0] == "c");
}
