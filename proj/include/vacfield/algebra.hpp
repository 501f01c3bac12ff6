#pragma once

#include <compare>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "vacfield/rational.hpp"

namespace vacfield::algebra {

enum class Statistics { fermion, boson, coherent_zero_mode };

std::string to_string(Statistics s);
Statistics statistics_from_string(const std::string& s);

// A mode label.  `occupied` is the designated mode carrying the particle;
// `symbolic` is a summation index constrained to run over modes != occupied;
// `concrete` is a plain integer mode id (used when checking against the
// Fock-matrix oracle).
enum class IndexKind { occupied, symbolic, concrete };

struct ModeIndex {
  IndexKind kind = IndexKind::occupied;
  int id = 0;  // symbolic name or concrete mode id; unused for occupied

  static ModeIndex occ() { return {IndexKind::occupied, 0}; }
  static ModeIndex sym(int name) { return {IndexKind::symbolic, name}; }
  static ModeIndex mode(int id) { return {IndexKind::concrete, id}; }

  auto operator<=>(const ModeIndex&) const = default;
};

struct OperatorSymbol {
  bool create = false;
  ModeIndex index;

  static OperatorSymbol annihilate(ModeIndex i) { return {false, i}; }
  static OperatorSymbol make_create(ModeIndex i) { return {true, i}; }

  auto operator<=>(const OperatorSymbol&) const = default;
};

using IndexPair = std::pair<ModeIndex, ModeIndex>;

// One summand: coeff * (deltas) * (V factors) * (operator string), with the
// listed symbolic indices summed over all modes != occupied.
struct Term {
  RationalComplex coeff{1};
  std::vector<IndexPair> deltas;     // Kronecker delta(a, b)
  std::vector<IndexPair> v_factors;  // V_{pq}; first slot from a creator, second from an annihilator
  std::vector<OperatorSymbol> ops;
  std::vector<int> sums;  // symbolic ids summed, each constrained != occupied

  auto operator<=>(const Term&) const = default;

  std::string str() const;
};

struct Expression {
  std::vector<Term> terms;

  bool scalar_only() const;
  std::string str() const;
};

// Exact polynomial in m = V_00.
struct MPolynomial {
  std::map<int, Rational> coeffs;  // power -> coefficient, no zero entries

  static MPolynomial constant(Rational c);
  static MPolynomial monomial(int power, Rational c = 1);

  MPolynomial& operator+=(const MPolynomial& o);
  friend MPolynomial operator+(MPolynomial a, const MPolynomial& b) { return a += b; }
  friend MPolynomial operator*(const MPolynomial& a, const MPolynomial& b);
  MPolynomial scaled(const Rational& c) const;
  bool operator==(const MPolynomial&) const = default;

  double eval(double m) const;
  std::string str() const;
};

// Rewrites a term so every creation operator precedes every annihilation
// operator, applying the statistics' (anti)commutator for each exchange, and
// canonicalizes the result (sorted factors, summed indices renamed in
// first-use order, like terms merged).
Expression normal_order(const Term& term, Statistics stats);
Expression normal_order(const Expression& expr, Statistics stats);

// <0| expr |0>.  Terms retaining any operator vanish; the surviving scalar
// part (deltas, V factors, sums) is returned exactly.
Expression vacuum_expectation(const Expression& expr, Statistics stats);
Expression vacuum_expectation(const Term& term, Statistics stats);

// Reduces a scalar expression over a complete-basis subvolume overlap V to an
// exact polynomial in m: resolves deltas, applies inclusion-exclusion to the
// restricted sums, and collapses V chains through the projection identity
// (V^k)_00 = m.  Throws UnsupportedExpression if the input leaves the V/delta
// grammar (e.g. traces or free sums, which have no m-polynomial value).
class UnsupportedExpression : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

MPolynomial reduce_to_m_polynomial(const Expression& scalar);

// The field's particle-number operator over a subvolume, as a symbolic
// expression: sum_{pq} V_pq O_p^+ O_q with O_0 = b_0^+ and O_q = b_q for
// q != 0.  Symbolic summation ids start at `first_sym_id`.
Expression number_operator_expression(int first_sym_id = 0);

// <N_v^k> as an exact polynomial in m.  Supported for k = 1..6.
MPolynomial moment_expression(int k, Statistics stats);

struct Table1Row {
  std::string pattern;  // operator-string pattern, '+' marking creation
  int term_count;
  MPolynomial poly;  // class total (count included)
};

struct Table1Report {
  std::vector<Table1Row> rows;
  MPolynomial total;
};

// The five term classes of the fermion fourth-moment expansion, grouped by
// the run structure of their vacuum contractions, plus the grand total.
Table1Report table1_report();

nlohmann::json to_json(const Expression& expr);
nlohmann::json to_json(const MPolynomial& poly);
nlohmann::json to_json(const Table1Report& report);

}  // namespace vacfield::algebra
