#include "vacfield/algebra.hpp"

#include <algorithm>
#include <functional>
#include <mutex>
#include <sstream>

namespace vacfield::algebra {

std::string to_string(Statistics s) {
  switch (s) {
    case Statistics::fermion: return "fermion";
    case Statistics::boson: return "boson";
    case Statistics::coherent_zero_mode: return "coherent";
  }
  return "?";
}

Statistics statistics_from_string(const std::string& s) {
  if (s == "fermion") return Statistics::fermion;
  if (s == "boson") return Statistics::boson;
  if (s == "coherent") return Statistics::coherent_zero_mode;
  throw std::invalid_argument("unknown statistics flavor: " + s);
}

namespace {

std::string index_str(const ModeIndex& i) {
  switch (i.kind) {
    case IndexKind::occupied: return "n";
    case IndexKind::symbolic: return "s" + std::to_string(i.id);
    case IndexKind::concrete: return std::to_string(i.id);
  }
  return "?";
}

bool is_sym(const ModeIndex& i, int id) {
  return i.kind == IndexKind::symbolic && i.id == id;
}

void substitute(Term& t, int sym_id, const ModeIndex& target) {
  auto fix = [&](ModeIndex& i) {
    if (is_sym(i, sym_id)) i = target;
  };
  for (auto& d : t.deltas) {
    fix(d.first);
    fix(d.second);
  }
  for (auto& v : t.v_factors) {
    fix(v.first);
    fix(v.second);
  }
  for (auto& op : t.ops) fix(op.index);
  std::erase(t.sums, sym_id);
}

// Resolves deltas that are decidable on the spot.  Returns false if the term
// vanishes.  Deltas with a summed symbolic side are substituted away; deltas
// between free indices are kept.
bool resolve_deltas(Term& t) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t d = 0; d < t.deltas.size(); ++d) {
      const auto& [a, b] = t.deltas[d];
      if (a == b) {
        t.deltas.erase(t.deltas.begin() + d);
        changed = true;
        break;
      }
      if (a.kind == IndexKind::concrete && b.kind == IndexKind::concrete) return false;
      // A symbolic summation index never equals the occupied mode.
      if ((a.kind == IndexKind::symbolic && b.kind == IndexKind::occupied) ||
          (b.kind == IndexKind::symbolic && a.kind == IndexKind::occupied))
        return false;
      auto summed = [&](const ModeIndex& i) {
        return i.kind == IndexKind::symbolic &&
               std::find(t.sums.begin(), t.sums.end(), i.id) != t.sums.end();
      };
      if (summed(a) || summed(b)) {
        ModeIndex from = summed(a) ? a : b;
        ModeIndex to = summed(a) ? b : a;
        t.deltas.erase(t.deltas.begin() + d);
        substitute(t, from.id, to);
        changed = true;
        break;
      }
    }
  }
  return true;
}

IndexPair normalized_delta(IndexPair d) {
  if (d.second < d.first) std::swap(d.first, d.second);
  return d;
}

void sort_factors(Term& t) {
  for (auto& d : t.deltas) d = normalized_delta(d);
  std::sort(t.deltas.begin(), t.deltas.end());
  std::sort(t.v_factors.begin(), t.v_factors.end());
  std::sort(t.sums.begin(), t.sums.end());
}

// Renames summed symbolic indices in first-use order over the scan
// ops -> v_factors -> deltas -> sums.
Term rename_pass(const Term& in) {
  Term t = in;
  sort_factors(t);
  std::map<int, int> renaming;
  auto note = [&](const ModeIndex& i) {
    if (i.kind != IndexKind::symbolic) return;
    if (std::find(t.sums.begin(), t.sums.end(), i.id) == t.sums.end()) return;
    renaming.try_emplace(i.id, static_cast<int>(renaming.size()));
  };
  for (const auto& op : t.ops) note(op.index);
  for (const auto& v : t.v_factors) {
    note(v.first);
    note(v.second);
  }
  for (const auto& d : t.deltas) {
    note(d.first);
    note(d.second);
  }
  for (int s : t.sums) note(ModeIndex::sym(s));

  // Two-phase rename to dodge id collisions.
  constexpr int kShift = 1 << 20;
  auto remap = [&](int phase) {
    auto fix = [&](ModeIndex& i) {
      if (i.kind != IndexKind::symbolic) return;
      if (phase == 0) {
        auto it = renaming.find(i.id);
        if (it != renaming.end()) i.id = it->second + kShift;
      } else if (i.id >= kShift) {
        i.id -= kShift;
      }
    };
    for (auto& op : t.ops) fix(op.index);
    for (auto& v : t.v_factors) {
      fix(v.first);
      fix(v.second);
    }
    for (auto& d : t.deltas) {
      fix(d.first);
      fix(d.second);
    }
    for (auto& s : t.sums) {
      if (phase == 0) {
        auto it = renaming.find(s);
        if (it != renaming.end()) s = it->second + kShift;
      } else if (s >= kShift) {
        s -= kShift;
      }
    }
  };
  remap(0);
  remap(1);
  sort_factors(t);
  return t;
}

// Deterministic canonical labeling: iterate the rename pass; if it cycles,
// take the lexicographic minimum over the cycle.
Term canonical_labels(Term t) {
  std::vector<Term> seen;
  for (int iter = 0; iter < 64; ++iter) {
    Term next = rename_pass(t);
    if (next == t) return t;
    auto hit = std::find(seen.begin(), seen.end(), next);
    if (hit != seen.end()) {
      Term best = t;
      for (auto it = hit; it != seen.end(); ++it)
        if (*it < best) best = *it;
      return best;
    }
    seen.push_back(t);
    t = std::move(next);
  }
  return t;
}

void merge_terms(Expression& e) {
  std::sort(e.terms.begin(), e.terms.end(), [](const Term& a, const Term& b) {
    return std::tie(a.ops, a.v_factors, a.deltas, a.sums) <
           std::tie(b.ops, b.v_factors, b.deltas, b.sums);
  });
  std::vector<Term> merged;
  for (auto& t : e.terms) {
    if (!merged.empty() && std::tie(merged.back().ops, merged.back().v_factors,
                                    merged.back().deltas, merged.back().sums) ==
                               std::tie(t.ops, t.v_factors, t.deltas, t.sums)) {
      merged.back().coeff += t.coeff;
    } else {
      merged.push_back(std::move(t));
    }
  }
  std::erase_if(merged, [](const Term& t) { return t.coeff.is_zero(); });
  e.terms = std::move(merged);
}

Expression canonicalize(std::vector<Term> terms) {
  Expression out;
  for (auto& t : terms) {
    if (t.coeff.is_zero()) continue;
    if (!resolve_deltas(t)) continue;
    out.terms.push_back(canonical_labels(std::move(t)));
  }
  merge_terms(out);
  return out;
}

// Coherent flavor: the occupied-mode amplitude is the ordinary number 1, so
// its operator symbols drop out as scalar factors.
void strip_occupied(Term& t) {
  std::erase_if(t.ops, [](const OperatorSymbol& op) {
    return op.index.kind == IndexKind::occupied;
  });
}

bool like_sign_negative(Statistics stats) { return stats == Statistics::fermion; }

}  // namespace

std::string Term::str() const {
  std::ostringstream os;
  os << coeff.str();
  for (int s : sums) os << " sum[s" << s << "!=n]";
  for (const auto& d : deltas) os << " d(" << index_str(d.first) << "," << index_str(d.second) << ")";
  for (const auto& v : v_factors) os << " V(" << index_str(v.first) << "," << index_str(v.second) << ")";
  for (const auto& op : ops) os << " b_" << index_str(op.index) << (op.create ? "+" : "");
  return os.str();
}

std::string Expression::str() const {
  if (terms.empty()) return "0";
  std::string s;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i) s += "  +  ";
    s += terms[i].str();
  }
  return s;
}

bool Expression::scalar_only() const {
  return std::all_of(terms.begin(), terms.end(),
                     [](const Term& t) { return t.ops.empty(); });
}

MPolynomial MPolynomial::constant(Rational c) { return monomial(0, std::move(c)); }

MPolynomial MPolynomial::monomial(int power, Rational c) {
  MPolynomial p;
  if (c != 0) p.coeffs[power] = std::move(c);
  return p;
}

MPolynomial& MPolynomial::operator+=(const MPolynomial& o) {
  for (const auto& [pw, c] : o.coeffs) {
    auto [it, inserted] = coeffs.try_emplace(pw, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) coeffs.erase(it);
    }
  }
  return *this;
}

MPolynomial operator*(const MPolynomial& a, const MPolynomial& b) {
  MPolynomial r;
  for (const auto& [pa, ca] : a.coeffs)
    for (const auto& [pb, cb] : b.coeffs) r += MPolynomial::monomial(pa + pb, ca * cb);
  return r;
}

MPolynomial MPolynomial::scaled(const Rational& c) const {
  MPolynomial r;
  if (c == 0) return r;
  for (const auto& [pw, cf] : coeffs) r.coeffs[pw] = cf * c;
  return r;
}

double MPolynomial::eval(double m) const {
  double v = 0;
  for (const auto& [pw, c] : coeffs) v += static_cast<double>(c) * std::pow(m, pw);
  return v;
}

std::string MPolynomial::str() const {
  if (coeffs.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [pw, c] : coeffs) {
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    Rational a = c < 0 ? Rational(-c) : c;
    if (a != 1 || pw == 0) os << a.str();
    if (pw >= 1) os << "m";
    if (pw >= 2) os << "^" << pw;
    first = false;
  }
  return os.str();
}

Expression normal_order(const Term& term, Statistics stats) {
  std::vector<Term> done;
  std::vector<Term> work{term};
  if (stats == Statistics::coherent_zero_mode) strip_occupied(work[0]);
  const Rational like_sign = like_sign_negative(stats) ? -1 : 1;
  const Rational swap_sign = like_sign;  // mixed-kind exchange carries the same sign

  while (!work.empty()) {
    Term t = std::move(work.back());
    work.pop_back();

    // First annihilator immediately left of a creator.
    std::size_t pos = t.ops.size();
    for (std::size_t i = 0; i + 1 < t.ops.size(); ++i)
      if (!t.ops[i].create && t.ops[i + 1].create) {
        pos = i;
        break;
      }
    if (pos != t.ops.size()) {
      // b_q c_p -> delta(q,p) +/- c_p b_q
      Term contracted = t;
      contracted.deltas.push_back({t.ops[pos].index, t.ops[pos + 1].index});
      contracted.ops.erase(contracted.ops.begin() + pos, contracted.ops.begin() + pos + 2);
      work.push_back(std::move(contracted));

      Term swapped = std::move(t);
      std::swap(swapped.ops[pos], swapped.ops[pos + 1]);
      swapped.coeff *= RationalComplex(swap_sign);
      work.push_back(std::move(swapped));
      continue;
    }

    // Normal-ordered; sort each block canonically (bubble sort, tracking sign).
    auto sort_block = [&](std::size_t lo, std::size_t hi) -> bool {
      for (std::size_t i = lo; i + 1 < hi; ++i)
        for (std::size_t j = lo; j + 1 < hi - (i - lo); ++j) {
          if (t.ops[j].index == t.ops[j + 1].index && like_sign_negative(stats))
            return false;  // b b with equal index vanishes for fermions
          if (t.ops[j + 1].index < t.ops[j].index) {
            std::swap(t.ops[j], t.ops[j + 1]);
            t.coeff *= RationalComplex(like_sign);
          }
        }
      for (std::size_t i = lo; i + 1 < hi; ++i)
        if (t.ops[i].index == t.ops[i + 1].index && like_sign_negative(stats)) return false;
      return true;
    };
    std::size_t split = 0;
    while (split < t.ops.size() && t.ops[split].create) ++split;
    if (!sort_block(0, split)) continue;
    if (!sort_block(split, t.ops.size())) continue;
    done.push_back(std::move(t));
  }
  return canonicalize(std::move(done));
}

Expression normal_order(const Expression& expr, Statistics stats) {
  std::vector<Term> out;
  for (const auto& t : expr.terms) {
    Expression e = normal_order(t, stats);
    out.insert(out.end(), e.terms.begin(), e.terms.end());
  }
  return canonicalize(std::move(out));
}

namespace {

struct Contraction {
  RationalComplex coeff;
  std::vector<IndexPair> deltas;
};

// Full vacuum contraction of an operator string (Wick).  The first operator
// must be an annihilator for a nonzero result; it contracts in turn with each
// creator to its right, a fermionic contraction picking up (-1)^(ops passed).
std::vector<Contraction> wick(std::vector<OperatorSymbol> ops, Statistics stats) {
  if (ops.empty()) return {{RationalComplex(1), {}}};
  if (ops.front().create) return {};
  if (!ops.back().create) return {};  // rightmost annihilator kills |0>
  std::vector<Contraction> out;
  const bool fermi = like_sign_negative(stats);
  for (std::size_t t = 1; t < ops.size(); ++t) {
    if (!ops[t].create) continue;
    const ModeIndex a = ops.front().index;
    const ModeIndex c = ops[t].index;
    // Decide the delta now when possible.
    bool keep_delta = false;
    if (a == c) {
      // delta = 1
    } else if (a.kind == IndexKind::concrete && c.kind == IndexKind::concrete) {
      continue;  // unequal concrete modes
    } else if ((a.kind == IndexKind::symbolic && c.kind == IndexKind::occupied) ||
               (c.kind == IndexKind::symbolic && a.kind == IndexKind::occupied)) {
      continue;  // summation indices exclude the occupied mode
    } else {
      keep_delta = true;
    }
    std::vector<OperatorSymbol> rest;
    rest.reserve(ops.size() - 2);
    for (std::size_t i = 1; i < ops.size(); ++i)
      if (i != t) rest.push_back(ops[i]);
    RationalComplex sign((fermi && (t - 1) % 2 == 1) ? Rational(-1) : Rational(1));
    for (auto& sub : wick(std::move(rest), stats)) {
      Contraction c2;
      c2.coeff = sign * sub.coeff;
      c2.deltas = std::move(sub.deltas);
      if (keep_delta) c2.deltas.push_back(normalized_delta({a, c}));
      out.push_back(std::move(c2));
    }
  }
  return out;
}

}  // namespace

Expression vacuum_expectation(const Term& term, Statistics stats) {
  Term base = term;
  if (stats == Statistics::coherent_zero_mode) strip_occupied(base);
  Statistics effective =
      stats == Statistics::coherent_zero_mode ? Statistics::boson : stats;
  std::vector<Term> out;
  for (auto& c : wick(base.ops, effective)) {
    Term t = base;
    t.ops.clear();
    t.coeff *= c.coeff;
    t.deltas.insert(t.deltas.end(), c.deltas.begin(), c.deltas.end());
    out.push_back(std::move(t));
  }
  return canonicalize(std::move(out));
}

Expression vacuum_expectation(const Expression& expr, Statistics stats) {
  std::vector<Term> out;
  for (const auto& t : expr.terms) {
    Expression e = vacuum_expectation(t, stats);
    out.insert(out.end(), e.terms.begin(), e.terms.end());
  }
  return canonicalize(std::move(out));
}

namespace {

// Collapses the V chains of a fully delta-resolved term whose summed indices
// are unrestricted (already inclusion-exclusion expanded).  Uses V^2 = V and
// (V^k)_00 = m.
MPolynomial collapse_chains(Term t, std::vector<int> unrestricted) {
  while (!unrestricted.empty()) {
    int u = unrestricted.back();
    unrestricted.pop_back();
    int first_slot = -1, second_slot = -1;
    int uses = 0;
    for (int f = 0; f < static_cast<int>(t.v_factors.size()); ++f) {
      if (is_sym(t.v_factors[f].first, u)) {
        ++uses;
        first_slot = f;
      }
      if (is_sym(t.v_factors[f].second, u)) {
        ++uses;
        second_slot = f;
      }
    }
    if (uses != 2 || first_slot < 0 || second_slot < 0)
      throw UnsupportedExpression("summed index does not form an oriented V chain");
    if (first_slot == second_slot)
      throw UnsupportedExpression("V trace encountered; not a polynomial in m");
    // V_{a u} V_{u b} -> V_{a b}
    IndexPair merged{t.v_factors[second_slot].first, t.v_factors[first_slot].second};
    if (first_slot < second_slot) std::swap(first_slot, second_slot);
    t.v_factors.erase(t.v_factors.begin() + first_slot);
    t.v_factors.erase(t.v_factors.begin() + second_slot);
    t.v_factors.push_back(merged);
  }
  for (const auto& v : t.v_factors)
    if (v.first.kind != IndexKind::occupied || v.second.kind != IndexKind::occupied)
      throw UnsupportedExpression("V factor with non-occupied free index");
  if (t.coeff.im != 0)
    throw UnsupportedExpression("complex coefficient in m-polynomial reduction");
  return MPolynomial::monomial(static_cast<int>(t.v_factors.size()), t.coeff.re);
}

}  // namespace

MPolynomial reduce_to_m_polynomial(const Expression& scalar) {
  MPolynomial result;
  for (const Term& raw : scalar.terms) {
    if (!raw.ops.empty())
      throw UnsupportedExpression("operator symbols in scalar reduction");
    Term t = raw;
    if (!resolve_deltas(t)) continue;
    if (!t.deltas.empty())
      throw UnsupportedExpression("unresolvable delta between free indices");
    for (int s : t.sums) {
      bool used = false;
      for (const auto& v : t.v_factors)
        used = used || is_sym(v.first, s) || is_sym(v.second, s);
      if (!used) throw UnsupportedExpression("free sum with no V factor");
    }
    // Inclusion-exclusion: sum_{i != 0} = sum_i - [i := occupied].
    const int s = static_cast<int>(t.sums.size());
    for (int mask = 0; mask < (1 << s); ++mask) {
      Term expanded = t;
      std::vector<int> unrestricted;
      int sign = 1;
      for (int b = 0; b < s; ++b) {
        if (mask & (1 << b)) {
          substitute(expanded, t.sums[b], ModeIndex::occ());
          sign = -sign;
        } else {
          unrestricted.push_back(t.sums[b]);
        }
      }
      expanded.sums.clear();
      expanded.coeff *= RationalComplex(Rational(sign));
      result += collapse_chains(std::move(expanded), std::move(unrestricted));
    }
  }
  return result;
}

namespace {

Term scalar_term(Rational c = 1) {
  Term t;
  t.coeff = RationalComplex(std::move(c));
  return t;
}

Term nv_block(int which, int id0) {
  Term t;
  switch (which) {
    case 0:  // V_00 b_0 b_0^+
      t.v_factors.push_back({ModeIndex::occ(), ModeIndex::occ()});
      t.ops = {OperatorSymbol::annihilate(ModeIndex::occ()),
               OperatorSymbol::make_create(ModeIndex::occ())};
      break;
    case 1:  // sum_i V_0i b_0 b_i
      t.v_factors.push_back({ModeIndex::occ(), ModeIndex::sym(id0)});
      t.ops = {OperatorSymbol::annihilate(ModeIndex::occ()),
               OperatorSymbol::annihilate(ModeIndex::sym(id0))};
      t.sums = {id0};
      break;
    case 2:  // sum_i V_i0 b_i^+ b_0^+
      t.v_factors.push_back({ModeIndex::sym(id0), ModeIndex::occ()});
      t.ops = {OperatorSymbol::make_create(ModeIndex::sym(id0)),
               OperatorSymbol::make_create(ModeIndex::occ())};
      t.sums = {id0};
      break;
    case 3:  // sum_ij V_ij b_i^+ b_j
      t.v_factors.push_back({ModeIndex::sym(id0), ModeIndex::sym(id0 + 1)});
      t.ops = {OperatorSymbol::make_create(ModeIndex::sym(id0)),
               OperatorSymbol::annihilate(ModeIndex::sym(id0 + 1))};
      t.sums = {id0, id0 + 1};
      break;
    default:
      throw std::logic_error("nv_block");
  }
  return t;
}

Term term_product(const Term& a, const Term& b) {
  Term t = a;
  t.coeff *= b.coeff;
  t.deltas.insert(t.deltas.end(), b.deltas.begin(), b.deltas.end());
  t.v_factors.insert(t.v_factors.end(), b.v_factors.begin(), b.v_factors.end());
  t.ops.insert(t.ops.end(), b.ops.begin(), b.ops.end());
  t.sums.insert(t.sums.end(), b.sums.begin(), b.sums.end());
  return t;
}

}  // namespace

Expression number_operator_expression(int first_sym_id) {
  Expression e;
  for (int which = 0; which < 4; ++which) e.terms.push_back(nv_block(which, first_sym_id));
  return e;
}

MPolynomial moment_expression(int k, Statistics stats) {
  if (k < 1 || k > 6) throw std::invalid_argument("moment_expression: k must be in 1..6");

  static std::mutex mtx;
  static std::map<std::pair<int, Statistics>, MPolynomial> cache;
  {
    std::lock_guard lock(mtx);
    auto it = cache.find({k, stats});
    if (it != cache.end()) return it->second;
  }

  // Expand N_v^k over the four block choices per factor, with fresh summation
  // ids per factor (two reserved each).
  std::vector<Term> products{scalar_term()};
  for (int slot = 0; slot < k; ++slot) {
    std::vector<Term> next;
    next.reserve(products.size() * 4);
    for (const auto& p : products)
      for (int which = 0; which < 4; ++which)
        next.push_back(term_product(p, nv_block(which, 2 * slot)));
    products = std::move(next);
  }

  MPolynomial total;
  for (const auto& p : products)
    total += reduce_to_m_polynomial(vacuum_expectation(p, stats));

  std::lock_guard lock(mtx);
  cache.try_emplace({k, stats}, total);
  return total;
}

namespace {

// Compositions of `total` into ordered positive parts.
void compositions(int total, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (total == 0) {
    out.push_back(cur);
    return;
  }
  for (int part = 1; part <= total; ++part) {
    cur.push_back(part);
    compositions(total - part, cur, out);
    cur.pop_back();
  }
}

// b_n b_i b_i+ ... b_n+ pattern string for a run composition.
std::string class_pattern(const std::vector<int>& runs) {
  static const char* letters[] = {"i", "j", "k", "l", "p", "q"};
  std::string s;
  int next_letter = 0;
  for (int run : runs) {
    if (!s.empty()) s += " ";
    if (run == 1) {
      s += "b_n b_n+";
      continue;
    }
    s += "b_n";
    for (int x = 0; x < run - 1; ++x) {
      s += std::string(" b_") + letters[next_letter] + " b_" + letters[next_letter] + "+";
      ++next_letter;
    }
    s += " b_n+";
  }
  return s;
}

/// Product of N_v blocks realizing one run composition: a run of length 1 is
// the diagonal block, a run of length L >= 2 is b_0 b_i ... b_j^+ b_0^+
// spanning L adjacent factors.
Term composition_term(const std::vector<int>& runs) {
  Term t = scalar_term();
  int slot = 0;
  for (int run : runs) {
    if (run == 1) {
      t = term_product(t, nv_block(0, 2 * slot));
      ++slot;
      continue;
    }
    t = term_product(t, nv_block(1, 2 * slot));
    ++slot;
    for (int mid = 0; mid < run - 2; ++mid) {
      t = term_product(t, nv_block(3, 2 * slot));
      ++slot;
    }
    t = term_product(t, nv_block(2, 2 * slot));
    ++slot;
  }
  return t;
}

}  // namespace

Table1Report table1_report() {
  std::vector<std::vector<int>> comps;
  std::vector<int> cur;
  compositions(4, cur, comps);

  // Class key: run multiset, in the reporting order of decreasing diagonal
  // content: [1,1,1,1], [2,1,1], [3,1], [2,2], [4].
  auto class_key = [](const std::vector<int>& runs) {
    std::vector<int> key = runs;
    std::sort(key.begin(), key.end(), std::greater<>());
    return key;
  };
  const std::vector<std::vector<int>> order = {
      {1, 1, 1, 1}, {2, 1, 1}, {3, 1}, {2, 2}, {4}};

  std::map<std::vector<int>, Table1Row> classes;
  for (const auto& runs : comps) {
    MPolynomial poly =
        reduce_to_m_polynomial(vacuum_expectation(composition_term(runs), Statistics::fermion));
    auto key = class_key(runs);
    auto [it, inserted] = classes.try_emplace(key);
    if (inserted) {
      it->second.pattern = class_pattern(key);
      it->second.term_count = 0;
    }
    it->second.term_count += 1;
    it->second.poly += poly;
  }

  Table1Report report;
  for (const auto& key : order) {
    auto it = classes.find(key);
    if (it == classes.end()) continue;
    report.total += it->second.poly;
    report.rows.push_back(std::move(it->second));
    classes.erase(it);
  }
  // Any class outside the expected five would be a derivation bug; surface it.
  for (auto& [key, row] : classes) {
    report.total += row.poly;
    report.rows.push_back(std::move(row));
  }
  return report;
}

namespace {

nlohmann::json index_json(const ModeIndex& i) {
  switch (i.kind) {
    case IndexKind::occupied: return "n";
    case IndexKind::symbolic: return "s" + std::to_string(i.id);
    case IndexKind::concrete: return i.id;
  }
  return nullptr;
}

}  // namespace

nlohmann::json to_json(const Expression& expr) {
  auto terms = nlohmann::json::array();
  for (const auto& t : expr.terms) {
    nlohmann::json jt;
    jt["coeff"] = {t.coeff.re.str(), t.coeff.im.str()};
    auto deltas = nlohmann::json::array();
    for (const auto& d : t.deltas) deltas.push_back({index_json(d.first), index_json(d.second)});
    jt["deltas"] = std::move(deltas);
    auto vs = nlohmann::json::array();
    for (const auto& v : t.v_factors) vs.push_back({index_json(v.first), index_json(v.second)});
    jt["V"] = std::move(vs);
    auto ops = nlohmann::json::array();
    for (const auto& op : t.ops) ops.push_back({op.create ? "c" : "a", index_json(op.index)});
    jt["ops"] = std::move(ops);
    jt["sums"] = t.sums;
    terms.push_back(std::move(jt));
  }
  return {{"terms", std::move(terms)}};
}

nlohmann::json to_json(const MPolynomial& poly) {
  auto j = nlohmann::json::object();
  for (const auto& [pw, c] : poly.coeffs) j[std::to_string(pw)] = c.str();
  return j;
}

nlohmann::json to_json(const Table1Report& report) {
  nlohmann::json j;
  auto rows = nlohmann::json::array();
  for (const auto& r : report.rows)
    rows.push_back({{"pattern", r.pattern},
                    {"term_count", r.term_count},
                    {"polynomial", to_json(r.poly)}});
  j["rows"] = std::move(rows);
  j["total"] = to_json(report.total);
  return j;
}

}  // namespace vacfield::algebra
