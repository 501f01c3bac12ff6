#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace vacfield::model {

using Complex = std::complex<double>;

// Discrete space: n_sites points with unit weight, so <f,g> = sum_x conj(f(x)) g(x).
struct Lattice {
  int n_sites;

  explicit Lattice(int n) : n_sites(n) {
    if (n < 2) throw std::invalid_argument("Lattice: n_sites must be >= 2");
  }
};

// Orthonormal mode functions, one per row.  Row 0 is the occupied mode f_0.
class BasisSet {
 public:
  BasisSet(Lattice lattice, Eigen::MatrixXcd modes);

  const Lattice& lattice() const { return lattice_; }
  int n_sites() const { return lattice_.n_sites; }
  int n_modes() const { return static_cast<int>(modes_.rows()); }
  bool complete() const { return n_modes() == n_sites(); }

  const Eigen::MatrixXcd& modes() const { return modes_; }
  Eigen::MatrixXcd::ConstRowXpr mode(int p) const { return modes_.row(p); }

  // Same basis with row `row` removed (row != 0); used for closure-sensitivity
  // experiments.  The result is deliberately incomplete.
  BasisSet without_row(int row) const;

 private:
  Lattice lattice_;
  Eigen::MatrixXcd modes_;  // n_modes x n_sites
};

struct Subvolume {
  std::vector<int> sites;  // strictly increasing, no duplicates

  static Subvolume all(int n_sites);
  static Subvolume none() { return {}; }

  void validate(int n_sites) const;
  bool contains(int site) const;
};

// Subvolume Gram matrix V_pq = sum_{x in v} conj(f_p(x)) f_q(x).
struct OverlapMatrix {
  Eigen::MatrixXcd entries;

  double m() const { return entries(0, 0).real(); }
};

// Orthonormal completion with row 0 proportional to f0.  Seeds the remaining
// rows from the discrete Fourier family, dropping the member with maximal
// overlap against f0, and re-orthonormalizes.
BasisSet build_basis(const Lattice& lattice, const Eigen::VectorXcd& f0);

OverlapMatrix overlap_matrix(const BasisSet& basis, const Subvolume& v);

// max_{z,x} |sum_p conj(f_p(z)) f_p(x) - delta_zx|.  Zero (to round-off) iff
// the basis is complete.
double closure_residual(const BasisSet& basis);

nlohmann::json to_json(const BasisSet& basis, const Subvolume& v);
std::pair<BasisSet, Subvolume> basis_from_json(const nlohmann::json& j);

}  // namespace vacfield::model
