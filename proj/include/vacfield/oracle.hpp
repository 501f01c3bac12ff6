#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <complex>
#include <vector>

#include "vacfield/algebra.hpp"
#include "vacfield/model.hpp"

namespace vacfield::oracle {

using Complex = std::complex<double>;
using SpMat = Eigen::SparseMatrix<Complex>;

// Explicit matrix representation of the mode algebra.  Fermions use the
// standard sign-string construction on 2^M occupation states (exact integer
// entries); bosons a per-mode occupation cutoff.  The vacuum is basis state 0.
class FockSpace {
 public:
  FockSpace(algebra::Statistics stats, int n_modes, int cutoff = 0);

  algebra::Statistics stats() const { return stats_; }
  int n_modes() const { return n_modes_; }
  int cutoff() const { return cutoff_; }
  long dimension() const { return dimension_; }

  const SpMat& annihilator(int mode) const { return annihilators_.at(mode); }
  SpMat creator(int mode) const { return SpMat(annihilators_.at(mode).adjoint()); }

  Eigen::VectorXcd vacuum() const;

  // <0| ops |0> for a string of concrete-index operator symbols (leftmost
  // symbol applied last).  For coherent statistics the occupied mode's
  // symbols act as the ordinary number 1.
  Complex vacuum_matrix_element(const std::vector<algebra::OperatorSymbol>& ops) const;

 private:
  algebra::Statistics stats_;
  int n_modes_;
  int cutoff_;
  long dimension_;
  std::vector<SpMat> annihilators_;
};

FockSpace build_fock(algebra::Statistics stats, int n_modes, int cutoff = 0);

// N_v = sum_pq V_pq O_p^+ O_q with O_0 = b_0^+ and O_q = b_q otherwise; the
// occupied mode enters through a creation operator.  V must be Hermitian.
SpMat number_operator(const FockSpace& fock, const Eigen::MatrixXcd& V);

// <0| N^k |0> by repeated application to the vacuum.
double vacuum_moment(const FockSpace& fock, const SpMat& number_op, int k);

struct SpectralDistribution {
  // (eigenvalue, weight of the vacuum's projection), ascending eigenvalues,
  // near-duplicates merged, zero-weight atoms dropped.
  std::vector<std::pair<double, double>> atoms;

  double moment(int k) const;
};

SpectralDistribution spectral_distribution(const FockSpace& fock, const SpMat& number_op);

// Worst (anti)commutator residual over all mode pairs; exact zero for
// fermions, < 1e-12 below the cutoff for bosons.
double algebra_residual(const FockSpace& fock);

std::string spectrum_csv(const SpectralDistribution& dist);
std::string moments_csv(const std::vector<double>& moments);

}  // namespace vacfield::oracle
