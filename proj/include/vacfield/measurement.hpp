#pragma once

#include <Eigen/Dense>

#include <vector>

#include "vacfield/algebra.hpp"
#include "vacfield/model.hpp"

namespace vacfield::measurement {

// An observable given by its complete orthonormal eigenbasis on the lattice
// (row k = eigenfunction g_k) and nondegenerate eigenvalues.
struct Observable {
  Eigen::MatrixXcd eigenfunctions;  // n x n, row per eigenfunction
  Eigen::VectorXd eigenvalues;

  void validate() const;
  static Observable position_basis(int n_sites);
  static Observable random(int n_sites, std::uint64_t seed);
};

// f_in = <g_n, f_i>; columns have unit norm when the eigenbasis is complete.
struct FilterCoefficients {
  Eigen::MatrixXcd f;  // f(i, n)

  double column_norm_defect() const;  // max_n |sum_i |f_in|^2 - 1|
};

FilterCoefficients filter_coefficients(const model::BasisSet& basis, const Observable& obs);

// Rank-one overlap analogue for outcome n: W_pq = conj(f_pn) f_qn.  Feeding
// this to the oracle's number operator gives the filtered field's moments.
Eigen::MatrixXcd filter_overlap(const FilterCoefficients& fc, int outcome);

// Moments k = 1..k_max of the filtered amount of matter, via the Fock oracle.
std::vector<double> filtered_moments(const FilterCoefficients& fc, int outcome, int k_max,
                                     algebra::Statistics stats);

// p_n = |f_0n|^2 per eigenvalue; sums to 1 for a complete eigenbasis.
std::vector<std::pair<double, double>> outcome_distribution(const FilterCoefficients& fc,
                                                            const Observable& obs);

std::string outcome_csv(const FilterCoefficients& fc, const Observable& obs, int k_max,
                        algebra::Statistics stats);

}  // namespace vacfield::measurement
