#include "vacfield/measurement.hpp"

#include <sstream>

#include "vacfield/oracle.hpp"
#include "vacfield/rng.hpp"

namespace vacfield::measurement {

using algebra::Statistics;

void Observable::validate() const {
  const long n = eigenfunctions.rows();
  if (eigenfunctions.cols() != n) throw std::invalid_argument("Observable: eigenbasis not square");
  if (eigenvalues.size() != n) throw std::invalid_argument("Observable: eigenvalue count mismatch");
  Eigen::MatrixXcd g = eigenfunctions * eigenfunctions.adjoint();
  if ((g - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("Observable: eigenbasis not orthonormal/complete");
  for (long a = 0; a < n; ++a)
    for (long b = a + 1; b < n; ++b)
      if (eigenvalues(a) == eigenvalues(b))
        throw std::invalid_argument("Observable: degenerate eigenvalues");
}

Observable Observable::position_basis(int n_sites) {
  Observable obs;
  obs.eigenfunctions = Eigen::MatrixXcd::Identity(n_sites, n_sites);
  obs.eigenvalues = Eigen::VectorXd::LinSpaced(n_sites, 0, n_sites - 1);
  return obs;
}

Observable Observable::random(int n_sites, std::uint64_t seed) {
  SmallRng rng(seed);
  Eigen::MatrixXcd g(n_sites, n_sites);
  for (int r = 0; r < n_sites; ++r)
    for (int c = 0; c < n_sites; ++c) g(r, c) = {rng.next_gaussian(), rng.next_gaussian()};
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ();
  Observable obs;
  obs.eigenfunctions = q.adjoint();  // rows orthonormal
  obs.eigenvalues = Eigen::VectorXd::LinSpaced(n_sites, 0, n_sites - 1);
  obs.validate();
  return obs;
}

double FilterCoefficients::column_norm_defect() const {
  double worst = 0;
  for (long n = 0; n < f.cols(); ++n)
    worst = std::max(worst, std::abs(f.col(n).squaredNorm() - 1.0));
  return worst;
}

FilterCoefficients filter_coefficients(const model::BasisSet& basis, const Observable& obs) {
  if (obs.eigenfunctions.cols() != basis.n_sites())
    throw std::invalid_argument("filter_coefficients: lattice mismatch");
  obs.validate();
  // f(i, n) = sum_x conj(g_n(x)) f_i(x)
  return FilterCoefficients{basis.modes() * obs.eigenfunctions.adjoint()};
}

Eigen::MatrixXcd filter_overlap(const FilterCoefficients& fc, int outcome) {
  if (outcome < 0 || outcome >= fc.f.cols())
    throw std::invalid_argument("filter_overlap: outcome out of range");
  Eigen::VectorXcd col = fc.f.col(outcome);
  return col.conjugate() * col.transpose();
}

std::vector<double> filtered_moments(const FilterCoefficients& fc, int outcome, int k_max,
                                     Statistics stats) {
  const int M = static_cast<int>(fc.f.rows());
  const int cutoff = stats == Statistics::fermion ? 1 : k_max + 1;
  oracle::FockSpace fock(stats, M, cutoff);
  const auto n_op = oracle::number_operator(fock, filter_overlap(fc, outcome));
  std::vector<double> moments;
  for (int k = 1; k <= k_max; ++k) moments.push_back(oracle::vacuum_moment(fock, n_op, k));
  return moments;
}

std::vector<std::pair<double, double>> outcome_distribution(const FilterCoefficients& fc,
                                                            const Observable& obs) {
  std::vector<std::pair<double, double>> dist;
  for (long n = 0; n < fc.f.cols(); ++n)
    dist.push_back({obs.eigenvalues(n), std::norm(fc.f(0, n))});
  return dist;
}

std::string outcome_csv(const FilterCoefficients& fc, const Observable& obs, int k_max,
                        Statistics stats) {
  std::ostringstream os;
  os.precision(17);
  os << "n,eigenvalue,probability";
  for (int k = 1; k <= k_max; ++k) os << ",moment_" << k;
  os << "\n";
  for (long n = 0; n < fc.f.cols(); ++n) {
    os << n << "," << obs.eigenvalues(n) << "," << std::norm(fc.f(0, n));
    for (double mk : filtered_moments(fc, static_cast<int>(n), k_max, stats)) os << "," << mk;
    os << "\n";
  }
  return os.str();
}

}  // namespace vacfield::measurement
