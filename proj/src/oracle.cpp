#include "vacfield/oracle.hpp"

#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace vacfield::oracle {

using algebra::IndexKind;
using algebra::Statistics;

namespace {

constexpr int kMaxFermionModes = 14;
constexpr long kMaxBosonDim = 20000;

long ipow(long base, int exp) {
  long r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

}  // namespace

FockSpace::FockSpace(Statistics stats, int n_modes, int cutoff)
    : stats_(stats), n_modes_(n_modes), cutoff_(cutoff) {
  if (n_modes < 1) throw std::invalid_argument("FockSpace: need at least one mode");

  if (stats == Statistics::fermion) {
    if (n_modes > kMaxFermionModes)
      throw std::invalid_argument("FockSpace: fermion mode budget exceeded");
    cutoff_ = 1;
    dimension_ = 1L << n_modes;
    annihilators_.resize(n_modes);
    for (int p = 0; p < n_modes; ++p) {
      std::vector<Eigen::Triplet<Complex>> trips;
      const long below_mask = (1L << p) - 1;
      for (long s = 0; s < dimension_; ++s) {
        if (!(s & (1L << p))) continue;
        const long target = s & ~(1L << p);
        const int sign = (std::popcount(static_cast<unsigned long>(s & below_mask)) % 2) ? -1 : 1;
        trips.emplace_back(target, s, Complex(sign, 0));
      }
      annihilators_[p].resize(dimension_, dimension_);
      annihilators_[p].setFromTriplets(trips.begin(), trips.end());
    }
    return;
  }

  // Boson or coherent.  For the coherent flavor the occupied mode carries no
  // operators (it is the ordinary number 1), so the space spans modes 1..M-1.
  if (cutoff_ < 1) throw std::invalid_argument("FockSpace: boson cutoff must be >= 1");
  const int first = stats == Statistics::coherent_zero_mode ? 1 : 0;
  const int active = n_modes - first;
  dimension_ = ipow(cutoff_ + 1, active);
  if (dimension_ > kMaxBosonDim)
    throw std::invalid_argument("FockSpace: boson dimension budget exceeded");

  annihilators_.resize(n_modes);
  for (int p = first; p < n_modes; ++p) {
    const long stride = ipow(cutoff_ + 1, n_modes - 1 - p);
    std::vector<Eigen::Triplet<Complex>> trips;
    for (long s = 0; s < dimension_; ++s) {
      const long digit = (s / stride) % (cutoff_ + 1);
      if (digit == 0) continue;
      trips.emplace_back(s - stride, s, Complex(std::sqrt(double(digit)), 0));
    }
    annihilators_[p].resize(dimension_, dimension_);
    annihilators_[p].setFromTriplets(trips.begin(), trips.end());
  }
}

Eigen::VectorXcd FockSpace::vacuum() const {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dimension_);
  v(0) = 1.0;
  return v;
}

Complex FockSpace::vacuum_matrix_element(const std::vector<algebra::OperatorSymbol>& ops) const {
  Eigen::VectorXcd v = vacuum();
  for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
    int mode;
    switch (it->index.kind) {
      case IndexKind::occupied: mode = 0; break;
      case IndexKind::concrete: mode = it->index.id; break;
      default:
        throw std::invalid_argument("vacuum_matrix_element: symbolic index has no matrix");
    }
    if (stats_ == Statistics::coherent_zero_mode && mode == 0) continue;  // scalar 1
    if (mode < 0 || mode >= n_modes_)
      throw std::invalid_argument("vacuum_matrix_element: mode out of range");
    v = it->create ? creator(mode) * v : annihilator(mode) * v;
  }
  return v(0);
}

FockSpace build_fock(Statistics stats, int n_modes, int cutoff) {
  return FockSpace(stats, n_modes, cutoff);
}

SpMat number_operator(const FockSpace& fock, const Eigen::MatrixXcd& V) {
  const int M = fock.n_modes();
  if (V.rows() != M || V.cols() != M)
    throw std::invalid_argument("number_operator: V dimension mismatch");
  if ((V - V.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("number_operator: V must be Hermitian");

  const bool coherent = fock.stats() == Statistics::coherent_zero_mode;
  SpMat identity(fock.dimension(), fock.dimension());
  identity.setIdentity();

  auto field_op = [&](int q) -> SpMat {  // O_q: b_0^+ for q = 0, b_q otherwise
    if (q == 0) return coherent ? identity : fock.creator(0);
    return fock.annihilator(q);
  };

  SpMat n_op(fock.dimension(), fock.dimension());
  for (int q = 0; q < M; ++q) {
    SpMat left(fock.dimension(), fock.dimension());
    for (int p = 0; p < M; ++p) {
      if (V(p, q) == Complex(0, 0)) continue;
      left += V(p, q) * SpMat(field_op(p).adjoint());
    }
    n_op += SpMat(left * field_op(q));
  }
  n_op.prune([](int, int, const Complex& v) { return std::abs(v) > 1e-15; });
  return n_op;
}

double vacuum_moment(const FockSpace& fock, const SpMat& number_op, int k) {
  if (k < 1) throw std::invalid_argument("vacuum_moment: k must be >= 1");
  Eigen::VectorXcd v = fock.vacuum();
  for (int i = 0; i < k; ++i) v = number_op * v;
  return v(0).real();
}

double SpectralDistribution::moment(int k) const {
  double s = 0;
  for (const auto& [ev, w] : atoms) s += std::pow(ev, k) * w;
  return s;
}

SpectralDistribution spectral_distribution(const FockSpace& fock, const SpMat& number_op) {
  Eigen::MatrixXcd dense(number_op);
  if ((dense - dense.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("spectral_distribution: operator must be Hermitian");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(dense);
  const auto& evals = solver.eigenvalues();
  const auto& evecs = solver.eigenvectors();

  SpectralDistribution dist;
  for (long i = 0; i < evals.size(); ++i) {
    const double ev = evals(i);
    const double w = std::norm(evecs(0, i));  // vacuum is basis state 0
    if (!dist.atoms.empty() && std::abs(dist.atoms.back().first - ev) < 1e-9) {
      auto& [aev, aw] = dist.atoms.back();
      if (aw + w > 0) aev = (aev * aw + ev * w) / (aw + w);
      aw += w;
    } else {
      dist.atoms.push_back({ev, w});
    }
  }
  std::erase_if(dist.atoms, [](const auto& a) { return a.second < 1e-12; });
  return dist;
}

double algebra_residual(const FockSpace& fock) {
  const bool fermi = fock.stats() == Statistics::fermion;
  const int first = fock.stats() == Statistics::coherent_zero_mode ? 1 : 0;
  const double sign = fermi ? 1.0 : -1.0;  // {a,b} for fermions, [a,b] for bosons
  SpMat identity(fock.dimension(), fock.dimension());
  identity.setIdentity();

  // For bosons the commutator only holds on states below the cutoff.
  auto column_ok = [&](long s) {
    if (fermi) return true;
    const long base = fock.cutoff() + 1;
    long v = s;
    while (v > 0) {
      if (v % base == fock.cutoff()) return false;
      v /= base;
    }
    return true;
  };

  double worst = 0;
  for (int p = first; p < fock.n_modes(); ++p) {
    for (int q = first; q < fock.n_modes(); ++q) {
      const SpMat bp = fock.annihilator(p);
      const SpMat bqd = fock.creator(q);
      SpMat mixed = SpMat(bp * bqd) + SpMat(sign * (bqd * bp).eval());
      if (p == q) mixed -= identity;
      SpMat like = SpMat(bp * fock.annihilator(q)) + SpMat(sign * (fock.annihilator(q) * bp).eval());
      for (const SpMat* mat : {&mixed, &like}) {
        Eigen::MatrixXcd d(*mat);
        for (long s = 0; s < fock.dimension(); ++s) {
          if (!column_ok(s)) continue;
          worst = std::max(worst, d.col(s).cwiseAbs().maxCoeff());
        }
      }
    }
  }
  return worst;
}

std::string spectrum_csv(const SpectralDistribution& dist) {
  std::ostringstream os;
  os.precision(17);
  os << "eigenvalue,weight\n";
  for (const auto& [ev, w] : dist.atoms) os << ev << "," << w << "\n";
  return os.str();
}

std::string moments_csv(const std::vector<double>& moments) {
  std::ostringstream os;
  os.precision(17);
  os << "k,moment\n";
  for (std::size_t k = 0; k < moments.size(); ++k) os << (k + 1) << "," << moments[k] << "\n";
  return os.str();
}

}  // namespace vacfield::oracle
