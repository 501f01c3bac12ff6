#include "vacfield/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace vacfield::model {

BasisSet::BasisSet(Lattice lattice, Eigen::MatrixXcd modes)
    : lattice_(lattice), modes_(std::move(modes)) {
  if (modes_.cols() != lattice_.n_sites)
    throw std::invalid_argument("BasisSet: mode length does not match lattice");
  if (modes_.rows() < 1 || modes_.rows() > lattice_.n_sites)
    throw std::invalid_argument("BasisSet: bad mode count");
}

BasisSet BasisSet::without_row(int row) const {
  if (row <= 0 || row >= n_modes())
    throw std::invalid_argument("without_row: row out of range (row 0 is the occupied mode)");
  Eigen::MatrixXcd reduced(n_modes() - 1, n_sites());
  int r = 0;
  for (int p = 0; p < n_modes(); ++p)
    if (p != row) reduced.row(r++) = modes_.row(p);
  return BasisSet(lattice_, std::move(reduced));
}

Subvolume Subvolume::all(int n_sites) {
  Subvolume v;
  v.sites.resize(n_sites);
  for (int x = 0; x < n_sites; ++x) v.sites[x] = x;
  return v;
}

void Subvolume::validate(int n_sites) const {
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (sites[i] < 0 || sites[i] >= n_sites)
      throw std::invalid_argument("Subvolume: site index out of range");
    if (i > 0 && sites[i] <= sites[i - 1])
      throw std::invalid_argument("Subvolume: sites must be strictly increasing");
  }
}

bool Subvolume::contains(int site) const {
  return std::binary_search(sites.begin(), sites.end(), site);
}

BasisSet build_basis(const Lattice& lattice, const Eigen::VectorXcd& f0) {
  const int n = lattice.n_sites;
  if (f0.size() != n) throw std::invalid_argument("build_basis: f0 length mismatch");
  double norm = f0.norm();
  if (norm < 1e-12) throw std::invalid_argument("build_basis: degenerate (zero) input vector");

  Eigen::MatrixXcd modes(n, n);
  modes.row(0) = f0.transpose() / norm;

  // Discrete Fourier family; row k(x) = exp(2*pi*i*k*x/n)/sqrt(n).
  Eigen::MatrixXcd fourier(n, n);
  const double w = 2.0 * std::numbers::pi / n;
  for (int k = 0; k < n; ++k)
    for (int x = 0; x < n; ++x)
      fourier(k, x) = std::polar(1.0 / std::sqrt(n), w * k * x);

  // The family member closest to f0 is the one replaced by it.
  int drop = 0;
  double best = -1.0;
  for (int k = 0; k < n; ++k) {
    double ov = std::abs((fourier.row(k).conjugate() * modes.row(0).transpose())(0, 0));
    if (ov > best) {
      best = ov;
      drop = k;
    }
  }

  // Modified Gram-Schmidt, two passes per candidate.
  int filled = 1;
  for (int round = 0; round < 2 && filled < n; ++round) {
    for (int k = 0; k < n && filled < n; ++k) {
      if (round == 0 && k == drop) continue;  // second round retries everything
      Eigen::RowVectorXcd cand = fourier.row(k);
      for (int pass = 0; pass < 2; ++pass)
        for (int p = 0; p < filled; ++p) {
          Complex proj = (modes.row(p).conjugate() * cand.transpose())(0, 0);
          cand -= proj * modes.row(p);
        }
      double cn = cand.norm();
      if (cn < 1e-6) continue;
      modes.row(filled++) = cand / cn;
    }
  }
  if (filled != n) throw std::runtime_error("build_basis: orthonormal completion failed");
  return BasisSet(lattice, std::move(modes));
}

OverlapMatrix overlap_matrix(const BasisSet& basis, const Subvolume& v) {
  v.validate(basis.n_sites());
  const int M = basis.n_modes();
  Eigen::MatrixXcd V = Eigen::MatrixXcd::Zero(M, M);
  for (int site : v.sites)
    V += basis.modes().col(site).conjugate() * basis.modes().col(site).transpose();
  return OverlapMatrix{std::move(V)};
}

double closure_residual(const BasisSet& basis) {
  // sum_p conj(f_p(z)) f_p(x) = (F^H F)(z, x)
  Eigen::MatrixXcd g = basis.modes().adjoint() * basis.modes();
  g -= Eigen::MatrixXcd::Identity(basis.n_sites(), basis.n_sites());
  return g.cwiseAbs().maxCoeff();
}

nlohmann::json to_json(const BasisSet& basis, const Subvolume& v) {
  nlohmann::json j;
  j["n_sites"] = basis.n_sites();
  auto modes = nlohmann::json::array();
  for (int p = 0; p < basis.n_modes(); ++p)
    for (int x = 0; x < basis.n_sites(); ++x) {
      Complex c = basis.modes()(p, x);
      modes.push_back({c.real(), c.imag()});
    }
  j["modes"] = std::move(modes);
  j["subvolume"] = v.sites;
  return j;
}

std::pair<BasisSet, Subvolume> basis_from_json(const nlohmann::json& j) {
  const int n = j.at("n_sites").get<int>();
  const auto& flat = j.at("modes");
  if (flat.size() % n != 0) throw std::invalid_argument("basis_from_json: ragged mode matrix");
  const int M = static_cast<int>(flat.size()) / n;
  Eigen::MatrixXcd modes(M, n);
  for (int p = 0; p < M; ++p)
    for (int x = 0; x < n; ++x) {
      const auto& c = flat[p * n + x];
      modes(p, x) = Complex(c.at(0).get<double>(), c.at(1).get<double>());
    }
  Subvolume v{j.at("subvolume").get<std::vector<int>>()};
  v.validate(n);
  return {BasisSet(Lattice(n), std::move(modes)), std::move(v)};
}

}  // namespace vacfield::model
