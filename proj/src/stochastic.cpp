#include "vacfield/stochastic.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "vacfield/rng.hpp"

namespace vacfield::stochastic {

namespace {

constexpr long kChunk = 1024;  // fixed accumulation granularity; combining is order-deterministic
constexpr int kHistBins = 40;

Eigen::VectorXd site_background(const model::BasisSet& basis) {
  Eigen::VectorXd bg = Eigen::VectorXd::Zero(basis.n_sites());
  for (int i = 1; i < basis.n_modes(); ++i)
    bg += 0.5 * basis.mode(i).cwiseAbs2().real().transpose();
  return bg;
}

}  // namespace

double DensityRealization::count(const model::Subvolume& v) const {
  double s = 0;
  for (int x : v.sites) s += density(x);
  return s;
}

Eigen::VectorXcd draw_amplitudes(int n_modes, AmplitudeModel model, std::uint64_t seed) {
  SmallRng rng(seed);
  Eigen::VectorXcd a(n_modes);
  a(0) = 1.0;  // the occupied mode carries no randomness
  for (int i = 1; i < n_modes; ++i) {
    if (model.kind == AmplitudeKind::complex_gaussian) {
      a(i) = {0.5 * rng.next_gaussian(), 0.5 * rng.next_gaussian()};
    } else {
      a(i) = std::polar(1.0 / std::numbers::sqrt2, 2.0 * std::numbers::pi * rng.next_double());
    }
  }
  return a;
}

DensityRealization realize(const model::BasisSet& basis, const Eigen::VectorXcd& amplitudes) {
  if (amplitudes.size() != basis.n_modes())
    throw std::invalid_argument("realize: amplitude count mismatch");
  Eigen::RowVectorXcd psi = amplitudes.transpose() * basis.modes();
  DensityRealization r;
  r.amplitudes = amplitudes;
  r.density = psi.cwiseAbs2().real().transpose();
  return r;
}

DensityRealization sample_realization(const model::BasisSet& basis, AmplitudeModel model,
                                      std::uint64_t seed) {
  return realize(basis, draw_amplitudes(basis.n_modes(), model, seed));
}

double vacuum_background(const model::BasisSet& basis, const model::Subvolume& v) {
  const Eigen::VectorXd bg = site_background(basis);
  double s = 0;
  for (int x : v.sites) s += bg(x);
  return s;
}

namespace {

struct Partial {
  Eigen::VectorXd density_sum, density_sumsq;
  double raw_sum = 0, raw_sumsq = 0, sub_sum = 0, sub_sumsq = 0;
  double ipr_sum = 0;
  std::vector<long> raw_hist, sub_hist, argmax_hist;

  explicit Partial(int n_sites)
      : density_sum(Eigen::VectorXd::Zero(n_sites)),
        density_sumsq(Eigen::VectorXd::Zero(n_sites)),
        raw_hist(kHistBins, 0),
        sub_hist(kHistBins, 0),
        argmax_hist(n_sites, 0) {}

  void merge(const Partial& o) {
    density_sum += o.density_sum;
    density_sumsq += o.density_sumsq;
    raw_sum += o.raw_sum;
    raw_sumsq += o.raw_sumsq;
    sub_sum += o.sub_sum;
    sub_sumsq += o.sub_sumsq;
    ipr_sum += o.ipr_sum;
    for (int b = 0; b < kHistBins; ++b) {
      raw_hist[b] += o.raw_hist[b];
      sub_hist[b] += o.sub_hist[b];
    }
    for (std::size_t x = 0; x < argmax_hist.size(); ++x) argmax_hist[x] += o.argmax_hist[x];
  }
};

int hist_bin(double value, double lo, double hi) {
  int b = static_cast<int>((value - lo) / (hi - lo) * kHistBins);
  return std::clamp(b, 0, kHistBins - 1);
}

Partial accumulate_chunk(const model::BasisSet& basis, AmplitudeModel model,
                         const model::Subvolume& v, std::uint64_t master, long first, long count,
                         double background, double raw_lo, double raw_hi, double sub_lo,
                         double sub_hi) {
  Partial p(basis.n_sites());
  for (long s = first; s < first + count; ++s) {
    DensityRealization r = sample_realization(basis, model, derive_seed(master, s));
    p.density_sum += r.density;
    p.density_sumsq += r.density.cwiseAbs2();
    const double raw = r.count(v);
    const double sub = raw - background;
    p.raw_sum += raw;
    p.raw_sumsq += raw * raw;
    p.sub_sum += sub;
    p.sub_sumsq += sub * sub;
    p.raw_hist[hist_bin(raw, raw_lo, raw_hi)] += 1;
    p.sub_hist[hist_bin(sub, sub_lo, sub_hi)] += 1;
    int argmax = 0;
    r.density.maxCoeff(&argmax);
    p.argmax_hist[argmax] += 1;
    const double total = r.density.sum();
    p.ipr_sum += r.density.cwiseAbs2().sum() / (total * total);
  }
  return p;
}

EnsembleSummary run_ensemble(const model::BasisSet& basis, AmplitudeModel model,
                             const model::Subvolume& v, long n_samples, std::uint64_t seed,
                             bool parallel) {
  if (!basis.complete())
    throw std::invalid_argument("ensemble_statistics: basis must be complete");
  v.validate(basis.n_sites());

  const double background = vacuum_background(basis, v);
  const auto f0_density = basis.mode(0).cwiseAbs2().real().transpose().eval();
  double m = 0;
  for (int x : v.sites) m += f0_density(x);

  const double raw_lo = 0.0, raw_hi = 2.0 * (background + 1.0) + 1.0;
  const double sub_lo = -3.0, sub_hi = 5.0;

  const long n_chunks = (n_samples + kChunk - 1) / kChunk;
  std::vector<Partial> partials(n_chunks, Partial(basis.n_sites()));
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (long c = 0; c < n_chunks; ++c) {
    const long first = c * kChunk;
    const long count = std::min(kChunk, n_samples - first);
    partials[c] = accumulate_chunk(basis, model, v, seed, first, count, background, raw_lo, raw_hi,
                                   sub_lo, sub_hi);
  }
  Partial total(basis.n_sites());
  for (const auto& p : partials) total.merge(p);

  EnsembleSummary s;
  s.n_samples = n_samples;
  s.seed = seed;
  s.m = m;
  s.background = background;
  const double n = static_cast<double>(n_samples);
  s.mean_density = total.density_sum / n;
  s.expected_density = f0_density + site_background(basis);
  Eigen::VectorXd var =
      (total.density_sumsq - total.density_sum.cwiseAbs2() / n).cwiseMax(0.0) / (n - 1);
  s.density_se = (var / n).cwiseSqrt();
  s.raw_mean = total.raw_sum / n;
  s.raw_var = std::max(0.0, total.raw_sumsq - total.raw_sum * total.raw_sum / n) / (n - 1);
  s.sub_mean = total.sub_sum / n;
  s.sub_var = std::max(0.0, total.sub_sumsq - total.sub_sum * total.sub_sum / n) / (n - 1);
  s.sub_se = std::sqrt(s.sub_var / n);
  s.hist_edges = {raw_lo, raw_hi, sub_lo, sub_hi};
  s.raw_hist = total.raw_hist;
  s.sub_hist = total.sub_hist;
  s.argmax_hist = total.argmax_hist;
  s.mean_ipr = total.ipr_sum / n;

  double chi2 = 0;
  for (int x = 0; x < basis.n_sites(); ++x) {
    const double expected = n * f0_density(x);
    if (expected > 1e-9) {
      const double d = total.argmax_hist[x] - expected;
      chi2 += d * d / expected;
    }
  }
  s.argmax_chi_square = chi2;
  return s;
}

}  // namespace

double EnsembleSummary::max_density_sigmas() const {
  double worst = 0;
  for (long x = 0; x < mean_density.size(); ++x) {
    const double se = std::max(density_se(x), 1e-300);
    worst = std::max(worst, std::abs(mean_density(x) - expected_density(x)) / se);
  }
  return worst;
}

double EnsembleSummary::subtracted_mean_sigmas() const {
  return std::abs(sub_mean - m) / std::max(sub_se, 1e-300);
}

EnsembleSummary ensemble_statistics(const model::BasisSet& basis, AmplitudeModel model,
                                    const model::Subvolume& v, long n_samples, std::uint64_t seed,
                                    bool parallel) {
  return run_ensemble(basis, model, v, n_samples, seed, parallel);
}

EnsembleSummary ensemble_statistics_serial(const model::BasisSet& basis, AmplitudeModel model,
                                           const model::Subvolume& v, long n_samples,
                                           std::uint64_t seed) {
  return run_ensemble(basis, model, v, n_samples, seed, false);
}

LocalizationMetrics localization_metrics(const model::BasisSet& basis,
                                         const DensityRealization& r) {
  LocalizationMetrics lm{};
  r.density.maxCoeff(&lm.argmax_site);
  const double total = r.density.sum();
  lm.ipr = r.density.cwiseAbs2().sum() / (total * total);
  const Eigen::VectorXd sub = r.density - site_background(basis);
  const double sub_total = sub.sum();
  lm.top1_fraction = sub_total != 0 ? sub(lm.argmax_site) / sub_total : 0.0;
  return lm;
}

nlohmann::json to_json(const EnsembleSummary& s) {
  nlohmann::json j;
  j["n_samples"] = s.n_samples;
  j["seed"] = s.seed;
  j["m"] = s.m;
  j["background"] = s.background;
  j["mean_density"] = std::vector<double>(s.mean_density.begin(), s.mean_density.end());
  j["expected_density"] = std::vector<double>(s.expected_density.begin(), s.expected_density.end());
  j["density_se"] = std::vector<double>(s.density_se.begin(), s.density_se.end());
  j["raw_mean"] = s.raw_mean;
  j["raw_var"] = s.raw_var;
  j["subtracted_mean"] = s.sub_mean;
  j["subtracted_var"] = s.sub_var;
  j["subtracted_se"] = s.sub_se;
  j["hist_edges"] = s.hist_edges;
  j["raw_hist"] = s.raw_hist;
  j["subtracted_hist"] = s.sub_hist;
  j["argmax_hist"] = s.argmax_hist;
  j["argmax_chi_square"] = s.argmax_chi_square;
  j["mean_ipr"] = s.mean_ipr;
  j["max_density_sigmas"] = s.max_density_sigmas();
  j["subtracted_mean_sigmas"] = s.subtracted_mean_sigmas();
  return j;
}

std::string density_csv(const DensityRealization& r) {
  std::ostringstream os;
  os.precision(17);
  os << "site,density\n";
  for (long x = 0; x < r.density.size(); ++x) os << x << "," << r.density(x) << "\n";
  return os.str();
}

}  // namespace vacfield::stochastic
