#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "vacfield/model.hpp"

namespace vacfield::stochastic {

// Random amplitude law for the vacuum modes; both choices have <a* a> = 1/2.
enum class AmplitudeKind {
  complex_gaussian,       // re, im independent, variance 1/4 each
  fixed_magnitude_phase,  // |a| = 1/sqrt(2), phase uniform
};

struct AmplitudeModel {
  AmplitudeKind kind = AmplitudeKind::complex_gaussian;
};

// One draw of the classical field f_0 + sum_{i != 0} a_i f_i and its density.
struct DensityRealization {
  Eigen::VectorXcd amplitudes;  // size M; entry 0 is fixed at 1
  Eigen::VectorXd density;      // |psi(x)|^2 per site

  double count(const model::Subvolume& v) const;
};

// Amplitude draw for one sample; deterministic in the seed.
Eigen::VectorXcd draw_amplitudes(int n_modes, AmplitudeModel model, std::uint64_t seed);

// Density from explicit amplitudes (test hook: pass zeros for the pure-f_0 field).
DensityRealization realize(const model::BasisSet& basis, const Eigen::VectorXcd& amplitudes);

DensityRealization sample_realization(const model::BasisSet& basis, AmplitudeModel model,
                                      std::uint64_t seed);

// Known vacuum power inside v: (1/2) sum_{i != 0} sum_{x in v} |f_i(x)|^2.
// The raw count minus this background has expectation m.
double vacuum_background(const model::BasisSet& basis, const model::Subvolume& v);

struct EnsembleSummary {
  long n_samples = 0;
  std::uint64_t seed = 0;
  double m = 0;
  double background = 0;

  Eigen::VectorXd mean_density;
  Eigen::VectorXd expected_density;  // |f_0|^2 + (1/2) sum_{i != 0} |f_i|^2
  Eigen::VectorXd density_se;        // per-site standard error of the mean

  double raw_mean = 0, raw_var = 0;
  double sub_mean = 0, sub_var = 0, sub_se = 0;
  std::vector<double> hist_edges;  // raw-count histogram
  std::vector<long> raw_hist;
  std::vector<long> sub_hist;

  // Localization diagnostics (exploratory).
  std::vector<long> argmax_hist;  // per-site count of density maxima
  double argmax_chi_square = 0;   // against |f_0|^2 expected frequencies
  double mean_ipr = 0;

  double max_density_sigmas() const;    // worst per-site |mean - expected| / se
  double subtracted_mean_sigmas() const;
};

// Per-sample seeds derive from the master seed by a fixed splitting rule and
// samples accumulate in fixed-size chunks combined in order, so the summary is
// bit-identical for any thread count (and for the serial reference).
EnsembleSummary ensemble_statistics(const model::BasisSet& basis, AmplitudeModel model,
                                    const model::Subvolume& v, long n_samples, std::uint64_t seed,
                                    bool parallel = true);

// Serial reference implementation; must agree bit-for-bit with the parallel path.
EnsembleSummary ensemble_statistics_serial(const model::BasisSet& basis, AmplitudeModel model,
                                           const model::Subvolume& v, long n_samples,
                                           std::uint64_t seed);

struct LocalizationMetrics {
  int argmax_site;
  double ipr;            // sum d^2 / (sum d)^2 over sites
  double top1_fraction;  // background-subtracted mass at the argmax over total subtracted mass
};

LocalizationMetrics localization_metrics(const model::BasisSet& basis,
                                         const DensityRealization& r);

nlohmann::json to_json(const EnsembleSummary& s);
std::string density_csv(const DensityRealization& r);

}  // namespace vacfield::stochastic
