#include "vacfield/moments.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "vacfield/rng.hpp"

namespace vacfield::moments {

using algebra::Statistics;

namespace {

constexpr int kBosonCutoffSlack = 1;

int boson_cutoff_for(int k_max) { return k_max + kBosonCutoffSlack; }

}  // namespace

Eigen::VectorXcd random_wavefunction(int n_sites, std::uint64_t seed) {
  SmallRng rng(seed);
  Eigen::VectorXcd f(n_sites);
  for (int x = 0; x < n_sites; ++x) f(x) = {rng.next_gaussian(), rng.next_gaussian()};
  return f / f.norm();
}

model::Subvolume random_subvolume(int n_sites, std::uint64_t seed) {
  SmallRng rng(seed);
  model::Subvolume v;
  for (int x = 0; x < n_sites; ++x)
    if (rng.next_u64() & 1) v.sites.push_back(x);
  return v;
}

MomentReport report_for_instance(const model::BasisSet& basis, const model::Subvolume& v,
                                 Statistics stats, int k_max, std::uint64_t seed) {
  const auto overlap = model::overlap_matrix(basis, v);
  const int cutoff = stats == Statistics::fermion ? 1 : boson_cutoff_for(k_max);
  oracle::FockSpace fock(stats, basis.n_modes(), cutoff);
  const auto n_op = oracle::number_operator(fock, overlap.entries);

  MomentReport report;
  report.n_sites = basis.n_sites();
  report.subvolume = v.sites;
  report.m = overlap.m();
  report.stats = stats;
  report.seed = seed;
  for (int k = 1; k <= k_max; ++k) {
    MomentRow row;
    row.k = k;
    row.symbolic = algebra::moment_expression(k, stats).eval(report.m);
    row.oracle = oracle::vacuum_moment(fock, n_op, k);
    row.abs_diff = std::abs(row.symbolic - row.oracle);
    report.rows.push_back(row);
  }
  return report;
}

std::vector<MomentReport> run_moment_suite(Statistics stats, int n_sites, int k_max, int trials,
                                           std::uint64_t seed, bool parallel) {
  if (k_max < 1 || k_max > 6) throw std::invalid_argument("run_moment_suite: k_max in 1..6");
  // Fail the budget up front rather than mid-suite.
  (void)oracle::FockSpace(stats, n_sites,
                          stats == Statistics::fermion ? 1 : boson_cutoff_for(k_max));
  // Warm the symbolic cache outside the parallel region.
  for (int k = 1; k <= k_max; ++k) (void)algebra::moment_expression(k, stats);

  std::vector<MomentReport> reports(trials);
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t trial_seed = derive_seed(seed, t);
    const model::Lattice lattice(n_sites);
    const auto basis =
        model::build_basis(lattice, random_wavefunction(n_sites, derive_seed(trial_seed, 0)));
    const auto v = random_subvolume(n_sites, derive_seed(trial_seed, 1));
    reports[t] = report_for_instance(basis, v, stats, k_max, trial_seed);
  }
  return reports;
}

BernoulliCheck bernoulli_check(const MomentReport& report) {
  if (report.stats != Statistics::fermion)
    throw std::invalid_argument("bernoulli_check: fermion flavor only");
  double worst = 0;
  for (const auto& row : report.rows)
    worst = std::max(worst, std::abs(row.oracle - report.m));
  return {worst < 1e-9, worst};
}

nlohmann::json to_json(const MomentReport& report) {
  nlohmann::json j;
  j["n_sites"] = report.n_sites;
  j["subvolume"] = report.subvolume;
  j["m"] = report.m;
  j["stats"] = algebra::to_string(report.stats);
  j["seed"] = report.seed;
  auto rows = nlohmann::json::array();
  for (const auto& r : report.rows)
    rows.push_back({{"k", r.k},
                    {"symbolic", r.symbolic},
                    {"oracle", r.oracle},
                    {"abs_diff", r.abs_diff}});
  j["moments"] = std::move(rows);
  return j;
}

std::string to_table(const std::vector<MomentReport>& reports) {
  std::ostringstream os;
  os << std::setw(6) << "trial" << std::setw(10) << "stats" << std::setw(8) << "|v|"
     << std::setw(12) << "m" << std::setw(4) << "k" << std::setw(14) << "symbolic"
     << std::setw(14) << "oracle" << std::setw(12) << "diff" << "\n";
  for (std::size_t t = 0; t < reports.size(); ++t) {
    const auto& rep = reports[t];
    for (const auto& row : rep.rows) {
      os << std::setw(6) << t << std::setw(10) << algebra::to_string(rep.stats) << std::setw(8)
         << rep.subvolume.size() << std::setw(12) << std::setprecision(6) << rep.m << std::setw(4)
         << row.k << std::setw(14) << row.symbolic << std::setw(14) << row.oracle << std::setw(12)
         << std::setprecision(3) << row.abs_diff << "\n";
    }
  }
  return os.str();
}

}  // namespace vacfield::moments
