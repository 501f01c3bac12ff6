#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "vacfield/algebra.hpp"
#include "vacfield/model.hpp"
#include "vacfield/oracle.hpp"

namespace vacfield::moments {

struct MomentRow {
  int k;
  double symbolic;  // moment_expression(k, stats) evaluated at m
  double oracle;    // Fock-matrix <0|N_v^k|0>
  double abs_diff;
};

struct MomentReport {
  int n_sites;
  std::vector<int> subvolume;
  double m;
  algebra::Statistics stats;
  std::uint64_t seed;  // per-trial seed, derived from the suite's master seed
  std::vector<MomentRow> rows;
};

// Random instance per trial: random normalized f_0, random subvolume, full
// symbolic-vs-oracle moment comparison.  Deterministic under the master seed;
// trials run in parallel and merge by index.
std::vector<MomentReport> run_moment_suite(algebra::Statistics stats, int n_sites, int k_max,
                                           int trials, std::uint64_t seed, bool parallel = true);

// One report for an explicit instance.
MomentReport report_for_instance(const model::BasisSet& basis, const model::Subvolume& v,
                                 algebra::Statistics stats, int k_max, std::uint64_t seed);

struct BernoulliCheck {
  bool pass;
  double max_deviation;
};

// A {0,1}-supported count with mean m has every moment equal to m; fermions
// must satisfy this to 1e-9.
BernoulliCheck bernoulli_check(const MomentReport& report);

// Random normalized complex vector / random subvolume (each site with
// probability 1/2), shared by the experiment drivers.
Eigen::VectorXcd random_wavefunction(int n_sites, std::uint64_t seed);
model::Subvolume random_subvolume(int n_sites, std::uint64_t seed);

nlohmann::json to_json(const MomentReport& report);
std::string to_table(const std::vector<MomentReport>& reports);

}  // namespace vacfield::moments
