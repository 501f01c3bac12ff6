// Command-line front end: every experiment as a reproducible, scriptable run.
// Exit codes: 0 pass, 1 check failure, 2 usage error.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "vacfield/algebra.hpp"
#include "vacfield/measurement.hpp"
#include "vacfield/model.hpp"
#include "vacfield/moments.hpp"
#include "vacfield/oracle.hpp"
#include "vacfield/rng.hpp"
#include "vacfield/stochastic.hpp"

using namespace vacfield;
using algebra::Statistics;
using nlohmann::json;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;

struct Sink {
  std::string path;  // empty = stdout

  void write(const std::string& text) const {
    if (path.empty()) {
      std::cout << text;
      if (!text.empty() && text.back() != '\n') std::cout << '\n';
      return;
    }
    std::ofstream out(path);
    if (!out) throw CLI::ValidationError("--output", "cannot open " + path);
    out << text;
  }
};

model::Subvolume parse_subvolume(const std::string& spec, int n_sites, std::uint64_t seed) {
  model::Subvolume v;
  if (spec == "all") {
    v = model::Subvolume::all(n_sites);
  } else if (spec == "none") {
    v = model::Subvolume::none();
  } else if (spec.rfind("random:", 0) == 0) {
    const int k = std::stoi(spec.substr(7));
    if (k < 0 || k > n_sites)
      throw CLI::ValidationError("--subvolume", "random:k needs 0 <= k <= sites");
    std::vector<int> order(n_sites);
    for (int i = 0; i < n_sites; ++i) order[i] = i;
    SmallRng rng(derive_seed(seed, 0x5fb));
    for (int i = n_sites - 1; i > 0; --i)
      std::swap(order[i], order[rng.next_below(i + 1)]);
    v.sites.assign(order.begin(), order.begin() + k);
    std::sort(v.sites.begin(), v.sites.end());
  } else if (spec.find('-') != std::string::npos) {
    const auto dash = spec.find('-');
    const int lo = std::stoi(spec.substr(0, dash));
    const int hi = std::stoi(spec.substr(dash + 1));
    if (lo > hi) throw CLI::ValidationError("--subvolume", "empty range " + spec);
    for (int s = lo; s <= hi; ++s) v.sites.push_back(s);
  } else {
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) v.sites.push_back(std::stoi(tok));
    std::sort(v.sites.begin(), v.sites.end());
  }
  try {
    v.validate(n_sites);
  } catch (const std::invalid_argument& e) {
    throw CLI::ValidationError("--subvolume", e.what());
  }
  return v;
}

int cmd_moments(Statistics stats, int sites, int k_max, int trials, std::uint64_t seed,
                const std::optional<std::string>& subvolume, const std::string& format,
                const Sink& sink) {
  std::vector<moments::MomentReport> reports;
  if (subvolume) {
    auto basis = model::build_basis(model::Lattice(sites),
                                    moments::random_wavefunction(sites, derive_seed(seed, 0)));
    auto v = parse_subvolume(*subvolume, sites, seed);
    reports.push_back(moments::report_for_instance(basis, v, stats, k_max, seed));
  } else {
    reports = moments::run_moment_suite(stats, sites, k_max, trials, seed);
  }

  bool pass = true;
  for (const auto& rep : reports) {
    if (stats == Statistics::fermion && !moments::bernoulli_check(rep).pass) pass = false;
    for (const auto& row : rep.rows)
      if (row.abs_diff > 1e-9) pass = false;
  }

  if (format == "json") {
    std::string lines;
    for (const auto& rep : reports) lines += moments::to_json(rep).dump() + "\n";
    sink.write(lines);
  } else {
    sink.write(moments::to_table(reports) + (pass ? "all checks passed\n" : "CHECK FAILED\n"));
  }
  return pass ? kExitPass : kExitCheckFailure;
}

int cmd_table1(const std::string& format, const Sink& sink) {
  auto report = algebra::table1_report();
  const std::vector<int> expected_counts = {1, 3, 2, 1, 1};
  bool pass = report.rows.size() == 5;
  for (std::size_t r = 0; pass && r < report.rows.size(); ++r)
    pass = report.rows[r].term_count == expected_counts[r];
  pass = pass && report.total == algebra::MPolynomial::monomial(1);

  if (format == "json") {
    auto j = algebra::to_json(report);
    j["pass"] = pass;
    sink.write(j.dump(2));
  } else {
    std::ostringstream out;
    out << "fourth-moment term classes (fermion)\n";
    for (const auto& row : report.rows)
      out << "  " << row.term_count << " x [" << row.pattern << "]  ->  " << row.poly.str() << "\n";
    out << "total: " << report.total.str() << (pass ? "  (= m, as required)\n" : "  MISMATCH\n");
    sink.write(out.str());
  }
  return pass ? kExitPass : kExitCheckFailure;
}

int cmd_spectrum(int sites, int trials, std::uint64_t seed,
                 const std::optional<std::string>& subvolume, int drop_row,
                 const std::string& format, const Sink& sink) {
  if (sites > 14) throw CLI::ValidationError("--sites", "fermion Fock budget caps sites at 14");
  bool pass = true;
  std::string text;
  json all = json::array();
  for (int t = 0; t < trials; ++t) {
    const auto trial_seed = derive_seed(seed, t);
    auto basis = model::build_basis(model::Lattice(sites),
                                    moments::random_wavefunction(sites, derive_seed(trial_seed, 0)));
    auto v = subvolume ? parse_subvolume(*subvolume, sites, trial_seed)
                       : moments::random_subvolume(sites, derive_seed(trial_seed, 1));
    if (drop_row > 0) basis = basis.without_row(drop_row);
    auto V = model::overlap_matrix(basis, v).entries;
    const double m = V(0, 0).real();
    oracle::FockSpace fock(Statistics::fermion, basis.n_modes());
    auto dist = oracle::spectral_distribution(fock, oracle::number_operator(fock, V));

    double deviation = 0;
    for (const auto& [ev, w] : dist.atoms) {
      const double nearest = std::abs(ev) < std::abs(ev - 1.0) ? 0.0 : 1.0;
      const double expected_w = nearest == 0.0 ? 1.0 - m : m;
      deviation = std::max(deviation, std::abs(ev - nearest));
      deviation = std::max(deviation, std::abs(w - expected_w));
    }
    if (dist.atoms.size() > 2 || deviation > 1e-9) pass = false;

    if (format == "csv") {
      text += oracle::spectrum_csv(dist);
    } else {
      json j;
      j["trial"] = t;
      j["m"] = m;
      j["deviation"] = deviation;
      j["atoms"] = json::array();
      for (const auto& [ev, w] : dist.atoms) j["atoms"].push_back({ev, w});
      all.push_back(j);
    }
  }
  if (format == "csv")
    sink.write(text);
  else
    sink.write(json{{"seed", seed}, {"pass", pass}, {"trials", all}}.dump(2));
  return pass ? kExitPass : kExitCheckFailure;
}

int cmd_measure(int sites, int trials, int k_max, std::uint64_t seed, bool position,
                const std::string& format, const Sink& sink) {
  if (sites > 14) throw CLI::ValidationError("--sites", "fermion Fock budget caps sites at 14");
  bool pass = true;
  std::string text;
  json all = json::array();
  for (int t = 0; t < trials; ++t) {
    const auto trial_seed = derive_seed(seed, t);
    auto basis = model::build_basis(model::Lattice(sites),
                                    moments::random_wavefunction(sites, derive_seed(trial_seed, 0)));
    auto obs = position ? measurement::Observable::position_basis(sites)
                        : measurement::Observable::random(sites, derive_seed(trial_seed, 1));
    auto fc = measurement::filter_coefficients(basis, obs);
    if (fc.column_norm_defect() > 1e-12) pass = false;

    double p_total = 0;
    json outcomes = json::array();
    for (int n = 0; n < sites; ++n) {
      const double p = std::norm(fc.f(0, n));
      p_total += p;
      auto mk = measurement::filtered_moments(fc, n, k_max, Statistics::fermion);
      for (double v : mk)
        if (std::abs(v - p) > 1e-9) pass = false;
      outcomes.push_back({{"eigenvalue", obs.eigenvalues(n)}, {"p", p}, {"moments", mk}});
    }
    if (std::abs(p_total - 1.0) > 1e-12) pass = false;

    if (format == "csv")
      text += measurement::outcome_csv(fc, obs, k_max, Statistics::fermion);
    else
      all.push_back({{"trial", t}, {"p_total", p_total}, {"outcomes", outcomes}});
  }
  if (format == "csv")
    sink.write(text);
  else
    sink.write(json{{"seed", seed}, {"pass", pass}, {"trials", all}}.dump(2));
  return pass ? kExitPass : kExitCheckFailure;
}

int cmd_mc(int sites, long samples, std::uint64_t seed, const std::string& model_name,
           const std::optional<std::string>& subvolume, const std::string& density_csv_path,
           const std::string& format, const Sink& sink) {
  stochastic::AmplitudeModel amp;
  amp.kind = model_name == "gaussian" ? stochastic::AmplitudeKind::complex_gaussian
                                      : stochastic::AmplitudeKind::fixed_magnitude_phase;
  auto basis = model::build_basis(model::Lattice(sites),
                                  moments::random_wavefunction(sites, derive_seed(seed, 0)));
  auto v = subvolume ? parse_subvolume(*subvolume, sites, seed)
                     : moments::random_subvolume(sites, derive_seed(seed, 1));

  auto summary = stochastic::ensemble_statistics(basis, amp, v, samples, seed);
  const bool pass = summary.max_density_sigmas() < 5.0 && summary.subtracted_mean_sigmas() < 5.0;

  if (!density_csv_path.empty()) {
    auto r = stochastic::sample_realization(basis, amp, derive_seed(seed, 2));
    std::ofstream out(density_csv_path);
    out << stochastic::density_csv(r);
  }

  auto j = stochastic::to_json(summary);
  j["pass"] = pass;
  j["amplitude_model"] = model_name;
  if (format == "table") {
    std::ostringstream out;
    out << "samples " << summary.n_samples << "  seed " << summary.seed << "\n"
        << "m " << summary.m << "  background " << summary.background << "\n"
        << "subtracted mean " << summary.sub_mean << " (" << summary.subtracted_mean_sigmas()
        << " sigma from m)\n"
        << "worst per-site density deviation " << summary.max_density_sigmas() << " sigma\n"
        << (pass ? "all checks passed\n" : "CHECK FAILED\n");
    sink.write(out.str());
  } else {
    sink.write(j.dump(2));
  }
  return pass ? kExitPass : kExitCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vacuum-field particle experiments"};
  app.require_subcommand(1);

  std::string format = "json";
  std::string output_path;
  int threads = 0;
  app.add_option("--format", format, "json | csv | table")
      ->check(CLI::IsMember({"json", "csv", "table"}));
  app.add_option("--output", output_path, "write to file instead of stdout");
  app.add_option("--threads", threads, "worker thread cap (0 = default)");

  std::string stats_name = "fermion";
  int sites = 10;
  int k_max = 4;
  int trials = 1;
  long samples = 100000;
  std::uint64_t seed = 0;
  std::optional<std::string> subvolume;
  int drop_row = 0;
  bool position = false;
  std::string model_name = "gaussian";
  std::string density_csv_path;

  auto* mom = app.add_subcommand("moments", "symbolic vs Fock-oracle vacuum moments");
  mom->add_option("--stats", stats_name)->check(CLI::IsMember({"fermion", "boson", "coherent"}));
  mom->add_option("--sites", sites)->check(CLI::Range(2, 64));
  mom->add_option("--kmax", k_max)->check(CLI::Range(1, 6));
  mom->add_option("--trials", trials)->check(CLI::PositiveNumber);
  mom->add_option("--seed", seed);
  mom->add_option("--subvolume", subvolume, "all | none | a-b | a,b,c | random:k");

  app.add_subcommand("table1", "fourth-moment term-class bookkeeping");

  auto* spec = app.add_subcommand("spectrum", "spectral law of the subvolume count");
  spec->add_option("--sites", sites)->check(CLI::Range(2, 14));
  spec->add_option("--trials", trials)->check(CLI::PositiveNumber);
  spec->add_option("--seed", seed);
  spec->add_option("--subvolume", subvolume);
  spec->add_option("--drop-row", drop_row, "delete a basis row first (breaks completeness)")
      ->check(CLI::PositiveNumber);

  auto* meas = app.add_subcommand("measure", "observable filtering and outcome statistics");
  meas->add_option("--sites", sites)->check(CLI::Range(2, 14));
  meas->add_option("--trials", trials)->check(CLI::PositiveNumber);
  meas->add_option("--kmax", k_max)->check(CLI::Range(1, 6));
  meas->add_option("--seed", seed);
  meas->add_flag("--position", position, "measure in the position basis");

  auto* mc = app.add_subcommand("mc", "classical-amplitude ensemble simulation");
  mc->add_option("--sites", sites)->check(CLI::Range(2, 4096));
  mc->add_option("--samples", samples)->check(CLI::PositiveNumber);
  mc->add_option("--seed", seed)->required();
  mc->add_option("--model", model_name)->check(CLI::IsMember({"gaussian", "phase"}));
  mc->add_option("--subvolume", subvolume);
  mc->add_option("--density-csv", density_csv_path, "dump one realization's density");

  // allow the global flags (--format etc.) after the subcommand name
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#endif

  Sink sink{output_path};
  try {
    if (mom->parsed())
      return cmd_moments(algebra::statistics_from_string(stats_name == "coherent" ? "coherent_zero_mode"
                                                                                  : stats_name),
                         sites, k_max, trials, seed, subvolume, format, sink);
    if (app.get_subcommand("table1")->parsed()) return cmd_table1(format, sink);
    if (spec->parsed())
      return cmd_spectrum(sites, trials, seed, subvolume, drop_row, format, sink);
    if (meas->parsed()) return cmd_measure(sites, trials, k_max, seed, position, format, sink);
    if (mc->parsed())
      return cmd_mc(sites, samples, seed, model_name, subvolume, density_csv_path, format, sink);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailure;
  }
  return kExitUsage;
}
