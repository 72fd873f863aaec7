// Acceptance suite: one line per criterion, nonzero exit if any fail.
// Every expected value asserted here is either recomputed by a brute-force
// oracle in this run or is a fixed property with its tolerance stated inline.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "revpref/analytics.hpp"
#include "revpref/estimation.hpp"
#include "revpref/etl.hpp"
#include "revpref/garp.hpp"
#include "revpref/indices.hpp"
#include "revpref/io.hpp"
#include "revpref/power.hpp"
#include "revpref/restrictions.hpp"
#include "revpref/rng.hpp"

using namespace revpref;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void criterion(int number, const std::string& name, bool ok, const std::string& detail) {
  std::printf("%s  %2d. %s — %s\n", ok ? "PASS" : "FAIL", number, name.c_str(),
              detail.c_str());
  if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* pattern, ...) {
  char buf[512];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof(buf), pattern, args);
  va_end(args);
  return buf;
}

// ---------------------------------------------------------------- criterion 1
void oracle_equivalence() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(20240809, "acceptance-oracle");
  int bad = 0;
  double worst_ccei = 0.0;
  for (int rep = 0; rep < 500; ++rep) {
    const auto ds = oracles::random_small(rng);
    const double ccei_gap = std::fabs(ccei(ds) - oracles::ccei_grid(ds));
    worst_ccei = std::max(worst_ccei, ccei_gap);
    if (ccei_gap > 1e-4) ++bad;
    if (hmi(ds).kept != oracles::hmi_subsets(ds)) ++bad;
    if (std::fabs(mpi(ds) - oracles::mpi_pairs(ds)) > 1e-9) ++bad;
    const auto m = mci(ds);
    if (!m.exact || std::fabs(m.value - oracles::mci_orderings(ds)) > 1e-9) ++bad;
  }
  const double elapsed = seconds_since(start);
  criterion(1, "index oracle equivalence (500 integer instances)",
            bad == 0 && elapsed < 60.0,
            fmt("%d mismatches, worst CCEI gap %.2e, %.1f s (budget 60 s)", bad,
                worst_ccei, elapsed));
}

// ---------------------------------------------------------------- criterion 2
void consistency_equivalence() {
  Rng rng(20240809, "acceptance-equivalence");
  int exceptions = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const auto ds = oracles::random_smooth(rng);
    const bool passes = check_garp(ds, 1.0).passes;
    const auto report = index_report(ds);
    if ((report.ccei == 1.0) != passes) ++exceptions;
    if ((report.hmi == 1.0) != passes) ++exceptions;
    if ((report.mpi == 0.0) != passes) ++exceptions;
    if ((report.mci == 0.0) != passes) ++exceptions;
  }
  criterion(2, "perfect-consistency equivalence (1000 tie-free instances)",
            exceptions == 0, fmt("%d exceptions", exceptions));
}

// ---------------------------------------------------------------- criterion 3
void gapp_fixture() {
  const auto ds = oracles::gapp_footnote();
  const bool garp_ok = check_garp(ds, 1.0).passes;
  const bool gapp_fails = !gapp_passes(ds, 1.0);
  criterion(3, "price-preference fixture", garp_ok && gapp_fails,
            fmt("GARP passes: %s, GAPP fails: %s", garp_ok ? "yes" : "no",
                gapp_fails ? "yes" : "no"));
}

// ---------------------------------------------------------------- criterion 4
void micro_dataset_fixtures() {
  const auto ds = oracles::dagger();
  struct Row {
    const char* name;
    double got;
    double oracle;
    double frozen;
    double tol;
  };
  ChoiceDataset mirrored = ds;
  for (const auto& obs : ds.observations) {
    mirrored.observations.push_back(
        {obs.obs_id + "'", {obs.prices[1], obs.prices[0]}, {obs.bundle[1], obs.bundle[0]}});
  }
  const Row rows[] = {
      {"ccei", ccei(ds), oracles::ccei_grid(ds), 0.5, 1e-4},
      {"hmi", hmi(ds).value, oracles::hmi_subsets(ds) / 2.0, 0.5, 1e-12},
      {"mpi", mpi(ds), oracles::mpi_pairs(ds), 0.5, 1e-9},
      {"mci", mci(ds).value, oracles::mci_orderings(ds), 0.25, 1e-9},
      {"harp", harp_efficiency(ds), oracles::harp_cycles(ds), 0.5, 1e-9},
      {"quasilinear", quasilinear_efficiency(ds), oracles::quasilinear_cycles(ds), 0.5, 1e-9},
      {"fosd", fosd_ccei(ds), oracles::ccei_grid(mirrored), 0.5, 1e-4},
  };
  bool ok = true;
  std::string detail;
  for (const auto& row : rows) {
    const bool row_ok = std::fabs(row.got - row.oracle) <= row.tol &&
                        std::fabs(row.got - row.frozen) <= row.tol;
    if (!row_ok) ok = false;
    detail += fmt("%s=%.6g ", row.name, row.got);
  }
  criterion(4, "worked micro-dataset fixtures vs oracles", ok, detail);
}

// ---------------------------------------------------------------- criterion 5
void dominance_chain() {
  Rng rng(20240809, "acceptance-dominance");
  int violations = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const auto ds = rep % 2 == 0 ? oracles::random_small(rng) : oracles::random_smooth(rng);
    const double base = ccei(ds);
    if (harp_efficiency(ds) > base + 1e-9) ++violations;
    if (quasilinear_efficiency(ds) > base + 1e-9) ++violations;
    if (fosd_ccei(ds) > base + 1e-9) ++violations;
  }
  criterion(5, "dominance chain harp/quasilinear/fosd <= ccei (1000 instances)",
            violations == 0, fmt("%d violations", violations));
}

// ---------------------------------------------------------------- criterion 6
void bronars_band() {
  const auto start = std::chrono::steady_clock::now();
  const auto design = experiment_budgets(22, 20240809);
  const auto summary = bronars_discrete(design, 11, 1000, 20240809);
  const double elapsed = seconds_since(start);
  const bool ok = summary.mean >= 0.535 && summary.mean <= 0.735 && elapsed < 120.0;
  criterion(6, "random-chooser mean CCEI in [0.535, 0.735] (1000 sims)", ok,
            fmt("mean %.4f, sd %.4f, %.1f s (budget 120 s)", summary.mean, summary.sd,
                elapsed));
}

// ---------------------------------------------------------------- criterion 7
void permutation_discrimination() {
  const auto start = std::chrono::steady_clock::now();
  const auto design = experiment_budgets(22, 20240809);
  Rng rng(20240809, "acceptance-permtest");

  int maximizers = 0;
  for (int i = 0; i < 100; ++i) {
    const double alpha = 0.4 + 0.2 * rng.next_double();
    const double m = 1.0 + rng.next_double();
    const double g = std::pow(alpha / (1.0 - alpha), 1.0 + m);
    auto ds = oracles::ces_chooser(design.prices, design.expenditure, g, m,
                                   "max" + std::to_string(i));
    const auto r = permutation_test(ds, 1000, 0.2, 1000, 1000 + i);
    if (classified_maximizer(r, 0.05)) ++maximizers;
  }

  int randoms = 0;
  for (int i = 0; i < 100; ++i) {
    std::vector<std::pair<std::vector<double>, std::vector<double>>> rows;
    for (const auto& p : design.prices) {
      const double f = static_cast<double>(rng.next_below(11)) / 10.0;
      rows.push_back({p, {f * 100.0 / p[0], (1.0 - f) * 100.0 / p[1]}});
    }
    const auto ds = make_dataset(rows, "rand" + std::to_string(i));
    const auto r = permutation_test(ds, 1000, 0.2, 1000, 2000 + i);
    if (classified_maximizer(r, 0.05)) ++randoms;
  }
  const double elapsed = seconds_since(start);
  const bool ok = maximizers >= 95 && (maximizers - randoms) >= 30 && elapsed < 600.0;
  criterion(7, "permutation test separates maximizers from random choosers", ok,
            fmt("%d/100 maximizers vs %d/100 randoms classified, %.1f s (budget 600 s)",
                maximizers, randoms, elapsed));
}

// ---------------------------------------------------------------- criterion 8
void estimation_recovery() {
  std::vector<std::vector<double>> prices;
  for (int t = 0; t < 22; ++t) {
    const double lr = -std::log(3.0) + 2.0 * std::log(3.0) * t / 21.0;
    prices.push_back({std::exp(0.5 * lr), std::exp(-0.5 * lr)});
  }

  // noiseless: alpha = 0.5, rho = 0.5 from (g, m) = (1, 1)
  const auto exact = estimate_ces(oracles::ces_chooser(prices, 100.0, 1.0, 1.0));
  const bool exact_ok =
      std::fabs(exact.alpha - 0.5) <= 1e-4 && std::fabs(exact.rho - 0.5) <= 1e-4;

  // noisy: median recovery over 100 replications within 0.05
  Rng rng(20240809, "acceptance-estimation");
  const double g_true = 1.2, m_true = 1.1;
  const double rho_true = m_true / (1.0 + m_true);
  const double alpha_true = std::pow(g_true, 1.0 - rho_true) /
                            (1.0 + std::pow(g_true, 1.0 - rho_true));
  std::vector<double> alpha_err, rho_err;
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<std::pair<std::vector<double>, std::vector<double>>> rows;
    for (const auto& p : prices) {
      const double mu = predicted_share(g_true, m_true, p[0] / p[1]);
      const double u1 = rng.next_open();
      const double u2 = rng.next_open();
      const double noise =
          0.05 * std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
      const double share = std::clamp(mu + noise, 0.0, 1.0);
      rows.push_back({p, {share * 100.0 / p[0], (1.0 - share) * 100.0 / p[1]}});
    }
    const auto fit = estimate_ces(make_dataset(rows));
    alpha_err.push_back(std::fabs(fit.alpha - alpha_true));
    rho_err.push_back(std::fabs(fit.rho - rho_true));
  }
  std::sort(alpha_err.begin(), alpha_err.end());
  std::sort(rho_err.begin(), rho_err.end());
  const bool noisy_ok = alpha_err[50] <= 0.05 && rho_err[50] <= 0.05;

  // gradient against central finite differences at 20 random points
  const auto probe = oracles::ces_chooser(prices, 100.0, 1.1, 0.9);
  int grad_bad = 0;
  for (int rep = 0; rep < 20; ++rep) {
    const double g = std::exp(-1.0 + 2.0 * rng.next_double());
    const double m = -0.5 + 2.5 * rng.next_double();
    const double sigma = 0.05 + 0.5 * rng.next_double();
    const auto grad = share_loglik_grad(g, m, sigma, probe);
    const double step = 1e-5;
    const double fd[3] = {
        (share_loglik(g + step, m, sigma, probe) - share_loglik(g - step, m, sigma, probe)) /
            (2.0 * step),
        (share_loglik(g, m + step, sigma, probe) - share_loglik(g, m - step, sigma, probe)) /
            (2.0 * step),
        (share_loglik(g, m, sigma + step, probe) - share_loglik(g, m, sigma - step, probe)) /
            (2.0 * step),
    };
    for (int k = 0; k < 3; ++k) {
      const double rel = std::fabs(grad[k] - fd[k]) / std::max(1.0, std::fabs(fd[k]));
      if (rel > 1e-4) ++grad_bad;
    }
  }
  criterion(8, "structural estimation recovery and gradient check",
            exact_ok && noisy_ok && grad_bad == 0,
            fmt("noiseless |err|<=1e-4: %s; noisy medians %.4f/%.4f (cap 0.05); "
                "%d/60 gradient mismatches",
                exact_ok ? "yes" : "no", alpha_err[50], rho_err[50], grad_bad));
}

// ---------------------------------------------------------------- criterion 9
void scenario_gap_nonnegative() {
  Rng rng(20240809, "acceptance-gap");
  int negative = 0;
  int nonzero_on_pass = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const auto s1 = oracles::random_small(rng, 4);
    const auto s2 = oracles::random_small(rng, 4);
    const auto result = ccei_diff(s1, s2, 3, rep);
    if (result.diff < -1e-12) ++negative;
    ChoiceDataset combined = s1;
    combined.observations.insert(combined.observations.end(), s2.observations.begin(),
                                 s2.observations.end());
    if (check_garp(combined, 1.0).passes && std::fabs(result.diff) > 1e-12) {
      ++nonzero_on_pass;
    }
  }
  criterion(9, "scenario consistency gap is non-negative (1000 pairs)",
            negative == 0 && nonzero_on_pass == 0,
            fmt("%d negative, %d nonzero on consistent combinations", negative,
                nonzero_on_pass));
}

// --------------------------------------------------------------- criterion 10
void etl_fixture() {
  const std::string sample =
      "membership_id,store_id,timestamp,category,quantity_kg,expenditure,"
      "shelf_expenditure,discount_flag\n"
      "a1,A1,2019-04-13 12:07:10,Meat,1.5,45.0,,\n"
      "a1,A1,2019-09-21 16:35:45,Meat,2.0,40.0,,\n"
      "a1,A1,2019-10-19 10:10:10,Vegetable,4.2,8.4,,\n"
      "a1,A1,2019-11-10 19:05:05,Vegetable,1.8,3.6,,\n";
  std::istringstream in(sample);
  const auto records = parse_transactions(in).records;
  const auto cells =
      aggregate_cells(records, {"Meat"}, parse_month_range("2019-01:2020-12"));
  bool cells_ok = cells.size() == 2;
  if (cells_ok) {
    cells_ok = cells[0].month == month_index(2019, 4) &&
               std::fabs(cells[0].quantity - 1.5) <= 1e-12 &&
               std::fabs(cells[0].price - 30.0) <= 1e-12 &&
               cells[1].month == month_index(2019, 9) &&
               std::fabs(cells[1].quantity - 2.0) <= 1e-12 &&
               std::fabs(cells[1].price - 20.0) <= 1e-12;
  }

  HolidayCalendar calendar;
  calendar.days.insert(20191001);
  bool partitions_ok = true;
  for (auto scenario : {Scenario::season, Scenario::year, Scenario::working_day,
                        Scenario::meal_time, Scenario::discount}) {
    const auto parts = split_scenario(records, scenario, &calendar);
    std::size_t total = 0;
    for (const auto& [label, recs] : parts) total += recs.size();
    if (total != records.size()) partitions_ok = false;
  }
  criterion(10, "scanner sample aggregates and splits as printed",
            cells_ok && partitions_ok,
            fmt("cells %s, partitions %s", cells_ok ? "ok" : "bad",
                partitions_ok ? "exhaustive+disjoint" : "broken"));
}

// --------------------------------------------------------------- criterion 11
#ifdef REVPREF_CLI_PATH
std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream body;
  body << in.rdbuf();
  return body.str();
}

void cli_determinism() {
  const fs::path tmp = fs::temp_directory_path() / "revpref_acceptance_cli";
  fs::remove_all(tmp);
  fs::create_directories(tmp / "datasets");

  Rng rng(20240809, "acceptance-cli");
  for (int c = 0; c < 20; ++c) {
    auto ds = oracles::random_small(rng, 6);
    while (ds.rounds() < 2) ds = oracles::random_small(rng, 6);
    std::ofstream out(tmp / "datasets" / ("c" + std::to_string(c) + ".csv"));
    write_dataset_csv(ds, out);
  }

  auto run = [&](const std::string& args) {
    const std::string cmd = std::string(REVPREF_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str()) == 0;
  };
  const std::string data = (tmp / "datasets").string();

  bool ok = true;
  ok &= run("indices --input " + data + " --restrictions --jobs 8 -o " +
            (tmp / "i1.csv").string());
  ok &= run("indices --input " + data + " --restrictions --jobs 8 -o " +
            (tmp / "i2.csv").string());
  ok &= run("indices --input " + data + " --jobs 1 --restrictions -o " +
            (tmp / "i3.csv").string());
  const bool indices_same = ok && slurp(tmp / "i1.csv") == slurp(tmp / "i2.csv") &&
                            slurp(tmp / "i1.csv") == slurp(tmp / "i3.csv");

  ok = true;
  ok &= run("permtest --input " + data + " --perms 80 --seed 5 --jobs 8 -o " +
            (tmp / "p1.csv").string());
  ok &= run("permtest --input " + data + " --perms 80 --seed 5 --jobs 1 -o " +
            (tmp / "p2.csv").string());
  const bool perm_same = ok && slurp(tmp / "p1.csv") == slurp(tmp / "p2.csv");

  ok = true;
  ok &= run("power --mode shares --input " + data + " --sims 50 --seed 9 --jobs 8 -o " +
            (tmp / "w1.csv").string());
  ok &= run("power --mode shares --input " + data + " --sims 50 --seed 9 --jobs 1 -o " +
            (tmp / "w2.csv").string());
  const bool power_same = ok && slurp(tmp / "w1.csv") == slurp(tmp / "w2.csv");

  criterion(11, "CLI outputs are byte-identical across reruns and --jobs",
            indices_same && perm_same && power_same,
            fmt("indices %s, permtest %s, power %s", indices_same ? "ok" : "differ",
                perm_same ? "ok" : "differ", power_same ? "ok" : "differ"));
  fs::remove_all(tmp);
}
#endif

}  // namespace

int main() {
  std::printf("acceptance suite\n");
  oracle_equivalence();
  consistency_equivalence();
  gapp_fixture();
  micro_dataset_fixtures();
  dominance_chain();
  bronars_band();
  permutation_discrimination();
  estimation_recovery();
  scenario_gap_nonnegative();
  etl_fixture();
#ifdef REVPREF_CLI_PATH
  cli_determinism();
#endif
  std::printf("%s: %d criterion(s) failed\n", failures == 0 ? "OK" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
