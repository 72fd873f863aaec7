// Command-line front end: batch revealed-preference analysis over dataset
// files and scanner transaction logs. Every run writes a manifest of its
// inputs, flags, and seed next to the outputs; identical manifests produce
// byte-identical outputs regardless of --jobs.

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "revpref/analytics.hpp"
#include "revpref/core.hpp"
#include "revpref/estimation.hpp"
#include "revpref/etl.hpp"
#include "revpref/garp.hpp"
#include "revpref/indices.hpp"
#include "revpref/io.hpp"
#include "revpref/power.hpp"
#include "revpref/restrictions.hpp"
#include "revpref/stats.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitDataError = 1;
constexpr int kExitUsage = 2;
constexpr int kExitResourceCap = 3;

struct Manifest {
  std::string command;
  std::vector<std::string> inputs;
  std::map<std::string, std::string> flags;
  std::uint64_t seed = 0;

  void write(const fs::path& target) const {
    json j;
    j["tool"] = "revpref";
    j["version"] = kVersion;
    j["command"] = command;
    j["inputs"] = inputs;
    j["flags"] = flags;
    j["seed"] = seed;
    std::ofstream out(target);
    out << j.dump(2) << "\n";
  }
};

fs::path manifest_path_for(const fs::path& output) {
  fs::path p = output;
  p += ".manifest.json";
  return p;
}

// All dataset files in a path (one file, or every .csv/.json in a directory),
// sorted by label so processing order never depends on directory order.
std::vector<revpref::ChoiceDataset> load_datasets(const fs::path& input) {
  std::vector<revpref::ChoiceDataset> datasets;
  if (fs::is_directory(input)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(input)) {
      if (!entry.is_regular_file()) continue;
      const auto ext = entry.path().extension().string();
      if (ext == ".csv" || ext == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) datasets.push_back(revpref::read_dataset_file(file));
  } else {
    datasets.push_back(revpref::read_dataset_file(input));
  }
  if (datasets.empty()) {
    throw std::invalid_argument("no dataset files found under " + input.string());
  }
  std::sort(datasets.begin(), datasets.end(),
            [](const auto& a, const auto& b) { return a.label < b.label; });
  return datasets;
}

// Runs f(i) for i in [0, n) on `jobs` threads. Exceptions are captured and
// the one with the lowest index is rethrown, so failures match a serial run.
template <typename F>
void parallel_for(std::size_t n, int jobs, F f) {
  jobs = std::max(1, jobs);
  if (jobs == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::pair<std::size_t, std::exception_ptr>> errors(
      jobs, {n, std::exception_ptr{}});
  std::vector<std::thread> pool;
  for (int w = 0; w < jobs; ++w) {
    pool.emplace_back([&, w] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          f(i);
        } catch (...) {
          if (!errors[w].second || i < errors[w].first) {
            errors[w] = {i, std::current_exception()};
          }
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  std::size_t first = n;
  std::exception_ptr eptr;
  for (const auto& [idx, e] : errors) {
    if (e && idx <= first) {
      first = idx;
      eptr = e;
    }
  }
  if (eptr) std::rethrow_exception(eptr);
}

void write_text_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write " + path.string());
  out << content;
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

// ---------------------------------------------------------------------------
// indices
// ---------------------------------------------------------------------------

struct IndicesOptions {
  std::string input;
  std::string output = "indices.csv";
  std::string format = "csv";
  bool restrictions = false;
  std::uint64_t node_cap = revpref::kDefaultNodeCap;
  int jobs = 1;
};

int run_indices(const IndicesOptions& opt) {
  const auto datasets = load_datasets(opt.input);
  struct Row {
    revpref::IndexReport report;
    std::optional<revpref::RestrictionReport> fosd, homothetic, quasilinear, gapp;
  };
  std::vector<Row> rows(datasets.size());
  parallel_for(datasets.size(), opt.jobs, [&](std::size_t i) {
    const auto& ds = datasets[i];
    rows[i].report = revpref::index_report(ds, opt.node_cap);
    if (opt.restrictions) {
      if (ds.goods() == 2) {
        rows[i].fosd = revpref::restriction_report(ds, revpref::RestrictionKind::fosd);
      }
      rows[i].homothetic =
          revpref::restriction_report(ds, revpref::RestrictionKind::homothetic);
      rows[i].quasilinear =
          revpref::restriction_report(ds, revpref::RestrictionKind::quasilinear);
      rows[i].gapp = revpref::restriction_report(ds, revpref::RestrictionKind::gapp);
    }
  });

  std::ostringstream out;
  if (opt.format == "json") {
    json arr = json::array();
    for (const auto& row : rows) {
      json item;
      item["label"] = row.report.label;
      item["ccei"] = row.report.ccei;
      item["hmi"] = row.report.hmi;
      item["mpi"] = row.report.mpi;
      item["mci"] = row.report.mci;
      item["hmi_kept"] = row.report.hmi_kept;
      item["mci_exact"] = row.report.mci_exact;
      item["two_cycles"] = row.report.two_cycles;
      if (row.fosd) item["fosd"] = row.fosd->efficiency;
      if (row.homothetic) item["homothetic"] = row.homothetic->efficiency;
      if (row.quasilinear) item["quasilinear"] = row.quasilinear->efficiency;
      if (row.gapp) {
        item["gapp"] = row.gapp->efficiency;
        item["gapp_passes_at_1"] = row.gapp->passes_at_1;
      }
      arr.push_back(std::move(item));
    }
    out << arr.dump(2) << "\n";
  } else {
    out << revpref::index_csv_header();
    if (opt.restrictions) out << ",fosd,homothetic,quasilinear,gapp,gapp_passes_at_1";
    out << "\n";
    for (const auto& row : rows) {
      out << revpref::index_csv_row(row.report);
      if (opt.restrictions) {
        out << ',' << (row.fosd ? revpref::format_double(row.fosd->efficiency) : "");
        out << ',' << revpref::format_double(row.homothetic->efficiency);
        out << ',' << revpref::format_double(row.quasilinear->efficiency);
        out << ',' << revpref::format_double(row.gapp->efficiency);
        out << ',' << bool_str(row.gapp->passes_at_1);
      }
      out << "\n";
    }
  }
  write_text_file(opt.output, out.str());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// power
// ---------------------------------------------------------------------------

struct PowerOptions {
  std::string mode = "discrete";
  std::string input;
  std::string output = "power.csv";
  int sims = 1000;
  int options = 11;
  int rounds = 22;
  std::uint64_t seed = 0;
  bool reverse_adjust = false;
  int jobs = 1;
};

int run_power(const PowerOptions& opt) {
  std::ostringstream out;
  if (opt.mode == "discrete") {
    const auto design = revpref::experiment_budgets(opt.rounds, opt.seed);
    const auto summary = revpref::bronars_discrete(design, opt.options, opt.sims, opt.seed);
    out << "label,n_sims,mean,sd,min,median,max\n";
    out << "design," << summary.n_sims << ',' << revpref::format_double(summary.mean)
        << ',' << revpref::format_double(summary.sd) << ','
        << revpref::format_double(summary.min) << ','
        << revpref::format_double(summary.median) << ','
        << revpref::format_double(summary.max) << "\n";
  } else {
    if (opt.input.empty()) {
      throw CLI::ValidationError("--input is required in shares mode");
    }
    const auto datasets = load_datasets(opt.input);
    struct Row {
      double observed = 1.0;
      revpref::SimulationSummary summary;
    };
    std::vector<Row> rows(datasets.size());
    parallel_for(datasets.size(), opt.jobs, [&](std::size_t i) {
      rows[i].observed = revpref::ccei(datasets[i]);
      rows[i].summary = revpref::bronars_shares(datasets[i], opt.sims, opt.seed);
    });
    std::vector<double> observed, simulated;
    for (const auto& row : rows) {
      observed.push_back(row.observed);
      simulated.push_back(row.summary.mean);
    }
    std::vector<double> adjusted;
    if (rows.size() >= 3) {
      adjusted = revpref::power_adjusted_ccei(observed, simulated, opt.reverse_adjust);
    }
    out << "label,observed_ccei,n_sims,sim_mean,sim_sd,sim_min,sim_median,sim_max,"
           "selten,power_adjusted\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& s = rows[i].summary;
      out << datasets[i].label << ',' << revpref::format_double(rows[i].observed) << ','
          << s.n_sims << ',' << revpref::format_double(s.mean) << ','
          << revpref::format_double(s.sd) << ',' << revpref::format_double(s.min) << ','
          << revpref::format_double(s.median) << ',' << revpref::format_double(s.max)
          << ',' << revpref::format_double(revpref::selten_score(rows[i].observed, s))
          << ',' << (adjusted.empty() ? "" : revpref::format_double(adjusted[i])) << "\n";
    }
  }
  write_text_file(opt.output, out.str());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// permtest
// ---------------------------------------------------------------------------

struct PermtestOptions {
  std::string input;
  std::string output = "permtest.csv";
  int perms = 10000;
  double abort_threshold = 0.2;
  int abort_check_at = 1000;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  int jobs = 1;
};

int run_permtest(const PermtestOptions& opt) {
  const auto datasets = load_datasets(opt.input);
  std::vector<revpref::PermutationResult> rows(datasets.size());
  parallel_for(datasets.size(), opt.jobs, [&](std::size_t i) {
    rows[i] = revpref::permutation_test(datasets[i], opt.perms, opt.abort_threshold,
                                        opt.abort_check_at, opt.seed);
  });
  std::ostringstream out;
  out << "label,p_value,aborted,draws,maximizer\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << datasets[i].label << ',' << revpref::format_double(rows[i].p_value) << ','
        << bool_str(rows[i].aborted) << ',' << rows[i].draws << ','
        << bool_str(revpref::classified_maximizer(rows[i], opt.alpha)) << "\n";
  }
  write_text_file(opt.output, out.str());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// etl
// ---------------------------------------------------------------------------

struct EtlOptions {
  std::string input;
  std::string outdir = "etl_out";
  std::string categories;
  std::string window;
  int require_consecutive = 0;
  bool lenient = false;
  bool use_shelf = false;
  std::string holidays;
  std::string scenario;
  std::string subcategory;
};

void write_dataset_dir(const std::map<std::string, revpref::ChoiceDataset>& datasets,
                       const fs::path& dir) {
  fs::create_directories(dir);
  for (const auto& [consumer, ds] : datasets) {
    std::ostringstream body;
    revpref::write_dataset_csv(ds, body);
    write_text_file(dir / (consumer + ".csv"), body.str());
  }
}

int run_etl(const EtlOptions& opt) {
  const auto categories = split_list(opt.categories);
  if (categories.empty()) {
    throw CLI::ValidationError("--categories must name at least one category");
  }
  const auto window = revpref::parse_month_range(opt.window);

  auto parsed = revpref::parse_transactions(fs::path(opt.input), opt.lenient);
  if (!opt.subcategory.empty()) {
    const auto keep = split_list(opt.subcategory);
    std::erase_if(parsed.records, [&](const revpref::TransactionRecord& rec) {
      return std::find(keep.begin(), keep.end(), rec.subcategory) == keep.end();
    });
  }

  std::optional<revpref::HolidayCalendar> calendar;
  if (!opt.holidays.empty()) calendar = revpref::load_holiday_csv(fs::path(opt.holidays));

  std::set<std::string> all_consumers;
  for (const auto& rec : parsed.records) all_consumers.insert(rec.membership_id);

  const fs::path outdir(opt.outdir);
  fs::create_directories(outdir);

  json report;
  report["window"] = opt.window;
  report["categories"] = categories;
  report["dropped_zero_rows"] = parsed.dropped_zero_rows;
  json issues = json::array();
  for (const auto& issue : parsed.issues) {
    issues.push_back({{"line", issue.line}, {"message", issue.message}});
  }
  report["parse_issues"] = std::move(issues);
  report["consumers_seen"] = all_consumers.size();

  auto build = [&](const std::vector<revpref::TransactionRecord>& records) {
    auto datasets = revpref::monthly_aggregate(records, categories, window, opt.use_shelf);
    if (opt.require_consecutive > 0) {
      datasets = revpref::filter_consecutive(datasets, opt.require_consecutive);
    }
    return datasets;
  };

  if (opt.scenario.empty()) {
    const auto datasets = build(parsed.records);
    write_dataset_dir(datasets, outdir / "datasets");
    json kept = json::array();
    for (const auto& [consumer, ds] : datasets) {
      kept.push_back({{"consumer", consumer}, {"months", ds.rounds()}});
    }
    report["consumers_kept"] = datasets.size();
    report["consumers_excluded"] = all_consumers.size() - datasets.size();
    report["datasets"] = std::move(kept);
  } else {
    const auto scenario = revpref::parse_scenario(opt.scenario);
    const auto parts = revpref::split_scenario(parsed.records, scenario,
                                               calendar ? &*calendar : nullptr);
    json part_report = json::array();
    for (const auto& [label, records] : parts) {
      const auto datasets = build(records);
      write_dataset_dir(datasets, outdir / label);
      part_report.push_back({{"part", label},
                             {"records", records.size()},
                             {"consumers_kept", datasets.size()}});
    }
    report["scenario"] = opt.scenario;
    report["parts"] = std::move(part_report);
  }

  std::ostringstream body;
  body << report.dump(2) << "\n";
  write_text_file(outdir / "etl_report.json", body.str());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// estimate
// ---------------------------------------------------------------------------

struct EstimateOptions {
  std::string input;
  std::string output = "estimates.csv";
  std::string model = "ces";
  int jobs = 1;
};

int run_estimate(const EstimateOptions& opt) {
  const revpref::ModelKind kind = opt.model == "ces"
                                      ? revpref::ModelKind::ces
                                      : revpref::ModelKind::disappointment_aversion;
  const auto datasets = load_datasets(opt.input);
  std::vector<revpref::EstimationResult> rows(datasets.size());
  parallel_for(datasets.size(), opt.jobs, [&](std::size_t i) {
    rows[i] = revpref::estimate_ces(datasets[i], kind);
  });
  std::ostringstream out;
  out << "label,alpha,rho,g,m,sigma,loglik,converged,iterations\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out << datasets[i].label << ',' << revpref::format_double(r.alpha) << ','
        << revpref::format_double(r.rho) << ',' << revpref::format_double(r.g) << ','
        << revpref::format_double(r.m) << ',' << revpref::format_double(r.sigma) << ','
        << revpref::format_double(r.loglik) << ',' << bool_str(r.converged) << ','
        << r.iterations << "\n";
  }
  write_text_file(opt.output, out.str());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

struct AnalyzeOptions {
  std::string metric;
  std::string transactions;
  std::string input;
  std::string input_b;
  std::string output = "metrics.csv";
  int year = 0;
  std::string grouping = "hours_of_day";
  std::string basis = "amount";
  int splits = 100;
  std::uint64_t seed = 0;
  bool majority = false;
  bool lenient = false;
};

int run_analyze(const AnalyzeOptions& opt) {
  std::ostringstream out;
  if (opt.metric == "volatility" || opt.metric == "discount") {
    if (opt.transactions.empty() || opt.year == 0) {
      throw CLI::ValidationError("--transactions and --year are required for this metric");
    }
    const auto parsed = revpref::parse_transactions(fs::path(opt.transactions), opt.lenient);
    std::set<std::string> consumers;
    for (const auto& rec : parsed.records) consumers.insert(rec.membership_id);
    if (opt.metric == "volatility") {
      const auto grouping = revpref::parse_grouping(opt.grouping);
      const auto basis = revpref::parse_basis(opt.basis);
      out << "label,year,grouping,basis,volatility\n";
      for (const auto& consumer : consumers) {
        try {
          const auto v =
              revpref::volatility(parsed.records, consumer, opt.year, grouping, basis);
          out << consumer << ',' << opt.year << ',' << opt.grouping << ',' << opt.basis
              << ',' << revpref::format_double(v.value) << "\n";
        } catch (const std::invalid_argument&) {
          // fewer than 2 active months: no volatility row for this consumer
        }
      }
    } else {
      out << "label,year,prop_discounted,aggregate_rate,mean_txn_rate\n";
      for (const auto& consumer : consumers) {
        try {
          const auto d = revpref::discount_metrics(parsed.records, consumer, opt.year);
          out << consumer << ',' << opt.year << ','
              << revpref::format_double(d.prop_discounted) << ','
              << revpref::format_double(d.aggregate_rate) << ','
              << revpref::format_double(d.mean_txn_rate) << "\n";
        } catch (const std::invalid_argument&) {
          // no transactions in this year
        }
      }
    }
  } else if (opt.metric == "downward") {
    const auto datasets = load_datasets(opt.input);
    out << "label,r,p_value,n\n";
    for (const auto& ds : datasets) {
      try {
        const auto c = revpref::downward_sloping_score(ds);
        out << ds.label << ',' << revpref::format_double(c.r) << ','
            << revpref::format_double(c.p_value) << ',' << c.n << "\n";
      } catch (const std::invalid_argument&) {
        // too few interior rounds or no price variation
      }
    }
  } else if (opt.metric == "middle") {
    const auto datasets = load_datasets(opt.input);
    out << "label,is_middle,qualifying_rounds\n";
    for (const auto& ds : datasets) {
      const auto m = revpref::middle_chooser(ds, 0.4, 0.6, 0.9, 1.1, !opt.majority);
      out << ds.label << ',' << bool_str(m.is_middle) << ',' << m.qualifying_rounds
          << "\n";
    }
  } else if (opt.metric == "cceidiff") {
    // per-consumer gap between two scenario directories joined by label
    if (opt.input_b.empty()) {
      throw CLI::ValidationError("--input-b is required for the cceidiff metric");
    }
    const auto part_a = load_datasets(opt.input);
    const auto part_b = load_datasets(opt.input_b);
    std::map<std::string, const revpref::ChoiceDataset*> by_label;
    for (const auto& ds : part_b) by_label[ds.label] = &ds;
    out << "label,diff,benchmark_mean\n";
    for (const auto& ds : part_a) {
      const auto it = by_label.find(ds.label);
      if (it == by_label.end()) continue;
      const auto r = revpref::ccei_diff(ds, *it->second, opt.splits, opt.seed);
      out << ds.label << ',' << revpref::format_double(r.diff) << ','
          << revpref::format_double(r.benchmark_mean) << "\n";
    }
  } else {
    throw CLI::ValidationError(
        "--metric must be volatility, discount, downward, middle, or cceidiff");
  }
  write_text_file(opt.output, out.str());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// correlate
// ---------------------------------------------------------------------------

struct CorrelateOptions {
  std::string file_a;
  std::string file_b;
  std::string col_a;
  std::string col_b;
  std::string method = "spearman";
  std::string output = "correlation.csv";
};

std::map<std::string, double> read_metric_column(const fs::path& path, std::string& column) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty file " + path.string());
  const auto header = revpref::split_csv_line(line);
  if (header.empty() || header[0] != "label") {
    throw std::invalid_argument(path.string() + ": first column must be 'label'");
  }
  if (column.empty() && header.size() > 1) column = header[1];
  const auto it = std::find(header.begin(), header.end(), column);
  if (column.empty() || it == header.end()) {
    throw std::invalid_argument(path.string() + ": no column named '" + column + "'");
  }
  const std::size_t idx = it - header.begin();
  std::map<std::string, double> values;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto fields = revpref::split_csv_line(line);
    if (fields.size() <= idx || fields[idx].empty()) continue;
    values[fields[0]] = revpref::parse_double(fields[idx], column);
  }
  return values;
}

int run_correlate(const CorrelateOptions& opt) {
  std::string col_a = opt.col_a;
  std::string col_b = opt.col_b;
  const auto a = read_metric_column(opt.file_a, col_a);
  const auto b = read_metric_column(opt.file_b, col_b);
  std::vector<double> xs, ys;
  for (const auto& [label, value] : a) {
    const auto it = b.find(label);
    if (it == b.end()) continue;
    xs.push_back(value);
    ys.push_back(it->second);
  }
  std::ostringstream out;
  if (opt.method == "paired-t") {
    const auto t = revpref::paired_ttest(xs, ys);
    out << "col_a,col_b,t,p_value,n\n";
    out << col_a << ',' << col_b << ',' << revpref::format_double(t.t) << ','
        << revpref::format_double(t.p_value) << ',' << xs.size() << "\n";
  } else {
    const auto c = revpref::spearman(xs, ys);
    out << "col_a,col_b,r,p_value,n\n";
    out << col_a << ',' << col_b << ',' << revpref::format_double(c.r) << ','
        << revpref::format_double(c.p_value) << ',' << c.n << "\n";
  }
  write_text_file(opt.output, out.str());
  return kExitOk;
}

json error_json(const std::string& kind, const std::string& message) {
  json j;
  j["error"] = kind;
  j["message"] = message;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Revealed-preference consistency toolkit"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "Key/value file supplying any flag; command line wins");
  app.require_subcommand(1);

  IndicesOptions indices_opt;
  auto* indices_cmd =
      app.add_subcommand("indices", "Consistency indices (CCEI, HMI, MPI, MCI) per dataset");
  indices_cmd->add_option("--input", indices_opt.input, "Dataset file or directory")
      ->required();
  indices_cmd->add_option("--output,-o", indices_opt.output, "Output report path");
  indices_cmd->add_option("--format", indices_opt.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  indices_cmd->add_flag("--restrictions", indices_opt.restrictions,
                        "Append FOSD/homothetic/quasilinear/GAPP columns");
  indices_cmd->add_option("--node-cap", indices_opt.node_cap, "Exact-search node budget");
  indices_cmd->add_option("--jobs", indices_opt.jobs, "Worker threads");

  PowerOptions power_opt;
  auto* power_cmd = app.add_subcommand("power", "Random-chooser power simulations");
  power_cmd->add_option("--mode", power_opt.mode, "discrete or shares")
      ->check(CLI::IsMember({"discrete", "shares"}));
  power_cmd->add_option("--input", power_opt.input, "Datasets (shares mode)");
  power_cmd->add_option("--output,-o", power_opt.output, "Output report path");
  power_cmd->add_option("--sims", power_opt.sims, "Simulated choosers");
  power_cmd->add_option("--options", power_opt.options, "Allocation options per budget");
  power_cmd->add_option("--rounds", power_opt.rounds, "Budgets in the generated design");
  power_cmd->add_option("--seed", power_opt.seed, "Simulation seed");
  power_cmd->add_flag("--reverse-adjust", power_opt.reverse_adjust,
                      "Regress observed on simulated for the power adjustment");
  power_cmd->add_option("--jobs", power_opt.jobs, "Worker threads");

  PermtestOptions perm_opt;
  auto* perm_cmd = app.add_subcommand("permtest", "Share-permutation randomness test");
  perm_cmd->add_option("--input", perm_opt.input, "Dataset file or directory")->required();
  perm_cmd->add_option("--output,-o", perm_opt.output, "Output report path");
  perm_cmd->add_option("--perms", perm_opt.perms, "Permutation draws");
  perm_cmd->add_option("--abort-threshold", perm_opt.abort_threshold, "Early-stop proportion");
  perm_cmd->add_option("--abort-check-at", perm_opt.abort_check_at,
                       "Draw count at which the early stop is checked");
  perm_cmd->add_option("--alpha", perm_opt.alpha, "Classification significance level");
  perm_cmd->add_option("--seed", perm_opt.seed, "Permutation seed");
  perm_cmd->add_option("--jobs", perm_opt.jobs, "Worker threads");

  EtlOptions etl_opt;
  auto* etl_cmd = app.add_subcommand("etl", "Transactions to monthly budget datasets");
  etl_cmd->add_option("--input", etl_opt.input, "Transactions CSV")->required();
  etl_cmd->add_option("--outdir", etl_opt.outdir, "Output directory");
  etl_cmd->add_option("--categories", etl_opt.categories, "Comma-separated categories")
      ->required();
  etl_cmd->add_option("--window", etl_opt.window, "YYYY-MM:YYYY-MM")->required();
  etl_cmd->add_option("--require-consecutive", etl_opt.require_consecutive,
                      "Consecutive covered months a consumer must have");
  etl_cmd->add_flag("--lenient", etl_opt.lenient,
                    "Collect malformed rows instead of failing");
  etl_cmd->add_flag("--use-shelf", etl_opt.use_shelf, "Price from shelf expenditure");
  etl_cmd->add_option("--holidays", etl_opt.holidays, "Holiday calendar CSV (date,label)");
  etl_cmd->add_option("--scenario", etl_opt.scenario,
                      "season, year, working_day, meal_time, or discount");
  etl_cmd->add_option("--subcategory", etl_opt.subcategory,
                      "Keep only these comma-separated subcategories");

  EstimateOptions est_opt;
  auto* est_cmd = app.add_subcommand("estimate", "Structural preference estimation");
  est_cmd->add_option("--input", est_opt.input, "Dataset file or directory")->required();
  est_cmd->add_option("--output,-o", est_opt.output, "Output report path");
  est_cmd->add_option("--model", est_opt.model, "ces or da")
      ->check(CLI::IsMember({"ces", "da"}));
  est_cmd->add_option("--jobs", est_opt.jobs, "Worker threads");

  AnalyzeOptions an_opt;
  auto* an_cmd = app.add_subcommand("analyze", "Behavioral metrics per consumer");
  an_cmd->add_option("--metric", an_opt.metric,
                     "volatility, discount, downward, middle, or cceidiff")
      ->required();
  an_cmd->add_option("--transactions", an_opt.transactions, "Transactions CSV");
  an_cmd->add_option("--input", an_opt.input, "Dataset file or directory");
  an_cmd->add_option("--input-b", an_opt.input_b,
                     "Second dataset directory (cceidiff metric)");
  an_cmd->add_option("--output,-o", an_opt.output, "Output report path");
  an_cmd->add_option("--year", an_opt.year, "Calendar year");
  an_cmd->add_option("--splits", an_opt.splits, "Benchmark re-partitions (cceidiff)");
  an_cmd->add_option("--seed", an_opt.seed, "Benchmark seed (cceidiff)");
  an_cmd->add_option("--grouping", an_opt.grouping,
                     "hours_of_day, days_of_week, or ten_day_periods");
  an_cmd->add_option("--basis", an_opt.basis, "amount or count");
  an_cmd->add_flag("--majority", an_opt.majority,
                   "Middle chooser on a majority of qualifying rounds");
  an_cmd->add_flag("--lenient", an_opt.lenient, "Tolerate malformed transaction rows");

  CorrelateOptions corr_opt;
  auto* corr_cmd =
      app.add_subcommand("correlate", "Spearman correlation of two metric files");
  corr_cmd->add_option("--a", corr_opt.file_a, "First metric CSV")->required();
  corr_cmd->add_option("--b", corr_opt.file_b, "Second metric CSV")->required();
  corr_cmd->add_option("--col-a", corr_opt.col_a, "Column in the first file");
  corr_cmd->add_option("--col-b", corr_opt.col_b, "Column in the second file");
  corr_cmd->add_option("--method", corr_opt.method, "spearman or paired-t")
      ->check(CLI::IsMember({"spearman", "paired-t"}));
  corr_cmd->add_option("--output,-o", corr_opt.output, "Output report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kExitUsage;
  }

  Manifest manifest;
  try {
    int status = kExitOk;
    fs::path manifest_target;
    if (indices_cmd->parsed()) {
      manifest.command = "indices";
      manifest.inputs = {indices_opt.input};
      manifest.flags = {{"format", indices_opt.format},
                        {"restrictions", bool_str(indices_opt.restrictions)},
                        {"node_cap", std::to_string(indices_opt.node_cap)},
                        {"jobs", std::to_string(indices_opt.jobs)}};
      manifest_target = manifest_path_for(indices_opt.output);
      status = run_indices(indices_opt);
    } else if (power_cmd->parsed()) {
      manifest.command = "power";
      if (!power_opt.input.empty()) manifest.inputs = {power_opt.input};
      manifest.seed = power_opt.seed;
      manifest.flags = {{"mode", power_opt.mode},
                        {"sims", std::to_string(power_opt.sims)},
                        {"options", std::to_string(power_opt.options)},
                        {"rounds", std::to_string(power_opt.rounds)},
                        {"reverse_adjust", bool_str(power_opt.reverse_adjust)},
                        {"jobs", std::to_string(power_opt.jobs)}};
      manifest_target = manifest_path_for(power_opt.output);
      status = run_power(power_opt);
    } else if (perm_cmd->parsed()) {
      manifest.command = "permtest";
      manifest.inputs = {perm_opt.input};
      manifest.seed = perm_opt.seed;
      manifest.flags = {{"perms", std::to_string(perm_opt.perms)},
                        {"abort_threshold", revpref::format_double(perm_opt.abort_threshold)},
                        {"abort_check_at", std::to_string(perm_opt.abort_check_at)},
                        {"alpha", revpref::format_double(perm_opt.alpha)},
                        {"jobs", std::to_string(perm_opt.jobs)}};
      manifest_target = manifest_path_for(perm_opt.output);
      status = run_permtest(perm_opt);
    } else if (etl_cmd->parsed()) {
      manifest.command = "etl";
      manifest.inputs = {etl_opt.input};
      if (!etl_opt.holidays.empty()) manifest.inputs.push_back(etl_opt.holidays);
      manifest.flags = {{"categories", etl_opt.categories},
                        {"window", etl_opt.window},
                        {"require_consecutive", std::to_string(etl_opt.require_consecutive)},
                        {"lenient", bool_str(etl_opt.lenient)},
                        {"use_shelf", bool_str(etl_opt.use_shelf)},
                        {"scenario", etl_opt.scenario},
                        {"subcategory", etl_opt.subcategory}};
      manifest_target = fs::path(etl_opt.outdir) / "manifest.json";
      status = run_etl(etl_opt);
    } else if (est_cmd->parsed()) {
      manifest.command = "estimate";
      manifest.inputs = {est_opt.input};
      manifest.flags = {{"model", est_opt.model}, {"jobs", std::to_string(est_opt.jobs)}};
      manifest_target = manifest_path_for(est_opt.output);
      status = run_estimate(est_opt);
    } else if (an_cmd->parsed()) {
      manifest.command = "analyze";
      if (!an_opt.transactions.empty()) manifest.inputs.push_back(an_opt.transactions);
      if (!an_opt.input.empty()) manifest.inputs.push_back(an_opt.input);
      if (!an_opt.input_b.empty()) manifest.inputs.push_back(an_opt.input_b);
      manifest.seed = an_opt.seed;
      manifest.flags = {{"metric", an_opt.metric},
                        {"year", std::to_string(an_opt.year)},
                        {"grouping", an_opt.grouping},
                        {"basis", an_opt.basis},
                        {"splits", std::to_string(an_opt.splits)},
                        {"majority", bool_str(an_opt.majority)},
                        {"lenient", bool_str(an_opt.lenient)}};
      manifest_target = manifest_path_for(an_opt.output);
      status = run_analyze(an_opt);
    } else if (corr_cmd->parsed()) {
      manifest.command = "correlate";
      manifest.inputs = {corr_opt.file_a, corr_opt.file_b};
      manifest.flags = {{"col_a", corr_opt.col_a},
                        {"col_b", corr_opt.col_b},
                        {"method", corr_opt.method}};
      manifest_target = manifest_path_for(corr_opt.output);
      status = run_correlate(corr_opt);
    }
    if (status == kExitOk && !manifest_target.empty()) {
      if (manifest_target.has_parent_path()) {
        fs::create_directories(manifest_target.parent_path());
      }
      manifest.write(manifest_target);
    }
    return status;
  } catch (const CLI::ValidationError& e) {
    std::cerr << error_json("usage", e.what()).dump() << "\n";
    return kExitUsage;
  } catch (const revpref::SearchBudgetExceeded& e) {
    std::cerr << error_json("resource_cap", e.what()).dump() << "\n";
    return kExitResourceCap;
  } catch (const std::invalid_argument& e) {
    std::cerr << error_json("data", e.what()).dump() << "\n";
    return kExitDataError;
  } catch (const std::exception& e) {
    std::cerr << error_json("internal", e.what()).dump() << "\n";
    return kExitDataError;
  }
}
