// Command-line front end: estimator evaluation on CSV files, normality tests,
// threshold tables, the synthetic experiments, and batch-stream monitoring.
//
// Exit codes: 0 success (or fail-to-reject), 1 reject (test only), 2 usage or
// input error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "smmd/estimators.hpp"
#include "smmd/experiments.hpp"
#include "smmd/io.hpp"
#include "smmd/monitoring.hpp"
#include "smmd/normalization.hpp"
#include "smmd/parallel.hpp"
#include "smmd/testing.hpp"

namespace {

constexpr int kExitReject = 1;
constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

smmd::Matrix read_input(const std::string& path, std::optional<std::size_t> d) {
  if (path == "-") return smmd::read_csv_matrix(std::cin, "<stdin>", d);
  return smmd::read_csv_matrix_file(path, d);
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &pos);
    } catch (const std::exception&) {
      throw UsageError("bad integer '" + item + "'");
    }
    if (pos != item.size() || v < 1) throw UsageError("expected a positive integer, got '" + item + "'");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw UsageError("empty list");
  return out;
}

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

/// Kernel width from exactly one of --gamma / --scale.
struct WidthOptions {
  std::optional<double> gamma;
  std::optional<std::string> scale;

  void add(CLI::App* app) {
    auto* g = app->add_option("--gamma", gamma, "kernel width gamma (> 0)")->check(CLI::PositiveNumber);
    auto* s = app->add_option("--scale", scale, "kernel scale s = gamma^2/d, a fraction such as 1/8, or hz");
    g->excludes(s);
    s->excludes(g);
  }

  double resolve(std::size_t d, std::size_t n) const {
    if (gamma) return *gamma;
    if (!scale) throw UsageError("one of --gamma or --scale is required");
    try {
      return smmd::Scale::parse(*scale).gamma(d, n);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
};

struct OutputOptions {
  std::string output = "-";
  std::string format = "csv";

  void add(CLI::App* app) {
    app->add_option("-o,--output", output, "output file, - for stdout")->capture_default_str();
    app->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  }

  void emit(const smmd::Table& table) const {
    std::ofstream file;
    std::ostream* out = &std::cout;
    if (output != "-") {
      file.open(output);
      if (!file) throw std::runtime_error("cannot write " + output);
      out = &file;
    }
    if (format == "json") {
      table.write_json(*out);
    } else {
      table.write_csv(*out);
    }
  }
};

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("--alpha must lie in (0, 1)");
}

std::vector<smmd::MethodScales> method_grid(const std::string& methods, const std::string& rbf_scales,
                                            const std::string& imq_scales) {
  std::vector<smmd::MethodScales> grid;
  for (const std::string& name : split(methods)) {
    smmd::Method m;
    try {
      m = smmd::method_from_string(name);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    const std::string& scales = m == smmd::Method::EmpiricalIMQ ? imq_scales : rbf_scales;
    try {
      grid.push_back({m, scales.empty() ? smmd::default_scales(m) : smmd::parse_scales(scales)});
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  if (grid.empty()) throw UsageError("no methods given");
  return grid;
}

// ---------------------------------------------------------------- compute

struct ComputeArgs {
  std::string input;
  WidthOptions width;
  std::optional<std::size_t> d;
  bool normalize = false;
  std::optional<std::string> sds;
};

int run_compute(const ComputeArgs& a) {
  const smmd::Matrix data = read_input(a.input, a.d);
  const std::size_t n = static_cast<std::size_t>(data.rows());
  const std::size_t d = static_cast<std::size_t>(data.cols());
  const double gamma = a.width.resolve(d, n);

  if (a.sds) {
    smmd::RandomCodes codes(data, read_input(*a.sds, d));
    if (codes.size() != n) throw UsageError("means and standard deviations differ in row count");
    if (a.normalize) codes = smmd::code_normalize_random(codes);
    std::cout << smmd::to_json({{"mmd_u_random", smmd::mmd_u_random(codes, gamma)},
                                {"gamma", gamma},
                                {"s", smmd::gamma_to_scale(gamma, d)}})
              << '\n';
    return 0;
  }

  smmd::Sample sample(data);
  if (a.normalize) sample = smmd::code_normalize(sample);
  if (sample.size() < 2) throw UsageError("unbiased estimator requires n >= 2");
  std::cout << smmd::to_json({{"mmd_u", smmd::mmd_u_closed(sample, gamma)},
                              {"mmd_b", smmd::mmd_b_closed(sample, gamma)},
                              {"smmd", smmd::smmd(sample, gamma)},
                              {"variance", smmd::null_variance(gamma, d, n)},
                              {"gamma", gamma},
                              {"s", smmd::gamma_to_scale(gamma, d)}})
            << '\n';
  return 0;
}

// ---------------------------------------------------------------- test

struct TestArgs {
  std::string input;
  WidthOptions width;
  std::string hypothesis = "simple";
  double alpha = 0.05;
  std::optional<std::string> cache_file;
  std::optional<std::string> cache_dir;
  std::optional<std::size_t> replicates;
  std::optional<std::uint64_t> seed;
};

int run_test(const TestArgs& a) {
  check_alpha(a.alpha);
  const smmd::Sample sample(read_input(a.input, std::nullopt));
  const std::size_t n = sample.size();
  const std::size_t d = sample.dim();
  const smmd::Composite composite = smmd::composite_from_string(a.hypothesis);

  smmd::NullSpec spec;
  spec.d = d;
  spec.n = n;
  spec.kernel = smmd::KernelSpec(smmd::KernelFamily::RBF, a.width.resolve(d, n));
  spec.sample_type = smmd::null_sample_type(composite);
  if (a.replicates) {
    if (!a.seed) throw UsageError("--replicates needs an explicit --seed");
    spec.replicates = *a.replicates;
    spec.seed = *a.seed;
  }

  std::optional<smmd::NullDistribution> null;
  if (a.cache_file) {
    if (std::filesystem::exists(*a.cache_file)) {
      null = smmd::read_null_distribution(*a.cache_file);
      if (!null->spec().same_distribution(spec)) {
        throw UsageError("cache " + *a.cache_file + " holds a null distribution for d=" +
                         std::to_string(null->spec().d) + ", n=" + std::to_string(null->spec().n) +
                         ", sample type " + smmd::to_string(null->spec().sample_type) +
                         ", which does not match this test (d=" + std::to_string(d) + ", n=" + std::to_string(n) +
                         ", sample type " + smmd::to_string(spec.sample_type) + ", same kernel)");
      }
    } else if (a.replicates) {
      null = smmd::simulate_null(spec);
      smmd::write_null_distribution(*a.cache_file, *null);
    } else {
      throw UsageError("cache " + *a.cache_file + " does not exist; pass --replicates and --seed to build it");
    }
  } else {
    const std::filesystem::path dir = a.cache_dir ? std::filesystem::path(*a.cache_dir) : smmd::default_cache_dir();
    if (a.replicates) {
      null = smmd::load_or_simulate(spec, dir);
    } else {
      null = smmd::find_cached(spec, dir);
      if (!null) {
        throw UsageError("no cached null distribution for this test in " + dir.string() +
                         "; pass --replicates and --seed to build one");
      }
    }
  }

  const smmd::TestResult result = smmd::test_normality(sample, spec.kernel, composite, a.alpha, *null);
  std::cout << smmd::to_json({{"statistic", result.statistic},
                              {"threshold", result.threshold},
                              {"reject", result.reject},
                              {"alpha", a.alpha},
                              {"hypothesis", smmd::to_string(composite)},
                              {"sample_type", smmd::to_string(spec.sample_type)},
                              {"gamma", spec.kernel.gamma()},
                              {"s", smmd::gamma_to_scale(spec.kernel.gamma(), d)},
                              {"replicates", static_cast<std::int64_t>(null->spec().replicates)}})
            << '\n';
  return result.reject ? kExitReject : 0;
}

// ---------------------------------------------------------------- thresholds

struct ThresholdArgs {
  std::string dims = "1,2,4,8,16,32";
  std::string scales = "1,1/2,1/4,1/8,1/16,hz";
  std::string sample_types = "original,centered_scaled,centered_whitened";
  std::size_t n = 100;
  double alpha = 0.05;
  std::size_t replicates = 100000;
  std::uint64_t seed = 0;
  OutputOptions out;
};

int run_thresholds(const ThresholdArgs& a) {
  check_alpha(a.alpha);
  std::vector<smmd::SampleType> types;
  for (const std::string& t : split(a.sample_types)) {
    try {
      types.push_back(smmd::sample_type_from_string(t));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  const auto dims = parse_sizes(a.dims);
  std::vector<smmd::Scale> scales;
  try {
    scales = smmd::parse_scales(a.scales);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto rows = smmd::threshold_table(dims, scales, types, a.n, a.alpha, a.replicates, a.seed);
  a.out.emit(smmd::thresholds_to_table(rows));
  return 0;
}

// ---------------------------------------------------------------- discriminate

struct DiscriminateArgs {
  std::string alternative = "uniform";
  std::optional<std::string> csv;
  bool whiten_csv = false;
  double magnitude = 100.0;
  std::string dims = "1,2,4,8,16,32";
  std::string methods = "analytic_rbf,empirical_rbf,empirical_imq";
  std::string rbf_scales;
  std::string imq_scales;
  std::size_t n = 100;
  std::size_t replicates = 200;
  std::uint64_t seed = 0;
  OutputOptions out;
};

int run_discriminate(const DiscriminateArgs& a) {
  const auto grid = method_grid(a.methods, a.rbf_scales, a.imq_scales);
  smmd::AlternativeSpec alt;
  std::vector<std::size_t> dims;
  if (a.alternative == "csv") {
    if (!a.csv) throw UsageError("--alternative csv needs --csv FILE");
    alt = smmd::AlternativeSpec::external_csv(*a.csv, a.n, a.whiten_csv);
    dims = {alt.d};
  } else {
    dims = parse_sizes(a.dims);
    if (a.alternative == "uniform") {
      alt = smmd::AlternativeSpec::uniform_cube(dims.front(), a.n);
    } else if (a.alternative == "normal") {
      alt = smmd::AlternativeSpec::standard_normal(dims.front(), a.n);
    } else if (a.alternative == "outlier") {
      alt = smmd::AlternativeSpec::outlier_injected(dims.front(), a.n, a.magnitude);
    } else {
      throw UsageError("unknown alternative '" + a.alternative + "'");
    }
  }
  const auto results = smmd::tau_grid(grid, alt, dims, a.replicates, a.seed);
  a.out.emit(smmd::tau_table(results));
  return 0;
}

// ---------------------------------------------------------------- validate

struct ValidateArgs {
  std::string dims = "1,2,4,8,16,32";
  std::string scales = "2,1,1/2,1/4,1/8,1/16,1/32";
  std::size_t n = 100;
  std::size_t replicates = 10000;
  std::uint64_t seed = 0;
  OutputOptions out;
};

int run_validate(const ValidateArgs& a) {
  const auto dims = parse_sizes(a.dims);
  std::vector<smmd::Scale> scales;
  try {
    scales = smmd::parse_scales(a.scales);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  a.out.emit(smmd::validation_table(smmd::validate_null(dims, scales, a.n, a.replicates, a.seed)));
  return 0;
}

// ---------------------------------------------------------------- outliers

struct OutlierArgs {
  std::size_t d = 4;
  std::size_t n = 100;
  double magnitude = 100.0;
  std::string methods = "analytic_rbf,empirical_rbf,empirical_imq";
  std::string rbf_scales;
  std::string imq_scales;
  std::size_t replicates = 200;
  std::uint64_t seed = 0;
  OutputOptions out;
};

int run_outliers(const OutlierArgs& a) {
  const auto grid = method_grid(a.methods, a.rbf_scales, a.imq_scales);
  a.out.emit(smmd::outlier_table(smmd::outlier_experiment(grid, a.d, a.n, a.magnitude, a.replicates, a.seed)));
  return 0;
}

// ---------------------------------------------------------------- monitor

struct MonitorArgs {
  std::string input;
  std::size_t batch_size = 100;
  std::string monitor = "b";
  double momentum = 0.99;
  WidthOptions width;
  bool normalize = false;
};

int run_monitor(const MonitorArgs& a) {
  if (a.monitor == "e" && !(a.momentum > 0.0 && a.momentum < 1.0)) {
    throw UsageError("--momentum must lie in (0, 1)");
  }
  if (a.batch_size < 2) throw UsageError("--batch-size must be at least 2");
  const smmd::Matrix data = read_input(a.input, std::nullopt);
  const auto rows = static_cast<std::size_t>(data.rows());
  const auto d = static_cast<std::size_t>(data.cols());
  if (rows % a.batch_size != 0) {
    throw UsageError("input has " + std::to_string(rows) + " rows, which is not a multiple of the batch size " +
                     std::to_string(a.batch_size) + " (final batch has " + std::to_string(rows % a.batch_size) +
                     " rows)");
  }
  const double gamma = a.width.resolve(d, a.batch_size);
  const bool use_b = a.monitor == "b";
  const std::string key = use_b ? "b_stat" : "e_stat";

  smmd::BMonitor bmon;
  smmd::EMonitor emon(use_b ? 0.5 : a.momentum);
  double stat = 0.0;
  smmd::Interval iv;
  smmd::ConvergenceFlag flag = smmd::ConvergenceFlag::InsufficientData;
  const std::size_t batches = rows / a.batch_size;
  for (std::size_t b = 0; b < batches; ++b) {
    smmd::Sample batch(data.middleRows(static_cast<Eigen::Index>(b * a.batch_size),
                                       static_cast<Eigen::Index>(a.batch_size)));
    if (a.normalize) batch = smmd::code_normalize(batch);
    const double value = smmd::smmd(batch, gamma);
    if (use_b) {
      bmon = smmd::b_update(bmon, value);
      stat = bmon.statistic();
      iv = bmon.interval();
      flag = bmon.flag();
    } else {
      emon = smmd::e_update(emon, value);
      stat = emon.statistic();
      iv = emon.interval();
      flag = emon.flag();
    }
    std::cout << smmd::to_json({{"batch_index", static_cast<std::int64_t>(b)},
                                {"smmd", value},
                                {key, stat},
                                {"interval_lo", iv.first},
                                {"interval_hi", iv.second},
                                {"flag", smmd::to_string(flag)}})
              << '\n';
  }
  std::cout << smmd::to_json({{"summary", true},
                              {"monitor", a.monitor},
                              {"batches", static_cast<std::int64_t>(batches)},
                              {key, stat},
                              {"interval_lo", iv.first},
                              {"interval_hi", iv.second},
                              {"verdict", smmd::to_string(flag)}})
            << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-form MMD against the standard normal: estimators, normality tests, experiments"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "worker threads for replicate loops (0 = all cores)");

  ComputeArgs compute;
  auto* c = app.add_subcommand("compute", "evaluate the closed-form estimators on a CSV sample");
  c->add_option("input", compute.input, "CSV file, one point per row (- for stdin)")->required();
  compute.width.add(c);
  c->add_option("--d", compute.d, "expected dimension (validates the column count)");
  c->add_flag("--normalize", compute.normalize, "code-normalize before evaluating");
  c->add_option("--random-encoder", compute.sds,
                "CSV of per-point standard deviations; the input holds the means");

  TestArgs test;
  auto* t = app.add_subcommand("test", "SMMD normality test with Monte-Carlo thresholds");
  t->add_option("input", test.input, "CSV sample (- for stdin)")->required();
  test.width.add(t);
  t->add_option("--hypothesis", test.hypothesis, "simple, diagonal or full")
      ->check(CLI::IsMember({"simple", "diagonal", "full"}))
      ->capture_default_str();
  t->add_option("--alpha", test.alpha, "test size")->capture_default_str();
  t->add_option("--cache", test.cache_file, "null distribution file to read (or create)");
  t->add_option("--cache-dir", test.cache_dir, "cache directory (default $SMMD_CACHE_DIR)");
  t->add_option("--replicates", test.replicates, "simulate the null with this many replicates if not cached")
      ->check(CLI::Range(std::size_t{1000}, std::size_t{100000000}));
  t->add_option("--seed", test.seed, "seed for the null simulation");

  ThresholdArgs thr;
  auto* th = app.add_subcommand("thresholds", "Monte-Carlo threshold table");
  th->add_option("--dims", thr.dims)->capture_default_str();
  th->add_option("--scales", thr.scales, "comma-separated scales; hz adds the Henze-Zirkler width")
      ->capture_default_str();
  th->add_option("--sample-types", thr.sample_types)->capture_default_str();
  th->add_option("--n", thr.n)->check(CLI::Range(std::size_t{2}, std::size_t{1000000}))->capture_default_str();
  th->add_option("--alpha", thr.alpha)->capture_default_str();
  th->add_option("--replicates", thr.replicates)->check(CLI::PositiveNumber)->capture_default_str();
  th->add_option("--seed", thr.seed)->required();
  thr.out.add(th);

  DiscriminateArgs disc;
  auto* di = app.add_subcommand("discriminate", "effect size tau between N_d and an alternative");
  di->add_option("--alternative", disc.alternative, "uniform, normal, outlier or csv")
      ->check(CLI::IsMember({"uniform", "normal", "outlier", "csv"}))
      ->capture_default_str();
  di->add_option("--csv", disc.csv, "rows to sample batches from (--alternative csv)");
  di->add_flag("--whiten-csv", disc.whiten_csv, "center and whiten the CSV rows before sampling");
  di->add_option("--magnitude", disc.magnitude, "outlier coordinate value")->capture_default_str();
  di->add_option("--dims", disc.dims)->capture_default_str();
  di->add_option("--methods", disc.methods)->capture_default_str();
  di->add_option("--rbf-scales", disc.rbf_scales, "scales for the RBF methods (default 2..1/32,hz)");
  di->add_option("--imq-scales", disc.imq_scales, "scales for the IMQ method (default 2..1/1024)");
  di->add_option("--n", disc.n)->check(CLI::Range(std::size_t{2}, std::size_t{1000000}))->capture_default_str();
  di->add_option("--replicates", disc.replicates)->check(CLI::Range(std::size_t{2}, std::size_t{100000000}))
      ->capture_default_str();
  di->add_option("--seed", disc.seed)->required();
  disc.out.add(di);

  ValidateArgs val;
  auto* va = app.add_subcommand("validate", "null mean and SD of SMMD per (d, s)");
  va->add_option("--dims", val.dims)->capture_default_str();
  va->add_option("--scales", val.scales)->capture_default_str();
  va->add_option("--n", val.n)->check(CLI::Range(std::size_t{2}, std::size_t{1000000}))->capture_default_str();
  va->add_option("--replicates", val.replicates)->check(CLI::Range(std::size_t{2}, std::size_t{100000000}))
      ->capture_default_str();
  va->add_option("--seed", val.seed)->required();
  val.out.add(va);

  OutlierArgs outl;
  auto* ou = app.add_subcommand("outliers", "outlier-insensitivity experiment");
  ou->add_option("--d", outl.d)->check(CLI::PositiveNumber)->capture_default_str();
  ou->add_option("--n", outl.n)->check(CLI::Range(std::size_t{2}, std::size_t{1000000}))->capture_default_str();
  ou->add_option("--magnitude", outl.magnitude)->capture_default_str();
  ou->add_option("--methods", outl.methods)->capture_default_str();
  ou->add_option("--rbf-scales", outl.rbf_scales);
  ou->add_option("--imq-scales", outl.imq_scales);
  ou->add_option("--replicates", outl.replicates)->check(CLI::Range(std::size_t{2}, std::size_t{100000000}))
      ->capture_default_str();
  ou->add_option("--seed", outl.seed)->required();
  outl.out.add(ou);

  MonitorArgs mon;
  auto* mo = app.add_subcommand("monitor", "B/E convergence monitor over consecutive batches");
  mo->add_option("input", mon.input, "CSV where every batch-size consecutive rows form a batch (- for stdin)")
      ->required();
  mo->add_option("--batch-size", mon.batch_size)->capture_default_str();
  mo->add_option("--monitor", mon.monitor, "b (average) or e (exponential moving average)")
      ->check(CLI::IsMember({"b", "e"}))
      ->capture_default_str();
  mo->add_option("--momentum", mon.momentum)->capture_default_str();
  mon.width.add(mo);
  mo->add_flag("--normalize", mon.normalize, "code-normalize each batch");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  smmd::set_num_threads(threads);
  try {
    if (*c) return run_compute(compute);
    if (*t) return run_test(test);
    if (*th) return run_thresholds(thr);
    if (*di) return run_discriminate(disc);
    if (*va) return run_validate(val);
    if (*ou) return run_outliers(outl);
    if (*mo) return run_monitor(mon);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
