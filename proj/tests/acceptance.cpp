// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failing criteria (0 when all pass).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "smmd/estimators.hpp"
#include "smmd/experiments.hpp"
#include "smmd/monitoring.hpp"
#include "smmd/normalization.hpp"
#include "smmd/parallel.hpp"
#include "smmd/random.hpp"
#include "smmd/testing.hpp"

using smmd::Matrix;
using smmd::Sample;
using smmd::Scale;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// 1. Null standardization over the full (d, s) grid.
Outcome null_standardization() {
  const std::vector<std::size_t> dims{1, 2, 4, 8, 16, 32};
  const auto scales = smmd::parse_scales("2,1,1/2,1/4,1/8,1/16,1/32");
  const auto rows = smmd::validate_null(dims, scales, 100, 10000, 101);
  bool ok = true;
  double worst_mean = 0, lo_sd = 10, hi_sd = 0;
  std::ostringstream bad;
  for (const auto& r : rows) {
    worst_mean = std::max(worst_mean, std::abs(r.mean));
    lo_sd = std::min(lo_sd, r.sd);
    hi_sd = std::max(hi_sd, r.sd);
    if (std::abs(r.mean) > 0.05 || r.sd < 0.9 || r.sd > 1.1) {
      ok = false;
      bad << " (d=" << r.d << ", s=" << r.scale_label << ": mean " << r.mean << ", sd " << r.sd << ")";
    }
  }
  return {ok, std::to_string(rows.size()) + " cells, max |mean| " + fmt("%.4f", worst_mean) + ", sd in [" +
                  fmt("%.4f", lo_sd) + ", " + fmt("%.4f", hi_sd) + "]" + bad.str()};
}

// 2. Empirical variance of MMD_u^2 against the closed form.
Outcome variance_formula() {
  struct Case {
    std::size_t d;
    double s;
    std::size_t n;
  };
  const Case cases[] = {{2, 0.125, 100}, {8, 0.25, 100}, {1, 1.0, 10}};
  const std::size_t reps = 100000;
  bool ok = true;
  std::ostringstream msg;
  for (const Case& c : cases) {
    const double g = std::sqrt(c.s * static_cast<double>(c.d));
    std::vector<double> vals(reps);
    smmd::parallel_for(reps, [&](std::size_t r) {
      auto rng = smmd::substream(202, {c.d, c.n, r});
      vals[r] = smmd::mmd_u_closed(Sample(smmd::standard_normal(c.n, c.d, rng)), g);
    });
    const double emp = oracle::sd(vals) * oracle::sd(vals);
    const double formula = oracle::variance(g, double(c.d), double(c.n));
    const double lib = smmd::null_variance(g, c.d, c.n);
    const double rel = std::abs(emp / lib - 1.0);
    ok = ok && rel < 0.10 && std::abs(lib / formula - 1.0) < 1e-12;
    msg << "(d=" << c.d << ", s=" << c.s << ", n=" << c.n << ") rel err " << fmt("%.4f", rel) << "; ";
  }
  return {ok, msg.str()};
}

// 3. MMD_b^2 equals the BHEP integral.
Outcome bhep_equivalence() {
  double worst = 0;
  for (std::uint64_t seed : {1, 2, 3}) {
    std::mt19937_64 rng(seed);
    const Matrix z = oracle::gaussian(3, 1, rng, 1.2);
    const double g = 0.5 + 0.5 * static_cast<double>(seed);
    const double w = oracle::bhep_1d({z(0, 0), z(1, 0), z(2, 0)}, 1.0 / g);
    worst = std::max(worst, std::abs(smmd::mmd_b_closed(Sample(z), g) - w));
  }
  return {worst < 1e-6, "max |MMD_b^2 - W| " + fmt("%.3g", worst) + " over 3 samples"};
}

// 4. Discrimination table.
Outcome discrimination_table() {
  using smmd::Method;
  const std::vector<smmd::MethodScales> grid{{Method::AnalyticRBF, smmd::default_rbf_scales()},
                                             {Method::EmpiricalRBF, smmd::default_rbf_scales()},
                                             {Method::EmpiricalIMQ, smmd::default_imq_scales()}};
  const std::vector<std::size_t> dims{1, 2, 4, 8, 16, 32};
  const auto cells = smmd::tau_grid(grid, smmd::AlternativeSpec::uniform_cube(1, 100), dims, 200, 404);
  std::map<std::tuple<Method, std::size_t, std::string>, double> tau;
  for (const auto& c : cells) tau[{c.method, c.d, c.scale_label}] = c.tau;

  struct Spot {
    Method m;
    std::size_t d;
    const char* s;
    double expected;
  };
  const Spot spots[] = {{Method::AnalyticRBF, 1, "1/8", 2.28},
                        {Method::AnalyticRBF, 4, "1/8", 2.56},
                        {Method::EmpiricalRBF, 8, "1/16", 1.02}};
  bool ok = true;
  std::ostringstream msg;
  for (const Spot& s : spots) {
    const double t = tau.at({s.m, s.d, s.s});
    ok = ok && std::abs(t - s.expected) <= 0.3;
    msg << smmd::to_string(s.m) << " d=" << s.d << " s=" << s.s << ": " << fmt("%.2f", t) << " (expected "
        << s.expected << "); ";
  }
  int wins = 0, total = 0;
  for (std::size_t d : dims) {
    for (const Scale& s : smmd::default_rbf_scales()) {
      ++total;
      wins += tau.at({Method::AnalyticRBF, d, s.label}) >= tau.at({Method::EmpiricalRBF, d, s.label});
    }
  }
  const double frac = double(wins) / total;
  ok = ok && frac >= 0.8;
  msg << "analytic >= empirical RBF in " << wins << "/" << total << " cells";
  return {ok, msg.str()};
}

// 5. Threshold table.
Outcome threshold_table() {
  using smmd::SampleType;
  struct Cell {
    std::size_t d;
    SampleType type;
    const char* s;
    double expected;
    double tol;
  };
  const Cell cells[] = {{1, SampleType::Original, "1", 1.97, 0.05},
                        {2, SampleType::CenteredScaled, "1", -0.57, 0.10},
                        {8, SampleType::CenteredWhitened, "1/16", 0.58, 0.10},
                        {4, SampleType::Original, "1/8", 1.79, 0.05}};
  bool ok = true;
  std::ostringstream msg;
  for (const Cell& c : cells) {
    const std::size_t dims[] = {c.d};
    const Scale scales[] = {Scale::parse(c.s)};
    const SampleType types[] = {c.type};
    const auto rows = smmd::threshold_table(dims, scales, types, 100, 0.05, 100000, 505);
    const double t = rows.front().threshold;
    ok = ok && std::abs(t - c.expected) <= c.tol;
    msg << smmd::to_string(c.type) << " d=" << c.d << " s=" << c.s << ": " << fmt("%.3f", t) << " (expected "
        << c.expected << "); ";
  }
  return {ok, msg.str()};
}

// 6. Outlier insensitivity.
Outcome outlier_insensitivity() {
  using smmd::Method;
  const std::vector<smmd::MethodScales> grid{{Method::AnalyticRBF, smmd::default_rbf_scales()},
                                             {Method::EmpiricalRBF, smmd::default_rbf_scales()},
                                             {Method::EmpiricalIMQ, smmd::default_imq_scales()}};
  const auto res = smmd::outlier_experiment(grid, 4, 100, 100.0, 200, 606);
  bool ok = res.size() == 3;
  std::ostringstream msg;
  double analytic_gamma = 1.0;
  for (const auto& r : res) {
    ok = ok && r.best.tau < 0.5;
    msg << smmd::to_string(r.best.method) << " best tau " << fmt("%.3f", r.best.tau) << " (s=" << r.best.scale_label
        << "); ";
    if (r.best.method == Method::AnalyticRBF) analytic_gamma = r.best.gamma;
  }
  const auto study = smmd::outlier_delta_study(4, 100, 100.0, analytic_gamma, 200, 607);
  const double ratio = std::abs(study.mean_delta) / study.pooled_sd;
  ok = ok && ratio < 0.5;
  msg << "|mean delta| / pooled sd " << fmt("%.3f", ratio);
  return {ok, msg.str()};
}

// 7. Random encoder with zero variances.
Outcome random_encoder_reduction() {
  std::mt19937_64 rng(707);
  std::uniform_int_distribution<int> nn(1, 20), dd(1, 8);
  std::uniform_real_distribution<double> gg(0.1, 3.0);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const int n = nn(rng), d = dd(rng);
    const double g = gg(rng);
    const Matrix mu = oracle::gaussian(n, d, rng, 1.5);
    const double a = smmd::mmd_u_random(smmd::RandomCodes(mu, Matrix::Zero(n, d)), g);
    worst = std::max(worst, std::abs(a - smmd::mmd_b_closed(Sample(mu), g)));
  }
  return {worst <= 1e-12, "max deviation " + fmt("%.3g", worst) + " over 100 instances"};
}

// 8. Composite null: whitened distribution does not depend on (mu, Sigma).
Outcome composite_null() {
  const std::size_t d = 4, n = 100, reps = 10000;
  const double g = std::sqrt(0.125 * d);
  std::mt19937_64 setup(808);
  Matrix a = oracle::gaussian(d, d, setup);
  a.diagonal().array() += 2.0;  // full rank, correlated
  const Eigen::RowVectorXd mu = oracle::gaussian(1, d, setup, 3.0).row(0);
  auto correlated = [&](smmd::Rng& rng) {
    Matrix x = smmd::standard_normal(n, d, rng) * a.transpose();
    x.rowwise() += mu;
    return Sample(std::move(x));
  };

  smmd::NullSpec spec;
  spec.d = d;
  spec.n = n;
  spec.kernel = smmd::KernelSpec(smmd::KernelFamily::RBF, g);
  spec.sample_type = smmd::SampleType::CenteredWhitened;
  spec.replicates = reps;
  spec.seed = 809;
  const auto null_identity = smmd::simulate_null(spec);

  std::vector<double> other(reps);
  smmd::parallel_for(reps, [&](std::size_t r) {
    auto rng = smmd::substream(810, {r});
    other[r] = smmd::smmd(smmd::center_whiten(correlated(rng)), g);
  });
  const auto ks = smmd::ks_two_sample(null_identity.values(), other);

  int rejects = 0;
  for (std::size_t t = 0; t < 1000; ++t) {
    auto rng = smmd::substream(811, {t});
    rejects += smmd::test_normality(correlated(rng), spec.kernel, smmd::Composite::FullCov, 0.05, null_identity).reject;
  }
  const double size = rejects / 1000.0;
  const bool ok = ks.p_value > 0.01 && std::abs(size - 0.05) <= 0.02;
  return {ok, "KS D " + fmt("%.4f", ks.statistic) + ", p " + fmt("%.3f", ks.p_value) + "; full-cov test size " +
                  fmt("%.3f", size)};
}

// 9. Monitor intervals and coverage.
Outcome monitor_intervals() {
  const auto b = smmd::b_interval(50);
  const auto e = smmd::e_interval(0.99);
  // b is compared bit for bit; alpha = 0.99 has no exact binary form, so e is
  // compared to the formula within 4 ulp
  const double e_ref = 3.0 * std::sqrt(0.01 / 1.99);
  const bool exact = b.second == 3.0 / std::sqrt(50.0) && b.first == -b.second &&
                     std::abs(e.second - e_ref) <= 4 * std::numeric_limits<double>::epsilon() * e_ref &&
                     e.first == -e.second;
  std::mt19937_64 rng(909);
  std::normal_distribution<double> nd;
  const int trials = 10000;
  int b_in = 0, e_in = 0;
  for (int t = 0; t < trials; ++t) {
    smmd::BMonitor bm;
    for (int i = 0; i < 50; ++i) bm = smmd::b_update(bm, nd(rng));
    b_in += bm.flag() == smmd::ConvergenceFlag::Inside;
    smmd::EMonitor em(0.99);
    for (int i = 0; i < 500; ++i) em = smmd::e_update(em, nd(rng));
    e_in += em.flag() == smmd::ConvergenceFlag::Inside;
  }
  const double bc = double(b_in) / trials, ec = double(e_in) / trials;
  return {exact && bc >= 0.99 && ec >= 0.99, "B(50) = +-" + fmt("%.4f", b.second) + ", E(0.99) = +-" +
                                                  fmt("%.4f", e.second) + ", coverage B " + fmt("%.4f", bc) +
                                                  ", E " + fmt("%.4f", ec)};
}

// 10. Naive-loop oracles and rotation invariance.
Outcome oracle_equivalence() {
  std::mt19937_64 rng(1010);
  std::uniform_real_distribution<double> u(0.0, 1.2);
  double worst = 0, worst_rot = 0;
  for (int n = 1; n <= 5; ++n) {
    for (int d = 1; d <= 3; ++d) {
      for (int rep = 0; rep < 5; ++rep) {
        const Matrix z = oracle::gaussian(n, d, rng, 1.3);
        const Matrix p = oracle::gaussian(n, d, rng);
        Matrix sd(n, d);
        for (int i = 0; i < n; ++i)
          for (int k = 0; k < d; ++k) sd(i, k) = u(rng);
        for (double g : {0.3, 1.0, 2.2}) {
          const Sample s(z);
          auto upd = [&](double a, double b) { worst = std::max(worst, std::abs(a - b)); };
          upd(smmd::mmd_b_closed(s, g), oracle::mmd_b(z, g));
          upd(smmd::mmd_u_random(smmd::RandomCodes(z, sd), g), oracle::mmd_random(z, sd, g));
          if (n < 2) continue;
          upd(smmd::mmd_u_closed(s, g), oracle::mmd_u(z, g));
          upd(smmd::null_variance(g, d, n), oracle::variance(g, d, n));
          upd(smmd::smmd(s, g) * std::sqrt(oracle::variance(g, d, n)), oracle::mmd_u(z, g));
          upd(smmd::mmd_u_empirical(s, Sample(p), smmd::KernelSpec(smmd::KernelFamily::RBF, g)),
              oracle::mmd_empirical(z, p, g, oracle::rbf));
          upd(smmd::mmd_u_empirical(s, Sample(p), smmd::KernelSpec(smmd::KernelFamily::IMQ, g)),
              oracle::mmd_empirical(z, p, g, oracle::imq));
        }
      }
    }
  }
  for (int rep = 0; rep < 50; ++rep) {
    const int d = 1 + rep % 8;
    const Matrix z = oracle::gaussian(40, d, rng);
    const Matrix zr = z * oracle::random_orthogonal(d, rng);
    for (double g : {0.5, 1.0, 2.0}) {
      worst_rot = std::max(worst_rot, std::abs(smmd::smmd(Sample(z), g) - smmd::smmd(Sample(zr), g)));
    }
  }
  return {worst <= 1e-12 && worst_rot <= 1e-10,
          "max oracle deviation " + fmt("%.3g", worst) + ", max rotation deviation " + fmt("%.3g", worst_rot)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"null standardization", null_standardization},
      {"variance formula", variance_formula},
      {"BHEP equivalence", bhep_equivalence},
      {"discrimination table", discrimination_table},
      {"threshold table", threshold_table},
      {"outlier insensitivity", outlier_insensitivity},
      {"random-encoder reduction", random_encoder_reduction},
      {"composite-null correctness", composite_null},
      {"monitor intervals", monitor_intervals},
      {"oracle equivalence", oracle_equivalence},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.pass;
    std::printf("[%s] %2zu %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures;
}
