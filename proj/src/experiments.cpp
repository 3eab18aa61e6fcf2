#include "smmd/experiments.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "smmd/estimators.hpp"
#include "smmd/normalization.hpp"
#include "smmd/parallel.hpp"

namespace smmd {

namespace {

struct Moments {
  double mean;
  double sd;
};

Moments moments(std::span<const double> v) {
  if (v.size() < 2) throw std::invalid_argument("need at least two replicate values");
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool uses_empirical(std::span<const MethodScales> grid) {
  return std::any_of(grid.begin(), grid.end(), [](const MethodScales& m) { return m.method != Method::AnalyticRBF; });
}

}  // namespace

std::string to_string(Method method) {
  switch (method) {
    case Method::AnalyticRBF:
      return "analytic_rbf";
    case Method::EmpiricalRBF:
      return "empirical_rbf";
    case Method::EmpiricalIMQ:
      return "empirical_imq";
  }
  return "unknown";
}

Method method_from_string(const std::string& name) {
  const std::string s = lower(name);
  if (s == "analytic_rbf" || s == "analytic" || s == "an_rbf") return Method::AnalyticRBF;
  if (s == "empirical_rbf" || s == "emp_rbf") return Method::EmpiricalRBF;
  if (s == "empirical_imq" || s == "emp_imq") return Method::EmpiricalIMQ;
  throw std::invalid_argument("unknown method '" + name + "'");
}

Scale Scale::of(double s) {
  if (!(s > 0.0) || !std::isfinite(s)) throw std::invalid_argument("kernel scale must be positive");
  const double inv = 1.0 / s;
  char buf[32];
  if (s < 1.0 && std::abs(inv - std::round(inv)) < 1e-9) {
    std::snprintf(buf, sizeof buf, "1/%.0f", inv);
  } else {
    std::snprintf(buf, sizeof buf, "%g", s);
  }
  return {buf, s};
}

Scale Scale::parse(const std::string& text) {
  std::string t;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) t += c;
  }
  if (lower(t) == "hz") return hz();
  const auto slash = t.find('/');
  char* end = nullptr;
  if (slash != std::string::npos) {
    const std::string num = t.substr(0, slash);
    const std::string den = t.substr(slash + 1);
    const double a = std::strtod(num.c_str(), &end);
    if (num.empty() || *end != '\0') throw std::invalid_argument("bad scale '" + text + "'");
    const double b = std::strtod(den.c_str(), &end);
    if (den.empty() || *end != '\0' || b == 0.0) throw std::invalid_argument("bad scale '" + text + "'");
    if (!(a / b > 0.0)) throw std::invalid_argument("kernel scale must be positive");
    return {t, a / b};
  }
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || *end != '\0') throw std::invalid_argument("bad scale '" + text + "'");
  if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("kernel scale must be positive");
  return {t, v};
}

double Scale::gamma(std::size_t d, std::size_t n) const {
  return value ? scale_to_gamma(*value, d) : hz_gamma(d, n);
}

std::vector<Scale> parse_scales(const std::string& comma_separated) {
  std::vector<Scale> out;
  std::string item;
  for (std::size_t i = 0; i <= comma_separated.size(); ++i) {
    if (i == comma_separated.size() || comma_separated[i] == ',') {
      if (!item.empty()) out.push_back(Scale::parse(item));
      item.clear();
    } else {
      item += comma_separated[i];
    }
  }
  if (out.empty()) throw std::invalid_argument("empty scale list");
  return out;
}

std::vector<Scale> default_rbf_scales() {
  std::vector<Scale> out{Scale::of(2.0), Scale::of(1.0)};
  for (double k = 2; k <= 32; k *= 2) out.push_back(Scale::of(1.0 / k));
  out.push_back(Scale::hz());
  return out;
}

std::vector<Scale> default_imq_scales() {
  std::vector<Scale> out{Scale::of(2.0), Scale::of(1.0)};
  for (double k = 2; k <= 1024; k *= 2) out.push_back(Scale::of(1.0 / k));
  return out;
}

std::vector<Scale> default_scales(Method method) {
  return method == Method::EmpiricalIMQ ? default_imq_scales() : default_rbf_scales();
}

std::string to_string(AlternativeSpec::Kind kind) {
  switch (kind) {
    case AlternativeSpec::Kind::StandardNormal:
      return "standard_normal";
    case AlternativeSpec::Kind::UniformCube:
      return "uniform";
    case AlternativeSpec::Kind::OutlierInjected:
      return "outlier";
    case AlternativeSpec::Kind::ExternalCsv:
      return "csv";
  }
  return "unknown";
}

AlternativeSpec AlternativeSpec::standard_normal(std::size_t d, std::size_t n) {
  AlternativeSpec s;
  s.kind = Kind::StandardNormal;
  s.d = d;
  s.n = n;
  return s;
}

AlternativeSpec AlternativeSpec::uniform_cube(std::size_t d, std::size_t n) {
  AlternativeSpec s = standard_normal(d, n);
  s.kind = Kind::UniformCube;
  return s;
}

AlternativeSpec AlternativeSpec::outlier_injected(std::size_t d, std::size_t n, double magnitude) {
  AlternativeSpec s = standard_normal(d, n);
  s.kind = Kind::OutlierInjected;
  s.magnitude = magnitude;
  return s;
}

AlternativeSpec AlternativeSpec::external_rows(Matrix rows, std::size_t n) {
  AlternativeSpec s;
  s.kind = Kind::ExternalCsv;
  s.d = static_cast<std::size_t>(rows.cols());
  s.n = n;
  s.pool = std::make_shared<const Matrix>(std::move(rows));
  s.validate();
  return s;
}

AlternativeSpec AlternativeSpec::external_csv(const std::string& path, std::size_t n, bool whiten) {
  Matrix rows = read_csv_matrix_file(path);
  if (whiten) rows = center_whiten(Sample(std::move(rows))).data();
  return external_rows(std::move(rows), n);
}

AlternativeSpec AlternativeSpec::with_dim(std::size_t new_d) const {
  if (kind == Kind::ExternalCsv) {
    if (new_d != d) throw std::invalid_argument("CSV alternative has fixed dimension " + std::to_string(d));
    return *this;
  }
  AlternativeSpec s = *this;
  s.d = new_d;
  return s;
}

void AlternativeSpec::validate() const {
  if (d < 1) throw std::invalid_argument("alternative: d must be >= 1");
  if (n < 2) throw std::invalid_argument("alternative: n must be >= 2");
  if (kind == Kind::OutlierInjected && !std::isfinite(magnitude)) {
    throw std::invalid_argument("alternative: outlier magnitude must be finite");
  }
  if (kind == Kind::ExternalCsv) {
    if (!pool) throw std::invalid_argument("alternative: CSV pool missing");
    if (static_cast<std::size_t>(pool->cols()) != d) {
      throw std::invalid_argument("alternative: CSV has " + std::to_string(pool->cols()) + " columns, expected " +
                                  std::to_string(d));
    }
    if (static_cast<std::size_t>(pool->rows()) < n) {
      throw std::invalid_argument("alternative: CSV has " + std::to_string(pool->rows()) +
                                  " rows, fewer than the batch size " + std::to_string(n));
    }
  }
}

Sample sample_alternative(const AlternativeSpec& spec, Rng& rng) {
  spec.validate();
  switch (spec.kind) {
    case AlternativeSpec::Kind::StandardNormal:
      return Sample(standard_normal(spec.n, spec.d, rng));
    case AlternativeSpec::Kind::UniformCube:
      return Sample(uniform_cube(spec.n, spec.d, rng));
    case AlternativeSpec::Kind::OutlierInjected: {
      Matrix z = standard_normal(spec.n, spec.d, rng);
      z.row(0).setConstant(spec.magnitude);
      return Sample(std::move(z));
    }
    case AlternativeSpec::Kind::ExternalCsv: {
      const Matrix& pool = *spec.pool;
      std::vector<Eigen::Index> idx(static_cast<std::size_t>(pool.rows()));
      std::iota(idx.begin(), idx.end(), Eigen::Index{0});
      Matrix z(spec.n, spec.d);
      // Partial Fisher-Yates: the first n positions become the batch.
      for (std::size_t i = 0; i < spec.n; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
        std::swap(idx[i], idx[pick(rng)]);
        z.row(static_cast<Eigen::Index>(i)) = pool.row(idx[i]);
      }
      return Sample(std::move(z));
    }
  }
  throw std::logic_error("unhandled alternative kind");
}

double effect_size(std::span<const double> group1, std::span<const double> group2) {
  const Moments a = moments(group1);
  const Moments b = moments(group2);
  const double diff = std::abs(a.mean - b.mean);
  const double pooled = 0.5 * (a.sd + b.sd);
  if (pooled == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return diff / pooled;
}

std::vector<TauResult> tau_cells(std::span<const MethodScales> grid, const AlternativeSpec& alternative,
                                 std::size_t replicates, std::uint64_t seed) {
  alternative.validate();
  if (replicates < 2) throw std::invalid_argument("tau needs at least two replicates");
  const std::size_t d = alternative.d;
  const std::size_t n = alternative.n;

  struct Cell {
    Method method;
    const Scale* scale;
    KernelSpec kernel;
  };
  std::vector<Cell> cells;
  for (const MethodScales& ms : grid) {
    const KernelFamily fam = ms.method == Method::EmpiricalIMQ ? KernelFamily::IMQ : KernelFamily::RBF;
    for (const Scale& s : ms.scales) cells.push_back({ms.method, &s, KernelSpec(fam, s.gamma(d, n))});
  }
  const bool empirical = uses_empirical(grid);

  std::vector<std::vector<double>> v1(cells.size(), std::vector<double>(replicates));
  std::vector<std::vector<double>> v2(cells.size(), std::vector<double>(replicates));

  parallel_for(replicates, [&](std::size_t r) {
    Rng rng_null = substream(seed, {d, r, 0});
    Rng rng_alt = substream(seed, {d, r, 1});
    const Sample x1(standard_normal(n, d, rng_null));
    const Sample x2 = sample_alternative(alternative, rng_alt);

    SampleGeometry g1, g2;
    TwoSampleGeometry e1, e2;
    if (empirical) {
      Rng rng_ref1 = substream(seed, {d, r, 2});
      Rng rng_ref2 = substream(seed, {d, r, 3});
      e1 = two_sample_geometry(x1, Sample(standard_normal(n, d, rng_ref1)));
      e2 = two_sample_geometry(x2, Sample(standard_normal(n, d, rng_ref2)));
      g1 = e1.q;
      g2 = e2.q;
    } else {
      g1 = geometry(x1);
      g2 = geometry(x2);
    }

    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (cells[c].method == Method::AnalyticRBF) {
        v1[c][r] = mmd_u_closed(g1, cells[c].kernel.gamma());
        v2[c][r] = mmd_u_closed(g2, cells[c].kernel.gamma());
      } else {
        v1[c][r] = mmd_u_empirical(e1, cells[c].kernel);
        v2[c][r] = mmd_u_empirical(e2, cells[c].kernel);
      }
    }
  });

  std::vector<TauResult> out;
  out.reserve(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const Moments m1 = moments(v1[c]);
    const Moments m2 = moments(v2[c]);
    TauResult t{cells[c].method,
                cells[c].scale->label,
                gamma_to_scale(cells[c].kernel.gamma(), d),
                cells[c].kernel.gamma(),
                d,
                n,
                effect_size(v1[c], v2[c]),
                m1.mean,
                m1.sd,
                m2.mean,
                m2.sd,
                replicates,
                std::move(v1[c]),
                std::move(v2[c])};
    out.push_back(std::move(t));
  }
  return out;
}

TauResult tau(Method method, const AlternativeSpec& alternative, const Scale& scale, std::size_t replicates,
              std::uint64_t seed) {
  const MethodScales grid[] = {{method, {scale}}};
  return std::move(tau_cells(grid, alternative, replicates, seed).front());
}

std::vector<TauResult> tau_grid(std::span<const MethodScales> grid, const AlternativeSpec& alternative,
                                std::span<const std::size_t> dims, std::size_t replicates, std::uint64_t seed) {
  std::vector<TauResult> out;
  for (std::size_t d : dims) {
    auto cells = tau_cells(grid, alternative.with_dim(d), replicates, seed);
    std::move(cells.begin(), cells.end(), std::back_inserter(out));
  }
  return out;
}

Table tau_table(std::span<const TauResult> results) {
  Table t;
  t.columns = {"method", "d", "s", "scale", "gamma", "n", "tau", "mean1", "sd1", "mean2", "sd2", "replicates"};
  for (const TauResult& r : results) {
    t.add_row({to_string(r.method), static_cast<std::int64_t>(r.d), r.scale_label, r.scale, r.gamma,
               static_cast<std::int64_t>(r.n), r.tau, r.mean1, r.sd1, r.mean2, r.sd2,
               static_cast<std::int64_t>(r.replicates)});
  }
  return t;
}

std::vector<NullSummary> validate_null(std::span<const std::size_t> dims, std::span<const Scale> scales,
                                       std::size_t n, std::size_t replicates, std::uint64_t seed) {
  if (replicates < 2) throw std::invalid_argument("validation needs at least two replicates");
  std::vector<NullSummary> out;
  for (std::size_t d : dims) {
    std::vector<double> gammas;
    for (const Scale& s : scales) gammas.push_back(s.gamma(d, n));
    NullSpec spec;
    spec.d = d;
    spec.n = n;
    spec.kernel = KernelSpec(KernelFamily::RBF, gammas.front());
    spec.sample_type = SampleType::Original;
    spec.replicates = replicates;
    spec.seed = seed;
    const auto dists = simulate_null_widths(spec, gammas);
    for (std::size_t i = 0; i < scales.size(); ++i) {
      const Moments m = moments(dists[i].values());
      out.push_back({d, scales[i].label, gamma_to_scale(gammas[i], d), gammas[i], m.mean, m.sd, replicates});
    }
  }
  return out;
}

Table validation_table(std::span<const NullSummary> rows) {
  Table t;
  t.columns = {"d", "s", "scale", "gamma", "mean", "sd", "replicates"};
  for (const NullSummary& r : rows) {
    t.add_row({static_cast<std::int64_t>(r.d), r.scale_label, r.scale, r.gamma, r.mean, r.sd,
               static_cast<std::int64_t>(r.replicates)});
  }
  return t;
}

std::vector<ThresholdRow> threshold_table(std::span<const std::size_t> dims, std::span<const Scale> scales,
                                          std::span<const SampleType> sample_types, std::size_t n, double alpha,
                                          std::size_t replicates, std::uint64_t seed) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  std::vector<ThresholdRow> out;
  for (std::size_t d : dims) {
    std::vector<double> gammas;
    for (const Scale& s : scales) gammas.push_back(s.gamma(d, n));
    for (SampleType type : sample_types) {
      NullSpec spec;
      spec.d = d;
      spec.n = n;
      spec.kernel = KernelSpec(KernelFamily::RBF, gammas.front());
      spec.sample_type = type;
      spec.replicates = replicates;
      spec.seed = seed;
      const auto dists = simulate_null_widths(spec, gammas);
      for (std::size_t i = 0; i < scales.size(); ++i) {
        out.push_back({d, type, scales[i].label, gamma_to_scale(gammas[i], d), gammas[i], alpha,
                       dists[i].threshold(alpha), replicates});
      }
    }
  }
  return out;
}

Table thresholds_to_table(std::span<const ThresholdRow> rows) {
  Table t;
  t.columns = {"d", "sample_type", "s", "scale", "gamma", "alpha", "threshold", "replicates"};
  for (const ThresholdRow& r : rows) {
    t.add_row({static_cast<std::int64_t>(r.d), to_string(r.sample_type), r.scale_label, r.scale, r.gamma, r.alpha,
               r.threshold, static_cast<std::int64_t>(r.replicates)});
  }
  return t;
}

BoxSummary box_summary(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("box summary of an empty sample");
  std::sort(values.begin(), values.end());
  return {values.front(), empirical_quantile(values, 0.25), empirical_quantile(values, 0.5),
          empirical_quantile(values, 0.75), values.back()};
}

std::vector<OutlierResult> outlier_experiment(std::span<const MethodScales> grid, std::size_t d, std::size_t n,
                                              double magnitude, std::size_t replicates, std::uint64_t seed) {
  const auto cells = tau_cells(grid, AlternativeSpec::outlier_injected(d, n, magnitude), replicates, seed);
  std::vector<OutlierResult> out;
  for (const MethodScales& ms : grid) {
    const TauResult* best = nullptr;
    for (const TauResult& c : cells) {
      if (c.method == ms.method && (!best || c.tau > best->tau)) best = &c;
    }
    if (!best) continue;
    out.push_back({*best, box_summary(best->values1), box_summary(best->values2)});
  }
  return out;
}

Table outlier_table(std::span<const OutlierResult> rows) {
  Table t;
  t.columns = {"method", "d", "s", "gamma", "tau", "mean1", "sd1", "mean2", "sd2",
               "clean_min", "clean_q1", "clean_median", "clean_q3", "clean_max",
               "outlier_min", "outlier_q1", "outlier_median", "outlier_q3", "outlier_max", "replicates"};
  for (const OutlierResult& r : rows) {
    const TauResult& b = r.best;
    t.add_row({to_string(b.method), static_cast<std::int64_t>(b.d), b.scale_label, b.gamma, b.tau, b.mean1, b.sd1,
               b.mean2, b.sd2, r.clean.min, r.clean.q1, r.clean.median, r.clean.q3, r.clean.max, r.outlier.min,
               r.outlier.q1, r.outlier.median, r.outlier.q3, r.outlier.max, static_cast<std::int64_t>(b.replicates)});
  }
  return t;
}

DeltaStudy outlier_delta_study(std::size_t d, std::size_t n, double magnitude, double gamma, std::size_t replicates,
                               std::uint64_t seed) {
  if (replicates < 2) throw std::invalid_argument("delta study needs at least two replicates");
  std::vector<double> clean(replicates), modified(replicates), delta(replicates);
  const Vector far = Vector::Constant(static_cast<Eigen::Index>(d), magnitude);
  parallel_for(replicates, [&](std::size_t r) {
    Rng rng = substream(seed, {d, r, 4});
    const Sample x(standard_normal(n, d, rng));
    delta[r] = outlier_delta(x, 0, far, gamma);
    clean[r] = mmd_u_closed(x, gamma);
    modified[r] = clean[r] + delta[r];
  });
  const Moments md = moments(delta);
  const Moments mc = moments(clean);
  const Moments mm = moments(modified);
  return {md.mean, md.sd, 0.5 * (mc.sd + mm.sd), replicates};
}

}  // namespace smmd
