#include "smmd/testing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "smmd/estimators.hpp"
#include "smmd/normalization.hpp"
#include "smmd/parallel.hpp"
#include "smmd/random.hpp"

namespace smmd {

namespace {

constexpr const char* kCacheFormat = "smmd-null-v1";
constexpr std::size_t kMaxAttempts = 1000;

nlohmann::json spec_json(const NullSpec& spec) {
  return {
      {"d", spec.d},
      {"n", spec.n},
      {"kernel", to_string(spec.kernel.family())},
      {"gamma", spec.kernel.gamma()},
      {"sample_type", to_string(spec.sample_type)},
      {"replicates", spec.replicates},
      {"seed", spec.seed},
  };
}

NullSpec spec_from_json(const nlohmann::json& j) {
  NullSpec spec;
  spec.d = j.at("d").get<std::size_t>();
  spec.n = j.at("n").get<std::size_t>();
  spec.kernel = KernelSpec(kernel_family_from_string(j.at("kernel").get<std::string>()), j.at("gamma").get<double>());
  spec.sample_type = sample_type_from_string(j.at("sample_type").get<std::string>());
  spec.replicates = j.at("replicates").get<std::size_t>();
  spec.seed = j.at("seed").get<std::uint64_t>();
  return spec;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// One null replicate, redrawn while whitening reports a near-singular
// covariance. Returns the transformed sample and the number of redraws.
std::pair<SampleGeometry, std::size_t> draw_replicate(const NullSpec& spec, std::size_t replicate) {
  for (std::size_t attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Rng rng = substream(spec.seed, {replicate, attempt});
    Sample raw(standard_normal(spec.n, spec.d, rng));
    try {
      return {geometry(apply_sample_type(raw, spec.sample_type)), attempt};
    } catch (const NumericalError&) {
      continue;
    }
  }
  throw NumericalError("null replicate " + std::to_string(replicate) + " could not be whitened after " +
                       std::to_string(kMaxAttempts) + " draws");
}

}  // namespace

std::string to_string(SampleType type) {
  switch (type) {
    case SampleType::Original:
      return "original";
    case SampleType::CenteredScaled:
      return "centered_scaled";
    case SampleType::CenteredWhitened:
      return "centered_whitened";
  }
  return "unknown";
}

SampleType sample_type_from_string(const std::string& name) {
  if (name == "original") return SampleType::Original;
  if (name == "centered_scaled" || name == "centered+scaled") return SampleType::CenteredScaled;
  if (name == "centered_whitened" || name == "centered+whitened") return SampleType::CenteredWhitened;
  throw std::invalid_argument("unknown sample type '" + name + "'");
}

std::string to_string(Composite composite) {
  switch (composite) {
    case Composite::SimpleStandard:
      return "simple";
    case Composite::DiagonalCov:
      return "diagonal";
    case Composite::FullCov:
      return "full";
  }
  return "unknown";
}

Composite composite_from_string(const std::string& name) {
  if (name == "simple") return Composite::SimpleStandard;
  if (name == "diagonal") return Composite::DiagonalCov;
  if (name == "full") return Composite::FullCov;
  throw std::invalid_argument("unknown hypothesis '" + name + "' (expected simple, diagonal or full)");
}

SampleType null_sample_type(Composite composite) {
  switch (composite) {
    case Composite::SimpleStandard:
      return SampleType::Original;
    case Composite::DiagonalCov:
      return SampleType::CenteredScaled;
    case Composite::FullCov:
      return SampleType::CenteredWhitened;
  }
  return SampleType::Original;
}

Sample apply_sample_type(const Sample& sample, SampleType type) {
  switch (type) {
    case SampleType::Original:
      return sample;
    case SampleType::CenteredScaled:
      return center_scale(sample);
    case SampleType::CenteredWhitened:
      return center_whiten(sample);
  }
  return sample;
}

void NullSpec::validate() const {
  if (d < 1) throw std::invalid_argument("null spec: d must be >= 1");
  if (n < 2) throw std::invalid_argument("null spec: n must be >= 2");
  if (replicates < 1) throw std::invalid_argument("null spec: replicates must be >= 1");
  if (sample_type == SampleType::CenteredWhitened && n < d + 1) {
    throw std::invalid_argument("null spec: centered+whitened requires n >= d + 1");
  }
}

bool NullSpec::same_distribution(const NullSpec& other) const {
  return d == other.d && n == other.n && kernel == other.kernel && sample_type == other.sample_type;
}

NullDistribution::NullDistribution(NullSpec spec, std::vector<double> values, std::size_t redraws)
    : spec_(std::move(spec)), values_(std::move(values)), redraws_(redraws) {
  if (values_.empty()) throw std::invalid_argument("null distribution has no values");
  std::sort(values_.begin(), values_.end());
}

double NullDistribution::threshold(double alpha) const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  return empirical_quantile(values_, 1.0 - alpha);
}

double empirical_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile probability must lie in [0, 1]");
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double threshold(const NullDistribution& dist, double alpha) { return dist.threshold(alpha); }

std::vector<NullDistribution> simulate_null_widths(const NullSpec& base, std::span<const double> gammas) {
  base.validate();
  std::vector<KernelSpec> kernels;
  kernels.reserve(gammas.size());
  for (double g : gammas) kernels.emplace_back(base.kernel.family(), g);
  if (base.kernel.family() != KernelFamily::RBF) {
    throw std::invalid_argument("closed-form null distributions exist for the RBF kernel only");
  }

  const std::size_t reps = base.replicates;
  std::vector<std::vector<double>> values(gammas.size(), std::vector<double>(reps));
  std::vector<std::size_t> redraws(reps, 0);
  parallel_for(reps, [&](std::size_t r) {
    auto [geom, extra] = draw_replicate(base, r);
    redraws[r] = extra;
    for (std::size_t g = 0; g < gammas.size(); ++g) values[g][r] = smmd(geom, gammas[g]);
  });

  std::size_t total_redraws = 0;
  for (std::size_t x : redraws) total_redraws += x;
  if (total_redraws * 100 > reps) {
    throw NumericalError("whitening failed for " + std::to_string(total_redraws) + " of " + std::to_string(reps) +
                         " null replicates (more than 1%)");
  }

  std::vector<NullDistribution> out;
  out.reserve(gammas.size());
  for (std::size_t g = 0; g < gammas.size(); ++g) {
    NullSpec spec = base;
    spec.kernel = kernels[g];
    out.emplace_back(std::move(spec), std::move(values[g]), total_redraws);
  }
  return out;
}

NullDistribution simulate_null(const NullSpec& spec) {
  const double gamma = spec.kernel.gamma();
  return std::move(simulate_null_widths(spec, std::span<const double>(&gamma, 1)).front());
}

TestResult test_normality(const Sample& sample, const KernelSpec& kernel, Composite composite, double alpha,
                          const NullDistribution& null_cache) {
  const NullSpec& spec = null_cache.spec();
  const SampleType wanted = null_sample_type(composite);
  if (spec.sample_type != wanted) {
    throw std::invalid_argument("null distribution was simulated for sample type " + to_string(spec.sample_type) +
                                " but the " + to_string(composite) + " hypothesis needs " + to_string(wanted));
  }
  if (spec.d != sample.dim() || spec.n != sample.size()) {
    throw std::invalid_argument("null distribution was simulated for d=" + std::to_string(spec.d) +
                                ", n=" + std::to_string(spec.n) + " but the sample has d=" +
                                std::to_string(sample.dim()) + ", n=" + std::to_string(sample.size()));
  }
  if (!(spec.kernel == kernel)) throw std::invalid_argument("null distribution was simulated for a different kernel");
  if (spec.replicates < 1000) throw std::invalid_argument("thresholds need at least 1000 null replicates");

  const double stat = smmd(apply_sample_type(sample, wanted), kernel.gamma());
  const double thr = null_cache.threshold(alpha);
  return {stat, thr, stat > thr};
}

std::string artifact_version() { return "0.1.0"; }

std::string cache_key(const NullSpec& spec) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(spec_json(spec).dump())));
  return buf;
}

std::filesystem::path default_cache_dir() {
  if (const char* dir = std::getenv("SMMD_CACHE_DIR"); dir && *dir) return dir;
  if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg) return std::filesystem::path(xdg) / "smmd";
  if (const char* home = std::getenv("HOME"); home && *home) return std::filesystem::path(home) / ".cache" / "smmd";
  return ".smmd-cache";
}

std::filesystem::path cache_path(const std::filesystem::path& dir, const NullSpec& spec) {
  return dir / ("null-" + cache_key(spec) + ".txt");
}

void write_null_distribution(const std::filesystem::path& path, const NullDistribution& dist) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  nlohmann::json header = spec_json(dist.spec());
  header["format"] = kCacheFormat;
  header["artifact_version"] = artifact_version();
  header["redraws"] = dist.redraws();

  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << header.dump() << '\n';
    char buf[40];
    for (double v : dist.values()) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << buf << '\n';
    }
    if (!out) throw std::runtime_error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

NullDistribution read_null_distribution(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open null distribution file " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty file");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path.string() + ": bad header: " + e.what());
  }
  if (header.value("format", "") != kCacheFormat) throw std::runtime_error(path.string() + ": not a null cache file");
  NullSpec spec = spec_from_json(header);

  std::vector<double> values;
  values.reserve(spec.replicates);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    char* end = nullptr;
    const double v = std::strtod(line.c_str(), &end);
    if (end == line.c_str() || *end != '\0') {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": bad value '" + line + "'");
    }
    values.push_back(v);
  }
  if (values.size() != spec.replicates) {
    throw std::runtime_error(path.string() + ": expected " + std::to_string(spec.replicates) + " values, found " +
                             std::to_string(values.size()));
  }
  return NullDistribution(std::move(spec), std::move(values), header.value("redraws", std::size_t{0}));
}

NullDistribution load_or_simulate(const NullSpec& spec, const std::filesystem::path& dir) {
  const auto path = cache_path(dir, spec);
  if (std::filesystem::exists(path)) {
    NullDistribution dist = read_null_distribution(path);
    if (dist.spec() == spec) return dist;
  }
  NullDistribution dist = simulate_null(spec);
  write_null_distribution(path, dist);
  return dist;
}

std::optional<NullDistribution> find_cached(const NullSpec& spec, const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) return std::nullopt;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (entry.is_regular_file() && name.starts_with("null-") && name.ends_with(".txt")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::optional<NullDistribution> best;
  for (const auto& f : files) {
    try {
      NullDistribution dist = read_null_distribution(f);
      if (!dist.spec().same_distribution(spec)) continue;
      if (!best || dist.spec().replicates > best->spec().replicates) best = std::move(dist);
    } catch (const std::exception&) {
      continue;
    }
  }
  return best;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("KS test needs two non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double stat = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    stat = std::max(stat, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  const double lambda = (ne + 0.12 + 0.11 / ne) * stat;
  // Kolmogorov tail series Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2);
  // returns 1 when the series has not converged (lambda near zero).
  double p = 1.0;
  double sign = 2.0;
  double sum = 0.0;
  double prev = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) <= 1e-3 * prev || std::abs(term) <= 1e-8 * sum) {
      p = std::clamp(sum, 0.0, 1.0);
      break;
    }
    sign = -sign;
    prev = std::abs(term);
  }
  return {stat, p};
}

}  // namespace smmd
