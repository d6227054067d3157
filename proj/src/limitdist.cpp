#include "snreg/limitdist.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <thread>

#include "snreg/errors.hpp"
#include "snreg/rng.hpp"
#include "snreg/stats.hpp"

namespace snreg {

namespace {

void validate_params(int ell, double epsilon, int grid_steps,
                     int replications) {
  if (ell < 1) throw ConfigError("ell must be >= 1");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw ConfigError("epsilon must lie in (0,1)");
  if (grid_steps < 100) throw ConfigError("grid_steps must be >= 100");
  if (replications < 1000) throw ConfigError("replications must be >= 1000");
  if (std::floor(grid_steps * epsilon + 1e-9) < 1.0)
    throw ConfigError("floor(grid_steps * epsilon) must be >= 1");
}

// One draw of W'(1) V^{-1} W(1). Retries with fresh increments when the
// Riemann-sum V is numerically singular (vanishing probability for G >= 100).
// The bridge integral is accumulated in one pass through the identity
//   sum_g [W_g - s_g W_G][.]' =
//     sum WW' - (sum sW) W_G' - W_G (sum sW)' + (sum s^2) W_G W_G'.
double one_sample(int ell, double epsilon, int grid_steps,
                  NormalSampler& normal) {
  const int g_low =
      static_cast<int>(std::ceil(grid_steps * epsilon - 1e-9));
  const double gd = static_cast<double>(grid_steps);
  const double sd = std::sqrt(1.0 / gd);

  if (ell == 1) {
    for (int attempt = 0; attempt < 4; ++attempt) {
      double w = 0.0, sum_ww = 0.0, sum_sw = 0.0, sum_s2 = 0.0;
      for (int g = 1; g <= grid_steps; ++g) {
        w += sd * normal();
        if (g < g_low) continue;
        const double s = static_cast<double>(g) / gd;
        sum_ww += w * w;
        sum_sw += s * w;
        sum_s2 += s * s;
      }
      const double v = (sum_ww - 2.0 * sum_sw * w + sum_s2 * w * w) / gd;
      if (v > 0.0 && std::isfinite(v)) return w * w / v;
    }
    throw NumericError("singular Riemann-sum V after 3 retries");
  }

  Eigen::VectorXd w(ell), sum_sw(ell);
  Eigen::MatrixXd sum_ww(ell, ell);
  for (int attempt = 0; attempt < 4; ++attempt) {
    w.setZero();
    sum_sw.setZero();
    sum_ww.setZero();
    double sum_s2 = 0.0;
    for (int g = 1; g <= grid_steps; ++g) {
      for (int c = 0; c < ell; ++c) w[c] += sd * normal();
      if (g < g_low) continue;
      const double s = static_cast<double>(g) / gd;
      sum_ww.selfadjointView<Eigen::Lower>().rankUpdate(w, 1.0);
      sum_sw += s * w;
      sum_s2 += s * s;
    }

    Eigen::MatrixXd v(sum_ww.selfadjointView<Eigen::Lower>());
    v.noalias() -= sum_sw * w.transpose();
    v.noalias() -= w * sum_sw.transpose();
    v.noalias() += sum_s2 * (w * w.transpose());
    v /= gd;

    Eigen::LLT<Eigen::MatrixXd> llt(v);
    if (llt.info() == Eigen::Success) {
      const double value = w.dot(llt.solve(w));
      if (std::isfinite(value) && value >= 0.0) return value;
    }
  }
  throw NumericError("singular Riemann-sum V after 3 retries");
}

std::uint64_t fnv1a64(const double* data, std::size_t count) {
  std::uint64_t h = 1469598103934665603ull;
  const auto* bytes = reinterpret_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < count * sizeof(double); ++i) {
    h ^= bytes[i];
    h *= 1099511628211ull;
  }
  return h;
}

int resolve_threads(int threads) {
  if (threads > 0) return threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

std::vector<double> simulate_w_samples(int ell, double epsilon,
                                       int grid_steps, int replications,
                                       std::uint64_t seed, int threads) {
  validate_params(ell, epsilon, grid_steps, replications);
  std::vector<double> samples(static_cast<std::size_t>(replications));

  const int nthreads = std::min(resolve_threads(threads), replications);
  auto worker = [&](int first) {
    for (int i = first; i < replications; i += nthreads) {
      NormalSampler normal(mix_seed(seed, static_cast<std::uint64_t>(i)));
      samples[static_cast<std::size_t>(i)] =
          one_sample(ell, epsilon, grid_steps, normal);
    }
  };
  if (nthreads <= 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }

  std::sort(samples.begin(), samples.end());
  return samples;
}

double CriticalValueTable::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0))
    throw ConfigError("quantile probability must lie in (0,1)");
  for (const auto& [prob, value] : quantiles)
    if (std::fabs(prob - p) < 1e-12) return value;
  if (!samples.empty()) return sorted_quantile(samples, p);
  throw ConfigError("probability " + std::to_string(p) +
                    " is not tabulated and the table holds no samples");
}

CriticalValueTable build_critical_value_table(
    int ell, double epsilon, int grid_steps, int replications,
    std::uint64_t seed, const std::vector<double>& probabilities,
    int threads) {
  CriticalValueTable table;
  table.ell = ell;
  table.epsilon = epsilon;
  table.grid_steps = grid_steps;
  table.replications = replications;
  table.seed = seed;
  table.samples =
      simulate_w_samples(ell, epsilon, grid_steps, replications, seed,
                         threads);
  table.samples_digest = fnv1a64(table.samples.data(), table.samples.size());
  for (double p : probabilities)
    table.quantiles.emplace_back(p, sorted_quantile(table.samples, p));
  std::sort(table.quantiles.begin(), table.quantiles.end());
  return table;
}

double critical_value(const CriticalValueTable& table, double nu) {
  if (!(nu > 0.0 && nu < 1.0))
    throw ConfigError("significance level nu must lie in (0,1); nu = 0 has "
                      "no finite critical value");
  return table.quantile(1.0 - nu);
}

namespace {
constexpr char kMagic[4] = {'S', 'N', 'C', 'V'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
void get(std::ifstream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
}
}  // namespace

void save_table(const std::string& path, const CriticalValueTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out.write(kMagic, 4);
  put(out, kVersion);
  put(out, static_cast<std::uint32_t>(table.ell));
  put(out, table.epsilon);
  put(out, static_cast<std::uint32_t>(table.grid_steps));
  put(out, static_cast<std::uint32_t>(table.replications));
  put(out, table.seed);
  put(out, table.samples_digest);
  put(out, static_cast<std::uint32_t>(table.quantiles.size()));
  for (const auto& [p, v] : table.quantiles) {
    put(out, p);
    put(out, v);
  }
  put(out, static_cast<std::uint64_t>(table.samples.size()));
  out.write(reinterpret_cast<const char*>(table.samples.data()),
            static_cast<std::streamsize>(table.samples.size() *
                                         sizeof(double)));
  if (!out) throw DataError("write to '" + path + "' failed");
}

CriticalValueTable load_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw DataError("'" + path + "' is not a critical-value table");
  std::uint32_t version = 0;
  get(in, version);
  if (version != kVersion)
    throw DataError("unsupported table version " + std::to_string(version));
  CriticalValueTable table;
  std::uint32_t ell = 0, grid = 0, reps = 0, nq = 0;
  get(in, ell);
  get(in, table.epsilon);
  get(in, grid);
  get(in, reps);
  get(in, table.seed);
  get(in, table.samples_digest);
  get(in, nq);
  table.ell = static_cast<int>(ell);
  table.grid_steps = static_cast<int>(grid);
  table.replications = static_cast<int>(reps);
  table.quantiles.resize(nq);
  for (auto& [p, v] : table.quantiles) {
    get(in, p);
    get(in, v);
  }
  std::uint64_t count = 0;
  get(in, count);
  table.samples.resize(count);
  in.read(reinterpret_cast<char*>(table.samples.data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) throw DataError("'" + path + "' is truncated");
  if (!table.samples.empty() &&
      fnv1a64(table.samples.data(), table.samples.size()) !=
          table.samples_digest)
    throw DataError("'" + path + "' failed its checksum");
  return table;
}

std::string default_cache_dir() {
  if (const char* env = std::getenv("SNREG_CACHE_DIR")) return env;
  if (const char* xdg = std::getenv("XDG_CACHE_HOME"))
    return std::string(xdg) + "/snreg";
  if (const char* home = std::getenv("HOME"))
    return std::string(home) + "/.cache/snreg";
  return ".snreg-cache";
}

CriticalValueTable get_or_build_table(const std::string& cache_dir, int ell,
                                      double epsilon, int grid_steps,
                                      int replications, std::uint64_t seed,
                                      int threads) {
  std::string path;
  if (!cache_dir.empty()) {
    char name[160];
    std::snprintf(name, sizeof(name),
                  "cv_ell%d_eps%.6f_g%d_r%d_seed%llu.bin", ell, epsilon,
                  grid_steps, replications,
                  static_cast<unsigned long long>(seed));
    path = cache_dir + "/" + name;
    std::error_code ec;
    if (std::filesystem::exists(path, ec)) {
      const auto table = load_table(path);
      if (table.ell == ell && table.grid_steps == grid_steps &&
          table.replications == replications && table.seed == seed &&
          std::fabs(table.epsilon - epsilon) < 1e-12)
        return table;
    }
  }

  auto table = build_critical_value_table(ell, epsilon, grid_steps,
                                          replications, seed,
                                          {0.90, 0.95, 0.99}, threads);
  if (!path.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(cache_dir, ec);
    try {
      const std::string tmp = path + ".tmp";
      save_table(tmp, table);
      std::filesystem::rename(tmp, path, ec);
    } catch (const DataError&) {
      // Caching is best effort; the freshly built table is still returned.
    }
  }
  return table;
}

}  // namespace snreg
