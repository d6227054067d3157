#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace snreg {

// Simulated quantiles of the pivotal limit W(A), keyed by the contrast rank
// ell (the law depends on A only through its rank), the trim fraction, the
// Brownian grid size, the replication count and the seed.
struct CriticalValueTable {
  int ell = 0;
  double epsilon = 0.0;
  int grid_steps = 0;
  int replications = 0;
  std::uint64_t seed = 0;
  std::vector<std::pair<double, double>> quantiles;  // (probability, value)
  std::vector<double> samples;                       // sorted ascending
  std::uint64_t samples_digest = 0;

  // Order-statistic quantile from the stored sample, or the tabulated value.
  double quantile(double p) const;
};

// Draws `replications` samples of W = W_l'(1) V^{-1} W_l(1) where V is the
// right-endpoint Riemann sum of the bridge outer product over the grid
// {ceil(G*eps)/G, ..., 1}. Deterministic for fixed (seed, parameters): each
// sample owns the derived stream mix_seed(seed, i), so the sorted output is
// identical for any thread count.
std::vector<double> simulate_w_samples(int ell, double epsilon,
                                       int grid_steps, int replications,
                                       std::uint64_t seed, int threads = 0);

CriticalValueTable build_critical_value_table(
    int ell, double epsilon, int grid_steps, int replications,
    std::uint64_t seed,
    const std::vector<double>& probabilities = {0.90, 0.95, 0.99},
    int threads = 0);

// The (1-nu)-quantile used by the SN test. nu must lie in (0,1).
double critical_value(const CriticalValueTable& table, double nu);

// Versioned binary cache file: header (version, ell, epsilon, G, R, seed,
// digest, quantile rows, count) followed by the sorted samples. A cache hit
// is bit-exact.
void save_table(const std::string& path, const CriticalValueTable& table);
CriticalValueTable load_table(const std::string& path);

// Default simulation parameters for tables built on demand.
inline constexpr int kDefaultCvGridSteps = 2000;
inline constexpr int kDefaultCvReplications = 100000;
inline constexpr std::uint64_t kDefaultCvSeed = 20240901;

// Cache directory resolution: SNREG_CACHE_DIR, else XDG_CACHE_HOME/snreg,
// else HOME/.cache/snreg, else ./.snreg-cache.
std::string default_cache_dir();

// Loads the matching table from `cache_dir` or simulates and stores it.
// An empty cache_dir disables caching.
CriticalValueTable get_or_build_table(const std::string& cache_dir, int ell,
                                      double epsilon,
                                      int grid_steps = kDefaultCvGridSteps,
                                      int replications = kDefaultCvReplications,
                                      std::uint64_t seed = kDefaultCvSeed,
                                      int threads = 0);

}  // namespace snreg
