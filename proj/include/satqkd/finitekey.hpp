// Finite-key length for entanglement-based QKD: entropy and epsilon
// functions, the alpha-free key-length bound, the (beta, nu, xi) grid
// search and the QBER-threshold block construction.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "satqkd/counts.hpp"

namespace satqkd {

enum class ThresholdModel {
  /// Admit bins in QBER order while the running weighted QBER stays <= delta.
  weighted,
  /// Admit every bin with QBER <= delta; the bound sees the worst admitted bin.
  max,
};

std::string to_string(ThresholdModel m);
ThresholdModel parse_threshold_model(const std::string& text);

struct SecurityConfig {
  int s = 6;
  double ec_efficiency = 1.19;
  int grid_n = 64;
  int n_thresholds = 32;
  ThresholdModel threshold_model = ThresholdModel::weighted;
  double beta_min = 1e-4;

  double epsilon_qkd() const;
  /// Correctness parameter log2(10^{s+2}).
  double t() const;

  std::vector<std::string> violations() const;
  bool operator==(const SecurityConfig&) const = default;
};

double binary_entropy(double x);

/// Gamma_{x,m} = 1/(x+1) + 1/(m-x+1).
double sampling_gamma(double x, double m);

/// Parameter-estimation failure probability. Throws std::invalid_argument
/// unless 0 < xi < nu, k + n = m and delta + xi <= 1.
double epsilon_pe(double m, double k, double n, double delta, double nu, double xi);

/// 1/2 sqrt(2^{-n(1-h2(delta+nu)) + r + t + ell}) with r = ec n h2(delta).
double epsilon_pa(double n, double delta, double nu, double ell, const SecurityConfig& sec);

/// Floor of the key-length bound, clamped at 0. Empty when the epsilon
/// budget 10^-s - 2^-t - 2 eps_pe is not positive.
std::optional<std::int64_t> skl_upper_bound(double n, double delta, double nu, double eps_pe,
                                            const SecurityConfig& sec);

struct BlockStats {
  std::int64_t m = 0;
  double qber = 0.0;
  std::vector<std::size_t> bins;
};

struct SklResult {
  std::int64_t ell = 0;
  double beta = 0.0;
  double nu = 0.0;
  double xi = 0.0;
  double delta = 0.0;  // threshold that built the block
  double qber = 0.0;   // QBER seen by the key bound
  std::int64_t k = 0;
  std::int64_t n = 0;
  std::int64_t m = 0;
  double eps_pe = 0.0;
  double eps_pa = 0.0;
  /// At least one grid point had a positive epsilon budget.
  bool feasible = false;

  bool operator==(const SklResult&) const = default;
};

/// Search axes for a given QBER. beta is log-spaced on [beta_min, 1/2];
/// nu_j = (j+1)/(N+1) (1/2 - delta); xi_i = (i+1)/(N+1) nu_j.
struct KeyGrid {
  std::vector<double> beta;
  std::vector<double> nu_fraction;  // (j+1)/(N+1), shared by nu and xi

  static KeyGrid make(const SecurityConfig& sec);
};

/// Best key length over the grid; ties go to the smallest (beta, nu, xi).
/// OpenMP over beta with a per-thread best and an ordered final reduction.
SklResult optimise_key_length(const BlockStats& block, const SecurityConfig& sec);

/// Plain triple loop, single thread, no pruning. Reference for tests and
/// the benchmark.
SklResult optimise_key_length_serial(const BlockStats& block, const SecurityConfig& sec);

/// Block admitted at threshold `delta` under `model`.
BlockStats build_block(const CountsProfile& counts, double delta, ThresholdModel model);

struct ThresholdSweep {
  SklResult best;
  std::vector<SklResult> curve;  // one entry per sampled threshold
  double delta_lo = 0.0;
  double delta_hi = 0.0;
};

/// Thresholds sampled uniformly between the best bin QBER and the QBER at
/// which every visible bin is admitted.
ThresholdSweep threshold_sweep(const CountsProfile& counts, const SecurityConfig& sec);

}  // namespace satqkd
