#include "satqkd/finitekey.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

#include "keysearch_kernel.hpp"
#include "satqkd/parallel.hpp"

namespace satqkd {

std::string to_string(ThresholdModel m) { return m == ThresholdModel::weighted ? "weighted" : "max"; }

ThresholdModel parse_threshold_model(const std::string& text) {
  if (text == "weighted") return ThresholdModel::weighted;
  if (text == "max") return ThresholdModel::max;
  throw std::invalid_argument("threshold_model must be 'weighted' or 'max', got '" + text + "'");
}

double SecurityConfig::epsilon_qkd() const { return std::pow(10.0, -s); }

double SecurityConfig::t() const { return (s + 2) * std::log2(10.0); }

std::vector<std::string> SecurityConfig::violations() const {
  std::vector<std::string> out;
  if (s < 1) out.push_back(fmt::format("security_s must be >= 1 (got {})", s));
  if (grid_n < 8) out.push_back(fmt::format("grid_n must be >= 8 (got {})", grid_n));
  if (n_thresholds < 1) out.push_back(fmt::format("n_thresholds must be >= 1 (got {})", n_thresholds));
  if (!(ec_efficiency >= 1.0)) out.push_back(fmt::format("ec_efficiency must be >= 1 (got {})", ec_efficiency));
  if (!(beta_min > 0.0 && beta_min < 0.5)) out.push_back(fmt::format("beta_min must lie in (0, 0.5) (got {})", beta_min));
  return out;
}

double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument(fmt::format("binary_entropy: x = {} outside [0, 1]", x));
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double sampling_gamma(double x, double m) { return 1.0 / (x + 1.0) + 1.0 / (m - x + 1.0); }

double epsilon_pe(double m, double k, double n, double delta, double nu, double xi) {
  if (!(xi > 0.0 && xi < nu)) throw std::invalid_argument("epsilon_pe requires 0 < xi < nu");
  if (k + n != m) throw std::invalid_argument("epsilon_pe requires k + n = m");
  if (!(delta >= 0.0 && delta + xi <= 1.0)) throw std::invalid_argument("epsilon_pe requires 0 <= delta, delta + xi <= 1");
  const double nu_p = nu - xi;
  const double e1 = std::exp(-2.0 * m * k * xi * xi / (n + 1.0));
  const double e2 = std::exp(-2.0 * sampling_gamma(m * (delta + xi), m) * ((n * nu_p) * (n * nu_p) - 1.0));
  return std::sqrt(e1 + e2);
}

double epsilon_pa(double n, double delta, double nu, double ell, const SecurityConfig& sec) {
  const double r = sec.ec_efficiency * n * binary_entropy(delta);
  return 0.5 * std::sqrt(std::exp2(-n * (1.0 - binary_entropy(delta + nu)) + r + sec.t() + ell));
}

std::optional<std::int64_t> skl_upper_bound(double n, double delta, double nu, double eps_pe,
                                            const SecurityConfig& sec) {
  const double t = sec.t();
  const double arg = sec.epsilon_qkd() - std::exp2(-t) - 2.0 * eps_pe;
  if (!(arg > 0.0)) return std::nullopt;
  const double r = sec.ec_efficiency * n * binary_entropy(delta);
  const double ub = std::log2(4.0 * arg * arg) + n * (1.0 - binary_entropy(delta + nu)) - r - t;
  return ub > 0.0 ? static_cast<std::int64_t>(std::floor(ub)) : 0;
}

KeyGrid KeyGrid::make(const SecurityConfig& sec) {
  KeyGrid g;
  const int n = sec.grid_n;
  const double lo = std::log(sec.beta_min), hi = std::log(0.5);
  for (int i = 0; i < n; ++i) {
    // Pin the end points so beta = 1/2 is hit exactly.
    const double b = i == 0 ? sec.beta_min : i == n - 1 ? 0.5 : std::exp(lo + (hi - lo) * i / (n - 1));
    g.beta.push_back(b);
    g.nu_fraction.push_back(static_cast<double>(i + 1) / (n + 1));
  }
  return g;
}

namespace {

struct Candidate {
  bool found = false;
  std::size_t index = 0;  // flattened (beta, nu, xi); lexicographic order
  detail::KeySearch::Point point;

  bool beats(const Candidate& o) const {
    if (!found) return false;
    if (!o.found) return true;
    if (point.ell != o.point.ell) return point.ell > o.point.ell;
    return index < o.index;
  }
};

}  // namespace

SklResult optimise_key_length(const BlockStats& block, const SecurityConfig& sec) {
  if (!detail::searchable(block)) return detail::empty_result(block);
  const detail::KeySearch ks(block, sec);
  const std::size_t nb = ks.beta.size(), nj = ks.nu.size(), ni = ks.frac.size();

  std::vector<Candidate> local(static_cast<std::size_t>(parallel::max_threads()));
  const auto nb_signed = static_cast<std::ptrdiff_t>(nb);
  SATQKD_OMP(parallel)
  {
    Candidate& mine = local[static_cast<std::size_t>(parallel::thread_id())];
    SATQKD_OMP(for schedule(dynamic, 1))
    for (std::ptrdiff_t bs = 0; bs < nb_signed; ++bs) {
      const auto b = static_cast<std::size_t>(bs);
      for (std::size_t j = 0; j < nj; ++j) {
        // A thread visits indices in increasing order, so a point can only
        // replace its local best with a strictly larger ell.
        if (mine.found) {
          const double ceiling = ks.bound_ceiling(b, j);
          if (!(ceiling >= static_cast<double>(mine.point.ell + 1))) continue;
        }
        for (std::size_t i = 0; i < ni; ++i) {
          const auto p = ks.evaluate(b, j, i);
          if (!p.feasible) continue;
          if (!mine.found || p.ell > mine.point.ell) {
            mine.found = true;
            mine.index = (b * nj + j) * ni + i;
            mine.point = p;
          }
        }
      }
    }
  }

  Candidate best;
  for (const auto& c : local)
    if (c.beats(best)) best = c;
  if (!best.found) return detail::empty_result(block);
  const std::size_t i = best.index % ni;
  const std::size_t j = (best.index / ni) % nj;
  const std::size_t b = best.index / (ni * nj);
  return ks.result(b, j, i, best.point, sec);
}

// ---------------------------------------------------------------------------
// Block construction

namespace {

struct SortedBins {
  std::vector<std::size_t> order;  // visible bins by (QBER, index)
  std::vector<double> qber;        // per entry of `order`
  std::vector<double> running;     // weighted QBER of the prefix ending here
};

SortedBins sort_bins(const CountsProfile& c) {
  SortedBins s;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c.visible[i] && c.d[i] > 0.0) s.order.push_back(i);
  std::stable_sort(s.order.begin(), s.order.end(),
                   [&](std::size_t a, std::size_t b) { return c.qber(a) < c.qber(b); });
  for (std::size_t i : s.order) s.qber.push_back(c.qber(i));
  // Bins with equal QBER enter together, so each tie group shares the
  // running value at its end. In exact arithmetic that value lies between
  // the previous one and the group's own QBER; clamp so rounding keeps it there.
  double sd = 0.0, se = 0.0;
  for (std::size_t p = 0; p < s.order.size();) {
    std::size_t end = p;
    while (end < s.order.size() && s.qber[end] == s.qber[p]) {
      sd += c.d[s.order[end]];
      se += c.e[s.order[end]];
      ++end;
    }
    double r = std::min(se / sd, s.qber[p]);
    if (!s.running.empty()) r = std::max(r, s.running.back());
    s.running.resize(end, r);
    p = end;
  }
  return s;
}

BlockStats block_from_prefix(const CountsProfile& c, const SortedBins& s, std::size_t count, ThresholdModel model) {
  BlockStats b;
  if (count == 0) return b;
  double coincidences = 0.0;
  for (std::size_t p = 0; p < count; ++p) {
    b.bins.push_back(s.order[p]);
    coincidences += c.coincidences[s.order[p]];
  }
  std::sort(b.bins.begin(), b.bins.end());
  b.m = static_cast<std::int64_t>(std::floor(0.5 * coincidences));
  b.qber = model == ThresholdModel::weighted ? s.running[count - 1] : s.qber[count - 1];
  return b;
}

std::size_t admitted(const SortedBins& s, double delta, ThresholdModel model) {
  const auto& key = model == ThresholdModel::weighted ? s.running : s.qber;
  std::size_t count = 0;
  while (count < key.size() && key[count] <= delta) ++count;
  return count;
}

}  // namespace

BlockStats build_block(const CountsProfile& counts, double delta, ThresholdModel model) {
  const SortedBins s = sort_bins(counts);
  return block_from_prefix(counts, s, admitted(s, delta, model), model);
}

ThresholdSweep threshold_sweep(const CountsProfile& counts, const SecurityConfig& sec) {
  ThresholdSweep out;
  const SortedBins s = sort_bins(counts);
  if (s.order.empty()) return out;
  out.delta_lo = sec.threshold_model == ThresholdModel::weighted ? s.running.front() : s.qber.front();
  out.delta_hi = sec.threshold_model == ThresholdModel::weighted ? s.running.back() : s.qber.back();
  const int nt = sec.n_thresholds;
  bool have_best = false;
  for (int q = 0; q < nt; ++q) {
    double delta = out.delta_hi;
    if (nt > 1 && q < nt - 1) delta = out.delta_lo + (out.delta_hi - out.delta_lo) * q / (nt - 1);
    const BlockStats block = block_from_prefix(counts, s, admitted(s, delta, sec.threshold_model), sec.threshold_model);
    SklResult r = optimise_key_length(block, sec);
    r.delta = delta;
    r.qber = block.qber;
    r.m = block.m;
    if (!have_best || r.ell > out.best.ell) {
      out.best = r;
      have_best = true;
    }
    out.curve.push_back(r);
  }
  return out;
}

}  // namespace satqkd
