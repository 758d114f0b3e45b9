// Per-point evaluation shared by the parallel and serial key searches.
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "satqkd/finitekey.hpp"

namespace satqkd::detail {

struct KeySearch {
  double m = 0.0;
  double delta = 0.0;
  double eps_qkd = 0.0;
  double two_t = 0.0;  // 2^-t
  double t = 0.0;
  std::vector<double> beta;
  std::vector<double> k;
  std::vector<double> n;
  std::vector<double> r;
  std::vector<double> nu;
  std::vector<double> nu_loss;  // 1 - h2(delta + nu)
  std::vector<double> frac;

  KeySearch(const BlockStats& block, const SecurityConfig& sec) {
    const KeyGrid grid = KeyGrid::make(sec);
    m = static_cast<double>(block.m);
    delta = block.qber;
    eps_qkd = sec.epsilon_qkd();
    t = sec.t();
    two_t = std::exp2(-t);
    beta = grid.beta;
    frac = grid.nu_fraction;
    const double h2d = binary_entropy(delta);
    for (double b : beta) {
      const double kk = std::floor(b * m);
      k.push_back(kk);
      n.push_back(m - kk);
      r.push_back(sec.ec_efficiency * (m - kk) * h2d);
    }
    for (double f : frac) {
      const double v = f * (0.5 - delta);
      nu.push_back(v);
      nu_loss.push_back(1.0 - binary_entropy(delta + v));
    }
  }

  std::size_t size() const { return beta.size() * nu.size() * frac.size(); }

  /// Largest possible bound over xi for fixed (beta, nu): eps_pe -> 0.
  double bound_ceiling(std::size_t b, std::size_t j) const {
    const double slack = eps_qkd - two_t;
    return std::log2(4.0 * slack * slack) + n[b] * nu_loss[j] - r[b] - t;
  }

  struct Point {
    bool feasible = false;
    std::int64_t ell = 0;
    double eps_pe = 0.0;
  };

  Point evaluate(std::size_t b, std::size_t j, std::size_t i) const {
    Point p;
    const double kk = k[b], nn = n[b];
    if (kk < 1.0 || nn < 1.0) return p;
    const double v = nu[j];
    const double xi = frac[i] * v;
    const double nu_p = v - xi;
    const double a2 = (nn * nu_p) * (nn * nu_p) - 1.0;
    if (!(a2 > 0.0)) return p;
    const double x = m * (delta + xi);
    const double gamma = 1.0 / (x + 1.0) + 1.0 / (m - x + 1.0);
    const double e1 = std::exp(-2.0 * m * kk * xi * xi / (nn + 1.0));
    const double e2 = std::exp(-2.0 * gamma * a2);
    p.eps_pe = std::sqrt(e1 + e2);
    const double arg = eps_qkd - two_t - 2.0 * p.eps_pe;
    if (!(arg > 0.0)) return p;
    p.feasible = true;
    const double ub = std::log2(4.0 * arg * arg) + nn * nu_loss[j] - r[b] - t;
    p.ell = ub > 0.0 ? static_cast<std::int64_t>(std::floor(ub)) : 0;
    return p;
  }

  SklResult result(std::size_t b, std::size_t j, std::size_t i, const Point& p,
                   const SecurityConfig& sec) const {
    SklResult out;
    out.feasible = true;
    out.ell = p.ell;
    out.beta = beta[b];
    out.nu = nu[j];
    out.xi = frac[i] * nu[j];
    out.qber = delta;
    out.delta = delta;
    out.m = static_cast<std::int64_t>(m);
    out.k = static_cast<std::int64_t>(k[b]);
    out.n = static_cast<std::int64_t>(n[b]);
    out.eps_pe = p.eps_pe;
    out.eps_pa = epsilon_pa(n[b], delta, nu[j], static_cast<double>(p.ell), sec);
    return out;
  }
};

inline SklResult empty_result(const BlockStats& block) {
  SklResult out;
  out.m = block.m;
  out.qber = block.qber;
  out.delta = block.qber;
  return out;
}

inline bool searchable(const BlockStats& block) { return block.m > 0 && block.qber < 0.5; }

}  // namespace satqkd::detail
