#include "satqkd/mission.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>

#include "satqkd/parallel.hpp"

namespace satqkd {

double max_viewable_distance(double altitude_m, double earth_radius_m) {
  if (!(altitude_m >= 0.0) || !(earth_radius_m > 0.0))
    throw std::invalid_argument("max_viewable_distance: altitude must be >= 0 and radius > 0");
  return 2.0 * earth_radius_m * std::acos(earth_radius_m / (earth_radius_m + altitude_m));
}

PassResult simulate_pass(const Scenario& sc, const ScenarioData& data, const Channel& channel) {
  PassResult out;
  out.link = sample_overpass(sc.geometry);
  out.loss = channel.link_efficiency(out.link);
  out.counts = build_counts(out.loss, out.link, sc.detector, sc.source, data.sky, sc.optics);
  out.sweep = threshold_sweep(out.counts, sc.security);
  return out;
}

PassResult simulate_pass(const Scenario& sc, const ScenarioData& data) {
  const Channel channel(sc.optics, data.atm_a, data.atm_b);
  return simulate_pass(sc, data, channel);
}

SklResult single_pass_skl(const Scenario& sc, const ScenarioData& data) { return simulate_pass(sc, data).sweep.best; }

namespace {

template <typename T>
std::vector<T> axis_or(const std::vector<T>& axis, T fallback) {
  return axis.empty() ? std::vector<T>{fallback} : axis;
}

}  // namespace

std::vector<SweepCell> run_sweep(const Scenario& sc, const ScenarioData& data, const SweepAxes& axes) {
  const auto alt = axis_or(axes.altitude_m, sc.geometry.altitude_m);
  const auto sep = axis_or(axes.separation_m, sc.geometry.separation_m);
  const auto phi = axis_or(axes.phi_deg, sc.geometry.phi_deg);
  const bool by_offset = !axes.offset_m.empty();
  const auto tilt = by_offset ? axes.offset_m : axis_or(axes.xi_deg, sc.geometry.xi_deg);
  const auto scale = axis_or(axes.background_scale, sc.detector.background_scale);

  std::vector<SweepCell> cells;
  for (double h : alt)
    for (double d : sep)
      for (double p : phi)
        for (double x : tilt)
          for (double f : scale) {
            SweepCell c;
            c.altitude_m = h;
            c.separation_m = d;
            c.phi_deg = p;
            if (by_offset) {
              c.offset_m = x;
              c.xi_deg = xi_for_offset(x, p, sc.geometry.earth_radius_m);
            } else {
              c.xi_deg = x;
            }
            c.background_scale = f;
            cells.push_back(c);
          }

  const Channel channel(sc.optics, data.atm_a, data.atm_b);
  const auto n = static_cast<std::ptrdiff_t>(cells.size());
  SATQKD_OMP(parallel for schedule(dynamic, 1))
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    SweepCell& c = cells[static_cast<std::size_t>(i)];
    try {
      Scenario cell = sc;
      cell.geometry.altitude_m = c.altitude_m;
      cell.geometry.separation_m = c.separation_m;
      cell.geometry.phi_deg = c.phi_deg;
      cell.geometry.xi_deg = c.xi_deg;
      cell.detector.background_scale = c.background_scale;
      const PassResult pass = simulate_pass(cell, data, channel);
      c.visible_s = pass.link.visible_duration_s();
      const double ml = pass.loss.min_combined_loss_db();
      c.min_loss_db = std::isfinite(ml) ? ml : std::numeric_limits<double>::quiet_NaN();
      c.result = pass.sweep.best;
    } catch (const std::exception& e) {
      c.error = e.what();
      c.min_loss_db = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return cells;
}

double key_cutoff_distance(const Scenario& sc, const ScenarioData& data, double lo_m, double hi_m, double tol_m) {
  const Channel channel(sc.optics, data.atm_a, data.atm_b);
  auto key_at = [&](double d) {
    Scenario cell = sc;
    cell.geometry.separation_m = d;
    return simulate_pass(cell, data, channel).sweep.best.ell;
  };
  if (key_at(lo_m) == 0) return lo_m;
  if (key_at(hi_m) > 0) return hi_m;
  while (hi_m - lo_m > tol_m) {
    const double mid = 0.5 * (lo_m + hi_m);
    (key_at(mid) > 0 ? lo_m : hi_m) = mid;
  }
  return hi_m;
}

double orbits_per_year(const OverpassGeometry& geom) { return kSecondsPerYear / geom.period_s(); }

namespace {

bool admitted(double gamma_deg, const std::vector<GammaRange>& mask) {
  if (mask.empty()) return true;
  return std::any_of(mask.begin(), mask.end(),
                     [&](const GammaRange& r) { return gamma_deg >= r.lo_deg && gamma_deg <= r.hi_deg; });
}

}  // namespace

double annual_integral(const std::vector<double>& gamma_deg, const std::vector<double>& skl_bits, double orbits,
                       const std::vector<GammaRange>& mask) {
  if (gamma_deg.size() != skl_bits.size() || gamma_deg.size() < 2) return 0.0;
  // Unroll onto the full circle; the second half repeats the first.
  std::vector<double> g, v;
  for (int half = 0; half < 2; ++half)
    for (std::size_t i = (half == 0 ? 0 : 1); i < gamma_deg.size(); ++i) {
      const double gamma = gamma_deg[i] + 180.0 * half;
      g.push_back(gamma);
      v.push_back(admitted(gamma, mask) ? skl_bits[i] : 0.0);
    }
  double integral = 0.0;
  for (std::size_t i = 1; i < g.size(); ++i) integral += 0.5 * (v[i] + v[i - 1]) * (g[i] - g[i - 1]);
  return orbits * integral / 360.0;
}

AnnualResult annual_skl(const Scenario& sc, const ScenarioData& data, const AnnualConfig& cfg) {
  AnnualResult out;
  out.orbits_per_year = orbits_per_year(sc.geometry);
  const int n = cfg.gamma_samples;
  const double step = 180.0 / (n - 1);
  for (int i = 0; i < n; ++i) out.gamma_deg.push_back(i == n - 1 ? 180.0 : step * i);
  out.skl_bits.assign(static_cast<std::size_t>(n), 0.0);

  const int evaluated = cfg.symmetry ? (n + 1) / 2 : n;
  const Channel channel(sc.optics, data.atm_a, data.atm_b);
  // Exceptions may not leave a parallel region; keep them and rethrow the
  // first by index.
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(n));
  SATQKD_OMP(parallel for schedule(dynamic, 1))
  for (int i = 0; i < evaluated; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    try {
      Scenario cell = sc;
      cell.geometry.phi_deg = out.gamma_deg[idx];
      cell.geometry.xi_deg = 0.0;
      out.skl_bits[idx] = static_cast<double>(simulate_pass(cell, data, channel).sweep.best.ell);
    } catch (...) {
      failures[idx] = std::current_exception();
    }
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);
  if (cfg.symmetry)
    for (int i = evaluated; i < n; ++i) out.skl_bits[static_cast<std::size_t>(i)] = out.skl_bits[static_cast<std::size_t>(n - 1 - i)];

  out.skl_year_bits = annual_integral(out.gamma_deg, out.skl_bits, out.orbits_per_year, cfg.gamma_mask);
  return out;
}

}  // namespace satqkd
