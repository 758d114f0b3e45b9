#include "satqkd/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "satqkd/parallel.hpp"

namespace satqkd {

std::string to_string(ElevationModel model) {
  return model == ElevationModel::horizon ? "horizon" : "polar_axis";
}

ElevationModel parse_elevation_model(const std::string& text) {
  if (text == "horizon") return ElevationModel::horizon;
  if (text == "polar_axis") return ElevationModel::polar_axis;
  throw std::invalid_argument("elevation_model must be 'horizon' or 'polar_axis', got '" + text + "'");
}

double OverpassGeometry::angular_rate() const {
  const double r = orbit_radius();
  return std::sqrt(mu_earth / (r * r * r));
}

double OverpassGeometry::period_s() const { return 2.0 * kPi / angular_rate(); }

std::vector<std::string> OverpassGeometry::violations() const {
  std::vector<std::string> out;
  if (!(altitude_m > 0.0)) out.push_back(fmt::format("altitude_m must be > 0 (got {})", altitude_m));
  if (!(earth_radius_m > 0.0)) out.push_back("earth radius must be > 0");
  if (!(mu_earth > 0.0)) out.push_back("gravitational parameter must be > 0");
  if (!(separation_m >= 0.0) || !(separation_m < kPi * earth_radius_m))
    out.push_back(fmt::format("ogs_separation_m must lie in [0, pi R) (got {})", separation_m));
  if (!(theta_min_deg >= 0.0 && theta_min_deg < 90.0))
    out.push_back(fmt::format("theta_min_deg must lie in [0, 90) (got {})", theta_min_deg));
  if (!(bin_width_s > 0.0)) out.push_back(fmt::format("bin_width_s must be > 0 (got {})", bin_width_s));
  if (!std::isfinite(phi_deg)) out.push_back("phi_deg must be finite");
  if (!std::isfinite(xi_deg)) out.push_back("xi_deg must be finite");
  return out;
}

void OverpassGeometry::validate() const {
  const auto v = violations();
  if (v.empty()) return;
  std::string msg = "invalid geometry:";
  for (const auto& s : v) msg += "\n  " + s;
  throw std::invalid_argument(msg);
}

TrackOffset ground_track_offset(double xi_deg, double phi_deg, double earth_radius_m) {
  if (!(earth_radius_m > 0.0)) throw std::invalid_argument("earth radius must be > 0");
  TrackOffset out;
  out.d_xi_m = earth_radius_m * (kPi * xi_deg / 180.0);
  const double s = std::sin(deg2rad(phi_deg));
  if (std::abs(s) > 1e-12) {
    out.delta_m = std::abs(out.d_xi_m / s);
  } else if (out.d_xi_m == 0.0) {
    out.delta_m = 0.0;
  }
  return out;
}

double xi_for_offset(double offset_m, double phi_deg, double earth_radius_m) {
  const double s = std::sin(deg2rad(phi_deg));
  if (std::abs(s) <= 1e-12) return 0.0;
  return rad2deg(offset_m * std::abs(s) / earth_radius_m);
}

Vec3 satellite_position(double t_s, const OverpassGeometry& geom) {
  const double r = geom.orbit_radius();
  const double wt = geom.angular_rate() * t_s;
  const double c = std::cos(wt), s = std::sin(wt);
  const double cp = std::cos(deg2rad(geom.phi_deg)), sp = std::sin(deg2rad(geom.phi_deg));
  const double cx = std::cos(deg2rad(geom.xi_deg)), sx = std::sin(deg2rad(geom.xi_deg));
  // rot_z(phi) rot_y(xi) applied to (0, sin wt, cos wt), mirrored in y so the
  // satellite moves towards -y for t > 0.
  return {r * (c * cp * sx - sp * s), -r * (c * sp * sx + cp * s), r * c * cx};
}

std::pair<Vec3, Vec3> ogs_positions(double separation_m, double earth_radius_m) {
  const double alpha = separation_m / (2.0 * earth_radius_m);
  const double y = earth_radius_m * std::sin(alpha);
  const double z = earth_radius_m * std::cos(alpha);
  return {Vec3{0.0, y, z}, Vec3{0.0, -y, z}};
}

LinkState link_state(const Vec3& r_sat, const Vec3& r_ogs) {
  const Vec3 los = r_sat - r_ogs;
  const double range = norm(los);
  const double up = dot(los, r_ogs) / norm(r_ogs);
  const double s = std::clamp(up / range, -1.0, 1.0);
  return {range, rad2deg(std::asin(s))};
}

LinkState link_state(const Vec3& r_sat, const Vec3& r_ogs, ElevationModel model, double altitude_m) {
  if (model == ElevationModel::horizon) return link_state(r_sat, r_ogs);
  const double range = norm(r_sat - r_ogs);
  const double s = std::clamp((r_sat.z - r_ogs.z) / altitude_m, -1.0, 1.0);
  return {range, rad2deg(std::asin(s))};
}

double baseline_crossing_time(const OverpassGeometry& geom) {
  const double sp = std::sin(deg2rad(geom.phi_deg));
  if (std::abs(sp) <= 1e-12) return 0.0;
  const double cp = std::cos(deg2rad(geom.phi_deg));
  const double sx = std::sin(deg2rad(geom.xi_deg));
  return std::atan(cp * sx / sp) / geom.angular_rate();
}

std::size_t LinkProfile::visible_count() const {
  return static_cast<std::size_t>(std::count(visible.begin(), visible.end(), std::uint8_t{1}));
}

std::vector<std::size_t> LinkProfile::visible_indices() const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < visible.size(); ++i)
    if (visible[i]) idx.push_back(i);
  return idx;
}

LinkProfile sample_overpass(const OverpassGeometry& geom) {
  geom.validate();
  const double period = geom.period_s();
  const double t0 = baseline_crossing_time(geom);
  const auto bins = static_cast<std::size_t>(std::floor(period / geom.bin_width_s));
  const double start = t0 - 0.5 * static_cast<double>(bins) * geom.bin_width_s;
  const auto [ogs_a, ogs_b] = ogs_positions(geom.separation_m, geom.earth_radius_m);

  LinkProfile p;
  p.bin_width_s = geom.bin_width_s;
  p.times_s.resize(bins);
  p.range_a_m.resize(bins);
  p.range_b_m.resize(bins);
  p.elev_a_deg.resize(bins);
  p.elev_b_deg.resize(bins);
  p.visible.resize(bins);

  const auto n = static_cast<std::ptrdiff_t>(bins);
  SATQKD_OMP(parallel for schedule(static))
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double t = start + (static_cast<double>(i) + 0.5) * geom.bin_width_s;
    const Vec3 sat = satellite_position(t, geom);
    const LinkState a = link_state(sat, ogs_a, geom.elevation_model, geom.altitude_m);
    const LinkState b = link_state(sat, ogs_b, geom.elevation_model, geom.altitude_m);
    p.times_s[i] = t;
    p.range_a_m[i] = a.range_m;
    p.range_b_m[i] = b.range_m;
    p.elev_a_deg[i] = a.elevation_deg;
    p.elev_b_deg[i] = b.elevation_deg;
    p.visible[i] = (a.elevation_deg >= geom.theta_min_deg && b.elevation_deg >= geom.theta_min_deg) ? 1 : 0;
  }
  return p;
}

}  // namespace satqkd
