// Circular-orbit overpass geometry for a satellite serving two ground
// stations placed symmetrically about the North Pole.
//
// Frame: z is the polar axis; both stations sit on the y-z great circle
// (the station baseline). A pass is fixed by two rotations of a polar
// orbit: phi about the polar axis (angle between ground track and baseline)
// and xi about the y axis (tilt that shifts the track off the pole).
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "satqkd/units.hpp"
#include "satqkd/vec3.hpp"

namespace satqkd {

enum class ElevationModel {
  /// sin(theta) = (r_sat - r_ogs) . r_ogs_hat / range
  horizon,
  /// sin(theta) = (z_sat - z_ogs) / h, the abbreviated polar-axis form.
  /// Only meaningful for stations close to the pole.
  polar_axis,
};

std::string to_string(ElevationModel model);
ElevationModel parse_elevation_model(const std::string& text);

struct OverpassGeometry {
  double altitude_m = 500e3;
  double separation_m = 500e3;
  double phi_deg = 0.0;
  double xi_deg = 0.0;
  double theta_min_deg = 10.0;
  double earth_radius_m = kEarthRadius;
  double mu_earth = kMuEarth;
  double bin_width_s = 1.0;
  ElevationModel elevation_model = ElevationModel::horizon;

  double orbit_radius() const { return earth_radius_m + altitude_m; }
  /// Keplerian circular rate sqrt(mu / (R+h)^3), rad/s.
  double angular_rate() const;
  double period_s() const;

  /// Every violated invariant, one message each. Empty when valid.
  std::vector<std::string> violations() const;
  /// Throws std::invalid_argument listing all violations.
  void validate() const;

  bool operator==(const OverpassGeometry&) const = default;
};

struct TrackOffset {
  double d_xi_m = 0.0;
  /// Baseline-midpoint offset |d_xi / sin(phi)|. Empty when the ground track
  /// runs parallel to the baseline (sin(phi) = 0) with a non-zero tilt.
  std::optional<double> delta_m;
};

/// Polar shift of the ground track produced by the tilt xi, and the
/// resulting offset of the track/baseline intersection from the midpoint.
TrackOffset ground_track_offset(double xi_deg, double phi_deg, double earth_radius_m);

/// Tilt that places the track/baseline intersection `offset_m` from the
/// baseline midpoint. Zero when sin(phi) = 0.
double xi_for_offset(double offset_m, double phi_deg, double earth_radius_m);

/// Satellite position at time t (t = 0 at the orbit apex).
Vec3 satellite_position(double t_s, const OverpassGeometry& geom);

/// Stations A (+y) and B (-y) at colatitude d/(2R) on either side of the pole.
std::pair<Vec3, Vec3> ogs_positions(double separation_m, double earth_radius_m);

struct LinkState {
  double range_m = 0.0;
  double elevation_deg = 0.0;
};

LinkState link_state(const Vec3& r_sat, const Vec3& r_ogs);
LinkState link_state(const Vec3& r_sat, const Vec3& r_ogs, ElevationModel model,
                     double altitude_m);

/// Time (relative to the apex) at which the ground track crosses the
/// baseline great circle on the northern arc. Zero for tracks parallel to it.
double baseline_crossing_time(const OverpassGeometry& geom);

struct LinkProfile {
  std::vector<double> times_s;
  std::vector<double> range_a_m;
  std::vector<double> range_b_m;
  std::vector<double> elev_a_deg;
  std::vector<double> elev_b_deg;
  std::vector<std::uint8_t> visible;
  double bin_width_s = 1.0;

  std::size_t size() const { return times_s.size(); }
  std::size_t visible_count() const;
  std::vector<std::size_t> visible_indices() const;
  double visible_duration_s() const { return static_cast<double>(visible_count()) * bin_width_s; }
};

/// Bins one full orbit (+-T/2 about the baseline crossing) at bin_width_s.
/// A bin is visible iff both elevations reach theta_min.
LinkProfile sample_overpass(const OverpassGeometry& geom);

}  // namespace satqkd
