// Coincidence and error statistics per time bin.
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "satqkd/channel.hpp"

namespace satqkd {

struct DetectorModel {
  double p_dark = 5e-7;
  double p_afterpulse = 1e-3;
  double coincidence_window_s = 5e-9;
  double fov_sr = 5e-8;
  double filter_bandwidth_nm = 10.0;
  double background_scale = 1.0;

  std::vector<std::string> violations() const;
  bool operator==(const DetectorModel&) const = default;
};

struct SourceModel {
  double pair_rate_hz = 2e8;
  double qber_intrinsic = 0.001;
  /// Two-mode squeezing; only used by pair_number_probability.
  double squeezing = 0.01;

  std::vector<std::string> violations() const;
  bool operator==(const SourceModel&) const = default;
};

/// Sky radiance seen by one station, W cm^-2 sr^-1 nm^-1. Either a constant
/// or a table in elevation (linear interpolation, clamped at the ends).
class Radiance {
 public:
  explicit Radiance(double constant = 0.0);
  Radiance(std::vector<double> elevation_deg, std::vector<double> radiance);

  /// CSV with header `elevation_deg,radiance_w_cm2_sr_nm`; a single data row
  /// is a constant.
  static Radiance load_csv(const std::filesystem::path& path);

  double at(double elevation_deg) const;
  bool is_constant() const { return elevation_.empty(); }

 private:
  double constant_ = 0.0;
  std::vector<double> elevation_;
  std::vector<double> radiance_;
};

/// P(n, r) = tanh^{2n}(r) / cosh^2(r) for a two-mode squeezed vacuum.
double pair_number_probability(int n, double squeezing);
/// P(n > 1, r) = 1 - P(0, r) - P(1, r).
double multi_pair_probability(double squeezing);

/// Probability of a background photon click in one coincidence window:
/// (dtau / E_photon) * H * A_rx * Omega * dnu * f, A_rx = pi (R_X/2)^2 in cm^2.
double background_click_prob(double radiance, const DetectorModel& det, double rx_diameter_m,
                             double wavelength_m);

/// Radiance that makes background_click_prob return `p_bg` at f = 1.
double radiance_for_click_prob(double p_bg, const DetectorModel& det, double rx_diameter_m,
                               double wavelength_m);

/// Night radiance for the reference 785 nm receiver (p_bg = 1e-7).
double default_night_radiance();

/// p_ec = p_dc + p_bg - p_dc p_bg.
double extraneous_prob(double p_dark, double p_bg);

struct LinkPair {
  double eta_a = 0.0;
  double eta_b = 0.0;
  double p_ec_a = 0.0;
  double p_ec_b = 0.0;
};

/// Mean coincidences per window, D_t.
double coincidence_rate(const LinkPair& in, double p_afterpulse);

/// Mean erroneous coincidences per window, e_t. `d_t` must come from
/// coincidence_rate with the same inputs.
double error_rate(const LinkPair& in, double p_afterpulse, double qber_intrinsic, double d_t);

struct CountsProfile {
  std::vector<double> p_ec_a;
  std::vector<double> p_ec_b;
  std::vector<double> d;        // D_t per coincidence window
  std::vector<double> e;        // e_t per coincidence window
  std::vector<double> coincidences;  // f_s D_t bin_width
  std::vector<double> errors;        // f_s e_t bin_width
  std::vector<std::uint8_t> visible;
  double pair_rate_hz = 0.0;
  double bin_width_s = 1.0;

  std::size_t size() const { return d.size(); }
  std::vector<std::size_t> visible_indices() const;
  double qber(std::size_t i) const { return d[i] > 0.0 ? e[i] / d[i] : 0.0; }
};

struct SiteBackground {
  Radiance radiance_a;
  Radiance radiance_b;
};

/// Per-bin D_t and e_t over the visible bins of `loss`. Elevations pick the
/// per-site radiance.
CountsProfile build_counts(const LossProfile& loss, const LinkProfile& link, const DetectorModel& det,
                           const SourceModel& src, const SiteBackground& sky, const OpticalSystem& optics);

}  // namespace satqkd
