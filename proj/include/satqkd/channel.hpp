// Per-link optical efficiency: Fraunhofer diffraction of a truncated
// Gaussian beam, tabulated atmospheric transmissivity, and a flat intrinsic
// loss. Losses are positive dB throughout.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "satqkd/geometry.hpp"

namespace satqkd {

/// How the listed aperture sizes enter the diffraction integral.
enum class ApertureConvention {
  /// T_X bounds the transmit field radius, R_X is the collecting disc radius.
  radius,
  /// Listed values are diameters; radii are T_X/2 and R_X/2.
  diameter,
};

std::string to_string(ApertureConvention c);
ApertureConvention parse_aperture_convention(const std::string& text);

struct OpticalSystem {
  double wavelength_a_m = 785e-9;
  double wavelength_b_m = 785e-9;
  double tx_diameter_m = 0.10;
  double beam_waist_m = 0.05;
  double rx_diameter_m = 0.70;
  double intrinsic_loss_db = 12.0;
  ApertureConvention aperture_convention = ApertureConvention::radius;
  bool diffraction_enabled = true;
  bool atmosphere_enabled = true;

  double tx_radius_m() const;
  double rx_radius_m() const;

  std::vector<std::string> violations() const;
  bool operator==(const OpticalSystem&) const = default;
};

/// Received fraction of a Gaussian field exp(-r^2/w0^2), cut at the transmit
/// aperture, propagated to range L in the Fraunhofer limit and collected on a
/// disc. Losses are tabulated on a logarithmic range grid at construction and
/// interpolated afterwards; the object is immutable once built.
class DiffractionModel {
 public:
  struct Aperture {
    double wavelength_m;
    double tx_radius_m;
    double beam_waist_m;
    double rx_radius_m;
  };

  explicit DiffractionModel(Aperture ap, double min_range_m = 1e5, double max_range_m = 1e7,
                            int grid_points = 241);

  /// Tabulated loss (dB); ranges outside the table are integrated directly.
  double loss_db(double range_m) const;
  /// Direct quadrature, relative tolerance ~1e-9 on P_R/P_T.
  double exact_loss_db(double range_m) const;

  const Aperture& aperture() const { return ap_; }

 private:
  Aperture ap_;
  double log_min_ = 0.0;
  double log_step_ = 0.0;
  std::vector<double> table_db_;
};

/// Loss in dB for a single link, combining the aperture convention of `sys`.
double diffraction_loss(const OpticalSystem& sys, double wavelength_m, double range_m);

class AtmosphereTable {
 public:
  AtmosphereTable(std::vector<double> elevation_deg, std::vector<double> transmissivity,
                  std::string wavelength_tag = {}, std::string site_tag = {});

  /// Airmass law T(theta) = T_z^{1/sin theta}, airmass capped at 38 so the
  /// horizon node stays finite.
  static AtmosphereTable airmass_law(double zenith_transmissivity, double spacing_deg = 3.0);
  /// Default 785 nm night table: 0.73 dB at zenith.
  static AtmosphereTable default_785nm();
  /// CSV with header `elevation_deg,transmissivity`.
  static AtmosphereTable load_csv(const std::filesystem::path& path);

  /// Linear interpolation of T(theta); 0 <= theta <= 90.
  double transmissivity(double elevation_deg) const;
  const std::vector<double>& elevation_deg() const { return elevation_; }
  const std::vector<double>& transmissivities() const { return transmissivity_; }
  const std::string& wavelength_tag() const { return wavelength_tag_; }
  const std::string& site_tag() const { return site_tag_; }

  void write_csv(const std::filesystem::path& path) const;

 private:
  std::vector<double> elevation_;
  std::vector<double> transmissivity_;
  std::string wavelength_tag_;
  std::string site_tag_;
};

double atmospheric_loss(const AtmosphereTable& table, double elevation_deg);

struct LossProfile {
  std::vector<double> loss_a_db;
  std::vector<double> loss_b_db;
  std::vector<double> eta_a;
  std::vector<double> eta_b;
  std::vector<double> eta;  // eta_a * eta_b; zero outside the joint window
  std::vector<std::uint8_t> visible;

  std::size_t size() const { return eta.size(); }
  double combined_loss_db(std::size_t i) const { return loss_a_db[i] + loss_b_db[i]; }
  double min_combined_loss_db() const;
};

/// One link's loss split into its terms, dB. Disabled terms are zero.
struct LinkBudget {
  double diffraction_db = 0.0;
  double atmosphere_db = 0.0;
  double intrinsic_db = 0.0;
  double total_db() const { return diffraction_db + atmosphere_db + intrinsic_db; }
};

/// Precomputed per-link diffraction tables plus the two atmosphere tables.
class Channel {
 public:
  Channel(OpticalSystem sys, AtmosphereTable atm_a, AtmosphereTable atm_b);

  LinkBudget link_budget(bool link_b, double range_m, double elevation_deg) const;
  double link_loss_db(bool link_b, double range_m, double elevation_deg) const {
    return link_budget(link_b, range_m, elevation_deg).total_db();
  }
  LossProfile link_efficiency(const LinkProfile& profile) const;

  const OpticalSystem& system() const { return sys_; }

 private:
  OpticalSystem sys_;
  AtmosphereTable atm_a_;
  AtmosphereTable atm_b_;
  DiffractionModel diff_a_;
  DiffractionModel diff_b_;
};

/// Convenience wrapper using the same table for both sites.
LossProfile link_efficiency(const OpticalSystem& sys, const AtmosphereTable& table,
                            const LinkProfile& profile);

}  // namespace satqkd
