#include "satqkd/channel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include "satqkd/csv.hpp"
#include "satqkd/parallel.hpp"

namespace satqkd {

std::string to_string(ApertureConvention c) { return c == ApertureConvention::radius ? "radius" : "diameter"; }

ApertureConvention parse_aperture_convention(const std::string& text) {
  if (text == "radius") return ApertureConvention::radius;
  if (text == "diameter") return ApertureConvention::diameter;
  throw std::invalid_argument("aperture_convention must be 'radius' or 'diameter', got '" + text + "'");
}

double OpticalSystem::tx_radius_m() const {
  return aperture_convention == ApertureConvention::radius ? tx_diameter_m : 0.5 * tx_diameter_m;
}

double OpticalSystem::rx_radius_m() const {
  return aperture_convention == ApertureConvention::radius ? rx_diameter_m : 0.5 * rx_diameter_m;
}

std::vector<std::string> OpticalSystem::violations() const {
  std::vector<std::string> out;
  auto positive = [&](double v, const char* name) {
    if (!(v > 0.0)) out.push_back(fmt::format("{} must be > 0 (got {})", name, v));
  };
  positive(wavelength_a_m, "wavelength_a_nm");
  positive(wavelength_b_m, "wavelength_b_nm");
  positive(tx_diameter_m, "tx_diameter_m");
  positive(beam_waist_m, "beam_waist_m");
  positive(rx_diameter_m, "rx_diameter_m");
  if (!(intrinsic_loss_db >= 0.0)) out.push_back(fmt::format("intrinsic_loss_db must be >= 0 (got {})", intrinsic_loss_db));
  if (beam_waist_m > tx_diameter_m)
    out.push_back(fmt::format("beam_waist_m ({}) must not exceed tx_diameter_m ({})", beam_waist_m, tx_diameter_m));
  return out;
}

// ---------------------------------------------------------------------------
// Diffraction

namespace {

using boost::math::quadrature::gauss_kronrod;

// Received fraction P_R/P_T. With q = k rho / L the Fraunhofer pattern
// collapses to the Hankel transform F(q) = int_0^a E(r) J0(q r) r dr and
// P_R = 2 pi int_0^{k b / L} F(q)^2 q dq, independent of the 1/(lambda L)
// prefactors.
double received_fraction(const DiffractionModel::Aperture& ap, double range_m) {
  const double k = 2.0 * kPi / ap.wavelength_m;
  const double a = ap.tx_radius_m;
  const double w2 = ap.beam_waist_m * ap.beam_waist_m;
  const double q_max = k * ap.rx_radius_m / range_m;

  const double p_t = 0.5 * kPi * w2 * (1.0 - std::exp(-2.0 * a * a / w2));

  auto hankel = [&](double q) {
    auto f = [&](double r) { return std::exp(-r * r / w2) * std::cyl_bessel_j(0.0, q * r) * r; };
    return gauss_kronrod<double, 31>::integrate(f, 0.0, a, 12, 1e-12);
  };
  auto outer = [&](double q) {
    const double F = hankel(q);
    return F * F * q;
  };
  const double p_r = 2.0 * kPi * gauss_kronrod<double, 31>::integrate(outer, 0.0, q_max, 15, 1e-11);
  return std::clamp(p_r / p_t, std::numeric_limits<double>::min(), 1.0);
}

}  // namespace

DiffractionModel::DiffractionModel(Aperture ap, double min_range_m, double max_range_m, int grid_points)
    : ap_(ap) {
  if (!(ap.wavelength_m > 0 && ap.tx_radius_m > 0 && ap.beam_waist_m > 0 && ap.rx_radius_m > 0))
    throw std::invalid_argument("diffraction aperture parameters must be positive");
  if (!(min_range_m > 0 && max_range_m > min_range_m && grid_points >= 2))
    throw std::invalid_argument("invalid diffraction range grid");
  log_min_ = std::log(min_range_m);
  log_step_ = (std::log(max_range_m) - log_min_) / (grid_points - 1);
  table_db_.resize(static_cast<std::size_t>(grid_points));
  SATQKD_OMP(parallel for schedule(dynamic))
  for (int i = 0; i < grid_points; ++i)
    table_db_[static_cast<std::size_t>(i)] = exact_loss_db(std::exp(log_min_ + i * log_step_));
}

double DiffractionModel::exact_loss_db(double range_m) const {
  if (!(range_m > 0.0)) throw std::invalid_argument(fmt::format("range must be > 0 (got {})", range_m));
  return -10.0 * std::log10(received_fraction(ap_, range_m));
}

double DiffractionModel::loss_db(double range_m) const {
  if (!(range_m > 0.0)) throw std::invalid_argument(fmt::format("range must be > 0 (got {})", range_m));
  const double x = (std::log(range_m) - log_min_) / log_step_;
  const auto last = static_cast<double>(table_db_.size() - 1);
  if (x < 0.0 || x > last) return exact_loss_db(range_m);
  const auto i = std::min(static_cast<std::size_t>(x), table_db_.size() - 2);
  const double frac = x - static_cast<double>(i);
  return table_db_[i] + frac * (table_db_[i + 1] - table_db_[i]);
}

double diffraction_loss(const OpticalSystem& sys, double wavelength_m, double range_m) {
  const DiffractionModel::Aperture ap{wavelength_m, sys.tx_radius_m(), sys.beam_waist_m, sys.rx_radius_m()};
  if (!(range_m > 0.0)) throw std::invalid_argument(fmt::format("range must be > 0 (got {})", range_m));
  return -10.0 * std::log10(received_fraction(ap, range_m));
}

// ---------------------------------------------------------------------------
// Atmosphere

AtmosphereTable::AtmosphereTable(std::vector<double> elevation_deg, std::vector<double> transmissivity,
                                 std::string wavelength_tag, std::string site_tag)
    : elevation_(std::move(elevation_deg)),
      transmissivity_(std::move(transmissivity)),
      wavelength_tag_(std::move(wavelength_tag)),
      site_tag_(std::move(site_tag)) {
  if (elevation_.size() != transmissivity_.size() || elevation_.size() < 2)
    throw std::invalid_argument("atmosphere table needs at least two (elevation, transmissivity) rows");
  for (std::size_t i = 0; i < elevation_.size(); ++i) {
    if (elevation_[i] < 0.0 || elevation_[i] > 90.0)
      throw std::invalid_argument(fmt::format("atmosphere table elevation {} outside [0, 90]", elevation_[i]));
    if (!(transmissivity_[i] > 0.0 && transmissivity_[i] <= 1.0))
      throw std::invalid_argument(fmt::format("atmosphere transmissivity {} outside (0, 1]", transmissivity_[i]));
    if (i > 0 && !(elevation_[i] > elevation_[i - 1]))
      throw std::invalid_argument("atmosphere elevation grid must be strictly increasing");
    if (i > 0 && transmissivity_[i] < transmissivity_[i - 1])
      throw std::invalid_argument("atmosphere transmissivity must be non-decreasing in elevation");
  }
}

AtmosphereTable AtmosphereTable::airmass_law(double zenith_transmissivity, double spacing_deg) {
  if (!(zenith_transmissivity > 0.0 && zenith_transmissivity <= 1.0))
    throw std::invalid_argument("zenith transmissivity must lie in (0, 1]");
  if (!(spacing_deg > 0.0)) throw std::invalid_argument("spacing must be > 0");
  constexpr double kHorizonAirmass = 38.0;
  std::vector<double> el, tr;
  const int steps = static_cast<int>(std::ceil(90.0 / spacing_deg - 1e-9));
  for (int i = 0; i <= steps; ++i) {
    const double theta = std::min(90.0, i * spacing_deg);
    const double s = std::sin(deg2rad(theta));
    const double airmass = s > 1.0 / kHorizonAirmass ? 1.0 / s : kHorizonAirmass;
    el.push_back(theta);
    tr.push_back(theta == 90.0 ? zenith_transmissivity : std::pow(zenith_transmissivity, airmass));
  }
  return AtmosphereTable(std::move(el), std::move(tr), "785nm", "airmass");
}

AtmosphereTable AtmosphereTable::default_785nm() { return airmass_law(std::pow(10.0, -0.073)); }

AtmosphereTable AtmosphereTable::load_csv(const std::filesystem::path& path) {
  const auto cols = read_numeric_csv(path, {"elevation_deg", "transmissivity"});
  return AtmosphereTable(cols[0], cols[1], {}, path.stem().string());
}

void AtmosphereTable::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "elevation_deg,transmissivity\n";
  for (std::size_t i = 0; i < elevation_.size(); ++i)
    out << fmt::format("{:.17g},{:.17g}\n", elevation_[i], transmissivity_[i]);
}

double AtmosphereTable::transmissivity(double elevation_deg) const {
  if (!(elevation_deg >= 0.0 && elevation_deg <= 90.0))
    throw std::invalid_argument(fmt::format("elevation {} deg outside [0, 90]", elevation_deg));
  if (elevation_deg < elevation_.front() || elevation_deg > elevation_.back())
    throw std::out_of_range(fmt::format("elevation {} deg outside atmosphere table [{}, {}]", elevation_deg,
                                        elevation_.front(), elevation_.back()));
  const auto it = std::lower_bound(elevation_.begin(), elevation_.end(), elevation_deg);
  const auto i = static_cast<std::size_t>(it - elevation_.begin());
  if (*it == elevation_deg) return transmissivity_[i];
  const double x0 = elevation_[i - 1], x1 = elevation_[i];
  const double y0 = transmissivity_[i - 1], y1 = transmissivity_[i];
  return y0 + (elevation_deg - x0) / (x1 - x0) * (y1 - y0);
}

double atmospheric_loss(const AtmosphereTable& table, double elevation_deg) {
  return -10.0 * std::log10(table.transmissivity(elevation_deg));
}

// ---------------------------------------------------------------------------
// Combined links

double LossProfile::min_combined_loss_db() const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < eta.size(); ++i)
    if (visible[i]) best = std::min(best, combined_loss_db(i));
  return best;
}

namespace {

DiffractionModel::Aperture aperture_for(const OpticalSystem& sys, double wavelength_m) {
  return {wavelength_m, sys.tx_radius_m(), sys.beam_waist_m, sys.rx_radius_m()};
}

}  // namespace

Channel::Channel(OpticalSystem sys, AtmosphereTable atm_a, AtmosphereTable atm_b)
    : sys_(std::move(sys)),
      atm_a_(std::move(atm_a)),
      atm_b_(std::move(atm_b)),
      diff_a_(aperture_for(sys_, sys_.wavelength_a_m)),
      diff_b_(sys_.wavelength_b_m == sys_.wavelength_a_m ? diff_a_
                                                          : DiffractionModel(aperture_for(sys_, sys_.wavelength_b_m))) {
  const auto v = sys_.violations();
  if (!v.empty()) throw std::invalid_argument("invalid optical system: " + v.front());
}

LinkBudget Channel::link_budget(bool link_b, double range_m, double elevation_deg) const {
  LinkBudget b;
  b.intrinsic_db = sys_.intrinsic_loss_db;
  if (sys_.diffraction_enabled) b.diffraction_db = (link_b ? diff_b_ : diff_a_).loss_db(range_m);
  if (sys_.atmosphere_enabled) b.atmosphere_db = atmospheric_loss(link_b ? atm_b_ : atm_a_, elevation_deg);
  return b;
}

LossProfile Channel::link_efficiency(const LinkProfile& profile) const {
  const std::size_t n = profile.size();
  LossProfile out;
  out.loss_a_db.assign(n, std::numeric_limits<double>::quiet_NaN());
  out.loss_b_db.assign(n, std::numeric_limits<double>::quiet_NaN());
  out.eta_a.assign(n, 0.0);
  out.eta_b.assign(n, 0.0);
  out.eta.assign(n, 0.0);
  out.visible = profile.visible;

  const auto count = static_cast<std::ptrdiff_t>(n);
  SATQKD_OMP(parallel for schedule(static))
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const double ea = profile.elev_a_deg[i], eb = profile.elev_b_deg[i];
    if (ea >= 0.0) out.loss_a_db[i] = link_loss_db(false, profile.range_a_m[i], ea);
    if (eb >= 0.0) out.loss_b_db[i] = link_loss_db(true, profile.range_b_m[i], eb);
    if (profile.visible[i]) {
      out.eta_a[i] = std::pow(10.0, -out.loss_a_db[i] / 10.0);
      out.eta_b[i] = std::pow(10.0, -out.loss_b_db[i] / 10.0);
      out.eta[i] = out.eta_a[i] * out.eta_b[i];
    }
  }
  return out;
}

LossProfile link_efficiency(const OpticalSystem& sys, const AtmosphereTable& table, const LinkProfile& profile) {
  return Channel(sys, table, table).link_efficiency(profile);
}

}  // namespace satqkd
