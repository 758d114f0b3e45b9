#include "satqkd/counts.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "satqkd/csv.hpp"
#include "satqkd/parallel.hpp"

namespace satqkd {

std::vector<std::string> DetectorModel::violations() const {
  std::vector<std::string> out;
  auto prob = [&](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) out.push_back(fmt::format("{} must lie in [0, 1] (got {})", name, v));
  };
  auto positive = [&](double v, const char* name) {
    if (!(v > 0.0)) out.push_back(fmt::format("{} must be > 0 (got {})", name, v));
  };
  prob(p_dark, "p_dark");
  prob(p_afterpulse, "p_afterpulse");
  positive(coincidence_window_s, "coincidence_window_s");
  positive(fov_sr, "fov_sr");
  positive(filter_bandwidth_nm, "filter_bandwidth_nm");
  if (!(background_scale >= 0.0)) out.push_back(fmt::format("background_scale must be >= 0 (got {})", background_scale));
  return out;
}

std::vector<std::string> SourceModel::violations() const {
  std::vector<std::string> out;
  if (!(pair_rate_hz > 0.0)) out.push_back(fmt::format("pair_rate_hz must be > 0 (got {})", pair_rate_hz));
  if (!(qber_intrinsic >= 0.0 && qber_intrinsic < 0.5))
    out.push_back(fmt::format("qber_intrinsic must lie in [0, 0.5) (got {})", qber_intrinsic));
  if (!(squeezing >= 0.0)) out.push_back(fmt::format("squeezing must be >= 0 (got {})", squeezing));
  return out;
}

// ---------------------------------------------------------------------------

Radiance::Radiance(double constant) : constant_(constant) {
  if (!(constant >= 0.0)) throw std::invalid_argument("radiance must be >= 0");
}

Radiance::Radiance(std::vector<double> elevation_deg, std::vector<double> radiance)
    : elevation_(std::move(elevation_deg)), radiance_(std::move(radiance)) {
  if (elevation_.size() != radiance_.size() || elevation_.empty())
    throw std::invalid_argument("radiance table needs matching, non-empty columns");
  for (std::size_t i = 0; i < elevation_.size(); ++i) {
    if (!(radiance_[i] >= 0.0)) throw std::invalid_argument("radiance must be >= 0");
    if (i > 0 && !(elevation_[i] > elevation_[i - 1]))
      throw std::invalid_argument("radiance elevation grid must be strictly increasing");
  }
  if (elevation_.size() == 1) {
    constant_ = radiance_.front();
    elevation_.clear();
    radiance_.clear();
  }
}

Radiance Radiance::load_csv(const std::filesystem::path& path) {
  auto cols = read_numeric_csv(path, {"elevation_deg", "radiance_w_cm2_sr_nm"});
  return Radiance(std::move(cols[0]), std::move(cols[1]));
}

double Radiance::at(double elevation_deg) const {
  if (elevation_.empty()) return constant_;
  if (elevation_deg <= elevation_.front()) return radiance_.front();
  if (elevation_deg >= elevation_.back()) return radiance_.back();
  const auto it = std::upper_bound(elevation_.begin(), elevation_.end(), elevation_deg);
  const auto i = static_cast<std::size_t>(it - elevation_.begin());
  const double frac = (elevation_deg - elevation_[i - 1]) / (elevation_[i] - elevation_[i - 1]);
  return radiance_[i - 1] + frac * (radiance_[i] - radiance_[i - 1]);
}

// ---------------------------------------------------------------------------

double pair_number_probability(int n, double squeezing) {
  if (n < 0) throw std::invalid_argument("pair number must be >= 0");
  if (!(squeezing >= 0.0)) throw std::invalid_argument("squeezing must be >= 0");
  const double t = std::tanh(squeezing);
  const double c = std::cosh(squeezing);
  return std::pow(t, 2.0 * n) / (c * c);
}

double multi_pair_probability(double squeezing) {
  // 1 - P0 - P1 = tanh^4(r), written without the cancellation.
  const double t2 = std::tanh(squeezing) * std::tanh(squeezing);
  return t2 * t2;
}

namespace {

double click_prob_per_radiance(const DetectorModel& det, double rx_diameter_m, double wavelength_m) {
  const double photon_energy = kPlanck * kLightSpeed / wavelength_m;
  const double rx_radius_cm = 0.5 * rx_diameter_m * 100.0;
  const double area_cm2 = kPi * rx_radius_cm * rx_radius_cm;
  return det.coincidence_window_s / photon_energy * area_cm2 * det.fov_sr * det.filter_bandwidth_nm;
}

}  // namespace

double background_click_prob(double radiance, const DetectorModel& det, double rx_diameter_m, double wavelength_m) {
  if (!(radiance >= 0.0)) throw std::invalid_argument("radiance must be >= 0");
  const double p = click_prob_per_radiance(det, rx_diameter_m, wavelength_m) * radiance * det.background_scale;
  return std::clamp(p, 0.0, 1.0);
}

double radiance_for_click_prob(double p_bg, const DetectorModel& det, double rx_diameter_m, double wavelength_m) {
  return p_bg / click_prob_per_radiance(det, rx_diameter_m, wavelength_m);
}

double default_night_radiance() { return radiance_for_click_prob(1e-7, DetectorModel{}, 0.70, 785e-9); }

double extraneous_prob(double p_dark, double p_bg) { return p_dark + p_bg - p_dark * p_bg; }

double coincidence_rate(const LinkPair& in, double p_afterpulse) {
  const double ea = in.eta_a, eb = in.eta_b, pa = in.p_ec_a, pb = in.p_ec_b;
  const double et = ea * eb;
  return (1.0 + p_afterpulse * p_afterpulse) *
         (et + ea * (1.0 - eb) * pb + eb * (1.0 - ea) * pa + (1.0 - et) * pa * pb);
}

double error_rate(const LinkPair& in, double p_afterpulse, double qber_intrinsic, double d_t) {
  const double ea = in.eta_a, eb = in.eta_b, pa = in.p_ec_a, pb = in.p_ec_b;
  const double et = ea * eb;
  return ea * (1.0 - eb) * (1.0 - pa) * pb + eb * (1.0 - ea) * (1.0 - pb) * pa + (1.0 - et) * pa * pb +
         p_afterpulse * p_afterpulse * d_t / 2.0 + qber_intrinsic * et;
}

std::vector<std::size_t> CountsProfile::visible_indices() const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < visible.size(); ++i)
    if (visible[i]) idx.push_back(i);
  return idx;
}

CountsProfile build_counts(const LossProfile& loss, const LinkProfile& link, const DetectorModel& det,
                           const SourceModel& src, const SiteBackground& sky, const OpticalSystem& optics) {
  const std::size_t n = loss.size();
  if (link.size() != n) throw std::invalid_argument("loss and link profiles differ in length");
  CountsProfile c;
  c.pair_rate_hz = src.pair_rate_hz;
  c.bin_width_s = link.bin_width_s;
  c.visible = loss.visible;
  for (auto* v : {&c.p_ec_a, &c.p_ec_b, &c.d, &c.e, &c.coincidences, &c.errors}) v->assign(n, 0.0);

  const auto count = static_cast<std::ptrdiff_t>(n);
  SATQKD_OMP(parallel for schedule(static))
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    if (!loss.visible[i]) continue;
    const double bg_a =
        background_click_prob(sky.radiance_a.at(link.elev_a_deg[i]), det, optics.rx_diameter_m, optics.wavelength_a_m);
    const double bg_b =
        background_click_prob(sky.radiance_b.at(link.elev_b_deg[i]), det, optics.rx_diameter_m, optics.wavelength_b_m);
    const LinkPair in{loss.eta_a[i], loss.eta_b[i], extraneous_prob(det.p_dark, bg_a), extraneous_prob(det.p_dark, bg_b)};
    const double d = coincidence_rate(in, det.p_afterpulse);
    const double e = std::min(error_rate(in, det.p_afterpulse, src.qber_intrinsic, d), d);
    c.p_ec_a[i] = in.p_ec_a;
    c.p_ec_b[i] = in.p_ec_b;
    c.d[i] = d;
    c.e[i] = e;
    c.coincidences[i] = src.pair_rate_hz * d * link.bin_width_s;
    c.errors[i] = src.pair_rate_hz * e * link.bin_width_s;
  }
  return c;
}

}  // namespace satqkd
