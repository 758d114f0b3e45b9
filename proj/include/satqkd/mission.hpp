// End-to-end studies: one pass, Cartesian sweeps, the viewable-distance
// bound and the annual key yield.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "satqkd/scenario.hpp"

namespace satqkd {

/// Ground distance 2R arccos(R / (R + h)) spanned by the horizon circle.
double max_viewable_distance(double altitude_m, double earth_radius_m = kEarthRadius);

struct PassResult {
  LinkProfile link;
  LossProfile loss;
  CountsProfile counts;
  ThresholdSweep sweep;
};

/// geometry -> loss -> counts -> threshold sweep. `channel` must have been
/// built from sc.optics and the scenario tables.
PassResult simulate_pass(const Scenario& sc, const ScenarioData& data, const Channel& channel);
PassResult simulate_pass(const Scenario& sc, const ScenarioData& data);

SklResult single_pass_skl(const Scenario& sc, const ScenarioData& data);

struct SweepCell {
  double altitude_m = 0.0;
  double separation_m = 0.0;
  double phi_deg = 0.0;
  double xi_deg = 0.0;
  std::optional<double> offset_m;
  double background_scale = 1.0;
  double visible_s = 0.0;
  double min_loss_db = 0.0;  // NaN without joint visibility
  SklResult result;
  std::string error;  // non-empty when the cell failed
};

/// Cartesian product of the non-empty axes, altitude outermost and
/// background scale innermost. Cells run in parallel; output order is the
/// product order whatever the thread count. A failing cell records its
/// message and the sweep continues.
std::vector<SweepCell> run_sweep(const Scenario& sc, const ScenarioData& data, const SweepAxes& axes);

/// Smallest separation in [lo, hi] with zero key, located by bisection to
/// `tol_m`. Returns hi when the key never vanishes and lo when it is already
/// zero there.
double key_cutoff_distance(const Scenario& sc, const ScenarioData& data, double lo_m, double hi_m, double tol_m = 10e3);

double orbits_per_year(const OverpassGeometry& geom);

struct AnnualResult {
  double orbits_per_year = 0.0;
  double skl_year_bits = 0.0;
  std::vector<double> gamma_deg;  // sampled points on [0, 180]
  std::vector<double> skl_bits;   // single-pass SKL at each sample
};

/// (N / 2 pi) * integral over the full circle of SKL(gamma), with Delta = 0
/// and Phi = gamma, using SKL(gamma + 180) = SKL(gamma). Trapezoidal rule;
/// `mask` zeroes excluded gamma.
double annual_integral(const std::vector<double>& gamma_deg, const std::vector<double>& skl_bits, double orbits,
                       const std::vector<GammaRange>& mask = {});

AnnualResult annual_skl(const Scenario& sc, const ScenarioData& data, const AnnualConfig& cfg);

}  // namespace satqkd
