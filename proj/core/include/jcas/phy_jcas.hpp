#pragma once

// Closed-form OFDM radar and communication link budget.
//
// Every function here is pure and takes physical quantities in SI units or
// decibels (suffix _db / _dbm / _dbi / _dbsm). None of them applies the
// minimum-range floor; callers clamp distances to JcasParams::min_range_m.

#include <optional>

namespace jcas {

inline constexpr double kSpeedOfLight = 299'792'458.0;

struct JcasParams {
  double carrier_freq_hz = 5.8e9;
  double bandwidth_hz = 100e6;
  double tx_power_dbm = 20.0;
  double tx_gain_dbi = 2.0;
  double rx_gain_dbi = 2.0;
  double rcs_dbsm = 0.0;
  double noise_floor_dbm = -90.0;  // shared by the radar and comm receivers
  double proc_gain_db = 8.0;
  double jcas_penalty_db_per_load = 1.0;
  double logistic_slope = 0.25;
  double pilot_min = 0.01;
  double pilot_max = 0.30;
  double pathloss_exponent = 2.0;

  // Unset: derived as the zero-load sensing SNR at detect_ref_range_m, which
  // puts the 50 % detection point at that range.
  std::optional<double> detect_threshold_db;
  double detect_ref_range_m = 150.0;

  // Unset: c / (2 B).
  std::optional<double> range_resolution_m;

  double ref_spectral_eff_bits_per_s_hz = 6.0;
  double comm_edge_snr_db = 10.0;
  double comm_ref_distance_m = 1.0;
  double min_range_m = 10.0;

  // Throws ConfigError when an invariant is violated.
  void validate() const;
};

double db_to_linear(double db);
double linear_to_db(double linear);
double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

double wavelength_m(const JcasParams& params);
double range_resolution_m(const JcasParams& params);

/// Range-resolution penalty 10*log10(1 + R / dR); zero at R = 0 and growing
/// logarithmically, so it never dominates the R^-4 term.
double range_resolution_penalty_db(double range_m, const JcasParams& params);

/// Monostatic radar echo power P_t G_t G_r lambda^2 sigma / ((4 pi)^3 R^4), in watts.
/// Throws DomainError for range_m <= 0.
double echo_power_w(double range_m, const JcasParams& params);

/// Sensing SNR after processing gain and range-resolution penalty.
double sensing_snr_db(double range_m, const JcasParams& params);

/// Sensing SNR minus the JCAS penalty for carrying data on `comm_load` of the grid.
/// Throws DomainError if comm_load is outside [0, 1].
double effective_sensing_snr_db(double snr_db, double comm_load, const JcasParams& params);

double detection_threshold_db(const JcasParams& params);

/// Logistic map from detection margin to probability. Evaluated in the
/// numerically stable branch for each sign, so p(m) + p(-m) == 1.
double detection_probability(double margin_db, const JcasParams& params);

/// Full sensing chain for one UAV/hotspot pair: floors the range, applies the
/// comm-load penalty and the threshold.
double detection_probability_at(double range_m, double comm_load, const JcasParams& params);

/// Log-distance path loss anchored at free space at comm_ref_distance_m.
/// Throws DomainError for distance_m <= 0.
double comm_snr_db(double distance_m, const JcasParams& params);

/// Shannon spectral efficiency on the data share of the grid, divided by the
/// reference spectral efficiency. Values above 1 are legitimate.
double normalized_throughput(double snr_db, double comm_load, const JcasParams& params);

}  // namespace jcas
