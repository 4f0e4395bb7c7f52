#include "jcas/phy_jcas.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "jcas/errors.hpp"

namespace jcas {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw ConfigError(std::string("JcasParams: ") + what);
}

}  // namespace

void JcasParams::validate() const {
  require(carrier_freq_hz > 0.0, "carrier_freq_hz must be > 0");
  require(bandwidth_hz > 0.0, "bandwidth_hz must be > 0");
  require(logistic_slope > 0.0, "logistic_slope must be > 0");
  require(pilot_min > 0.0 && pilot_max < 1.0 && pilot_min < pilot_max,
          "pilot bounds must satisfy 0 < pilot_min < pilot_max < 1");
  require(min_range_m > 0.0, "min_range_m must be > 0");
  require(detect_ref_range_m > 0.0, "detect_ref_range_m must be > 0");
  require(comm_ref_distance_m > 0.0, "comm_ref_distance_m must be > 0");
  require(ref_spectral_eff_bits_per_s_hz > 0.0, "ref_spectral_eff must be > 0");
  require(pathloss_exponent >= 0.0, "pathloss_exponent must be >= 0");
  require(jcas_penalty_db_per_load >= 0.0, "jcas_penalty_db_per_load must be >= 0");
  require(!range_resolution_m || *range_resolution_m > 0.0, "range_resolution_m must be > 0");
  require(!detect_threshold_db || std::isfinite(*detect_threshold_db),
          "detect_threshold_db must be finite");
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }
double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

double wavelength_m(const JcasParams& params) { return kSpeedOfLight / params.carrier_freq_hz; }

double range_resolution_m(const JcasParams& params) {
  return params.range_resolution_m.value_or(kSpeedOfLight / (2.0 * params.bandwidth_hz));
}

double range_resolution_penalty_db(double range_m, const JcasParams& params) {
  return 10.0 * std::log10(1.0 + range_m / range_resolution_m(params));
}

double echo_power_w(double range_m, const JcasParams& params) {
  if (!(range_m > 0.0)) throw DomainError("echo_power_w: range must be positive");
  const double lambda = wavelength_m(params);
  const double four_pi_cubed = std::pow(4.0 * std::numbers::pi, 3);
  const double r2 = range_m * range_m;
  return dbm_to_watts(params.tx_power_dbm) * db_to_linear(params.tx_gain_dbi) *
         db_to_linear(params.rx_gain_dbi) * lambda * lambda * db_to_linear(params.rcs_dbsm) /
         (four_pi_cubed * r2 * r2);
}

double sensing_snr_db(double range_m, const JcasParams& params) {
  const double ratio = echo_power_w(range_m, params) / dbm_to_watts(params.noise_floor_dbm);
  return linear_to_db(ratio) + params.proc_gain_db - range_resolution_penalty_db(range_m, params);
}

double effective_sensing_snr_db(double snr_db, double comm_load, const JcasParams& params) {
  if (!(comm_load >= 0.0 && comm_load <= 1.0)) {
    throw DomainError("effective_sensing_snr_db: comm_load must lie in [0, 1]");
  }
  return snr_db - params.jcas_penalty_db_per_load * comm_load;
}

double detection_threshold_db(const JcasParams& params) {
  if (params.detect_threshold_db) return *params.detect_threshold_db;
  return sensing_snr_db(params.detect_ref_range_m, params);
}

double detection_probability(double margin_db, const JcasParams& params) {
  const double z = params.logistic_slope * margin_db;
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double detection_probability_at(double range_m, double comm_load, const JcasParams& params) {
  const double r = std::max(range_m, params.min_range_m);
  const double snr = effective_sensing_snr_db(sensing_snr_db(r, params), comm_load, params);
  return detection_probability(snr - detection_threshold_db(params), params);
}

double comm_snr_db(double distance_m, const JcasParams& params) {
  if (!(distance_m > 0.0)) throw DomainError("comm_snr_db: distance must be positive");
  const double d0 = params.comm_ref_distance_m;
  const double pl_d0 = 20.0 * std::log10(4.0 * std::numbers::pi * d0 / wavelength_m(params));
  const double path_loss = pl_d0 + 10.0 * params.pathloss_exponent * std::log10(distance_m / d0);
  return params.tx_power_dbm + params.tx_gain_dbi + params.rx_gain_dbi - path_loss -
         params.noise_floor_dbm;
}

double normalized_throughput(double snr_db, double comm_load, const JcasParams& params) {
  if (!(comm_load >= 0.0 && comm_load <= 1.0)) {
    throw DomainError("normalized_throughput: comm_load must lie in [0, 1]");
  }
  const double spectral_eff = std::log2(1.0 + db_to_linear(snr_db));
  return comm_load * spectral_eff / params.ref_spectral_eff_bits_per_s_hz;
}

}  // namespace jcas
