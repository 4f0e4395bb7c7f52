#include "jcas/energy_carbon.hpp"

#include <algorithm>
#include <string>

#include "jcas/errors.hpp"

namespace jcas {

void EnergyParams::validate() const {
  auto nonneg = [](double v, const char* name) {
    if (!(v >= 0.0)) throw ConfigError(std::string("EnergyParams: ") + name + " must be >= 0");
  };
  nonneg(b_max_kwh, "b_max_kwh");
  nonneg(rtb_threshold_kwh, "rtb_threshold_kwh");
  nonneg(charge_per_step_kwh, "charge_per_step_kwh");
  nonneg(e_move_kwh, "e_move_kwh");
  nonneg(e_sense_base_kwh, "e_sense_base_kwh");
  nonneg(e_comm_kwh, "e_comm_kwh");
  nonneg(carbon_intensity_min, "carbon_intensity_min");
  if (!(b_max_kwh > 0.0)) throw ConfigError("EnergyParams: b_max_kwh must be > 0");
  if (!(rtb_threshold_kwh < b_max_kwh)) {
    throw ConfigError("EnergyParams: rtb_threshold_kwh must be below b_max_kwh");
  }
  if (!(renewable_share >= 0.0 && renewable_share <= 1.0)) {
    throw ConfigError("EnergyParams: renewable_share must lie in [0, 1]");
  }
  if (!(rtb_resume_fraction >= 0.0 && rtb_resume_fraction <= 1.0)) {
    throw ConfigError("EnergyParams: rtb_resume_fraction must lie in [0, 1]");
  }
  if (!(carbon_intensity_max >= carbon_intensity_min)) {
    throw ConfigError("EnergyParams: carbon intensity range is empty");
  }
}

double step_energy_kwh(bool moved, double pilot_density, double pilot_max,
                       const EnergyParams& params) {
  const double move = moved ? params.e_move_kwh : 0.0;
  return move + params.e_sense_base_kwh * (pilot_density / pilot_max) + params.e_comm_kwh;
}

double update_battery(double battery_kwh, double energy_kwh, bool at_depot,
                      const EnergyParams& params) {
  const double charge = at_depot ? params.charge_per_step_kwh : 0.0;
  return std::min(params.b_max_kwh, std::max(0.0, battery_kwh - energy_kwh + charge));
}

CarbonSplit carbon_emission_kg(double charged_kwh, double carbon_intensity,
                               const EnergyParams& params) {
  if (!(charged_kwh >= 0.0)) throw DomainError("carbon_emission_kg: charged energy must be >= 0");
  const double grid = (1.0 - params.renewable_share) * charged_kwh;
  return {grid, grid * carbon_intensity};
}

double sample_carbon_intensity(Rng& rng, const EnergyParams& params) {
  return rng.uniform(params.carbon_intensity_min, params.carbon_intensity_max);
}

}  // namespace jcas
