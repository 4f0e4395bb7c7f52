#pragma once

// Per-step energy accounting, battery dynamics and CO2 attribution of
// depot charging.

#include "jcas/rng.hpp"

namespace jcas {

struct EnergyParams {
  double b_max_kwh = 0.20;
  double rtb_threshold_kwh = 0.04;
  // A returning UAV holds at the depot until battery >= this fraction of b_max.
  double rtb_resume_fraction = 0.8;
  // Energy delivered per step at a depot (0.05 kWh: empty to full in 4 steps).
  double charge_per_step_kwh = 0.05;
  double e_move_kwh = 8e-4;
  double e_sense_base_kwh = 2e-4;  // at pilot density == pilot_max
  double e_comm_kwh = 5e-5;
  double renewable_share = 0.1;
  double carbon_intensity_min = 0.25;  // kg CO2 / kWh
  double carbon_intensity_max = 0.40;

  void validate() const;
};

/// Energy drawn in one step: a constant propulsion cost when the UAV moved,
/// sensing scaled linearly by pilot_density / pilot_max, plus fixed comm overhead.
double step_energy_kwh(bool moved, double pilot_density, double pilot_max,
                       const EnergyParams& params);

/// min(b_max, max(0, b - e + charge)) where charge is applied only at a depot.
double update_battery(double battery_kwh, double energy_kwh, bool at_depot,
                      const EnergyParams& params);

struct CarbonSplit {
  double grid_kwh = 0.0;
  double co2_kg = 0.0;
};

/// Splits charged energy into its non-renewable share and the CO2 it emits.
CarbonSplit carbon_emission_kg(double charged_kwh, double carbon_intensity,
                               const EnergyParams& params);

double sample_carbon_intensity(Rng& rng, const EnergyParams& params);

}  // namespace jcas
