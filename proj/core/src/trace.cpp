#include "jcas/trace.hpp"

#include <json.hpp>

#include "jcas/errors.hpp"

namespace jcas {

namespace {

using nlohmann::json;

json cell_json(Cell c) { return json::array({c.x, c.y}); }

}  // namespace

std::string trace_header_json(const Environment& env, int episode, std::uint64_t seed) {
  const WorldState& w = env.world();
  json j;
  j["schema"] = kTraceSchema;
  j["kind"] = "episode";
  j["episode"] = episode;
  j["seed"] = seed;
  j["grid"] = json::array({w.grid.width_cells, w.grid.height_cells});
  j["cell_size_m"] = w.grid.cell_size_m;
  j["n_uavs"] = env.config().n_uavs;
  j["n_targets"] = env.config().n_targets;
  j["theta_detect"] = env.config().theta_detect;
  j["t_max"] = env.config().t_max;
  json depots = json::array();
  for (Cell c : w.grid.depot_cells) depots.push_back(cell_json(c));
  j["depots"] = depots;
  json hotspots = json::array();
  for (const Hotspot& h : w.hotspots) hotspots.push_back(cell_json(h.cell));
  j["hotspots"] = hotspots;
  return j.dump();
}

std::string trace_step_json(const Transition& tr) {
  json j;
  j["kind"] = "step";
  j["t"] = tr.t;
  json actions = json::array();
  for (std::size_t i = 0; i < tr.decoded.size(); ++i) {
    actions.push_back({{"dir", to_string(tr.decoded[i].direction)},
                       {"pilot", tr.decoded[i].pilot_density},
                       {"applied", to_string(tr.applied[i])}});
  }
  j["actions"] = actions;
  json positions = json::array();
  for (Cell c : tr.positions) positions.push_back(cell_json(c));
  j["positions"] = positions;
  j["battery_kwh"] = tr.battery_kwh;
  j["energy_kwh"] = tr.energy_kwh;
  j["charged_kwh"] = tr.charged_kwh;
  j["throughput"] = tr.throughput;
  j["returning"] = tr.returning;
  j["inert"] = tr.inert;
  j["detection_votes"] = tr.detection_votes;
  j["newly_detected"] = tr.newly_detected;
  j["newly_informed"] = tr.newly_informed;
  j["carbon_intensity"] = tr.carbon_intensity;
  j["grid_energy_kwh"] = tr.grid_energy_kwh;
  j["co2_kg"] = tr.co2_kg;
  j["new_cells"] = tr.new_cells;
  j["revisit_count"] = tr.revisit_count;
  j["knowledge_spread"] = tr.knowledge_spread;
  j["potential_before"] = tr.potential_before;
  j["potential_after"] = tr.potential_after;
  const RewardTerms& r = tr.terms;
  // nlohmann::json sorts object keys, so field order is stable.
  j["terms"] = {{"detection", r.detection},   {"inform", r.inform},
                {"completion", r.completion}, {"coverage", r.coverage},
                {"energy", r.energy},         {"carbon", r.carbon},
                {"carbon_shaping", r.carbon_shaping}, {"revisit", r.revisit},
                {"truncation", r.truncation}, {"throughput", r.throughput},
                {"spread", r.spread},         {"potential", r.potential}};
  j["reward"] = tr.team_reward;
  j["done"] = tr.done;
  j["truncated"] = tr.truncated;
  return j.dump();
}

TraceWriter::TraceWriter(const std::filesystem::path& path) : out_(path) {
  if (!out_) throw ConfigError("cannot open trace file " + path.string());
}

void TraceWriter::write_header(const Environment& env, int episode, std::uint64_t seed) {
  out_ << trace_header_json(env, episode, seed) << '\n';
}

void TraceWriter::write_step(const Transition& transition) {
  out_ << trace_step_json(transition) << '\n';
}

}  // namespace jcas
