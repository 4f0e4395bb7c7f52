#pragma once

// JSON-lines episode traces.
//
// Schema "jcas-trace/1". The first line of a file is an episode header:
//   {"schema":"jcas-trace/1","kind":"episode","episode":<int>,"seed":<u64>,
//    "grid":[W,H],"cell_size_m":d,"n_uavs":N,"n_targets":T,"theta_detect":k,
//    "t_max":Tmax,"depots":[[x,y],...],"hotspots":[[x,y],...]}
// followed by one line per environment step:
//   {"kind":"step","t":t,
//    "actions":[{"dir":"up","pilot":0.3,"applied":"left"},...],
//    "positions":[[x,y],...],"battery_kwh":[...],"energy_kwh":[...],
//    "charged_kwh":[...],"throughput":[...],"returning":[0|1,...],"inert":[0|1,...],
//    "detection_votes":[...],"newly_detected":[j,...],"newly_informed":[j,...],
//    "carbon_intensity":c,"grid_energy_kwh":g,"co2_kg":x,"new_cells":n,
//    "revisit_count":r,"knowledge_spread":s,"potential_before":p0,"potential_after":p1,
//    "terms":{"detection":..,"inform":..,"completion":..,"coverage":..,"energy":..,
//             "carbon":..,"carbon_shaping":..,"revisit":..,"truncation":..,
//             "throughput":..,"spread":..,"potential":..},
//    "reward":R,"done":bool,"truncated":bool}
// Numbers are written in shortest round-trip form, so equal runs give equal bytes.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>

#include "jcas/env.hpp"

namespace jcas {

inline constexpr const char* kTraceSchema = "jcas-trace/1";

std::string trace_header_json(const Environment& env, int episode, std::uint64_t seed);
std::string trace_step_json(const Transition& transition);

class TraceWriter {
 public:
  explicit TraceWriter(const std::filesystem::path& path);

  void write_header(const Environment& env, int episode, std::uint64_t seed);
  void write_step(const Transition& transition);

 private:
  std::ofstream out_;
};

}  // namespace jcas
