#include "jcas/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

#include "jcas/errors.hpp"

namespace jcas {

namespace {

using nlohmann::json;
using Handler = std::function<void(const json&)>;

template <typename T>
Handler bind(T& field) {
  return [&field](const json& v) { field = v.get<T>(); };
}

Handler bind_optional(std::optional<double>& field) {
  return [&field](const json& v) {
    if (v.is_null()) {
      field.reset();
    } else {
      field = v.get<double>();
    }
  };
}

void apply_section(const json& section, const std::string& path,
                   const std::map<std::string, Handler>& handlers) {
  if (!section.is_object()) throw ConfigError(path + ": expected an object");
  for (const auto& [key, value] : section.items()) {
    const auto it = handlers.find(key);
    if (it == handlers.end()) throw ConfigError(path + ": unknown key '" + key + "'");
    try {
      it->second(value);
    } catch (const json::exception& e) {
      throw ConfigError(path + "." + key + ": " + e.what());
    }
  }
}

DetectionMode parse_detection_mode(const std::string& s) {
  if (s == "stochastic") return DetectionMode::Stochastic;
  if (s == "deterministic") return DetectionMode::Deterministic;
  throw ConfigError("environment.detection_mode: expected 'stochastic' or 'deterministic'");
}

std::vector<Cell> parse_cells(const json& v) {
  std::vector<Cell> cells;
  for (const json& c : v) {
    if (!c.is_array() || c.size() != 2) throw ConfigError("environment.depots: expected [x, y] pairs");
    cells.push_back({c[0].get<int>(), c[1].get<int>()});
  }
  return cells;
}

}  // namespace

PolicyKind parse_policy_kind(std::string_view text) {
  if (text == "random") return PolicyKind::Random;
  if (text == "constant-pilot") return PolicyKind::ConstantPilot;
  if (text == "adaptive-pilot") return PolicyKind::AdaptivePilot;
  if (text == "checkpoint") return PolicyKind::Checkpoint;
  throw ConfigError("unknown policy '" + std::string(text) +
                    "' (expected random|constant-pilot|adaptive-pilot|checkpoint)");
}

const char* to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Random: return "random";
    case PolicyKind::ConstantPilot: return "constant-pilot";
    case PolicyKind::AdaptivePilot: return "adaptive-pilot";
    case PolicyKind::Checkpoint: return "checkpoint";
  }
  return "?";
}

int MarlParams::iterations() const {
  const auto b = static_cast<std::int64_t>(ppo.batch_steps);
  return static_cast<int>((training_steps + b - 1) / b);
}

void ExperimentConfig::validate() const {
  env.validate();
  marl.ppo.validate();
  MlpShape{env.observation_dim(), marl.hidden}.validate();
  if (marl.episodes_per_evaluation < 1) throw ConfigError("marl.episodes_per_evaluation must be >= 1");
  if (marl.num_envs < 1) throw ConfigError("marl.num_envs must be >= 1");
  if (marl.training_steps < 0) throw ConfigError("marl.training_steps must be >= 0");
  if (marl.checkpoint_every < 1) throw ConfigError("marl.checkpoint_every must be >= 1");
  const ScriptedParams& s = evaluation.scripted;
  if (!(s.jitter >= 0.0 && s.jitter <= 1.0)) throw ConfigError("evaluation.scripted.jitter must lie in [0, 1]");
  for (double p : {s.constant_pilot, s.adaptive_high_pilot, s.adaptive_low_pilot}) {
    if (p < env.phy.pilot_min || p > env.phy.pilot_max) {
      throw ConfigError("evaluation.scripted: pilot densities must lie within the pilot bounds");
    }
  }
  if (evaluation.policy == PolicyKind::Checkpoint && evaluation.checkpoint.empty()) {
    throw ConfigError("evaluation.checkpoint is required for the checkpoint policy");
  }
}

ExperimentConfig parse_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  ExperimentConfig cfg;
  EnvConfig& env = cfg.env;
  JcasParams& phy = env.phy;
  EnergyParams& en = env.energy;
  RewardWeights& rw = env.rewards;
  MarlParams& marl = cfg.marl;
  PpoHyper& ppo = marl.ppo;
  EvaluationParams& ev = cfg.evaluation;
  ScriptedParams& sc = ev.scripted;

  const std::map<std::string, Handler> jcas_keys{
      {"carrier_freq_hz", bind(phy.carrier_freq_hz)},
      {"bandwidth_hz", bind(phy.bandwidth_hz)},
      {"tx_power_dbm", bind(phy.tx_power_dbm)},
      {"tx_gain_dbi", bind(phy.tx_gain_dbi)},
      {"rx_gain_dbi", bind(phy.rx_gain_dbi)},
      {"rcs_dbsm", bind(phy.rcs_dbsm)},
      {"noise_floor_dbm", bind(phy.noise_floor_dbm)},
      {"proc_gain_db", bind(phy.proc_gain_db)},
      {"jcas_penalty_db_per_load", bind(phy.jcas_penalty_db_per_load)},
      {"logistic_slope", bind(phy.logistic_slope)},
      {"pilot_min", bind(phy.pilot_min)},
      {"pilot_max", bind(phy.pilot_max)},
      {"pathloss_exponent", bind(phy.pathloss_exponent)},
      {"detect_threshold_db", bind_optional(phy.detect_threshold_db)},
      {"detect_ref_range_m", bind(phy.detect_ref_range_m)},
      {"range_resolution_m", bind_optional(phy.range_resolution_m)},
      {"ref_spectral_eff_bits_per_s_hz", bind(phy.ref_spectral_eff_bits_per_s_hz)},
      {"comm_edge_snr_db", bind(phy.comm_edge_snr_db)},
      {"comm_ref_distance_m", bind(phy.comm_ref_distance_m)},
      {"min_range_m", bind(phy.min_range_m)},
  };

  const std::map<std::string, Handler> env_keys{
      {"grid_width", bind(env.grid.width_cells)},
      {"grid_height", bind(env.grid.height_cells)},
      {"cell_size_m", bind(env.grid.cell_size_m)},
      {"depots", [&](const json& v) { env.grid.depot_cells = parse_cells(v); }},
      {"n_uavs", bind(env.n_uavs)},
      {"n_targets", bind(env.n_targets)},
      {"t_max", bind(env.t_max)},
      {"theta_detect", bind(env.theta_detect)},
      {"detection_mode",
       [&](const json& v) { env.detection_mode = parse_detection_mode(v.get<std::string>()); }},
      {"inert_agents_block_inform", bind(env.inert_agents_block_inform)},
      {"neighbor_slots", bind(env.neighbor_slots)},
      {"jcas", [&](const json& v) { apply_section(v, "environment.jcas", jcas_keys); }},
  };

  const std::map<std::string, Handler> energy_keys{
      {"b_max_kwh", bind(en.b_max_kwh)},
      {"rtb_threshold_kwh", bind(en.rtb_threshold_kwh)},
      {"rtb_resume_fraction", bind(en.rtb_resume_fraction)},
      {"charge_per_step_kwh", bind(en.charge_per_step_kwh)},
      {"e_move_kwh", bind(en.e_move_kwh)},
      {"e_sense_base_kwh", bind(en.e_sense_base_kwh)},
      {"e_comm_kwh", bind(en.e_comm_kwh)},
      {"renewable_share", bind(en.renewable_share)},
      {"carbon_intensity_min", bind(en.carbon_intensity_min)},
      {"carbon_intensity_max", bind(en.carbon_intensity_max)},
  };

  const std::map<std::string, Handler> reward_keys{
      {"detection", bind(rw.detection)},
      {"inform", bind(rw.inform)},
      {"completion", bind(rw.completion)},
      {"coverage", bind(rw.coverage)},
      {"energy", bind(rw.energy)},
      {"carbon", bind(rw.carbon)},
      {"revisit", bind(rw.revisit)},
      {"truncation", bind(rw.truncation)},
      {"throughput", bind(rw.throughput)},
      {"spread", bind(rw.spread)},
      {"shaping_distance", bind(rw.shaping_distance)},
      {"shaping_carbon", bind(rw.shaping_carbon)},
  };

  const std::map<std::string, Handler> marl_keys{
      {"algorithm",
       [](const json& v) {
         if (v.get<std::string>() != "ppo") throw ConfigError("marl.algorithm: only 'ppo' is supported");
       }},
      {"gamma", bind(ppo.gamma)},
      {"learning_rate", bind(ppo.learning_rate)},
      {"batch_size", bind(ppo.batch_steps)},
      {"training_steps", bind(marl.training_steps)},
      {"episodes_per_evaluation", bind(marl.episodes_per_evaluation)},
      {"gae_lambda", bind(ppo.gae_lambda)},
      {"clip", bind(ppo.clip)},
      {"value_coef", bind(ppo.value_coef)},
      {"entropy_coef", bind(ppo.entropy_coef)},
      {"epochs", bind(ppo.epochs)},
      {"minibatch", bind(ppo.minibatch)},
      {"max_grad_norm", bind(ppo.max_grad_norm)},
      {"hidden", bind(marl.hidden)},
      {"num_envs", bind(marl.num_envs)},
      {"checkpoint_every", bind(marl.checkpoint_every)},
      {"log_std_init", bind(marl.log_std_init)},
  };

  const std::map<std::string, Handler> scripted_keys{
      {"jitter", bind(sc.jitter)},
      {"constant_pilot", bind(sc.constant_pilot)},
      {"adaptive_high_pilot", bind(sc.adaptive_high_pilot)},
      {"adaptive_low_pilot", bind(sc.adaptive_low_pilot)},
      {"adaptive_radius_cells", bind(sc.adaptive_radius_cells)},
  };

  const std::map<std::string, Handler> eval_keys{
      {"policy", [&](const json& v) { ev.policy = parse_policy_kind(v.get<std::string>()); }},
      {"checkpoint", bind(ev.checkpoint)},
      {"seed", bind(ev.seed)},
      {"scripted", [&](const json& v) { apply_section(v, "evaluation.scripted", scripted_keys); }},
  };

  const std::map<std::string, Handler> root_keys{
      {"environment", [&](const json& v) { apply_section(v, "environment", env_keys); }},
      {"energy", [&](const json& v) { apply_section(v, "energy", energy_keys); }},
      {"rewards", [&](const json& v) { apply_section(v, "rewards", reward_keys); }},
      {"marl", [&](const json& v) { apply_section(v, "marl", marl_keys); }},
      {"evaluation", [&](const json& v) { apply_section(v, "evaluation", eval_keys); }},
  };
  apply_section(root, "config", root_keys);
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const ExperimentConfig& cfg) {
  const EnvConfig& env = cfg.env;
  const JcasParams& phy = env.phy;
  const EnergyParams& en = env.energy;
  const RewardWeights& rw = env.rewards;
  const PpoHyper& ppo = cfg.marl.ppo;
  const ScriptedParams& sc = cfg.evaluation.scripted;

  json depots = json::array();
  for (Cell c : env.grid.depot_cells) depots.push_back({c.x, c.y});
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };

  json j;
  j["environment"] = {
      {"grid_width", env.grid.width_cells},
      {"grid_height", env.grid.height_cells},
      {"cell_size_m", env.grid.cell_size_m},
      {"depots", depots},
      {"n_uavs", env.n_uavs},
      {"n_targets", env.n_targets},
      {"t_max", env.t_max},
      {"theta_detect", env.theta_detect},
      {"detection_mode", env.detection_mode == DetectionMode::Stochastic ? "stochastic" : "deterministic"},
      {"inert_agents_block_inform", env.inert_agents_block_inform},
      {"neighbor_slots", env.neighbor_slots},
      {"jcas",
       {{"carrier_freq_hz", phy.carrier_freq_hz},
        {"bandwidth_hz", phy.bandwidth_hz},
        {"tx_power_dbm", phy.tx_power_dbm},
        {"tx_gain_dbi", phy.tx_gain_dbi},
        {"rx_gain_dbi", phy.rx_gain_dbi},
        {"rcs_dbsm", phy.rcs_dbsm},
        {"noise_floor_dbm", phy.noise_floor_dbm},
        {"proc_gain_db", phy.proc_gain_db},
        {"jcas_penalty_db_per_load", phy.jcas_penalty_db_per_load},
        {"logistic_slope", phy.logistic_slope},
        {"pilot_min", phy.pilot_min},
        {"pilot_max", phy.pilot_max},
        {"pathloss_exponent", phy.pathloss_exponent},
        {"detect_threshold_db", opt(phy.detect_threshold_db)},
        {"detect_ref_range_m", phy.detect_ref_range_m},
        {"range_resolution_m", opt(phy.range_resolution_m)},
        {"ref_spectral_eff_bits_per_s_hz", phy.ref_spectral_eff_bits_per_s_hz},
        {"comm_edge_snr_db", phy.comm_edge_snr_db},
        {"comm_ref_distance_m", phy.comm_ref_distance_m},
        {"min_range_m", phy.min_range_m}}},
  };
  j["energy"] = {{"b_max_kwh", en.b_max_kwh},
                 {"rtb_threshold_kwh", en.rtb_threshold_kwh},
                 {"rtb_resume_fraction", en.rtb_resume_fraction},
                 {"charge_per_step_kwh", en.charge_per_step_kwh},
                 {"e_move_kwh", en.e_move_kwh},
                 {"e_sense_base_kwh", en.e_sense_base_kwh},
                 {"e_comm_kwh", en.e_comm_kwh},
                 {"renewable_share", en.renewable_share},
                 {"carbon_intensity_min", en.carbon_intensity_min},
                 {"carbon_intensity_max", en.carbon_intensity_max}};
  j["rewards"] = {{"detection", rw.detection},   {"inform", rw.inform},
                  {"completion", rw.completion}, {"coverage", rw.coverage},
                  {"energy", rw.energy},         {"carbon", rw.carbon},
                  {"revisit", rw.revisit},       {"truncation", rw.truncation},
                  {"throughput", rw.throughput}, {"spread", rw.spread},
                  {"shaping_distance", rw.shaping_distance},
                  {"shaping_carbon", rw.shaping_carbon}};
  j["marl"] = {{"algorithm", "ppo"},
               {"gamma", ppo.gamma},
               {"learning_rate", ppo.learning_rate},
               {"batch_size", ppo.batch_steps},
               {"training_steps", cfg.marl.training_steps},
               {"episodes_per_evaluation", cfg.marl.episodes_per_evaluation},
               {"gae_lambda", ppo.gae_lambda},
               {"clip", ppo.clip},
               {"value_coef", ppo.value_coef},
               {"entropy_coef", ppo.entropy_coef},
               {"epochs", ppo.epochs},
               {"minibatch", ppo.minibatch},
               {"max_grad_norm", ppo.max_grad_norm},
               {"hidden", cfg.marl.hidden},
               {"num_envs", cfg.marl.num_envs},
               {"checkpoint_every", cfg.marl.checkpoint_every},
               {"log_std_init", cfg.marl.log_std_init}};
  j["evaluation"] = {{"policy", to_string(cfg.evaluation.policy)},
                     {"checkpoint", cfg.evaluation.checkpoint},
                     {"seed", cfg.evaluation.seed},
                     {"scripted",
                      {{"jitter", sc.jitter},
                       {"constant_pilot", sc.constant_pilot},
                       {"adaptive_high_pilot", sc.adaptive_high_pilot},
                       {"adaptive_low_pilot", sc.adaptive_low_pilot},
                       {"adaptive_radius_cells", sc.adaptive_radius_cells}}}};
  return j.dump(2);
}

}  // namespace jcas
