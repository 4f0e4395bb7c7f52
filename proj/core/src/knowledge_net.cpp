#include "jcas/knowledge_net.hpp"

#include <algorithm>
#include <limits>

#include "jcas/errors.hpp"

namespace jcas {

CommGraph::CommGraph(int n)
    : n_(n),
      adjacency_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0),
      snr_db_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n),
              -std::numeric_limits<double>::infinity()) {}

std::vector<int> CommGraph::neighbors(int i) const {
  std::vector<int> out;
  for (int j = 0; j < n_; ++j) {
    if (connected(i, j)) out.push_back(j);
  }
  return out;
}

int CommGraph::degree(int i) const {
  int d = 0;
  for (int j = 0; j < n_; ++j) d += connected(i, j) ? 1 : 0;
  return d;
}

void CommGraph::set_snr(int i, int j, double snr) {
  snr_db_[idx(i, j)] = snr;
  snr_db_[idx(j, i)] = snr;
}

void CommGraph::set_edge(int i, int j, bool on) {
  if (i == j) return;
  adjacency_[idx(i, j)] = on ? 1 : 0;
  adjacency_[idx(j, i)] = on ? 1 : 0;
}

CommGraph build_comm_graph(std::span<const UavState> uavs, const GridSpec& grid,
                           const JcasParams& params) {
  const int n = static_cast<int>(uavs.size());
  CommGraph graph(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double d = std::max(cell_distance_m(uavs[static_cast<std::size_t>(i)].cell,
                                                uavs[static_cast<std::size_t>(j)].cell,
                                                grid.cell_size_m),
                                params.min_range_m);
      const double snr = comm_snr_db(d, params);
      graph.set_snr(i, j, snr);
      const bool alive =
          !uavs[static_cast<std::size_t>(i)].inert && !uavs[static_cast<std::size_t>(j)].inert;
      graph.set_edge(i, j, alive && snr >= params.comm_edge_snr_db);
    }
  }
  return graph;
}

int KnowledgeMatrix::count_column(int target) const {
  int c = 0;
  for (int a = 0; a < agents_; ++a) c += get(a, target) ? 1 : 0;
  return c;
}

bool KnowledgeMatrix::dominates(const KnowledgeMatrix& older) const {
  if (older.agents_ != agents_ || older.targets_ != targets_) return false;
  for (std::size_t k = 0; k < bits_.size(); ++k) {
    if (older.bits_[k] && !bits_[k]) return false;
  }
  return true;
}

DetectionRound detection_round(const WorldState& world, const JcasParams& params,
                               int theta_detect, DetectionMode mode, Rng& rng) {
  if (theta_detect < 1) throw ConfigError("detection_round: theta_detect must be >= 1");
  const int n = static_cast<int>(world.uavs.size());
  const int m = static_cast<int>(world.hotspots.size());

  DetectionRound out;
  out.newly_detected.assign(static_cast<std::size_t>(m), 0);
  out.local = KnowledgeMatrix(n, m);
  out.probability.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(m), 0.0);

  for (int j = 0; j < m; ++j) {
    const Hotspot& h = world.hotspots[static_cast<std::size_t>(j)];
    if (h.detected()) continue;
    int votes = 0;
    for (int i = 0; i < n; ++i) {
      const UavState& u = world.uavs[static_cast<std::size_t>(i)];
      const double draw = rng.uniform01();
      if (u.inert) continue;
      const double range = cell_distance_m(u.cell, h.cell, world.grid.cell_size_m);
      const double p = detection_probability_at(range, 1.0 - u.pilot_density, params);
      out.probability[static_cast<std::size_t>(i) * static_cast<std::size_t>(m) +
                      static_cast<std::size_t>(j)] = p;
      const bool hit = mode == DetectionMode::Stochastic ? draw < p : p > 0.5;
      if (hit) {
        out.local.set(i, j);
        ++votes;
      }
    }
    if (votes >= theta_detect) out.newly_detected[static_cast<std::size_t>(j)] = 1;
  }
  return out;
}

KnowledgeMatrix propagate(KnowledgeMatrix knowledge, const CommGraph& graph) {
  const int n = knowledge.agents();
  if (graph.size() != n) throw ProtocolError("propagate: graph and knowledge sizes differ");
  const int m = knowledge.targets();
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) adj[static_cast<std::size_t>(i)] = graph.neighbors(i);

  for (int round = 0; round < n; ++round) {
    KnowledgeMatrix next = knowledge;
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      for (int j : adj[static_cast<std::size_t>(i)]) {
        for (int t = 0; t < m; ++t) {
          if (knowledge.get(j, t) && !next.get(i, t)) {
            next.set(i, t);
            changed = true;
          }
        }
      }
    }
    knowledge = std::move(next);
    if (!changed) break;
  }
  return knowledge;
}

std::vector<std::uint8_t> informed_status(const KnowledgeMatrix& knowledge,
                                          std::span<const std::uint8_t> detected,
                                          std::span<const std::uint8_t> counted) {
  const int m = knowledge.targets();
  std::vector<std::uint8_t> out(static_cast<std::size_t>(m), 0);
  for (int t = 0; t < m; ++t) {
    if (!detected[static_cast<std::size_t>(t)]) continue;
    bool all = true;
    for (int a = 0; a < knowledge.agents() && all; ++a) {
      if (counted[static_cast<std::size_t>(a)] && !knowledge.get(a, t)) all = false;
    }
    out[static_cast<std::size_t>(t)] = all ? 1 : 0;
  }
  return out;
}

}  // namespace jcas
