#pragma once

// Communication graph, multi-UAV detection consensus and OR-propagation of
// hotspot knowledge.

#include <cstdint>
#include <span>
#include <vector>

#include "jcas/phy_jcas.hpp"
#include "jcas/rng.hpp"
#include "jcas/world.hpp"

namespace jcas {

// Symmetric, loop-free adjacency plus the pairwise SNR it was thresholded from.
// Inert UAVs have no edges; their SNR entries are still filled.
class CommGraph {
 public:
  CommGraph() = default;
  explicit CommGraph(int n);

  int size() const { return n_; }
  bool connected(int i, int j) const { return adjacency_[idx(i, j)] != 0; }
  double snr_db(int i, int j) const { return snr_db_[idx(i, j)]; }
  std::vector<int> neighbors(int i) const;
  int degree(int i) const;

  void set_snr(int i, int j, double snr);
  void set_edge(int i, int j, bool on);

  bool operator==(const CommGraph&) const = default;

 private:
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j);
  }

  int n_ = 0;
  std::vector<std::uint8_t> adjacency_;
  std::vector<double> snr_db_;
};

/// Edge (i, j) iff comm_snr_db(max(distance, min_range)) >= comm_edge_snr_db and
/// neither UAV is inert. The diagonal SNR is left at -inf.
CommGraph build_comm_graph(std::span<const UavState> uavs, const GridSpec& grid,
                           const JcasParams& params);

// N x n_targets bit matrix; row i is agent i's knowledge vector.
class KnowledgeMatrix {
 public:
  KnowledgeMatrix() = default;
  KnowledgeMatrix(int agents, int targets)
      : agents_(agents),
        targets_(targets),
        bits_(static_cast<std::size_t>(agents) * static_cast<std::size_t>(targets), 0) {}

  int agents() const { return agents_; }
  int targets() const { return targets_; }
  bool get(int agent, int target) const { return bits_[idx(agent, target)] != 0; }
  void set(int agent, int target, bool v = true) { bits_[idx(agent, target)] = v ? 1 : 0; }
  int count_column(int target) const;
  // True if every bit set in `older` is also set here.
  bool dominates(const KnowledgeMatrix& older) const;

  bool operator==(const KnowledgeMatrix&) const = default;

 private:
  std::size_t idx(int a, int t) const {
    return static_cast<std::size_t>(a) * static_cast<std::size_t>(targets_) +
           static_cast<std::size_t>(t);
  }

  int agents_ = 0;
  int targets_ = 0;
  std::vector<std::uint8_t> bits_;
};

enum class DetectionMode : std::uint8_t {
  Stochastic,    // detect_ij ~ Bernoulli(p_ij)
  Deterministic  // detect_ij = p_ij > 0.5
};

struct DetectionRound {
  std::vector<std::uint8_t> newly_detected;  // per hotspot
  KnowledgeMatrix local;                     // detect_ij for this step
  std::vector<double> probability;           // p_ij, row-major N x n_targets; 0 if skipped
};

/// One sensing step. Every undetected hotspot is tested by every UAV using its
/// own comm load 1 - pilot_density; the hotspot is confirmed when at least
/// theta_detect UAVs detect it in the same step. The stream advances by exactly
/// N uniforms per undetected hotspot, inert UAVs included, so the draw pattern
/// does not depend on outcomes.
DetectionRound detection_round(const WorldState& world, const JcasParams& params,
                               int theta_detect, DetectionMode mode, Rng& rng);

/// Synchronous OR-consensus: k_i <- k_i | OR_{j in N(i)} k_j, for at most N
/// rounds or until nothing changes. Each connected component ends up with the
/// OR of its rows. Throws ProtocolError if the dimensions disagree.
KnowledgeMatrix propagate(KnowledgeMatrix knowledge, const CommGraph& graph);

/// Hotspot j is informed iff it is detected and every counted agent knows it.
/// `counted` selects the agents that must know (all ones = every agent).
std::vector<std::uint8_t> informed_status(const KnowledgeMatrix& knowledge,
                                          std::span<const std::uint8_t> detected,
                                          std::span<const std::uint8_t> counted);

}  // namespace jcas
