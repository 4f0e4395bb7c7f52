#pragma once

// Policy checkpoint file, format version 1. All integers and doubles are
// little-endian regardless of host byte order.
//
//   offset  type        field
//   0       char[8]     magic "JCASCKPT"
//   8       u32         format version (1)
//   12      u32         input_dim
//   16      u32         hidden layer count L
//   20      u32[L]      hidden widths
//   ..      u64         completed training iterations
//   ..      u64         training seed
//   ..      u64         Adam step count
//   ..      u64         parameter count P (must match the shape)
//   ..      f64[P]      parameters, in PolicyWeights layout
//   ..      u8          1 if Adam moments follow, else 0
//   ..      f64[P] x 2  Adam first and second moments (if present)

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "jcas/mlp.hpp"
#include "jcas/ppo.hpp"

namespace jcas {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  PolicyWeights weights;
  AdamState adam;
  std::uint64_t iteration = 0;
  std::uint64_t seed = 0;
};

void write_checkpoint(std::ostream& out, const Checkpoint& checkpoint);
Checkpoint read_checkpoint(std::istream& in);

// Writes through a temporary file and renames, so a crash never leaves a
// truncated checkpoint under `path`.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace jcas
