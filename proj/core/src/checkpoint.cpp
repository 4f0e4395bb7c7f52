#include "jcas/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "jcas/errors.hpp"

namespace jcas {

namespace {

constexpr std::array<char, 8> kMagic{'J', 'C', 'A', 'S', 'C', 'K', 'P', 'T'};

template <typename U>
void put_le(std::ostream& out, U value) {
  std::array<char, sizeof(U)> bytes{};
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    bytes[i] = static_cast<char>((value >> (8 * i)) & 0xFF);
  }
  out.write(bytes.data(), bytes.size());
}

template <typename U>
U get_le(std::istream& in) {
  std::array<unsigned char, sizeof(U)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw ConfigError("checkpoint: unexpected end of file");
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) value |= static_cast<U>(bytes[i]) << (8 * i);
  return value;
}

void put_f64(std::ostream& out, double v) { put_le(out, std::bit_cast<std::uint64_t>(v)); }
double get_f64(std::istream& in) { return std::bit_cast<double>(get_le<std::uint64_t>(in)); }

void put_vector(std::ostream& out, const Eigen::VectorXd& v) {
  for (Eigen::Index k = 0; k < v.size(); ++k) put_f64(out, v[k]);
}

Eigen::VectorXd get_vector(std::istream& in, std::size_t n) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) v[static_cast<Eigen::Index>(k)] = get_f64(in);
  return v;
}

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& ck) {
  const MlpShape& shape = ck.weights.shape();
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(shape.input_dim));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(shape.hidden.size()));
  for (int h : shape.hidden) put_le<std::uint32_t>(out, static_cast<std::uint32_t>(h));
  put_le<std::uint64_t>(out, ck.iteration);
  put_le<std::uint64_t>(out, ck.seed);
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(ck.adam.step));
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(ck.weights.params().size()));
  put_vector(out, ck.weights.params());
  const bool has_moments = ck.adam.m.size() == ck.weights.params().size() &&
                           ck.adam.v.size() == ck.weights.params().size();
  out.put(has_moments ? 1 : 0);
  if (has_moments) {
    put_vector(out, ck.adam.m);
    put_vector(out, ck.adam.v);
  }
  if (!out) throw ConfigError("checkpoint: write failed");
}

Checkpoint read_checkpoint(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw ConfigError("checkpoint: bad magic");
  const auto version = get_le<std::uint32_t>(in);
  if (version != kCheckpointVersion) {
    throw ConfigError("checkpoint: unsupported version " + std::to_string(version));
  }
  MlpShape shape;
  shape.input_dim = static_cast<int>(get_le<std::uint32_t>(in));
  const auto layers = get_le<std::uint32_t>(in);
  if (layers > 64) throw ConfigError("checkpoint: implausible layer count");
  shape.hidden.clear();
  for (std::uint32_t l = 0; l < layers; ++l) shape.hidden.push_back(static_cast<int>(get_le<std::uint32_t>(in)));

  Checkpoint ck;
  ck.iteration = get_le<std::uint64_t>(in);
  ck.seed = get_le<std::uint64_t>(in);
  ck.adam.step = static_cast<std::int64_t>(get_le<std::uint64_t>(in));
  const auto count = get_le<std::uint64_t>(in);
  ck.weights = PolicyWeights(shape);
  if (count != static_cast<std::uint64_t>(ck.weights.params().size())) {
    throw ConfigError("checkpoint: parameter count does not match the stored shape");
  }
  ck.weights.params() = get_vector(in, count);
  char has_moments = 0;
  in.get(has_moments);
  if (!in) throw ConfigError("checkpoint: unexpected end of file");
  if (has_moments) {
    ck.adam.m = get_vector(in, count);
    ck.adam.v = get_vector(in, count);
  }
  return ck;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("checkpoint: cannot open " + tmp.string());
    write_checkpoint(out, checkpoint);
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("checkpoint: cannot open " + path.string());
  return read_checkpoint(in);
}

}  // namespace jcas
