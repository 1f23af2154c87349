#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "bvd/error.hpp"
#include "bvd/solver/state.hpp"

namespace bvd::solver {

/// Binary checkpoint layout, little-endian throughout:
///   "BVD1" | u64 nx | u64 ny | f64 lx | f64 ly | f64 t | f64 nu | f64 kappa |
///   f64[nx*ny] u | f64[nx*ny] v | f64[nx*ny] theta
/// Arrays are row-major with x as the slow index (the Field layout).
/// Snapshots use the same layout.
inline constexpr char checkpoint_magic[4] = {'B', 'V', 'D', '1'};

namespace detail {

inline void put_u64(std::string& out, std::uint64_t x) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((x >> (8 * i)) & 0xff));
}

inline void put_f64(std::string& out, double x) { put_u64(out, std::bit_cast<std::uint64_t>(x)); }

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  std::uint64_t u64() {
    need(8);
    std::uint64_t x = 0;
    for (int i = 0; i < 8; ++i) {
      x |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += 8;
    return x;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  bool at_end() const { return pos_ == bytes_.size(); }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw IoError("checkpoint: truncated data");
  }
  const std::string& bytes_;
  std::size_t pos_ = 4;
};

}  // namespace detail

inline std::string encode_checkpoint(const State& s) {
  s.validate();
  const Grid& g = s.grid();
  std::string out(checkpoint_magic, 4);
  out.reserve(4 + 7 * 8 + 3 * 8 * g.size());
  detail::put_u64(out, g.nx());
  detail::put_u64(out, g.ny());
  detail::put_f64(out, g.lx());
  detail::put_f64(out, g.ly());
  detail::put_f64(out, s.t);
  detail::put_f64(out, s.params.nu);
  detail::put_f64(out, s.params.kappa);
  for (const Field* f : {&s.u, &s.v, &s.theta}) {
    for (double x : f->data()) detail::put_f64(out, x);
  }
  return out;
}

inline State decode_checkpoint(const std::string& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), checkpoint_magic, 4) != 0) {
    throw IoError("checkpoint: bad magic");
  }
  detail::Reader r(bytes);
  const std::uint64_t nx = r.u64();
  const std::uint64_t ny = r.u64();
  const double lx = r.f64();
  const double ly = r.f64();
  const double t = r.f64();
  const PhysParams params{r.f64(), r.f64()};
  if (nx > (1u << 16) || ny > (1u << 16)) throw IoError("checkpoint: implausible grid size");
  Grid g = [&] {
    try {
      return Grid(nx, ny, lx, ly);
    } catch (const Error& e) {
      throw IoError(std::string("checkpoint: ") + e.what());
    }
  }();
  if (r.remaining() != 3 * 8 * g.size()) throw IoError("checkpoint: payload size mismatch");
  auto read_field = [&] {
    std::vector<double> v(g.size());
    for (double& x : v) x = r.f64();
    return Field(g, std::move(v));
  };
  State s{read_field(), read_field(), read_field(), t, params};
  try {
    s.validate();
  } catch (const Error& e) {
    throw IoError(std::string("checkpoint: ") + e.what());
  }
  return s;
}

inline std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file_bytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

inline void write_checkpoint(const std::filesystem::path& path, const State& s) {
  write_file_bytes(path, encode_checkpoint(s));
}

inline State read_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(read_file_bytes(path));
}

}  // namespace bvd::solver
