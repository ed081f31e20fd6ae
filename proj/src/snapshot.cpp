#include "kw/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "kw/errors.hpp"

namespace kw {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

void put_f64(std::string& out, double d) {
  const auto v = std::bit_cast<std::uint64_t>(d);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

std::uint64_t get_le(const std::string& in, std::size_t& pos, int bytes) {
  if (pos + static_cast<std::size_t>(bytes) > in.size()) throw IoError("KWF1: truncated file");
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  pos += static_cast<std::size_t>(bytes);
  return v;
}

}  // namespace

std::string encode_snapshot(const SpectralField& f) {
  const auto& g = f.grid();
  const auto samples = from_spectral(f);
  std::string out = "KWF1";
  put_u32(out, static_cast<std::uint32_t>(g.dim()));
  put_u32(out, static_cast<std::uint32_t>(f.components()));
  put_u32(out, static_cast<std::uint32_t>(g.n()));
  put_f64(out, g.side_length());
  out.reserve(out.size() + 8 * samples.size());
  for (double v : samples) put_f64(out, v);
  return out;
}

SpectralField decode_snapshot(const std::string& bytes) {
  if (bytes.size() < 4 || bytes.compare(0, 4, "KWF1") != 0) throw IoError("KWF1: bad magic");
  std::size_t pos = 4;
  const auto dim = static_cast<int>(get_le(bytes, pos, 4));
  const auto comps = static_cast<int>(get_le(bytes, pos, 4));
  const auto n = static_cast<int>(get_le(bytes, pos, 4));
  const double L = std::bit_cast<double>(get_le(bytes, pos, 8));
  if (dim < 1 || dim > 3 || comps < 1 || n < 8) throw IoError("KWF1: bad header");
  const TorusGrid grid(dim, L, n);
  const std::size_t count = static_cast<std::size_t>(comps) * grid.size();
  if (bytes.size() != pos + 8 * count) throw IoError("KWF1: payload size does not match header");
  std::vector<double> samples(count);
  for (auto& v : samples) v = std::bit_cast<double>(get_le(bytes, pos, 8));
  return to_spectral(grid, comps, samples);
}

void write_snapshot(const std::string& path, const SpectralField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path + " for writing");
  const auto bytes = encode_snapshot(f);
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw IoError("write failed: " + path);
}

SpectralField read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return decode_snapshot(ss.str());
}

}  // namespace kw
