#include <cstring>
#include <fstream>

#include "phonon_forge/dynamics.hpp"
#include "phonon_forge/error.hpp"

namespace phonon_forge {

namespace {

constexpr char kMagic[4] = {'P', 'F', 'C', 'K'};

template <typename T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

void put_string(std::ostream& os, const std::string& s) {
  put(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) fail(ErrorCode::io, "truncated checkpoint file");
  return v;
}

std::string get_string(std::istream& is) {
  const auto n = get<std::uint32_t>(is);
  if (n > (1u << 20)) fail(ErrorCode::io, "corrupt checkpoint string length");
  std::string s(n, '\0');
  is.read(s.data(), n);
  if (!is) fail(ErrorCode::io, "truncated checkpoint file");
  return s;
}

}  // namespace

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& cp) {
  const auto d = static_cast<Eigen::Index>(cp.layout.total_dim());
  if (cp.state.size() != d * d) fail(ErrorCode::dimension_mismatch, "checkpoint state does not match its layout");
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorCode::io, "cannot open '" + path.string() + "' for writing");
  os.write(kMagic, 4);
  put(os, kCheckpointVersion);
  put(os, static_cast<std::uint32_t>(cp.layout.size()));
  for (const auto& m : cp.layout.modes()) {
    put_string(os, m.label);
    put(os, static_cast<std::uint64_t>(m.dim));
  }
  put_string(os, Liouvillian::convention);
  put(os, cp.time);
  put(os, static_cast<std::uint64_t>(cp.state.size()));
  for (Eigen::Index i = 0; i < cp.state.size(); ++i) {
    put(os, cp.state(i).real());
    put(os, cp.state(i).imag());
  }
  if (!os) fail(ErrorCode::io, "failed writing '" + path.string() + "'");
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorCode::io, "cannot open '" + path.string() + "'");
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) fail(ErrorCode::io, "'" + path.string() + "' is not a checkpoint");
  const auto version = get<std::uint32_t>(is);
  if (version != kCheckpointVersion) {
    fail(ErrorCode::io, "unsupported checkpoint version " + std::to_string(version));
  }
  const auto n_modes = get<std::uint32_t>(is);
  std::vector<Mode> modes;
  for (std::uint32_t i = 0; i < n_modes; ++i) {
    std::string label = get_string(is);
    const auto dim = get<std::uint64_t>(is);
    modes.push_back({std::move(label), static_cast<std::size_t>(dim)});
  }
  if (get_string(is) != Liouvillian::convention) fail(ErrorCode::io, "checkpoint uses another vectorization");
  Checkpoint cp{ModeLayout(std::move(modes))};
  cp.time = get<double>(is);
  const auto n = get<std::uint64_t>(is);
  const auto d = cp.layout.total_dim();
  if (n != d * d) fail(ErrorCode::io, "checkpoint state length does not match its layout");
  cp.state.resize(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < cp.state.size(); ++i) {
    const double re = get<double>(is);
    const double im = get<double>(is);
    cp.state(i) = cplx(re, im);
  }
  return cp;
}

}  // namespace phonon_forge
