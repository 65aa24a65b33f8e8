#include "pks/io/snapshot.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace pks::io {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes little-endian");

namespace {

template <class T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T take(std::ifstream& in, const std::filesystem::path& path, const char* what) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T)))
    throw CorruptInput(path.string() + ": truncated snapshot (" + what + ")");
  return v;
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const MultiDensity& rho, int step, double t) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  const Grid& g = rho.grid();
  out.write(kSnapshotMagic, sizeof kSnapshotMagic);
  put(out, kSnapshotVersion);
  put(out, static_cast<std::uint32_t>(g.cells()));
  put(out, static_cast<std::uint32_t>(rho.species()));
  put(out, static_cast<std::uint32_t>(step));
  put(out, g.half_extent());
  put(out, t);
  for (double b : rho.target_masses()) put(out, b);
  for (const Field& f : rho.fields())
    out.write(reinterpret_cast<const char*>(f.data()), static_cast<std::streamsize>(f.size() * sizeof(double)));
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

SnapshotFile read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorruptInput(path.string() + ": cannot open snapshot");
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kSnapshotMagic, sizeof magic) != 0)
    throw CorruptInput(path.string() + ": not a snapshot file (bad magic)");
  auto version = take<std::uint32_t>(in, path, "version");
  if (version != kSnapshotVersion)
    throw CorruptInput(path.string() + ": unsupported snapshot version " + std::to_string(version));
  auto N = take<std::uint32_t>(in, path, "N");
  auto n = take<std::uint32_t>(in, path, "n");
  auto step = take<std::uint32_t>(in, path, "step");
  double L = take<double>(in, path, "L");
  double t = take<double>(in, path, "t");
  if (N < 4 || N > 65536 || n < 1 || n > 1024 || !(L > 0.0) || !std::isfinite(L) || !std::isfinite(t))
    throw CorruptInput(path.string() + ": implausible snapshot header");
  SnapshotFile s;
  s.grid = Grid(L, static_cast<int>(N));
  s.step = static_cast<int>(step);
  s.t = t;
  for (std::uint32_t i = 0; i < n; ++i) s.beta.push_back(take<double>(in, path, "beta"));
  const std::size_t m = static_cast<std::size_t>(N) * N;
  for (std::uint32_t i = 0; i < n; ++i) {
    Field f(m);
    if (!in.read(reinterpret_cast<char*>(f.data()), static_cast<std::streamsize>(m * sizeof(double))))
      throw CorruptInput(path.string() + ": truncated snapshot payload");
    s.fields.push_back(std::move(f));
  }
  if (in.peek() != std::char_traits<char>::eof())
    throw CorruptInput(path.string() + ": trailing bytes after snapshot payload");
  return s;
}

void write_snapshot_csv(const std::filesystem::path& path, const MultiDensity& rho, int step,
                        double t) {
  std::FILE* f = std::fopen(path.string().c_str(), "w");
  if (!f) throw std::runtime_error(path.string() + ": cannot open for writing");
  const Grid& g = rho.grid();
  std::fprintf(f, "# step=%d t=%.17g L=%.17g N=%d\n", step, t, g.half_extent(), g.cells());
  std::fprintf(f, "x,y");
  for (std::size_t i = 0; i < rho.species(); ++i) std::fprintf(f, ",rho_%zu", i + 1);
  std::fprintf(f, "\n");
  for (int p = 0; p < g.cells(); ++p) {
    for (int q = 0; q < g.cells(); ++q) {
      std::fprintf(f, "%.17g,%.17g", g.center(p), g.center(q));
      for (std::size_t i = 0; i < rho.species(); ++i)
        std::fprintf(f, ",%.17g", rho.field(i)[g.index(p, q)]);
      std::fprintf(f, "\n");
    }
  }
  if (std::fclose(f) != 0) throw std::runtime_error(path.string() + ": write failed");
}

}  // namespace pks::io
