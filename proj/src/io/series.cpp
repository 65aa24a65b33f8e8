#include "pks/io/series.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "pks/io/snapshot.hpp"

namespace pks::io {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double to_double(const std::string& s, const std::filesystem::path& path, std::size_t line) {
  if (s.empty()) throw CorruptInput(path.string() + ":" + std::to_string(line) + ": empty value");
  char* end = nullptr;
  errno = 0;
  double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE)
    throw CorruptInput(path.string() + ":" + std::to_string(line) + ": bad number \"" + s + "\"");
  return v;
}

long to_long(const std::string& s, const std::filesystem::path& path, std::size_t line) {
  char* end = nullptr;
  long v = std::strtol(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size())
    throw CorruptInput(path.string() + ":" + std::to_string(line) + ": bad integer \"" + s + "\"");
  return v;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CorruptInput(path.string() + ": cannot open");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
  return s;
}

}  // namespace

std::vector<std::string> series_columns(std::size_t n) {
  std::vector<std::string> c{"step", "t"};
  for (std::size_t i = 1; i <= n; ++i) c.push_back("mass_" + std::to_string(i));
  for (const char* s : {"M2", "H", "F", "D_F", "d2_step", "boundary_fraction", "production_ratio",
                        "H_plus", "abs_entropy", "max_cell_fraction", "energy_decrease"})
    c.push_back(s);
  for (std::size_t i = 1; i <= n; ++i) c.push_back("D_F_" + std::to_string(i));
  for (std::size_t i = 1; i <= n; ++i) c.push_back("d2_" + std::to_string(i));
  for (const char* s : {"converged", "outer_iters", "inner_iters", "sinkhorn_iters"}) c.push_back(s);
  return c;
}

std::string series_header(std::size_t n) { return join(series_columns(n)); }

std::string series_row(const jko::StepRecord& r) {
  std::vector<std::string> v{std::to_string(r.step), num(r.t)};
  for (double m : r.mass) v.push_back(num(m));
  for (double x : {r.second_moment, r.entropy, r.free_energy, r.dissipation, r.step_distance_sq,
                   r.boundary_fraction, r.production_ratio, r.positive_entropy, r.abs_entropy,
                   r.max_cell_fraction, r.energy_decrease})
    v.push_back(num(x));
  for (double d : r.species_dissipation) v.push_back(num(d));
  for (double d : r.species_distance_sq) v.push_back(num(d));
  v.push_back(r.converged ? "1" : "0");
  v.push_back(std::to_string(r.outer_iters));
  v.push_back(std::to_string(r.inner_iters));
  v.push_back(std::to_string(r.sinkhorn_iters));
  return join(v);
}

void write_series(const std::filesystem::path& path, const std::vector<jko::StepRecord>& records,
                  std::size_t n) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << series_header(n) << '\n';
  for (const auto& r : records) out << series_row(r) << '\n';
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

std::vector<jko::StepRecord> read_series(const std::filesystem::path& path, std::size_t n) {
  auto lines = read_lines(path);
  if (lines.empty() || lines[0] != series_header(n))
    throw CorruptInput(path.string() + ": missing or unexpected header");
  const std::size_t cols = series_columns(n).size();
  std::vector<jko::StepRecord> out;
  for (std::size_t l = 1; l < lines.size(); ++l) {
    if (lines[l].empty()) continue;
    auto f = split(lines[l]);
    if (f.size() != cols)
      throw CorruptInput(path.string() + ":" + std::to_string(l + 1) + ": expected " +
                         std::to_string(cols) + " columns, found " + std::to_string(f.size()));
    jko::StepRecord r;
    std::size_t c = 0;
    auto d = [&] { return to_double(f[c++], path, l + 1); };
    r.step = static_cast<int>(to_long(f[c++], path, l + 1));
    r.t = d();
    for (std::size_t i = 0; i < n; ++i) r.mass.push_back(d());
    r.second_moment = d();
    r.entropy = d();
    r.free_energy = d();
    r.dissipation = d();
    r.step_distance_sq = d();
    r.boundary_fraction = d();
    r.production_ratio = d();
    r.positive_entropy = d();
    r.abs_entropy = d();
    r.max_cell_fraction = d();
    r.energy_decrease = d();
    for (std::size_t i = 0; i < n; ++i) r.species_dissipation.push_back(d());
    for (std::size_t i = 0; i < n; ++i) r.species_distance_sq.push_back(d());
    r.converged = to_long(f[c++], path, l + 1) != 0;
    r.outer_iters = static_cast<int>(to_long(f[c++], path, l + 1));
    r.inner_iters = static_cast<int>(to_long(f[c++], path, l + 1));
    r.sinkhorn_iters = to_long(f[c++], path, l + 1);
    out.push_back(std::move(r));
  }
  return out;
}

void write_degiorgi(const std::filesystem::path& path, const std::vector<jko::DeGiorgiSample>& s) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << "step,fraction,dissipation,distance_sq_base,gap_sq\n";
  for (const auto& x : s)
    out << x.step << ',' << num(x.fraction) << ',' << num(x.dissipation) << ','
        << num(x.distance_sq_base) << ',' << (x.gap_sq ? num(*x.gap_sq) : "") << '\n';
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

std::vector<jko::DeGiorgiSample> read_degiorgi(const std::filesystem::path& path) {
  auto lines = read_lines(path);
  if (lines.empty() || lines[0] != "step,fraction,dissipation,distance_sq_base,gap_sq")
    throw CorruptInput(path.string() + ": missing or unexpected header");
  std::vector<jko::DeGiorgiSample> out;
  for (std::size_t l = 1; l < lines.size(); ++l) {
    if (lines[l].empty()) continue;
    auto f = split(lines[l]);
    if (f.size() != 5)
      throw CorruptInput(path.string() + ":" + std::to_string(l + 1) + ": expected 5 columns");
    jko::DeGiorgiSample s;
    s.step = static_cast<int>(to_long(f[0], path, l + 1));
    s.fraction = to_double(f[1], path, l + 1);
    s.dissipation = to_double(f[2], path, l + 1);
    s.distance_sq_base = to_double(f[3], path, l + 1);
    if (!f[4].empty()) s.gap_sq = to_double(f[4], path, l + 1);
    out.push_back(s);
  }
  return out;
}

}  // namespace pks::io
