#include "pks/io/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <regex>
#include <set>
#include <sstream>

#include "pks/core/moments.hpp"
#include "pks/energy/random_fields.hpp"
#include "pks/io/snapshot.hpp"

namespace pks::io {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

// Object view that remembers its JSON pointer and rejects unknown keys.
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_.empty() ? "/" : path_, "expected an object");
  }

  std::string at(const std::string& key) const { return path_ + "/" + key; }
  bool has(const std::string& key) const {
    seen_.insert(key);
    return j_.contains(key);
  }
  const json& get(const std::string& key) const {
    seen_.insert(key);
    if (!j_.contains(key)) fail(at(key), "required field is missing");
    return j_.at(key);
  }
  Node child(const std::string& key) const { return Node(get(key), at(key)); }

  double number(const std::string& key, double def, bool required = false) const {
    if (!has(key)) {
      if (required) get(key);
      return def;
    }
    const json& v = j_.at(key);
    if (!v.is_number()) fail(at(key), "expected a number");
    double x = v.get<double>();
    if (!std::isfinite(x)) fail(at(key), "must be finite");
    return x;
  }
  long long integer(const std::string& key, long long def, bool required = false) const {
    if (!has(key)) {
      if (required) get(key);
      return def;
    }
    const json& v = j_.at(key);
    if (!v.is_number_integer()) fail(at(key), "expected an integer");
    return v.get<long long>();
  }
  bool boolean(const std::string& key, bool def) const {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_boolean()) fail(at(key), "expected true or false");
    return v.get<bool>();
  }
  std::string string(const std::string& key, const std::string& def, bool required = false) const {
    if (!has(key)) {
      if (required) get(key);
      return def;
    }
    const json& v = j_.at(key);
    if (!v.is_string()) fail(at(key), "expected a string");
    return v.get<std::string>();
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) fail(at(it.key()), "unknown field");
  }

 private:
  const json& j_;
  std::string path_;
  mutable std::set<std::string> seen_;
};

std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

double parse_eps(const json& v, const std::string& where, double h2) {
  if (v.is_number()) {
    double e = v.get<double>();
    if (!(e >= 0.0) || !std::isfinite(e)) fail(where, "must be >= 0 (0 means h^2)");
    return e;
  }
  if (!v.is_string()) fail(where, "expected a number or a multiple of \"h^2\"");
  static const std::regex re(R"(^\s*(?:([0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*\*?\s*)?h\^2\s*(?:/\s*([0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?))?\s*$)");
  std::smatch m;
  const std::string s = v.get<std::string>();
  if (!std::regex_match(s, m, re)) fail(where, "cannot parse \"" + s + "\" (use e.g. \"h^2\" or \"0.25*h^2\")");
  double k = m[1].matched ? std::stod(m[1].str()) : 1.0;
  if (m[2].matched) k /= std::stod(m[2].str());
  if (!(k > 0.0) || !std::isfinite(k)) fail(where, "must be > 0");
  return k * h2;
}

InitSpec parse_init(const Node& sp, const std::string& key, const std::filesystem::path& base_dir) {
  InitSpec init;
  Node n = sp.child(key);
  const std::string type = n.string("type", "", true);
  if (type == "gaussian") {
    init.kind = InitSpec::Kind::Gaussian;
    const json& c = n.get("center");
    if (!c.is_array() || c.size() != 2 || !c[0].is_number() || !c[1].is_number())
      fail(n.at("center"), "expected [x, y]");
    init.center = {c[0].get<double>(), c[1].get<double>()};
    init.sigma = n.number("sigma", 0.0, true);
    if (!(init.sigma > 0.0)) fail(n.at("sigma"), "must be > 0");
  } else if (type == "uniform") {
    init.kind = InitSpec::Kind::Uniform;
  } else if (type == "file") {
    init.kind = InitSpec::Kind::File;
    std::filesystem::path p = n.string("path", "", true);
    init.path = p.is_absolute() ? p : std::filesystem::absolute(base_dir / p).lexically_normal();
    long long s = n.integer("species", 0);
    if (s < 0) fail(n.at("species"), "must be >= 0");
    init.species = static_cast<std::size_t>(s);
  } else if (type == "random_smooth") {
    init.kind = InitSpec::Kind::RandomSmooth;
    if (n.has("seed")) {
      long long s = n.integer("seed", 0);
      if (s < 0) fail(n.at("seed"), "must be >= 0");
      init.seed = static_cast<std::uint64_t>(s);
    }
  } else {
    fail(n.at("type"), "unknown init type \"" + type + "\" (gaussian, uniform, file, random_smooth)");
  }
  n.finish();
  return init;
}

}  // namespace

std::uint64_t RunConfig::init_seed(std::size_t i) const {
  return species.at(i).init.seed.value_or(seed + i);
}

std::vector<double> RunConfig::masses() const {
  std::vector<double> m;
  for (const auto& s : species) m.push_back(s.mass);
  return m;
}

double parse_mass(const json& v, const std::string& where) {
  double m = 0.0;
  if (v.is_number()) {
    m = v.get<double>();
  } else if (v.is_string()) {
    static const std::regex re(R"(^\s*(?:([0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*\*?\s*)?pi\s*(?:/\s*([0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?))?\s*$)");
    static const std::regex plain(R"(^\s*[-+]?[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?\s*$)");
    const std::string s = v.get<std::string>();
    std::smatch mm;
    if (std::regex_match(s, mm, re)) {
      double k = mm[1].matched ? std::stod(mm[1].str()) : 1.0;
      if (mm[2].matched) k /= std::stod(mm[2].str());
      m = k * std::numbers::pi;
    } else if (std::regex_match(s, plain)) {
      m = std::stod(s);
    } else {
      fail(where, "cannot parse mass \"" + s + "\" (use a number or e.g. \"4*pi\")");
    }
  } else {
    fail(where, "expected a number or a string such as \"4*pi\"");
  }
  if (!(m > 0.0) || !std::isfinite(m)) fail(where, "mass must be finite and > 0");
  return m;
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::string what = e.what();
    auto pos = what.find("syntax error");
    throw ConfigError(line_column(text, e.byte) + ": " +
                      (pos == std::string::npos ? what : what.substr(pos)));
  }
  if (doc.is_object() && doc.contains("config") && doc.contains("format") &&
      doc["format"] == "pks-manifest")
    doc = doc["config"];

  RunConfig cfg;
  Node root(doc, "");

  Node grid = root.child("grid");
  cfg.half_extent = grid.number("L", 0.0, true);
  if (!(cfg.half_extent > 0.0)) fail(grid.at("L"), "must be > 0");
  long long N = grid.integer("N", 0, true);
  if (N < 4 || N > 4096) fail(grid.at("N"), "must be in [4, 4096]");
  cfg.cells = static_cast<int>(N);
  grid.finish();
  const double h = 2.0 * cfg.half_extent / cfg.cells;

  const json& sp = root.get("species");
  if (!sp.is_array() || sp.empty()) fail("/species", "expected a nonempty array");
  for (std::size_t i = 0; i < sp.size(); ++i) {
    Node s(sp[i], "/species/" + std::to_string(i));
    SpeciesConfig sc;
    const json& mv = s.get("mass");
    sc.mass = parse_mass(mv, s.at("mass"));
    sc.mass_text = mv.is_string() ? mv.get<std::string>() : mv.dump();
    sc.init = parse_init(s, "init", base_dir);
    s.finish();
    cfg.species.push_back(std::move(sc));
  }
  const std::size_t n = cfg.species.size();

  if (root.has("interaction")) {
    const json& a = root.get("interaction");
    if (!a.is_array() || a.size() != n) fail("/interaction", "expected " + std::to_string(n) + " rows");
    std::vector<double> flat;
    for (std::size_t i = 0; i < n; ++i) {
      const std::string row = "/interaction/" + std::to_string(i);
      if (!a[i].is_array() || a[i].size() != n) fail(row, "expected " + std::to_string(n) + " entries");
      for (std::size_t j = 0; j < n; ++j) {
        if (!a[i][j].is_number()) fail(row + "/" + std::to_string(j), "expected a number");
        flat.push_back(a[i][j].get<double>());
      }
    }
    try {
      cfg.a = InteractionMatrix(n, flat);
    } catch (const std::invalid_argument& e) {
      fail("/interaction", e.what());
    }
  } else {
    cfg.a = InteractionMatrix::zero(n);
  }

  Node j = root.child("jko");
  cfg.jko.tau = j.number("tau", cfg.jko.tau);
  cfg.jko.eps = j.has("eps") ? parse_eps(j.get("eps"), j.at("eps"), h * h) : 0.0;
  cfg.jko.inner_tol = j.number("inner_tol", cfg.jko.inner_tol);
  cfg.jko.max_outer = static_cast<int>(j.integer("max_outer", cfg.jko.max_outer));
  cfg.jko.max_inner = static_cast<int>(j.integer("max_inner", cfg.jko.max_inner));
  cfg.jko.sinkhorn_tol = j.number("sinkhorn_tol", cfg.jko.sinkhorn_tol);
  cfg.jko.report_tol = j.number("report_tol", cfg.jko.report_tol);
  cfg.jko.sinkhorn_max_iter = static_cast<int>(j.integer("sinkhorn_max_iter", cfg.jko.sinkhorn_max_iter));
  long long steps = j.integer("n_steps", 0, true);
  if (steps < 0) fail(j.at("n_steps"), "must be >= 0");
  cfg.n_steps = static_cast<int>(steps);
  j.finish();
  try {
    cfg.jko.validate();
  } catch (const std::invalid_argument& e) {
    fail("/jko", e.what());
  }

  if (root.has("output")) {
    Node o = root.child("output");
    cfg.output.directory = o.string("directory", cfg.output.directory.string());
    long long every = o.integer("snapshot_every", cfg.output.snapshot_every);
    if (every < 0) fail(o.at("snapshot_every"), "must be >= 0");
    cfg.output.snapshot_every = static_cast<int>(every);
    cfg.output.series_format = o.string("series_format", "csv");
    if (cfg.output.series_format != "csv") fail(o.at("series_format"), "only \"csv\" is supported");
    cfg.output.snapshot_csv = o.boolean("snapshot_csv", false);
    o.finish();
  }

  if (root.has("monitor")) {
    Node m = root.child("monitor");
    cfg.monitor.enabled = m.boolean("enabled", true);
    cfg.monitor.boundary_fraction_limit = m.number("boundary_fraction", cfg.monitor.boundary_fraction_limit);
    cfg.monitor.cell_mass_limit = m.number("cell_mass", cfg.monitor.cell_mass_limit);
    cfg.monitor.entropy_growth_limit = m.number("entropy_growth", cfg.monitor.entropy_growth_limit);
    m.finish();
  }

  if (root.has("diagnostics")) {
    Node d = root.child("diagnostics");
    if (d.has("degiorgi_fractions")) {
      const json& f = d.get("degiorgi_fractions");
      if (!f.is_array()) fail(d.at("degiorgi_fractions"), "expected an array");
      for (std::size_t i = 0; i < f.size(); ++i) {
        const std::string w = d.at("degiorgi_fractions") + "/" + std::to_string(i);
        if (!f[i].is_number()) fail(w, "expected a number");
        double x = f[i].get<double>();
        if (!(x > 0.0) || x > 1.0) fail(w, "must lie in (0, 1]");
        cfg.degiorgi_fractions.push_back(x);
      }
    }
    cfg.degiorgi_gap = d.boolean("degiorgi_gap", false);
    d.finish();
  }

  if (root.has("overrides")) {
    Node o = root.child("overrides");
    cfg.jko.allow_supercritical = o.boolean("allow_supercritical", false);
    o.finish();
  }
  long long seed = root.integer("seed", 0);
  if (seed < 0) fail("/seed", "must be >= 0");
  cfg.seed = static_cast<std::uint64_t>(seed);
  root.finish();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str(), path.parent_path().empty() ? "." : path.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

json to_json(const RunConfig& cfg) {
  json j;
  j["grid"] = {{"L", cfg.half_extent}, {"N", cfg.cells}};
  json sp = json::array();
  for (std::size_t i = 0; i < cfg.species.size(); ++i) {
    const SpeciesConfig& s = cfg.species[i];
    json init;
    switch (s.init.kind) {
      case InitSpec::Kind::Gaussian:
        init = {{"type", "gaussian"}, {"center", {s.init.center[0], s.init.center[1]}}, {"sigma", s.init.sigma}};
        break;
      case InitSpec::Kind::Uniform: init = {{"type", "uniform"}}; break;
      case InitSpec::Kind::File:
        init = {{"type", "file"}, {"path", s.init.path.string()}, {"species", s.init.species}};
        break;
      case InitSpec::Kind::RandomSmooth: init = {{"type", "random_smooth"}, {"seed", cfg.init_seed(i)}}; break;
    }
    // The numeric value keeps the run bit-reproducible; the text is informative.
    sp.push_back({{"mass", s.mass}, {"init", init}});
  }
  j["species"] = sp;
  j["interaction"] = cfg.a.rows();
  j["jko"] = {{"tau", cfg.jko.tau},
              {"eps", cfg.jko.eps},
              {"inner_tol", cfg.jko.inner_tol},
              {"max_outer", cfg.jko.max_outer},
              {"max_inner", cfg.jko.max_inner},
              {"sinkhorn_tol", cfg.jko.sinkhorn_tol},
              {"report_tol", cfg.jko.report_tol},
              {"sinkhorn_max_iter", cfg.jko.sinkhorn_max_iter},
              {"n_steps", cfg.n_steps}};
  j["output"] = {{"directory", cfg.output.directory.string()},
                 {"snapshot_every", cfg.output.snapshot_every},
                 {"series_format", cfg.output.series_format},
                 {"snapshot_csv", cfg.output.snapshot_csv}};
  j["monitor"] = {{"enabled", cfg.monitor.enabled},
                  {"boundary_fraction", cfg.monitor.boundary_fraction_limit},
                  {"cell_mass", cfg.monitor.cell_mass_limit},
                  {"entropy_growth", cfg.monitor.entropy_growth_limit}};
  j["diagnostics"] = {{"degiorgi_fractions", cfg.degiorgi_fractions}, {"degiorgi_gap", cfg.degiorgi_gap}};
  j["overrides"] = {{"allow_supercritical", cfg.jko.allow_supercritical}};
  j["seed"] = cfg.seed;
  return j;
}

MultiDensity initial_density(const RunConfig& cfg) {
  const Grid g = cfg.grid();
  std::vector<Field> fields;
  for (std::size_t i = 0; i < cfg.species.size(); ++i) {
    const SpeciesConfig& s = cfg.species[i];
    const std::string where = "/species/" + std::to_string(i) + "/init";
    switch (s.init.kind) {
      case InitSpec::Kind::Gaussian:
        fields.push_back(make_gaussian(g, s.init.center, s.init.sigma, s.mass));
        break;
      case InitSpec::Kind::Uniform: fields.push_back(make_uniform(g, s.mass)); break;
      case InitSpec::Kind::RandomSmooth: {
        std::mt19937_64 rng(cfg.init_seed(i));
        fields.push_back(energy::random_smooth_density(g, rng, s.mass));
        break;
      }
      case InitSpec::Kind::File: {
        SnapshotFile snap = read_snapshot(s.init.path);
        if (snap.grid.cells() != g.cells() ||
            std::abs(snap.grid.half_extent() - g.half_extent()) > 1e-12 * g.half_extent())
          fail(where, "snapshot grid differs from /grid");
        if (s.init.species >= snap.fields.size()) fail(where + "/species", "index out of range");
        Field f = snap.fields[s.init.species];
        double m = field_mass(g, f);
        if (!(m > 0.0)) fail(where, "snapshot species has zero mass");
        rescale_to_mass(g, f, s.mass);
        fields.push_back(std::move(f));
        break;
      }
    }
  }
  return MultiDensity(g, std::move(fields), cfg.masses());
}

}  // namespace pks::io
