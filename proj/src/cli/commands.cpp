#include "pks/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>

#include "pks/core/criticality.hpp"
#include "pks/core/moments.hpp"
#include "pks/energy/inequalities.hpp"
#include "pks/energy/random_fields.hpp"
#include "pks/io/config.hpp"
#include "pks/io/manifest.hpp"
#include "pks/io/snapshot.hpp"
#include "pks/jko/diagnostics.hpp"
#include "pks/transport/exact_lp.hpp"
#include "pks/transport/sinkhorn.hpp"

namespace pks::cli {

namespace {

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void line(std::ostream& out, bool pass, const std::string& name, const std::string& detail) {
  out << (pass ? "PASS " : "FAIL ") << name << "  " << detail << '\n';
}

}  // namespace

int cmd_run(const std::filesystem::path& config, const RunOverrides& ov, std::ostream& out,
            std::ostream& err) {
  io::RunConfig cfg;
  try {
    cfg = io::load_config(config);
  } catch (const io::ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const io::CorruptInput& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  }
  if (ov.out) cfg.output.directory = *ov.out;
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.allow_supercritical) cfg.jko.allow_supercritical = true;
  if (ov.snapshot_every) {
    if (*ov.snapshot_every < 0) {
      err << "error: --snapshot-every must be >= 0\n";
      return kExitBadInput;
    }
    cfg.output.snapshot_every = *ov.snapshot_every;
  }

  MassClass mc = classify_mass(cfg.masses(), cfg.a);
  if (mc.kind != MassKind::Subcritical && !cfg.jko.allow_supercritical) {
    err << "error: masses are " << to_string(mc.kind) << " (witness "
        << format_subset(mc.witnesses.front())
        << "); pass --allow-supercritical to run a blow-up experiment\n";
    return kExitRefused;
  }

  try {
    MultiDensity rho0 = io::initial_density(cfg);
    jko::RunOptions opt;
    opt.snapshot_every = cfg.output.snapshot_every;
    opt.degiorgi_fractions = cfg.degiorgi_fractions;
    opt.degiorgi_gap = cfg.degiorgi_gap;
    opt.monitor = cfg.monitor;
    if (!ov.quiet) {
      opt.observer = [&err](const jko::StepObserverArgs& a) {
        err << fmt("step %6d  t=%.6g  F=%.10g  D=%.6g  ratio=%.5f  outer=%d  inner=%d%s\n", a.step,
                   a.record.t, a.record.free_energy, a.record.dissipation, a.record.production_ratio,
                   a.report.outer_iters, a.report.inner_iters, a.report.converged ? "" : "  (not converged)");
      };
    }
    jko::Trajectory tr = jko::run_scheme(rho0, cfg.a, cfg.jko, cfg.n_steps, opt);
    io::write_run(cfg.output.directory, cfg, tr);
    out << "status: " << jko::to_string(tr.status) << '\n';
    if (!tr.halt_reason.empty()) out << "halt reason: " << tr.halt_reason << '\n';
    out << "steps: " << tr.records.back().step << '\n';
    out << "output: " << cfg.output.directory.string() << '\n';
  } catch (const io::ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const io::CorruptInput& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::logic_error& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitIoError;
  }
  return kExitOk;
}

int cmd_criticality(const std::vector<double>& beta, const InteractionMatrix& a, std::ostream& out) {
  const std::size_t n = beta.size();
  if (n == 0 || a.size() != n) throw std::invalid_argument("criticality: need one mass per row of a");
  if (n > kMaxClassifySpecies) throw std::invalid_argument("criticality: too many species");
  out << "species: " << n << '\n';
  out << "beta:";
  for (double b : beta) out << fmt(" %.17g", b);
  out << '\n';
  out << "subset  Lambda_J\n";
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    IndexSet J;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) J.push_back(i);
    out << fmt("%-7s %.17g\n", format_subset(J).c_str(), lambda_subset(beta, a, J));
  }
  MassClass mc = classify_mass(beta, a);
  out << "classification: " << to_string(mc.kind) << '\n';
  if (mc.kind == MassKind::Supercritical) out << "witness: " << format_subset(mc.witnesses.front()) << '\n';
  if (mc.kind == MassKind::Critical) {
    out << "zero subsets:";
    for (const auto& J : mc.witnesses) out << ' ' << format_subset(J);
    out << '\n';
  }
  out << fmt("predicted M2 slope: %.17g\n", predicted_moment_slope(beta, a));
  return kExitOk;
}

int cmd_criticality(const std::filesystem::path& config, std::ostream& out, std::ostream& err) {
  try {
    io::RunConfig cfg = io::load_config(config);
    return cmd_criticality(cfg.masses(), cfg.a, out);
  } catch (const io::ConfigError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitBadInput;
}

int cmd_check(const std::filesystem::path& run_dir, std::ostream& out, std::ostream& err) {
  io::LoadedRun run;
  try {
    run = io::load_run(run_dir);
  } catch (const io::CorruptInput& e) {
    err << "error: corrupt input: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::exception& e) {
    err << "error: corrupt input: " << e.what() << '\n';
    return kExitBadInput;
  }
  const jko::Trajectory& tr = run.trajectory;
  bool all = true;
  auto report = [&](bool pass, const std::string& name, const std::string& detail) {
    all = all && pass;
    line(out, pass, name, detail);
  };
  out << "run: " << run_dir.string() << "  status: " << jko::to_string(tr.status) << "  steps: "
      << tr.records.back().step << '\n';

  // Mass conservation on every snapshot.
  double worst_mass = 0.0;
  for (const auto& s : tr.snapshots)
    for (std::size_t i = 0; i < s.density.species(); ++i)
      worst_mass = std::max(worst_mass, std::abs(mass(s.density, i) - tr.beta[i]) / tr.beta[i]);
  report(worst_mass <= 1e-10, "mass_conservation", fmt("max relative error %.3e (tol 1e-10)", worst_mass));

  if (tr.records.size() > 1) {
    auto ei = jko::energy_inequality_check(tr);
    report(ei.step_holds, "one_step_energy_inequality",
           fmt("min margin %.3e at step %d (slack 1e-6 per step)", ei.min_step_margin, ei.worst_step));
    report(ei.telescoped_holds, "telescoped_energy_bound",
           fmt("min margin %.3e", ei.min_telescoped_margin));

    jko::SlopeWindow w = jko::pre_halt_window(tr);
    const bool halted = tr.status != jko::RunStatus::Completed;
    if (w.last - w.first + 1 >= 5) {
      auto sc = jko::slope_check(tr, w);
      const double tol = sc.predicted < 0.0 ? 0.10 : 0.05;
      const bool sign_ok = sc.predicted >= 0.0 || sc.measured < 0.0;
      report(sign_ok && sc.rel_error <= tol, "second_moment_slope",
             fmt("measured %.6g predicted %.6g rel error %.3e (tol %.0f%%) over t in [%.4g, %.4g]%s",
                 sc.measured, sc.predicted, sc.rel_error, tol * 100, tr.records[w.first].t,
                 tr.records[w.last].t, halted ? ", pre-halt window" : ""));
    } else {
      report(false, "second_moment_slope", fmt("window has %d samples, need 5", w.last - w.first + 1));
    }

    auto id = jko::energy_identity_report(tr);
    report(id.holds, "free_energy_inequality",
           fmt("defect %.3e, %.2f%% of energy drop %.6g (tol 5%%, %s quadrature)", id.defect,
               100 * id.relative_defect, id.energy_drop, id.quadrature.c_str()));

    auto pc = jko::production_check(tr);
    const bool in_band = std::isfinite(pc.min) && pc.min >= 0.8 && pc.max <= 1.25;
    report(in_band, "production_ratio",
           fmt("min %.5f median %.5f max %.5f (band [0.8, 1.25])", pc.min, pc.median, pc.max));
  }

  int violations = 0, checked = 0;
  double worst_gap = 1e300;
  for (const auto& s : tr.snapshots) {
    for (std::size_t i = 0; i < s.density.species(); ++i) {
      auto c = energy::carleman_check(tr.grid, s.density.field(i));
      ++checked;
      if (!c.holds) ++violations;
      worst_gap = std::min(worst_gap, c.rhs - c.lhs);
    }
  }
  report(violations == 0, "carleman",
         fmt("%d of %d snapshot fields violate; min rhs - lhs %.6g", violations, checked, worst_gap));
  return all ? kExitOk : kExitCheckFailed;
}

int cmd_oracle_compare(const OracleOptions& o, std::ostream& out, std::ostream& err) {
  if (o.size < 4 || o.size > 32) {
    err << "error: size must lie in [4, 32]\n";
    return kExitBadInput;
  }
  if (o.trials < 1 || !(o.eps_factor > 0.0)) {
    err << "error: trials must be >= 1 and eps factor > 0\n";
    return kExitBadInput;
  }
  const Grid g(1.0, o.size);
  const double h2 = g.cell_area();
  std::mt19937_64 rng(o.seed);
  std::vector<std::pair<Field, Field>> pairs;
  for (int t = 0; t < o.trials; ++t) {
    Field a = energy::random_rough_density(g, rng);
    Field b = energy::random_rough_density(g, rng);
    pairs.emplace_back(std::move(a), std::move(b));
  }
  std::vector<double> lp;
  for (const auto& [a, b] : pairs) lp.push_back(transport::exact_w2_lp(g, a, b));

  out << fmt("oracle compare: grid %dx%d on [-1,1]^2, %d trials, seed %llu\n", o.size, o.size, o.trials,
             static_cast<unsigned long long>(o.seed));
  {
    transport::SinkhornOptions so;
    so.eps = o.eps_factor * h2;
    so.tol = 1e-10;
    auto same = transport::sinkhorn_w2(g, pairs[0].first, pairs[0].first, so);
    const double lp_same = transport::exact_w2_lp(g, pairs[0].first, pairs[0].first);
    out << fmt("identical pair: sinkhorn %.3e  lp %.3e\n", same.w2_squared, lp_same);
  }
  out << "eps/h^2    eps         max|S-LP|   mean|S-LP|  bound 2eps+1e-6\n";
  std::vector<double> factors{1.0, 0.5, 0.25, 0.125};
  if (std::find(factors.begin(), factors.end(), o.eps_factor) == factors.end())
    factors.push_back(o.eps_factor);
  double main_max = 0.0, main_mean = 0.0;
  for (double f : factors) {
    transport::SinkhornOptions so;
    so.eps = f * h2;
    so.tol = 1e-10;
    so.max_iter = 100000;
    double mx = 0.0, mean = 0.0;
    for (std::size_t t = 0; t < pairs.size(); ++t) {
      double s = transport::sinkhorn_w2(g, pairs[t].first, pairs[t].second, so).w2_squared;
      double gap = std::abs(s - lp[t]);
      mx = std::max(mx, gap);
      mean += gap / pairs.size();
    }
    if (f == o.eps_factor) {
      main_max = mx;
      main_mean = mean;
    }
    out << fmt("%-10.4g %-11.4e %-11.4e %-11.4e %.4e\n", f, so.eps, mx, mean, 2 * so.eps + 1e-6);
  }
  const double bound = 2 * o.eps_factor * h2 + 1e-6;
  out << fmt("eps = %.4g h^2: max gap %.4e, mean gap %.4e, bound %.4e -> %s\n", o.eps_factor, main_max,
             main_mean, bound, main_max <= bound ? "within bound" : "EXCEEDS bound");
  return main_max <= bound ? kExitOk : kExitCheckFailed;
}

}  // namespace pks::cli
