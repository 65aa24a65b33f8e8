#include "pks/jko/stepper.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pks/core/criticality.hpp"
#include "pks/core/moments.hpp"
#include "pks/energy/functionals.hpp"

namespace pks::jko {

namespace {

// Floor of the starting iterate, so that log-density updates can reach cells
// where the base density vanishes. It must stay far below the tails of the
// minimizer, which the Newton step would otherwise have to pull down first.
constexpr double kStartFloor = 1e-300;
// Largest |w| applied to cells carrying mass, and to any cell.
constexpr double kMaxStepMassive = 1.0;
constexpr double kMaxStepAny = 50.0;
constexpr int kMaxHalvings = 6;

void check_density(const Field& f, const char* where) {
  for (double v : f)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::logic_error(std::string("jko: invalid density value in ") + where);
}

std::vector<double> weights(const Grid& grid, const Field& rho, double beta) {
  std::vector<double> w(rho.size());
  const double s = grid.cell_area() / beta;
  for (std::size_t k = 0; k < rho.size(); ++k) w[k] = rho[k] * s;
  return w;
}

double l1_change(const Grid& grid, const Field& a, const Field& b, double beta) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += std::abs(a[k] - b[k]);
  return s * grid.cell_area() / beta;
}

}  // namespace

class JkoStepper::NewtonSystem {
 public:
  explicit NewtonSystem(const Grid& grid) : grid_(grid), n_(grid.cells()) {
    const std::size_t m = grid.size();
    A_.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    rhs_.resize(static_cast<Eigen::Index>(m));
  }

  // (dt L_rho + diag rho) psi = -rho g, rows multiplied by h^2 to keep the
  // matrix symmetric: face weights are the arithmetic mean of the two cells.
  void solve(const Field& rho, const Field& g, double dt, Field& psi) {
    // No floor on rho here: flooring the tails decouples them from the bulk
    // and the step then overshoots there by orders of magnitude.
    const double h2 = grid_.cell_area();
    auto r = [&](std::size_t k) { return rho[k]; };
    trip_.clear();
    const int n = n_;
    for (int p = 0; p < n; ++p) {
      for (int q = 0; q < n; ++q) {
        const std::size_t c = grid_.index(p, q);
        double diag = h2 * r(c);
        auto face = [&](int pp, int qq) {
          if (pp < 0 || qq < 0 || pp >= n || qq >= n) return;
          const std::size_t nb = grid_.index(pp, qq);
          const double w = dt * 0.5 * (r(c) + r(nb));
          diag += w;
          trip_.emplace_back(static_cast<int>(c), static_cast<int>(nb), -w);
        };
        face(p - 1, q);
        face(p + 1, q);
        face(p, q - 1);
        face(p, q + 1);
        trip_.emplace_back(static_cast<int>(c), static_cast<int>(c), diag);
        rhs_[static_cast<Eigen::Index>(c)] = -h2 * rho[c] * g[c];
      }
    }
    A_.setFromTriplets(trip_.begin(), trip_.end());
    if (!analyzed_) {
      ldlt_.analyzePattern(A_);
      analyzed_ = true;
    }
    ldlt_.factorize(A_);
    if (ldlt_.info() != Eigen::Success) throw std::runtime_error("jko: Newton factorization failed");
    Eigen::VectorXd x = ldlt_.solve(rhs_);
    psi.assign(x.data(), x.data() + x.size());
  }

 private:
  Grid grid_;
  int n_;
  Eigen::SparseMatrix<double> A_;
  Eigen::VectorXd rhs_;
  std::vector<Eigen::Triplet<double>> trip_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
  bool analyzed_ = false;
};

struct JkoStepper::SpeciesSolve {
  std::size_t index = 0;
  double beta = 0.0;
  Field rho;
  std::vector<double> base_w;  // base weights, sum 1
  double base_ot = 0.0;        // OT_eps(base, base)
  Field V;                     // frozen potential; empty means zero
  Field fx, gx, fs;            // warm Sinkhorn potentials
  double ot_x = 0.0, ot_s = 0.0;
  bool evaluated = false;
  bool converged = false;
};

JkoStepper::JkoStepper(const Grid& grid, InteractionMatrix a, JkoParams params)
    : grid_(grid),
      a_(std::move(a)),
      params_(params),
      eps_(params.eps_for(grid)),
      sinkhorn_(grid, params.eps_for(grid)),
      conv_(grid),
      system_(std::make_unique<NewtonSystem>(grid)) {
  params_.validate();
}

JkoStepper::~JkoStepper() = default;

void JkoStepper::check_gate(const MultiDensity& base) {
  if (base.target_masses() == gated_masses_) return;
  if (a_.size() != base.species())
    throw std::invalid_argument("jko: interaction matrix size != species count");
  MassClass mc = classify_mass(base.target_masses(), a_);
  if (mc.kind != MassKind::Subcritical && !params_.allow_supercritical) {
    throw std::invalid_argument("jko: masses are " + to_string(mc.kind) + " (witness " +
                                format_subset(mc.witnesses.front()) +
                                "); set allow_supercritical to run anyway");
  }
  gated_masses_ = base.target_masses();
}

void JkoStepper::energy_and_dissipation(const MultiDensity& rho, double& energy,
                                        std::vector<double>& species_dissipation) const {
  std::vector<Field> u;
  if (!a_.is_zero()) u = energy::species_potentials(rho, conv_);
  else u.assign(rho.species(), Field());
  energy = energy::free_energy(rho, a_, u).free_energy;
  species_dissipation = energy::dissipation_per_species(rho, a_, u);
}

const JkoStepper::BaseState& JkoStepper::base_state(const MultiDensity& base) {
  for (const auto& s : cache_)
    if (s.fields == base.fields()) return s;
  BaseState st;
  st.fields = base.fields();
  for (std::size_t i = 0; i < base.species(); ++i) {
    std::vector<double> w = weights(grid_, base.field(i), base.target_mass(i));
    Field f;
    auto r = sinkhorn_.solve_self(w, f, params_.report_tol, params_.sinkhorn_max_iter);
    st.self_f.push_back(std::move(f));
    st.self_ot.push_back(r.value);
  }
  std::vector<double> d;
  energy_and_dissipation(base, st.energy, d);
  cache_.push_back(std::move(st));
  if (cache_.size() > 3) cache_.pop_front();
  return cache_.back();
}

int JkoStepper::newton(SpeciesSolve& s, double dt, long& sinkhorn_iters) {
  const std::size_t m = grid_.size();
  const double h2 = grid_.cell_area();
  const double beta = s.beta;

  auto evaluate = [&](const Field& rho, Field& fx, Field& gx, Field& fs, double& ot_x,
                      double& ot_s) {
    std::vector<double> w = weights(grid_, rho, beta);
    auto cx = sinkhorn_.solve_cross(w, s.base_w, fx, gx, params_.sinkhorn_tol,
                                    params_.sinkhorn_max_iter);
    auto cs = sinkhorn_.solve_self(w, fs, params_.sinkhorn_tol, params_.sinkhorn_max_iter);
    sinkhorn_iters += cx.iterations + cs.iterations;
    ot_x = cx.value;
    ot_s = cs.value;
  };
  // Newton direction at rho; returns the rho-weighted norm of w per unit mass,
  // which the damping compares between iterates (the objective itself carries
  // Sinkhorn noise well above its late-iteration decrease).
  Field g(m);
  auto direction = [&](const Field& rho, const Field& fx, const Field& fs, Field& psi,
                       Field& w) {
    for (std::size_t k = 0; k < m; ++k)
      g[k] = std::log(rho[k]) + (s.V.empty() ? 0.0 : s.V[k]) + (fx[k] - fs[k]) / (2.0 * dt);
    system_->solve(rho, g, dt, psi);
    w.resize(m);
    double norm = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      w[k] = std::clamp(-g[k] - psi[k], -kMaxStepAny, kMaxStepAny);
      norm += rho[k] * w[k] * w[k];
    }
    return std::sqrt(norm * h2 / beta);
  };

  if (!s.evaluated) {
    evaluate(s.rho, s.fx, s.gx, s.fs, s.ot_x, s.ot_s);
    s.evaluated = true;
  }
  Field psi, w, trial(m), fx, gx, fs, psi_t, w_t;
  double dec = direction(s.rho, s.fx, s.fs, psi, w);

  s.converged = false;
  int it = 0;
  while (it < params_.max_inner) {
    ++it;
    double mx = 0.0;
    for (double v : s.rho) mx = std::max(mx, v);
    double wmax = 0.0;
    for (std::size_t k = 0; k < m; ++k)
      if (s.rho[k] >= 1e-3 * mx) wmax = std::max(wmax, std::abs(w[k]));
    double alpha = wmax > kMaxStepMassive ? kMaxStepMassive / wmax : 1.0;

    double ot_x = 0.0, ot_s = 0.0, dec_t = 0.0, change = 0.0;
    for (int halving = 0;; ++halving) {
      for (std::size_t k = 0; k < m; ++k) trial[k] = s.rho[k] * std::exp(alpha * w[k]);
      rescale_to_mass(grid_, trial, beta);
      check_density(trial, "Newton update");
      fx = s.fx;
      for (std::size_t k = 0; k < m; ++k) fx[k] += 2.0 * dt * alpha * psi[k];
      gx = s.gx;
      fs = s.fs;
      evaluate(trial, fx, gx, fs, ot_x, ot_s);
      dec_t = direction(trial, fx, fs, psi_t, w_t);
      change = l1_change(grid_, trial, s.rho, beta);
      if (dec_t < dec || change <= params_.inner_tol || halving >= kMaxHalvings) break;
      alpha *= 0.5;
    }
    std::swap(s.rho, trial);
    std::swap(s.fx, fx);
    std::swap(s.gx, gx);
    std::swap(s.fs, fs);
    std::swap(psi, psi_t);
    std::swap(w, w_t);
    s.ot_x = ot_x;
    s.ot_s = ot_s;
    dec = dec_t;
    if (change <= params_.inner_tol) {
      s.converged = true;
      break;
    }
  }
  return it;
}

StepResult JkoStepper::step(const MultiDensity& base, double dt) {
  if (!(base.grid() == grid_)) throw std::invalid_argument("jko: density grid != stepper grid");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("jko: step must be > 0");
  check_gate(base);
  const std::size_t n = base.species();
  const BaseState& bs = base_state(base);

  StepReport rep;
  rep.energy_before = bs.energy;
  std::vector<SpeciesSolve> sp(n);
  for (std::size_t i = 0; i < n; ++i) {
    SpeciesSolve& s = sp[i];
    s.index = i;
    s.beta = base.target_mass(i);
    s.base_w = weights(grid_, base.field(i), s.beta);
    s.base_ot = bs.self_ot[i];
    s.rho = base.field(i);
    double mx = *std::max_element(s.rho.begin(), s.rho.end());
    for (double& v : s.rho) v = std::max(v, kStartFloor * mx);
    rescale_to_mass(grid_, s.rho, s.beta);
    s.fx = bs.self_f[i];
    s.gx = bs.self_f[i];
    s.fs = bs.self_f[i];
  }

  const bool coupled = !a_.is_zero();
  bool converged = false;
  double change = 0.0;
  for (int outer = 1; outer <= params_.max_outer; ++outer) {
    rep.outer_iters = outer;
    std::vector<Field> prev(n);
    for (std::size_t i = 0; i < n; ++i) prev[i] = sp[i].rho;
    if (coupled) {
      std::vector<Field> u(n);
      for (std::size_t j = 0; j < n; ++j) u[j] = conv_.potential(sp[j].rho);
      for (std::size_t i = 0; i < n; ++i) {
        sp[i].V.assign(grid_.size(), 0.0);
        for (std::size_t j = 0; j < n; ++j) {
          const double aij = a_(i, j);
          if (aij == 0.0) continue;
          for (std::size_t k = 0; k < grid_.size(); ++k) sp[i].V[k] -= aij * u[j][k];
        }
      }
    }
    bool inner_ok = true;
    for (std::size_t i = 0; i < n; ++i) {
      rep.inner_iters += newton(sp[i], dt, rep.sinkhorn_iters);
      inner_ok = inner_ok && sp[i].converged;
    }
    change = 0.0;
    for (std::size_t i = 0; i < n; ++i) change += l1_change(grid_, sp[i].rho, prev[i], sp[i].beta);
    if (!coupled) {
      converged = inner_ok;
      break;
    }
    if (change <= params_.inner_tol && inner_ok) {
      converged = true;
      break;
    }
  }
  rep.converged = converged;
  rep.final_change = change;

  // Reported distances with the tighter tolerance; keeps the self potentials of
  // the new point for the next step.
  BaseState next;
  std::vector<Field> fields(n);
  rep.species_distance_sq.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    SpeciesSolve& s = sp[i];
    rescale_to_mass(grid_, s.rho, s.beta);
    check_density(s.rho, "step result");
    std::vector<double> w = weights(grid_, s.rho, s.beta);
    auto cx = sinkhorn_.solve_cross(w, s.base_w, s.fx, s.gx, params_.report_tol,
                                    params_.sinkhorn_max_iter);
    auto cs = sinkhorn_.solve_self(w, s.fs, params_.report_tol, params_.sinkhorn_max_iter);
    rep.sinkhorn_iters += cx.iterations + cs.iterations;
    double d2 = s.beta * (cx.value - 0.5 * cs.value - 0.5 * s.base_ot);
    rep.species_distance_sq[i] = std::max(0.0, d2);
    rep.step_distance_sq += rep.species_distance_sq[i];
    next.self_f.push_back(s.fs);
    next.self_ot.push_back(cs.value);
    fields[i] = std::move(s.rho);
  }
  MultiDensity result(grid_, std::move(fields), base.target_masses());
  energy_and_dissipation(result, rep.energy_after, rep.species_dissipation);
  for (double d : rep.species_dissipation) rep.dissipation += d;
  rep.energy_decrease = rep.energy_before - rep.energy_after - rep.step_distance_sq / (2.0 * dt);
  rep.production_ratio = rep.dissipation > 0.0
                             ? rep.step_distance_sq / (dt * dt) / rep.dissipation
                             : std::numeric_limits<double>::quiet_NaN();

  next.fields = result.fields();
  next.energy = rep.energy_after;
  cache_.push_back(std::move(next));
  if (cache_.size() > 3) cache_.pop_front();
  return {std::move(result), std::move(rep)};
}

StepResult jko_step(const MultiDensity& rho_prev, const InteractionMatrix& a,
                    const JkoParams& params) {
  JkoStepper stepper(rho_prev.grid(), a, params);
  return stepper.step(rho_prev);
}

MultiDensity de_giorgi_interpolate(const MultiDensity& rho_prev, const InteractionMatrix& a,
                                   const JkoParams& params, double delta_t) {
  if (!(delta_t > 0.0) || delta_t > params.tau)
    throw std::invalid_argument("de_giorgi_interpolate: delta_t must lie in (0, tau]");
  JkoStepper stepper(rho_prev.grid(), a, params);
  return stepper.step(rho_prev, delta_t).density;
}

}  // namespace pks::jko
