#include "pks/jko/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "pks/core/criticality.hpp"
#include "pks/transport/distance.hpp"

namespace pks::jko {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double ratio_or_nan(double d2, double tau, double diss) {
  return diss > 0.0 ? d2 / (tau * tau) / diss : kNaN;
}

}  // namespace

double median(std::vector<double> v) {
  std::erase_if(v, [](double x) { return !std::isfinite(x); });
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

ProductionSeries production_check(const Trajectory& tr) {
  ProductionSeries s;
  const double tau = tr.params.tau;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t k = 1; k < tr.records.size(); ++k) {
    const StepRecord& r = tr.records[k];
    s.steps.push_back(r.step);
    const double total = ratio_or_nan(r.step_distance_sq, tau, r.dissipation);
    s.ratio.push_back(total);
    std::vector<double> per;
    for (std::size_t i = 0; i < r.species_distance_sq.size(); ++i)
      per.push_back(ratio_or_nan(r.species_distance_sq[i], tau, r.species_dissipation[i]));
    s.species.push_back(std::move(per));
    if (std::isfinite(total)) {
      lo = std::min(lo, total);
      hi = std::max(hi, total);
    }
  }
  s.median = median(s.ratio);
  s.min = std::isfinite(lo) ? lo : kNaN;
  s.max = std::isfinite(hi) ? hi : kNaN;
  return s;
}

EnergyIdentityReport energy_identity_report(const Trajectory& tr, double rel_tol,
                                            double slack_per_step) {
  EnergyIdentityReport rep;
  if (tr.records.empty()) return rep;
  const double tau = tr.params.tau;
  rep.steps = static_cast<int>(tr.records.size()) - 1;
  rep.initial_energy = tr.records.front().free_energy;
  rep.final_energy = tr.records.back().free_energy;

  std::map<int, std::vector<std::pair<double, double>>> samples;
  for (const DeGiorgiSample& s : tr.degiorgi) samples[s.step].push_back({s.fraction, s.dissipation});

  bool all_simpson = rep.steps > 0, any_sample = false;
  for (int k = 1; k <= rep.steps; ++k) {
    const double d0 = tr.records[k - 1].dissipation;
    const double d1 = tr.records[k].dissipation;
    rep.piecewise_term += 0.5 * tau * d1;
    std::vector<std::pair<double, double>> nodes{{0.0, d0}, {1.0, d1}};
    auto it = samples.find(k);
    if (it != samples.end()) {
      any_sample = true;
      for (auto [f, d] : it->second)
        if (f < 1.0) nodes.push_back({f, d});
    }
    std::sort(nodes.begin(), nodes.end());
    double integral = 0.0;
    if (nodes.size() == 3 && nodes[1].first == 0.5) {
      integral = tau / 6.0 * (nodes[0].second + 4.0 * nodes[1].second + nodes[2].second);
    } else {
      all_simpson = false;
      for (std::size_t j = 1; j < nodes.size(); ++j)
        integral += 0.5 * tau * (nodes[j].first - nodes[j - 1].first) *
                    (nodes[j].second + nodes[j - 1].second);
    }
    rep.interpolant_term += 0.5 * integral;
  }
  rep.quadrature = rep.steps == 0 ? "none" : (all_simpson ? "simpson" : "trapezoid");
  if (!any_sample && rep.steps > 0) rep.quadrature = "trapezoid (endpoints only)";
  rep.lhs = rep.final_energy + rep.piecewise_term + rep.interpolant_term;
  rep.defect = rep.lhs - rep.initial_energy;
  rep.energy_drop = rep.initial_energy - rep.final_energy;
  if (rep.energy_drop != 0.0) rep.relative_defect = std::abs(rep.defect) / std::abs(rep.energy_drop);
  else rep.relative_defect = rep.defect == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  rep.holds = rep.defect <= std::max(rel_tol * std::abs(rep.energy_drop), slack_per_step * rep.steps);
  return rep;
}

EnergyInequalityCheck energy_inequality_check(const Trajectory& tr, double slack_per_step) {
  EnergyInequalityCheck c;
  if (tr.records.size() < 2) return c;
  const double tau = tr.params.tau;
  const double f0 = tr.records.front().free_energy;
  double sum = 0.0;
  c.min_step_margin = std::numeric_limits<double>::infinity();
  c.min_telescoped_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < tr.records.size(); ++k) {
    const StepRecord& r = tr.records[k];
    const double step_margin = r.energy_decrease + slack_per_step;
    if (step_margin < c.min_step_margin) {
      c.min_step_margin = step_margin;
      c.worst_step = r.step;
    }
    sum += r.step_distance_sq / (2.0 * tau);
    const double tele = f0 - r.free_energy + static_cast<double>(k) * slack_per_step - sum;
    c.min_telescoped_margin = std::min(c.min_telescoped_margin, tele);
  }
  c.step_holds = c.min_step_margin >= 0.0;
  c.telescoped_holds = c.min_telescoped_margin >= 0.0;
  return c;
}

SlopeWindow pre_halt_window(const Trajectory& tr, double boundary_limit) {
  int last = static_cast<int>(tr.records.size()) - 1;
  if (tr.status != RunStatus::Completed) --last;
  for (int k = 0; k <= last; ++k) {
    if (tr.records[k].boundary_fraction > boundary_limit) {
      last = k - 1;
      break;
    }
  }
  return {0, std::max(last, -1)};
}

SlopeCheck slope_check(const Trajectory& tr, SlopeWindow window) {
  const int n = window.last - window.first + 1;
  if (window.first < 0 || window.last >= static_cast<int>(tr.records.size()) || n < 5)
    throw std::invalid_argument("slope_check: window needs at least 5 recorded samples");
  double st = 0.0, sm = 0.0;
  for (int k = window.first; k <= window.last; ++k) {
    st += tr.records[k].t;
    sm += tr.records[k].second_moment;
  }
  st /= n;
  sm /= n;
  double num = 0.0, den = 0.0;
  for (int k = window.first; k <= window.last; ++k) {
    const double dt = tr.records[k].t - st;
    num += dt * (tr.records[k].second_moment - sm);
    den += dt * dt;
  }
  SlopeCheck c;
  c.window = window;
  c.samples = n;
  c.measured = num / den;
  c.predicted = predicted_moment_slope(tr.beta, tr.a);
  c.rel_error = c.predicted != 0.0 ? std::abs(c.measured - c.predicted) / std::abs(c.predicted)
                                   : std::abs(c.measured);
  return c;
}

SlopeCheck slope_check(const Trajectory& tr) { return slope_check(tr, pre_halt_window(tr)); }

HolderFit holder_fit(const Trajectory& tr, const std::vector<int>& snapshot_indices,
                     double sinkhorn_tol) {
  std::vector<int> idx = snapshot_indices;
  if (idx.empty())
    for (std::size_t i = 0; i < tr.snapshots.size(); ++i) idx.push_back(static_cast<int>(i));
  const double tau = tr.params.tau;
  const double eps = tr.params.eps_for(tr.grid);
  HolderFit fit;
  for (std::size_t a = 0; a < idx.size(); ++a) {
    for (std::size_t b = a + 1; b < idx.size(); ++b) {
      const Snapshot& s = tr.snapshots.at(idx[a]);
      const Snapshot& t = tr.snapshots.at(idx[b]);
      const double d = transport::product_distance(s.density, t.density, eps, sinkhorn_tol).distance;
      const double c = d / (std::sqrt(std::abs(t.t - s.t)) + std::sqrt(tau));
      ++fit.pairs;
      if (c > fit.constant) {
        fit.constant = c;
        fit.worst_s = s.t;
        fit.worst_t = t.t;
        fit.worst_distance = d;
      }
    }
  }
  return fit;
}

}  // namespace pks::jko
