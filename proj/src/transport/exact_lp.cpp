#include "pks/transport/exact_lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "pks/core/multi_density.hpp"

namespace pks::transport {

namespace {

class TransportationSimplex {
 public:
  TransportationSimplex(std::span<const Point2> xs, std::span<const double> a,
                        std::span<const Point2> ys, std::span<const double> b)
      : xs_(xs), ys_(ys), m_(static_cast<int>(xs.size())), n_(static_cast<int>(ys.size())) {
    northwest_corner(a, b);
  }

  double solve() {
    double cmax = 0.0;
    for (const auto& p : xs_)
      for (const auto& q : ys_) cmax = std::max(cmax, cost(p, q));
    const double tol = 1e-12 * std::max(cmax, 1e-300);
    const long cells = static_cast<long>(m_) * n_;
    const long block = std::max<long>(64, static_cast<long>(std::sqrt(static_cast<double>(cells))));
    const long max_pivots = 200L * (m_ + n_) * (m_ + n_) + 1000;
    long cursor = 0;
    std::vector<double> u(m_), v(n_);
    for (long pivot = 0;; ++pivot) {
      if (pivot > max_pivots) throw std::runtime_error("exact LP: pivot limit reached");
      potentials(u, v);
      // Block pricing: most negative reduced cost within the first block that has one.
      int ei = -1, ej = -1;
      double best = -tol;
      for (long scanned = 0; scanned < cells && ei < 0;) {
        long stop = std::min(cells, scanned + block);
        for (; scanned < stop; ++scanned) {
          long c = (cursor + scanned) % cells;
          int i = static_cast<int>(c / n_), j = static_cast<int>(c % n_);
          double r = cost(xs_[i], ys_[j]) - u[i] - v[j];
          if (r < best) {
            best = r;
            ei = i;
            ej = j;
          }
        }
        if (ei >= 0) cursor = (cursor + scanned) % cells;
      }
      if (ei < 0) break;
      pivot_in(ei, ej);
    }
    double total = 0.0;
    for (std::size_t k = 0; k < arc_i_.size(); ++k)
      total += flow_[k] * cost(xs_[arc_i_[k]], ys_[arc_j_[k]]);
    return total;
  }

 private:
  static double cost(const Point2& p, const Point2& q) {
    double dx = p.x - q.x, dy = p.y - q.y;
    return dx * dx + dy * dy;
  }

  void northwest_corner(std::span<const double> a, std::span<const double> b) {
    std::vector<double> ra(a.begin(), a.end()), rb(b.begin(), b.end());
    adj_.assign(m_ + n_, {});
    int i = 0, j = 0;
    for (;;) {
      double x = std::min(ra[i], rb[j]);
      add_arc(i, j, x);
      ra[i] -= x;
      rb[j] -= x;
      if (i == m_ - 1 && j == n_ - 1) break;
      if (i == m_ - 1) ++j;
      else if (j == n_ - 1) ++i;
      else if (ra[i] <= rb[j]) ++i;
      else ++j;
    }
  }

  void add_arc(int i, int j, double x) {
    int k = static_cast<int>(arc_i_.size());
    arc_i_.push_back(i);
    arc_j_.push_back(j);
    flow_.push_back(x);
    adj_[i].push_back(k);
    adj_[m_ + j].push_back(k);
  }

  int other_end(int k, int node) const { return node < m_ ? m_ + arc_j_[k] : arc_i_[k]; }

  // u_i + v_j = c_ij on every basic arc, u_0 = 0.
  void potentials(std::vector<double>& u, std::vector<double>& v) {
    std::vector<char> seen(m_ + n_, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    u[0] = 0.0;
    while (!stack.empty()) {
      int node = stack.back();
      stack.pop_back();
      for (int k : adj_[node]) {
        int nb = other_end(k, node);
        if (seen[nb]) continue;
        seen[nb] = 1;
        double c = cost(xs_[arc_i_[k]], ys_[arc_j_[k]]);
        if (nb >= m_) v[nb - m_] = c - u[arc_i_[k]];
        else u[nb] = c - v[arc_j_[k]];
        stack.push_back(nb);
      }
    }
  }

  void pivot_in(int ei, int ej) {
    // Tree path from source ei to sink ej, as arcs ordered from ei.
    std::vector<int> parent_arc(m_ + n_, -1);
    std::vector<char> seen(m_ + n_, 0);
    std::vector<int> stack{m_ + ej};
    seen[m_ + ej] = 1;
    while (!stack.empty() && !seen[ei]) {
      int node = stack.back();
      stack.pop_back();
      for (int k : adj_[node]) {
        int nb = other_end(k, node);
        if (seen[nb]) continue;
        seen[nb] = 1;
        parent_arc[nb] = k;
        stack.push_back(nb);
      }
    }
    std::vector<int> path;
    for (int node = ei; node != m_ + ej;) {
      int k = parent_arc[node];
      path.push_back(k);
      node = other_end(k, node);
    }
    // Entering arc gains theta; path arcs alternate -, +, ..., - starting at ei.
    double theta = 0.0;
    int leave = -1;
    for (std::size_t t = 0; t < path.size(); t += 2) {
      int k = path[t];
      if (leave < 0 || flow_[k] < theta) {
        theta = flow_[k];
        leave = k;
      }
    }
    for (std::size_t t = 0; t < path.size(); ++t) {
      int k = path[t];
      if (t % 2 == 0) flow_[k] = k == leave ? 0.0 : flow_[k] - theta;
      else flow_[k] += theta;
    }
    auto drop = [&](int node, int k) {
      auto& lst = adj_[node];
      lst.erase(std::find(lst.begin(), lst.end(), k));
    };
    drop(arc_i_[leave], leave);
    drop(m_ + arc_j_[leave], leave);
    arc_i_[leave] = ei;
    arc_j_[leave] = ej;
    flow_[leave] = theta;
    adj_[ei].push_back(leave);
    adj_[m_ + ej].push_back(leave);
  }

  std::span<const Point2> xs_, ys_;
  int m_, n_;
  std::vector<int> arc_i_, arc_j_;
  std::vector<double> flow_;
  std::vector<std::vector<int>> adj_;
};

void check_weights(std::span<const double> w, const char* who) {
  for (double v : w)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument(std::string("exact LP: ") + who + " weights must be >= 0");
}

}  // namespace

double exact_transport_cost(std::span<const Point2> xs, std::span<const double> a,
                            std::span<const Point2> ys, std::span<const double> b) {
  if (xs.size() != a.size() || ys.size() != b.size())
    throw std::invalid_argument("exact LP: points and weights differ in length");
  if (xs.empty() || ys.empty()) throw std::invalid_argument("exact LP: empty support");
  check_weights(a, "source");
  check_weights(b, "target");
  double sa = 0.0, sb = 0.0;
  for (double v : a) sa += v;
  for (double v : b) sb += v;
  if (std::abs(sa - sb) > 1e-9 * std::max(sa, sb))
    throw std::invalid_argument("exact LP: totals differ");
  TransportationSimplex lp(xs, a, ys, b);
  return lp.solve();
}

double exact_w2_lp(const Grid& grid, std::span<const double> mu, std::span<const double> nu) {
  if (mu.size() != grid.size() || nu.size() != grid.size())
    throw std::invalid_argument("exact LP: field size mismatch");
  check_weights(mu, "source");
  check_weights(nu, "target");
  auto support = [&](std::span<const double> f, std::vector<Point2>& pts, std::vector<double>& w) {
    double s = 0.0;
    for (double v : f) s += v;
    if (!(s > 0.0)) throw std::invalid_argument("exact LP: zero-mass density");
    const int n = grid.cells();
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) {
        double v = f[grid.index(p, q)];
        if (v > 0.0) {
          pts.push_back({grid.center(p), grid.center(q)});
          w.push_back(v / s);
        }
      }
    if (pts.size() > kMaxLpSupport)
      throw std::invalid_argument("exact LP: support of " + std::to_string(pts.size()) +
                                  " cells exceeds the cap of " + std::to_string(kMaxLpSupport));
    return s * grid.cell_area();
  };
  std::vector<Point2> xs, ys;
  std::vector<double> a, b;
  double ma = support(mu, xs, a);
  double mb = support(nu, ys, b);
  if (std::abs(ma - mb) > kMassTolerance * std::max(ma, mb))
    throw std::invalid_argument("exact LP: masses differ");
  return ma * exact_transport_cost(xs, a, ys, b);
}

}  // namespace pks::transport
