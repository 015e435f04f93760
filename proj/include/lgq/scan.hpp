#pragma once

// Grid scans of the quasiprobability over (tau1, tau2) windows, negative-value
// masks with connected-component bookkeeping, and continuous minimum
// refinement. Only cells with tau1 <= tau2 are populated; the rest hold NaN.
//
// Scans are deterministic: cells are assigned row-wise to workers and every
// cell value depends only on its own coordinates, so the worker count cannot
// change the output.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <thread>
#include <vector>

#include "lgq/closed_form.hpp"
#include "lgq/error.hpp"
#include "lgq/fock.hpp"
#include "lgq/model.hpp"

namespace lgq::scan {

enum class Engine { closed, oracle };

inline const char* engine_name(Engine e) {
  return e == Engine::closed ? "closed" : "oracle";
}

struct Request {
  double lo = 0.0;
  double hi = 4.0 * pi;
  int resolution = 401;
  Engine engine = Engine::closed;
  int workers = 0;  // 0 means hardware concurrency; never affects values
  // Dense-oracle scans get expensive fast; refuse absurd requests unless the
  // caller raises the cap deliberately.
  int oracle_resolution_cap = 101;
  fock::Config fock;
};

struct Grid {
  std::vector<double> tau1_axis, tau2_axis;
  std::array<Eigen::MatrixXd, 4> q;  // [sign_index], (i, j) = (tau1, tau2)
  ModelParams params;
  OscillatorInit init;
  Engine engine = Engine::closed;

  int rows() const { return static_cast<int>(tau1_axis.size()); }
  int cols() const { return static_cast<int>(tau2_axis.size()); }
  bool populated(int i, int j) const { return tau1_axis[i] <= tau2_axis[j]; }
};

namespace detail {

inline std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i)
    v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

// Run fn(i) for i in [0, rows) across a small pool; partition is static so
// the result layout never depends on scheduling.
inline void parallel_rows(int rows, int workers, const std::function<void(int)>& fn) {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  int w = workers > 0 ? workers : std::max(1, hw);
  w = std::min(w, rows);
  if (w <= 1) {
    for (int i = 0; i < rows; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(w);
  for (int t = 0; t < w; ++t)
    pool.emplace_back([=, &fn] {
      for (int i = t; i < rows; i += w) fn(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace detail

inline Grid grid_scan(const ModelParams& params, const OscillatorInit& init,
                      const Request& req) {
  if (req.resolution < 2)
    fail(errc::dimension_too_small, "scan resolution must be >= 2");
  if (!(req.lo < req.hi))
    fail(errc::time_order, "scan window must satisfy lo < hi");
  if (req.engine == Engine::oracle && req.resolution > req.oracle_resolution_cap)
    fail(errc::engine_unavailable,
         "oracle scans are capped at resolution " +
             std::to_string(req.oracle_resolution_cap) +
             "; raise oracle_resolution_cap to override");

  Grid g;
  g.engine = req.engine;
  g.init = init;
  g.tau1_axis = detail::linspace(req.lo, req.hi, req.resolution);
  g.tau2_axis = g.tau1_axis;
  int n = req.resolution;
  double nan = std::numeric_limits<double>::quiet_NaN();
  for (auto& m : g.q) m = Eigen::MatrixXd::Constant(n, n, nan);

  if (req.engine == Engine::closed) {
    g.params = validate(params, EngineContext::closed_form);
    detail::parallel_rows(n, req.workers, [&](int i) {
      double t1 = g.tau1_axis[i];
      for (int j = i; j < n; ++j) {
        QuasiResult r = closed_form::quasiprob(t1, g.tau2_axis[j], g.params, init);
        for (int k = 0; k < 4; ++k) g.q[k](i, j) = r.q[k];
      }
    });
    return g;
  }

  // Oracle scan: one diagonalization, one Heisenberg operator per axis point,
  // then each cell is a trace contraction. The measurement-operator expansion
  // M_s = (1 + s S)/2 makes this identical to the point oracle.
  g.params = validate(params, EngineContext::fock);
  fock::Space sp = fock::build_space(g.params, req.fock);
  Eigen::MatrixXcd rho0 = fock::build_initial(sp, init, req.fock);
  Eigen::MatrixXcd Q = fock::measurement_axis_operator(sp);

  std::vector<Eigen::MatrixXcd> S(n), Srho(n);
  std::vector<double> m(n);
  detail::parallel_rows(n, req.workers, [&](int k) {
    Eigen::MatrixXcd U = fock::evolve_operator(sp, g.tau1_axis[k]);
    S[k] = U.adjoint() * Q * U;
    Srho[k] = S[k] * rho0;
    m[k] = Srho[k].trace().real();
  });
  detail::parallel_rows(n, req.workers, [&](int i) {
    for (int j = i; j < n; ++j) {
      double corr = S[j].transpose().cwiseProduct(Srho[i]).sum().real();
      for (auto [s1, s2] : sign_pairs)
        g.q[sign_index(s1, s2)](i, j) =
            0.25 * (1.0 + s1 * m[i] + s2 * m[j] + s1 * s2 * corr);
    }
  });
  return g;
}

// ---- negative-region masks -----------------------------------------------------

struct Component {
  int cells = 0;
  int min_i = 0, min_j = 0;  // deepest cell; ties resolved row-major
  double min_value = 0.0;
  int i0 = 0, i1 = 0, j0 = 0, j1 = 0;  // inclusive bounding box
};

struct Mask {
  std::array<Eigen::ArrayXXi, 4> negative;          // 1 where q < 0
  std::array<std::vector<Component>, 4> components;  // 4-connected regions

  int count(int s1, int s2) const {
    return static_cast<int>(components[sign_index(s1, s2)].size());
  }
};

inline Mask region_mask(const Grid& g) {
  Mask mk;
  int n = g.rows();
  for (int k = 0; k < 4; ++k) {
    auto& neg = mk.negative[k];
    neg = Eigen::ArrayXXi::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        if (g.q[k](i, j) < 0.0) neg(i, j) = 1;

    // label 4-connected components, discovery in row-major order
    Eigen::ArrayXXi label = Eigen::ArrayXXi::Constant(n, n, -1);
    int next = 0;
    std::vector<std::pair<int, int>> stack;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (!neg(i, j) || label(i, j) >= 0) continue;
        int id = next++;
        stack.push_back({i, j});
        label(i, j) = id;
        while (!stack.empty()) {
          auto [r, c] = stack.back();
          stack.pop_back();
          const int dr[4] = {-1, 1, 0, 0}, dc[4] = {0, 0, -1, 1};
          for (int d = 0; d < 4; ++d) {
            int rr = r + dr[d], cc = c + dc[d];
            if (rr < 0 || rr >= n || cc < 0 || cc >= n) continue;
            if (!neg(rr, cc) || label(rr, cc) >= 0) continue;
            label(rr, cc) = id;
            stack.push_back({rr, cc});
          }
        }
      }

    auto& comps = mk.components[k];
    comps.assign(next, Component{});
    std::vector<bool> seen(next, false);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        int id = label(i, j);
        if (id < 0) continue;
        Component& c = comps[id];
        double v = g.q[k](i, j);
        if (!seen[id]) {
          seen[id] = true;
          c = {1, i, j, v, i, i, j, j};
        } else {
          ++c.cells;
          if (v < c.min_value) {
            c.min_value = v;
            c.min_i = i;
            c.min_j = j;
          }
          c.i0 = std::min(c.i0, i);
          c.i1 = std::max(c.i1, i);
          c.j0 = std::min(c.j0, j);
          c.j1 = std::max(c.j1, j);
        }
      }
  }
  return mk;
}

// ---- continuous refinement ------------------------------------------------------

struct Minimum {
  double tau1 = 0.0, tau2 = 0.0;
  double value = 0.0;
  long evaluations = 0;
};

// Coordinate pattern search: alternate axes, halve the step when a sweep
// stops improving, stop once an entire sweep moves the value by < tol.
// The domain is lo <= tau1 <= tau2 <= hi.
template <class F>
Minimum refine_minimum(F&& f, double tau1, double tau2, double step, double lo,
                       double hi, double tol = 1e-12) {
  Minimum best{tau1, tau2, f(tau1, tau2), 1};
  double h = step;
  auto try_point = [&](double a, double b) {
    if (a < lo || b > hi || a > b) return false;
    double v = f(a, b);
    ++best.evaluations;
    if (v < best.value) {
      best = {a, b, v, best.evaluations};
      return true;
    }
    return false;
  };
  while (h > 1e-14) {
    double before = best.value;
    bool moved = true;
    while (moved) {
      moved = false;
      if (try_point(best.tau1 + h, best.tau2)) moved = true;
      if (try_point(best.tau1 - h, best.tau2)) moved = true;
      if (try_point(best.tau1, best.tau2 + h)) moved = true;
      if (try_point(best.tau1, best.tau2 - h)) moved = true;
    }
    // Once a whole sweep at this scale gains less than tol, refine the scale.
    if (before - best.value < tol) h *= 0.5;
  }
  return best;
}

// Seeded from a grid cell, which must be a local minimum among its populated
// neighbors. Re-evaluates the grid's own engine continuously.
inline Minimum refine_minimum(const Grid& g, int i, int j, int s1, int s2) {
  int n = g.rows();
  if (i < 0 || j < 0 || i >= n || j >= n || !g.populated(i, j))
    fail(errc::not_a_local_min, "seed cell is outside the populated triangle");
  int k = sign_index(s1, s2);
  double center = g.q[k](i, j);
  for (int di = -1; di <= 1; ++di)
    for (int dj = -1; dj <= 1; ++dj) {
      int ii = i + di, jj = j + dj;
      if (ii < 0 || jj < 0 || ii >= n || jj >= n || !g.populated(ii, jj))
        continue;
      if (g.q[k](ii, jj) < center)
        fail(errc::not_a_local_min,
             "cell (" + std::to_string(i) + "," + std::to_string(j) +
                 ") is not a local minimum of the grid");
    }

  double step = g.tau1_axis[1] - g.tau1_axis[0];
  double lo = g.tau1_axis.front(), hi = g.tau2_axis.back();
  if (g.engine == Engine::closed) {
    auto f = [&](double a, double b) {
      return closed_form::quasiprob(a, b, g.params, g.init)(s1, s2);
    };
    return refine_minimum(f, g.tau1_axis[i], g.tau2_axis[j], step, lo, hi);
  }
  fock::Config cfg;  // point-oracle refinement: usable, just slow
  auto f = [&](double a, double b) {
    return fock::quasiprob_oracle(a, b, g.params, g.init, cfg)(s1, s2);
  };
  return refine_minimum(f, g.tau1_axis[i], g.tau2_axis[j], step, lo, hi);
}

}  // namespace lgq::scan
