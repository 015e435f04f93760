#pragma once

// Mean-field comparison dynamics: the oscillator mean feels the qubit only
// through <sz>, the qubit precesses about z at a rate shifted by the
// oscillator mean. Tracked variables: q = <a + a^d>, its conjugate p, and the
// Bloch vector.
//
//   q' = p
//   p' = -q - 2 lambda <sz>
//   (bx, by) rotate about z at rate 2 (W + lambda q)
//
// Two-time statistics use a projective collapse at tau1: outcome s1 occurs
// with probability (1 + s1 n.b)/2 and leaves the Bloch vector at s1 n. With
// the symmetric start (equatorial Bloch, q = p = 0) and an equatorial axis,
// <sz> stays zero on every branch, so the mean field never sources gravity
// and the assembled quasiprobability reduces to the uncoupled qubit value.

#include <array>
#include <cmath>
#include <string>

#include "lgq/error.hpp"
#include "lgq/model.hpp"

namespace lgq::semiclassical {

struct MeanFieldState {
  double tau = 0.0;
  double q = 0.0;  // oscillator mean <a + a^d>
  double p = 0.0;
  std::array<double, 3> bloch{1.0, 0.0, 0.0};
};

struct StepControl {
  double dtau = 2.0 * pi / 2000.0;
  double bloch_drift_tol = 1e-6;  // |b| is conserved; more drift means the
                                  // step is too coarse
};

namespace detail {

struct Deriv {
  double q, p, bx, by, bz;
};

inline Deriv rhs(const MeanFieldState& s, double lambda, double W) {
  double rate = 2.0 * (W + lambda * s.q);
  return {s.p, -s.q - 2.0 * lambda * s.bloch[2], -rate * s.bloch[1],
          rate * s.bloch[0], 0.0};
}

inline MeanFieldState advance(const MeanFieldState& s, const Deriv& d,
                              double h) {
  MeanFieldState out = s;
  out.q += h * d.q;
  out.p += h * d.p;
  out.bloch[0] += h * d.bx;
  out.bloch[1] += h * d.by;
  out.bloch[2] += h * d.bz;
  return out;
}

inline double bloch_norm(const MeanFieldState& s) {
  return std::sqrt(s.bloch[0] * s.bloch[0] + s.bloch[1] * s.bloch[1] +
                   s.bloch[2] * s.bloch[2]);
}

}  // namespace detail

// Classic fixed-step RK4 from s.tau to tau_to.
inline MeanFieldState evolve(MeanFieldState s, double tau_to,
                             const ModelParams& params,
                             const StepControl& ctl = {}) {
  ModelParams pp = validate(params, EngineContext::fock);  // any axis is fine here
  if (!(ctl.dtau > 0.0))
    fail(errc::step_too_large, "dtau must be positive");
  if (tau_to < s.tau)
    fail(errc::time_order, "cannot integrate backwards");
  double span = tau_to - s.tau;
  if (span == 0.0) return s;

  double norm0 = detail::bloch_norm(s);
  long nsteps = static_cast<long>(std::ceil(span / ctl.dtau));
  double h = span / static_cast<double>(nsteps);
  double lam = pp.lambda, W = pp.omega_ratio;
  for (long k = 0; k < nsteps; ++k) {
    auto k1 = detail::rhs(s, lam, W);
    auto k2 = detail::rhs(detail::advance(s, k1, 0.5 * h), lam, W);
    auto k3 = detail::rhs(detail::advance(s, k2, 0.5 * h), lam, W);
    auto k4 = detail::rhs(detail::advance(s, k3, h), lam, W);
    detail::Deriv avg{
        (k1.q + 2.0 * k2.q + 2.0 * k3.q + k4.q) / 6.0,
        (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p) / 6.0,
        (k1.bx + 2.0 * k2.bx + 2.0 * k3.bx + k4.bx) / 6.0,
        (k1.by + 2.0 * k2.by + 2.0 * k3.by + k4.by) / 6.0,
        (k1.bz + 2.0 * k2.bz + 2.0 * k3.bz + k4.bz) / 6.0,
    };
    s = detail::advance(s, avg, h);
    s.tau += h;
  }
  s.tau = tau_to;
  if (std::abs(detail::bloch_norm(s) - norm0) > ctl.bloch_drift_tol)
    fail(errc::step_too_large,
         "Bloch norm drifted by more than " +
             std::to_string(ctl.bloch_drift_tol) + "; reduce dtau");
  return s;
}

namespace detail {

inline double axis_dot(const ModelParams& p, const MeanFieldState& s) {
  const auto& n = *p.axis;
  return n[0] * s.bloch[0] + n[1] * s.bloch[1] + n[2] * s.bloch[2];
}

inline MeanFieldState symmetric_start() { return MeanFieldState{}; }

inline ModelParams require_equatorial(const ModelParams& params) {
  return validate(params, EngineContext::semiclassical);
}

}  // namespace detail

// Probability of the outcome pair (s1, s2) under measure-collapse-measure.
// Non-negative by construction.
inline double joint_probability(double tau1, double tau2,
                                const ModelParams& params, int s1, int s2,
                                const StepControl& ctl = {}) {
  ModelParams p = detail::require_equatorial(params);
  if (tau1 < 0.0 || tau1 > tau2) fail(errc::time_order, "need 0 <= tau1 <= tau2");
  MeanFieldState s = detail::symmetric_start();
  s = evolve(s, tau1, p, ctl);
  double p1 = 0.5 * (1.0 + s1 * detail::axis_dot(p, s));
  s.bloch = {s1 * (*p.axis)[0], s1 * (*p.axis)[1], s1 * (*p.axis)[2]};
  s = evolve(s, tau2, p, ctl);
  double p2 = 0.5 * (1.0 + s2 * detail::axis_dot(p, s));
  return p1 * p2;
}

// Quasiprobability assembled from mean-field statistics: single-time moments
// from undisturbed trajectories, the correlator from the collapse protocol.
// With the symmetric start this equals the uncoupled (lambda = 0) quantum
// value; at W = 0 that is (1 + s1 + s2 + s1 s2)/4 >= 0, i.e. gravity alone
// produces no violation here.
inline double quasiprob(double tau1, double tau2, const ModelParams& params,
                        int s1, int s2, const StepControl& ctl = {}) {
  ModelParams p = detail::require_equatorial(params);
  if (tau1 < 0.0 || tau1 > tau2) fail(errc::time_order, "need 0 <= tau1 <= tau2");

  MeanFieldState at1 = evolve(detail::symmetric_start(), tau1, p, ctl);
  double m1 = detail::axis_dot(p, at1);
  double m2 = detail::axis_dot(p, evolve(at1, tau2, p, ctl));

  double corr = 0.0;
  for (int a : {+1, -1}) {
    double pa = 0.5 * (1.0 + a * m1);
    MeanFieldState branch = at1;
    branch.bloch = {a * (*p.axis)[0], a * (*p.axis)[1], a * (*p.axis)[2]};
    branch = evolve(branch, tau2, p, ctl);
    corr += a * pa * detail::axis_dot(p, branch);
  }
  return 0.25 * (1.0 + s1 * m1 + s2 * m2 + s1 * s2 * corr);
}

}  // namespace lgq::semiclassical
