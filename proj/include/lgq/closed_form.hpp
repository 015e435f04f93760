#pragma once

// Closed-form two-time statistics for the coupled qubit-oscillator model.
//
// The interaction displaces the oscillator conditionally on sz, which leaves
// single-time coherences and the symmetrized correlator with the structure
//
//   <Q(tau)>   = cos(2 W tau - phi) exp(-E1(tau))
//   C(tau1,2)  = cos(Theta) cos(2 W (tau2-tau1)) exp(-E12(tau1,tau2))
//   q_{s1 s2}  = (1 + s1 <Q1> + s2 <Q2> + s1 s2 C) / 4
//
// where the decoherence exponents E1, E12 depend on the oscillator start
// (ground / thermal / squeezed) and Theta is a state-independent phase picked
// up by the non-commuting conditional displacements.  Negative q values mark
// Leggett-Garg violations.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "lgq/error.hpp"
#include "lgq/model.hpp"

namespace lgq::closed_form {

using std::complex;

// ---- kernels ----------------------------------------------------------------

// Conditional displacement accumulated by time tau, in units of lambda:
// omega * alpha(t) = e^{-i tau} - 1.
inline complex<double> displacement_kernel(double tau) {
  return std::polar(1.0, -tau) - 1.0;
}

// Secular phase drift, omega^2 * beta(t) = tau - sin(tau). Not used by any
// observable below (it cancels from sz-diagonal phases) but part of the
// kernel pair.
inline double drift_kernel(double tau) { return tau - std::sin(tau); }

struct Kernels {
  complex<double> alpha;
  double beta;
};

inline Kernels kernels(double tau) {
  return {displacement_kernel(tau), drift_kernel(tau)};
}

// Two-time phase in product form, 16 lambda^2 s((t2-t1)/2) s(t2/2) s(t1/2).
inline double theta_phase(double tau1, double tau2, double lambda) {
  return 16.0 * lambda * lambda * std::sin(0.5 * (tau2 - tau1)) *
         std::sin(0.5 * tau2) * std::sin(0.5 * tau1);
}

// Same phase as a sine sum; kept as an independent route for testing.
inline double theta_phase_sum_form(double tau1, double tau2, double lambda) {
  return 4.0 * lambda * lambda *
         (std::sin(tau2 - tau1) - std::sin(tau2) + std::sin(tau1));
}

// ---- decoherence exponents ---------------------------------------------------

namespace detail {

// Ground and thermal share one arithmetic path: the thermal scale 2 nbar + 1
// is exactly 1.0 for nbar = 0, so ground results are bit-identical to
// thermal(0).
inline double thermal_scale(const OscillatorInit& init) {
  return 2.0 * init.nbar + 1.0;
}

inline double squeezed_norm(complex<double> u, complex<double> v,
                            const OscillatorInit& init) {
  complex<double> rot = std::polar(1.0, init.zeta_arg);
  complex<double> br =
      u * std::cosh(init.zeta_abs) - v * rot * std::sinh(init.zeta_abs);
  return std::norm(br);
}

inline void require_closed_form_init(const OscillatorInit& init) {
  if (init.kind == InitKind::coherent_pair)
    fail(errc::unsupported_init,
         "closed forms cover ground, thermal and squeezed starts; use the "
         "Fock engine for coherent superpositions");
  if (init.kind == InitKind::thermal && init.nbar < 0.0)
    fail(errc::unsupported_init, "thermal occupation must be >= 0");
}

}  // namespace detail

// Single-time exponent E1(tau) >= 0.
inline double single_time_exponent(double tau, double lambda,
                                   const OscillatorInit& init) {
  detail::require_closed_form_init(init);
  if (init.kind == InitKind::squeezed) {
    complex<double> u = std::polar(1.0, tau) - 1.0;
    complex<double> v = std::polar(1.0, -tau) - 1.0;
    return 2.0 * lambda * lambda * detail::squeezed_norm(u, v, init);
  }
  double s = std::sin(0.5 * tau);
  return detail::thermal_scale(init) * (8.0 * lambda * lambda * s * s);
}

// Two-time exponent E12(tau1, tau2) >= 0; symmetric under argument swap.
inline double two_time_exponent(double tau1, double tau2, double lambda,
                                const OscillatorInit& init) {
  detail::require_closed_form_init(init);
  if (init.kind == InitKind::squeezed) {
    complex<double> u = std::polar(1.0, tau2) - std::polar(1.0, tau1);
    complex<double> v = std::polar(1.0, -tau2) - std::polar(1.0, -tau1);
    return 2.0 * lambda * lambda * detail::squeezed_norm(u, v, init);
  }
  double s = std::sin(0.5 * (tau2 - tau1));
  return detail::thermal_scale(init) * (8.0 * lambda * lambda * s * s);
}

// ---- observables --------------------------------------------------------------

inline double expect_q(double tau, const ModelParams& params,
                       const OscillatorInit& init = {}) {
  ModelParams p = validate(params, EngineContext::closed_form);
  double e = single_time_exponent(tau, p.lambda, init);
  return std::cos(2.0 * p.omega_ratio * tau - p.phi) * std::exp(-e);
}

// Symmetrized correlator; no ordering requirement, C(t1,t2) = C(t2,t1).
inline double correlation(double tau1, double tau2, const ModelParams& params,
                          const OscillatorInit& init = {}) {
  ModelParams p = validate(params, EngineContext::closed_form);
  double th = theta_phase(tau1, tau2, p.lambda);
  double e = two_time_exponent(tau1, tau2, p.lambda, init);
  return std::cos(th) * std::cos(2.0 * p.omega_ratio * (tau2 - tau1)) *
         std::exp(-e);
}

// All four sign pairs at (tau1, tau2), tau1 <= tau2.
inline QuasiResult quasiprob(double tau1, double tau2,
                             const ModelParams& params,
                             const OscillatorInit& init = {}) {
  if (tau1 > tau2)
    fail(errc::time_order, "need tau1 <= tau2");
  QuasiResult r;
  r.tau1 = tau1;
  r.tau2 = tau2;
  r.expect_q1 = expect_q(tau1, params, init);
  r.expect_q2 = expect_q(tau2, params, init);
  r.corr = correlation(tau1, tau2, params, init);
  for (auto [s1, s2] : sign_pairs)
    r.q[sign_index(s1, s2)] =
        0.25 * (1.0 + s1 * r.expect_q1 + s2 * r.expect_q2 + s1 * s2 * r.corr);
  return r;
}

// ---- entanglement negativity (ground start) -----------------------------------

// N(tau) = sqrt(1 - exp(-16 lambda^2 sin^2(tau/2))) / 2, in [0, 1/2].
inline double negativity(double tau, double lambda) {
  if (lambda < 0.0) fail(errc::negative_coupling, "lambda must be >= 0");
  double s = std::sin(0.5 * tau);
  double x = 16.0 * lambda * lambda * s * s;
  return 0.5 * std::sqrt(-std::expm1(-x));
}

// q(0, tau) split into the uncoupled part and the gravity-induced shift,
// written through the negativity: the visibility loss exp(-E1) equals
// sqrt(1 - 4 N^2).
struct SuppressionSplit {
  QuasiResult total;
  std::array<double, 4> free_part{};      // lambda = 0 value
  std::array<double, 4> coupling_shift{};  // -(1 - sqrt(1-4N^2)) B / 4
  double negativity = 0.0;                 // N(tau2)
};

inline SuppressionSplit quasiprob_negativity_form(double tau2,
                                                  const ModelParams& params) {
  ModelParams p = validate(params, EngineContext::closed_form);
  SuppressionSplit out;
  out.total = quasiprob(0.0, tau2, p);
  out.negativity = negativity(tau2, p.lambda);
  double n2 = out.negativity * out.negativity;
  double visibility = std::sqrt(1.0 - 4.0 * n2);  // = exp(-E1(tau2))
  double c1 = std::cos(p.phi);
  double c2 = std::cos(2.0 * p.omega_ratio * tau2 - p.phi);
  double c12 = std::cos(2.0 * p.omega_ratio * tau2);
  for (auto [s1, s2] : sign_pairs) {
    int i = sign_index(s1, s2);
    double bracket = s2 * c2 + s1 * s2 * c12;
    out.free_part[i] = 0.25 * (1.0 + s1 * c1 + bracket);
    out.coupling_shift[i] = -0.25 * (1.0 - visibility) * bracket;
  }
  return out;
}

// ---- weak-coupling helpers ------------------------------------------------------

// O(lambda^2) expansion at Omega = 0, phi = 0; error is O(lambda^4).
inline double quasiprob_small_lambda(double tau1, double tau2, double lambda,
                                     int s1, int s2) {
  double s_a = std::sin(0.5 * tau1);
  double s_b = std::sin(0.5 * tau2);
  double s_c = std::sin(0.5 * (tau2 - tau1));
  return 0.25 * (1.0 + s1 + s2 + s1 * s2) -
         2.0 * lambda * lambda *
             (s1 * s_a * s_a + s2 * s_b * s_b + s1 * s2 * s_c * s_c);
}

struct MinLocus {
  double tau1, tau2;
  int s1, s2;
};

struct MinPrediction {
  double value = 0.0;             // predicted depth
  bool order_of_magnitude = false;  // true for squeezed: exponent only
  bool lambda_warning = false;      // expansion dubious above lambda = 0.1
  std::vector<MinLocus> loci;       // principal weak-coupling minima
};

// Weak-coupling prediction for the deepest negative q and where it sits.
// Ground: -lambda^2/2 at six loci (two families per violating sign pair).
// Thermal: same loci, depth scaled by 2 nbar + 1. Squeezed: depth boosted
// by e^{2|zeta|}, order of magnitude only.
inline MinPrediction min_quasiprob_predicted(const ModelParams& params,
                                             const OscillatorInit& init = {}) {
  ModelParams p = validate(params, EngineContext::closed_form);
  detail::require_closed_form_init(init);
  MinPrediction out;
  double depth = -0.5 * p.lambda * p.lambda;
  switch (init.kind) {
    case InitKind::thermal:
    case InitKind::ground:
      out.value = depth * detail::thermal_scale(init);
      break;
    case InitKind::squeezed:
      out.value = depth * std::exp(2.0 * init.zeta_abs);
      out.order_of_magnitude = true;
      break;
    default:
      break;  // unreachable, filtered above
  }
  out.lambda_warning = p.lambda > 0.1;
  out.loci = {
      {2.0 * pi / 3.0, 7.0 * pi / 3.0, 1, -1},
      {4.0 * pi / 3.0, 5.0 * pi / 3.0, 1, -1},
      {pi / 3.0, 2.0 * pi / 3.0, -1, 1},
      {5.0 * pi / 3.0, 10.0 * pi / 3.0, -1, 1},
      {pi / 3.0, 5.0 * pi / 3.0, -1, -1},
      {5.0 * pi / 3.0, 7.0 * pi / 3.0, -1, -1},
  };
  return out;
}

}  // namespace lgq::closed_form
