#pragma once

// Parameter types shared by every engine: a two-level system coupled to a
// single oscillator mode,
//
//   H / (hbar omega) = W sz + a^d a + lambda sz (a + a^d),
//
// with W = Omega/omega and lambda = g/omega.  All times are the dimensionless
// tau = omega t.  Dichotomic observable: Q = n . sigma with n a unit vector;
// the closed-form engine needs n in the equatorial plane, n = (cos phi,
// sin phi, 0).

#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <sstream>
#include <string>

#include "lgq/error.hpp"

namespace lgq {

inline constexpr double pi = 3.141592653589793238462643383279502884;

// CODATA 2018 values, SI units.
namespace constants {
inline constexpr double G = 6.67430e-11;        // m^3 kg^-1 s^-2
inline constexpr double hbar = 1.054571817e-34;  // J s
inline constexpr double k_B = 1.380649e-23;      // J K^-1
}  // namespace constants

enum class InitKind { ground, thermal, squeezed, coherent_pair };

// Oscillator initial state. thermal(0) must behave exactly like ground();
// engines guarantee that by routing ground through the thermal scale factor
// 2*nbar+1 == 1.
struct OscillatorInit {
  InitKind kind = InitKind::ground;
  double nbar = 0.0;       // thermal occupation, >= 0
  double zeta_abs = 0.0;   // squeeze magnitude |zeta|
  double zeta_arg = 0.0;   // squeeze phase theta, zeta = |zeta| e^{i theta}
  std::complex<double> xi0{0.0, 0.0};  // coherent_pair amplitudes
  std::complex<double> xi1{0.0, 0.0};

  static OscillatorInit ground() { return {}; }

  static OscillatorInit thermal(double nbar) {
    OscillatorInit o;
    o.kind = InitKind::thermal;
    o.nbar = nbar;
    return o;
  }

  // Signed real zeta is the common case: negative values mean theta = pi.
  static OscillatorInit squeezed(double zeta_abs, double zeta_arg = 0.0) {
    OscillatorInit o;
    o.kind = InitKind::squeezed;
    o.zeta_abs = zeta_abs;
    o.zeta_arg = zeta_arg;
    if (zeta_abs < 0.0) {
      o.zeta_abs = -zeta_abs;
      o.zeta_arg = zeta_arg + pi;
    }
    return o;
  }

  static OscillatorInit coherent_pair(std::complex<double> xi0,
                                      std::complex<double> xi1) {
    OscillatorInit o;
    o.kind = InitKind::coherent_pair;
    o.xi0 = xi0;
    o.xi1 = xi1;
    return o;
  }
};

inline const char* init_kind_name(InitKind k) {
  switch (k) {
    case InitKind::ground: return "ground";
    case InitKind::thermal: return "thermal";
    case InitKind::squeezed: return "squeezed";
    case InitKind::coherent_pair: return "coherent_pair";
  }
  return "?";
}

struct ModelParams {
  double lambda = 0.0;       // dimensionless coupling g/omega, >= 0
  double omega_ratio = 0.0;  // Omega/omega, any real
  double phi = 0.0;          // azimuth of the measurement axis
  // Optional explicit measurement axis; when set it is authoritative and
  // phi is recomputed from it during validation.
  std::optional<std::array<double, 3>> axis;

  double lambda2() const { return lambda * lambda; }
};

// Which engine the params are being validated for. The closed-form and
// semiclassical engines only support equatorial axes.
enum class EngineContext { closed_form, fock, semiclassical };

inline double axis_norm(const std::array<double, 3>& n) {
  return std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
}

// Returns a normalized copy: axis resolved (from phi when absent), unit to
// machine precision, phi consistent with the axis when equatorial.
inline ModelParams validate(const ModelParams& in,
                            EngineContext ctx = EngineContext::closed_form) {
  ModelParams p = in;
  if (!std::isfinite(p.lambda) || p.lambda < 0.0)
    fail(errc::negative_coupling,
         "lambda must be finite and >= 0, got " + std::to_string(p.lambda));
  if (!std::isfinite(p.omega_ratio) || !std::isfinite(p.phi))
    fail(errc::non_unit_axis, "omega_ratio and phi must be finite");

  if (p.axis) {
    auto& n = *p.axis;
    double len = axis_norm(n);
    if (!std::isfinite(len) || std::abs(len - 1.0) > 1e-3)
      fail(errc::non_unit_axis,
           "measurement axis must be a unit vector, |n| = " + std::to_string(len));
    for (double& c : n) c /= len;
  } else {
    p.axis = std::array<double, 3>{std::cos(p.phi), std::sin(p.phi), 0.0};
  }

  const auto& n = *p.axis;
  bool equatorial = std::abs(n[2]) <= 1e-12;
  if (ctx == EngineContext::closed_form && !equatorial)
    fail(errc::equatorial_axis_required,
         "this engine evaluates equatorial axes only, n_z = " +
             std::to_string(n[2]));
  if (ctx == EngineContext::semiclassical && !equatorial)
    fail(errc::non_equatorial_axis,
         "collapse protocol requires an equatorial axis, n_z = " +
             std::to_string(n[2]));
  if (equatorial) p.phi = std::atan2(n[1], n[0]);
  return p;
}

// ---- sign-pair bookkeeping -------------------------------------------------

// Fixed order: (+,+), (+,-), (-,+), (-,-).
inline constexpr std::array<std::pair<int, int>, 4> sign_pairs{
    {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};

inline int sign_index(int s1, int s2) {
  return (s1 > 0 ? 0 : 2) + (s2 > 0 ? 0 : 1);
}

inline const char* sign_pair_name(int idx) {
  static const char* names[4] = {"pp", "pm", "mp", "mm"};
  return names[idx];
}

// Two-time quasiprobability at one (tau1, tau2) point: the four sign values
// plus the moments they were assembled from.
struct QuasiResult {
  double tau1 = 0.0, tau2 = 0.0;
  double expect_q1 = 0.0;  // <Q(tau1)>
  double expect_q2 = 0.0;  // <Q(tau2)>
  double corr = 0.0;       // symmetrized two-time correlator
  std::array<double, 4> q{};

  double operator()(int s1, int s2) const { return q[sign_index(s1, s2)]; }
};

// Largest residual of the defining identities:
//   sum_q = 1, row/column marginals = (1 +- <Q>)/2, sum s1 s2 q = corr.
// The closed-form engine satisfies them by construction; the Fock engine
// computes q independently, so this is a genuine consistency check there.
inline double max_identity_residual(const QuasiResult& r) {
  double sum = 0.0, m1 = 0.0, m2 = 0.0, cc = 0.0;
  for (auto [s1, s2] : sign_pairs) {
    double v = r(s1, s2);
    sum += v;
    if (s1 > 0) m1 += v;
    if (s2 > 0) m2 += v;
    cc += s1 * s2 * v;
  }
  double worst = std::abs(sum - 1.0);
  worst = std::max(worst, std::abs(m1 - 0.5 * (1.0 + r.expect_q1)));
  worst = std::max(worst, std::abs(m2 - 0.5 * (1.0 + r.expect_q2)));
  worst = std::max(worst, std::abs(cc - r.corr));
  return worst;
}

// ---- SI-side description ----------------------------------------------------

// Laboratory-scale setup: particle of mass m split by ell, oscillator of mass
// M (or sphere of density rho) at distance L, trap frequency omega_si, bath
// temperature T.
struct PhysicalSetup {
  double particle_mass = 0.0;    // m  [kg]
  double split = 0.0;            // ell [m]
  double separation = 0.0;       // L  [m]
  double omega_si = 0.0;         // [rad/s]
  double temperature = 0.0;      // [K]
  std::optional<double> oscillator_mass;  // M [kg]
  std::optional<double> density;          // rho [kg/m^3]; sphere M = 4 pi rho ell^3 / 3
};

struct DimensionlessParams {
  double lambda2_exact = 0.0;  // from M and the full geometric factor
  // G^2 m^2 rho / (hbar ell omega^3) with L ~ ell; needs a density.
  std::optional<double> lambda2_approx;
  double nbar = 0.0;  // k_B T / (2 hbar omega)
};

// Reduce SI inputs to the dimensionless coupling and occupation. The exact
// form needs an oscillator mass (explicit or via density); the approximate
// form needs a density.
inline DimensionlessParams dimensionless_from_si(const PhysicalSetup& s) {
  using namespace constants;
  if (s.particle_mass <= 0.0 || s.split <= 0.0 || s.omega_si <= 0.0)
    fail(errc::schema_error, "particle_mass, split and omega_si must be > 0");

  DimensionlessParams out;
  double M = 0.0;
  if (s.oscillator_mass)
    M = *s.oscillator_mass;
  else if (s.density)
    M = 4.0 * pi * (*s.density) * s.split * s.split * s.split / 3.0;
  else
    fail(errc::missing_density,
         "need oscillator_mass or density for the exact coupling");

  double L = s.separation > 0.0 ? s.separation : s.split;
  double r2 = L * L + 0.25 * s.split * s.split;
  double w3 = s.omega_si * s.omega_si * s.omega_si;
  out.lambda2_exact = G * G * s.particle_mass * s.particle_mass * M *
                      s.split * s.split / (2.0 * hbar * w3 * r2 * r2 * r2);

  if (s.density)
    out.lambda2_approx = G * G * s.particle_mass * s.particle_mass *
                         (*s.density) / (hbar * s.split * w3);

  out.nbar = s.temperature > 0.0
                 ? k_B * s.temperature / (2.0 * hbar * s.omega_si)
                 : 0.0;
  return out;
}

}  // namespace lgq
