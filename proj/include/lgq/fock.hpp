#pragma once

// Reference engine: dense truncated-Fock-space evolution, independent of the
// closed forms. The Hamiltonian is sz-block-diagonal, so each conditional
// oscillator block is diagonalized once (real symmetric) and propagators are
// exact in the truncated space; there is no time stepping anywhere.
//
// Basis layout: row = s * n_fock + m with s in {0 (sz=+1), 1 (sz=-1)} and m
// the Fock level.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <string>

#include "lgq/error.hpp"
#include "lgq/model.hpp"

namespace lgq::fock {

using cplx = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

struct Config {
  int n_fock = 40;              // boson levels kept (0 .. n_fock-1)
  double tol_truncation = 1e-8;  // acceptable probability outside the space
};

// Levels needed so the kept populations miss less than tol. Thermal tails are
// geometric, squeezed-vacuum tails fall like tanh^{2k}; coherent states need
// room for |xi| plus the conditional displacement.
inline int suggested_n_fock(const OscillatorInit& init, double lambda,
                            double tol = 1e-8) {
  double xi_max = 0.0;
  if (init.kind == InitKind::coherent_pair)
    xi_max = std::max(std::abs(init.xi0), std::abs(init.xi1));
  double reach = xi_max + 4.0 * lambda + 4.0;
  int n = std::max(40, static_cast<int>(std::ceil(reach * reach)) + 10);
  if (init.kind == InitKind::thermal && init.nbar > 0.0) {
    double r = init.nbar / (1.0 + init.nbar);
    n = std::max(n, static_cast<int>(std::ceil(std::log(tol) / std::log(r))) + 10);
  }
  if (init.kind == InitKind::squeezed && init.zeta_abs > 1e-3) {
    double t = std::tanh(init.zeta_abs);
    n = std::max(n, static_cast<int>(std::ceil(std::log(tol) / std::log(t))) + 10);
  }
  return std::min(n, 1 << 12);
}

namespace detail {

inline MatrixXd annihilation(int n_fock) {
  MatrixXd a = MatrixXd::Zero(n_fock, n_fock);
  for (int m = 0; m + 1 < n_fock; ++m) a(m, m + 1) = std::sqrt(m + 1.0);
  return a;
}

}  // namespace detail

// Truncated space with both conditional blocks prediagonalized.
struct Space {
  int n_fock = 0;
  ModelParams params;  // validated, fock context
  MatrixXd a;           // annihilation operator, real
  // sz = +1 block: a^d a + lambda (a + a^d) + W; sz = -1 block mirrors it.
  VectorXd eval_up, eval_dn;
  MatrixXd evec_up, evec_dn;

  int dim() const { return 2 * n_fock; }
};

inline Space build_space(const ModelParams& params, const Config& cfg) {
  if (cfg.n_fock < 2)
    fail(errc::dimension_too_small,
         "n_fock = " + std::to_string(cfg.n_fock) + ", need at least 2");
  Space sp;
  sp.n_fock = cfg.n_fock;
  sp.params = validate(params, EngineContext::fock);
  sp.a = detail::annihilation(cfg.n_fock);

  MatrixXd num = sp.a.transpose() * sp.a;
  MatrixXd x = sp.a + sp.a.transpose();
  double W = sp.params.omega_ratio;
  double lam = sp.params.lambda;
  MatrixXd h_up = num + lam * x + W * MatrixXd::Identity(cfg.n_fock, cfg.n_fock);
  MatrixXd h_dn = num - lam * x - W * MatrixXd::Identity(cfg.n_fock, cfg.n_fock);

  Eigen::SelfAdjointEigenSolver<MatrixXd> es_up(h_up), es_dn(h_dn);
  if (es_up.info() != Eigen::Success || es_dn.info() != Eigen::Success)
    fail(errc::eigen_failure, "conditional-block diagonalization failed");
  sp.eval_up = es_up.eigenvalues();
  sp.evec_up = es_up.eigenvectors();
  sp.eval_dn = es_dn.eigenvalues();
  sp.evec_dn = es_dn.eigenvectors();
  return sp;
}

namespace detail {

inline MatrixXcd block_propagator(const VectorXd& eval, const MatrixXd& evec,
                                  double tau) {
  VectorXcd phase(eval.size());
  for (Eigen::Index k = 0; k < eval.size(); ++k)
    phase(k) = std::polar(1.0, -eval(k) * tau);
  return evec.cast<cplx>() * phase.asDiagonal() * evec.transpose().cast<cplx>();
}

// exp(K) for anti-Hermitian K, via the Hermitian matrix iK.
inline MatrixXcd exp_antihermitian(const MatrixXcd& K) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(cplx(0.0, 1.0) * K);
  if (es.info() != Eigen::Success)
    fail(errc::eigen_failure, "generator diagonalization failed");
  VectorXcd phase(es.eigenvalues().size());
  for (Eigen::Index k = 0; k < phase.size(); ++k)
    phase(k) = std::polar(1.0, -es.eigenvalues()(k));
  return es.eigenvectors() * phase.asDiagonal() *
         es.eigenvectors().adjoint();
}

}  // namespace detail

// Full propagator U(tau), exact in the truncated space.
inline MatrixXcd evolve_operator(const Space& sp, double tau) {
  MatrixXcd U = MatrixXcd::Zero(sp.dim(), sp.dim());
  U.topLeftCorner(sp.n_fock, sp.n_fock) =
      detail::block_propagator(sp.eval_up, sp.evec_up, tau);
  U.bottomRightCorner(sp.n_fock, sp.n_fock) =
      detail::block_propagator(sp.eval_dn, sp.evec_dn, tau);
  return U;
}

inline MatrixXcd displacement_operator(int n_fock, cplx xi) {
  MatrixXcd a = detail::annihilation(n_fock).cast<cplx>();
  MatrixXcd K = xi * a.adjoint() - std::conj(xi) * a;
  return detail::exp_antihermitian(K);
}

inline MatrixXcd squeeze_operator(int n_fock, double zeta_abs,
                                  double zeta_arg) {
  MatrixXcd a = detail::annihilation(n_fock).cast<cplx>();
  cplx z = std::polar(zeta_abs, zeta_arg);
  MatrixXcd K = 0.5 * (z * (a.adjoint() * a.adjoint()) - std::conj(z) * (a * a));
  return detail::exp_antihermitian(K);
}

inline VectorXcd coherent_vector(int n_fock, cplx xi) {
  VectorXcd v = VectorXcd::Zero(n_fock);
  v(0) = 1.0;
  return displacement_operator(n_fock, xi) * v;
}

namespace detail {

inline void check_tail(const VectorXcd& v, double tol, const char* what) {
  int n = static_cast<int>(v.size());
  double tail = std::norm(v(n - 1)) + (n > 1 ? std::norm(v(n - 2)) : 0.0);
  if (tail > tol)
    fail(errc::truncation_insufficient,
         std::string(what) + ": top-level population " + std::to_string(tail) +
             " exceeds tolerance; raise n_fock");
}

}  // namespace detail

// Oscillator start as a vector; thermal starts are mixed and not expressible
// here.
inline VectorXcd oscillator_vector(int n_fock, const OscillatorInit& init,
                                   double tol_truncation = 1e-8) {
  switch (init.kind) {
    case InitKind::ground: {
      VectorXcd v = VectorXcd::Zero(n_fock);
      v(0) = 1.0;
      return v;
    }
    case InitKind::squeezed: {
      VectorXcd v = VectorXcd::Zero(n_fock);
      v(0) = 1.0;
      v = squeeze_operator(n_fock, init.zeta_abs, init.zeta_arg) * v;
      detail::check_tail(v, tol_truncation, "squeezed start");
      return v;
    }
    case InitKind::coherent_pair: {
      VectorXcd v =
          coherent_vector(n_fock, init.xi0) + coherent_vector(n_fock, init.xi1);
      v.normalize();
      detail::check_tail(v, tol_truncation, "coherent pair start");
      return v;
    }
    case InitKind::thermal:
      fail(errc::unsupported_init, "thermal start is mixed; use build_initial");
  }
  fail(errc::unsupported_init, "unknown init kind");
}

// Full initial density matrix (|+><+| on the qubit) x (oscillator start).
inline MatrixXcd build_initial(const Space& sp, const OscillatorInit& init,
                               const Config& cfg) {
  int n = sp.n_fock;
  MatrixXcd osc;
  if (init.kind == InitKind::thermal) {
    if (init.nbar < 0.0)
      fail(errc::unsupported_init, "thermal occupation must be >= 0");
    VectorXd p(n);
    if (init.nbar == 0.0) {
      p.setZero();
      p(0) = 1.0;
    } else {
      double r = init.nbar / (1.0 + init.nbar);
      double w = 1.0 / (1.0 + init.nbar);
      for (int m = 0; m < n; ++m) {
        p(m) = w;
        w *= r;
      }
      double deficit = std::pow(r, n);
      if (deficit > cfg.tol_truncation)
        fail(errc::truncation_insufficient,
             "thermal tail " + std::to_string(deficit) +
                 " outside the kept levels; raise n_fock");
      p /= p.sum();
    }
    osc = p.cast<cplx>().asDiagonal();
  } else {
    VectorXcd v = oscillator_vector(n, init, cfg.tol_truncation);
    v.normalize();
    osc = v * v.adjoint();
  }

  MatrixXcd rho = MatrixXcd::Zero(2 * n, 2 * n);
  rho.topLeftCorner(n, n) = 0.5 * osc;
  rho.topRightCorner(n, n) = 0.5 * osc;
  rho.bottomLeftCorner(n, n) = 0.5 * osc;
  rho.bottomRightCorner(n, n) = 0.5 * osc;
  return rho;
}

// n . sigma on the qubit, identity on the oscillator.
inline MatrixXcd measurement_axis_operator(const Space& sp) {
  const auto& n = *sp.params.axis;
  int nf = sp.n_fock;
  MatrixXcd op = MatrixXcd::Zero(2 * nf, 2 * nf);
  MatrixXcd id = MatrixXcd::Identity(nf, nf);
  op.topLeftCorner(nf, nf) = n[2] * id;
  op.bottomRightCorner(nf, nf) = -n[2] * id;
  op.topRightCorner(nf, nf) = cplx(n[0], -n[1]) * id;
  op.bottomLeftCorner(nf, nf) = cplx(n[0], n[1]) * id;
  return op;
}

// Measurement operators M_s(tau) = U^d (1 + s n.sigma)/2 U for both times,
// multiplied against rho0; moments come from the same Heisenberg operators,
// so the QuasiResult identities are a real cross-check here.
inline QuasiResult quasiprob_oracle(double tau1, double tau2,
                                    const ModelParams& params,
                                    const OscillatorInit& init,
                                    const Config& cfg) {
  if (tau1 > tau2) fail(errc::time_order, "need tau1 <= tau2");
  Space sp = build_space(params, cfg);
  MatrixXcd rho0 = build_initial(sp, init, cfg);
  MatrixXcd Q = measurement_axis_operator(sp);
  MatrixXcd U1 = evolve_operator(sp, tau1), U2 = evolve_operator(sp, tau2);
  MatrixXcd S1 = U1.adjoint() * Q * U1;
  MatrixXcd S2 = U2.adjoint() * Q * U2;

  QuasiResult r;
  r.tau1 = tau1;
  r.tau2 = tau2;
  MatrixXcd S1rho = S1 * rho0;
  MatrixXcd S2rho = S2 * rho0;
  r.expect_q1 = S1rho.trace().real();
  r.expect_q2 = S2rho.trace().real();
  r.corr = (S2 * S1rho).trace().real();

  MatrixXcd id = MatrixXcd::Identity(sp.dim(), sp.dim());
  for (auto [s1, s2] : sign_pairs) {
    MatrixXcd M1 = 0.5 * (id + double(s1) * S1);
    MatrixXcd M2 = 0.5 * (id + double(s2) * S2);
    r.q[sign_index(s1, s2)] = (M2 * (M1 * rho0)).trace().real();
  }
  return r;
}

// Doubles n_fock until all four sign values move less than tol.
inline QuasiResult quasiprob_converged(double tau1, double tau2,
                                       const ModelParams& params,
                                       const OscillatorInit& init, Config cfg,
                                       double tol = 1e-10,
                                       int n_fock_max = 1 << 11) {
  QuasiResult prev = quasiprob_oracle(tau1, tau2, params, init, cfg);
  while (cfg.n_fock <= n_fock_max) {
    cfg.n_fock *= 2;
    QuasiResult next = quasiprob_oracle(tau1, tau2, params, init, cfg);
    double delta = 0.0;
    for (int i = 0; i < 4; ++i)
      delta = std::max(delta, std::abs(next.q[i] - prev.q[i]));
    if (delta < tol) return next;
    prev = next;
  }
  fail(errc::truncation_insufficient,
       "no convergence up to n_fock = " + std::to_string(n_fock_max));
}

// ---- entanglement ------------------------------------------------------------

// Transpose the qubit index only: block (s, s') moves to (s', s).
inline MatrixXcd partial_transpose_qubit(const MatrixXcd& rho, int n_fock) {
  if (rho.rows() != 2 * n_fock || rho.cols() != 2 * n_fock)
    fail(errc::dimension_mismatch, "state is not qubit x n_fock");
  MatrixXcd out(rho.rows(), rho.cols());
  out.topLeftCorner(n_fock, n_fock) = rho.topLeftCorner(n_fock, n_fock);
  out.bottomRightCorner(n_fock, n_fock) = rho.bottomRightCorner(n_fock, n_fock);
  out.topRightCorner(n_fock, n_fock) = rho.bottomLeftCorner(n_fock, n_fock);
  out.bottomLeftCorner(n_fock, n_fock) = rho.topRightCorner(n_fock, n_fock);
  return out;
}

// Negativity of a (pure or mixed) state: sum of |negative eigenvalues| of the
// partial transpose.
inline double negativity_of(const MatrixXcd& rho, int n_fock) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(partial_transpose_qubit(rho, n_fock));
  if (es.info() != Eigen::Success)
    fail(errc::eigen_failure, "partial-transpose diagonalization failed");
  double neg = 0.0;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
    if (es.eigenvalues()(k) < 0.0) neg -= es.eigenvalues()(k);
  return neg;
}

inline double negativity_oracle(double tau, const ModelParams& params,
                                const OscillatorInit& init, const Config& cfg) {
  Space sp = build_space(params, cfg);
  MatrixXcd rho0 = build_initial(sp, init, cfg);
  MatrixXcd U = evolve_operator(sp, tau);
  MatrixXcd rho = U * rho0 * U.adjoint();
  return negativity_of(rho, sp.n_fock);
}

// ---- state overlap helpers ------------------------------------------------------

inline double fidelity(const VectorXcd& u, const VectorXcd& v) {
  if (u.size() != v.size())
    fail(errc::dimension_mismatch, "state vectors differ in length");
  return std::norm(u.dot(v));
}

// Superposed coherent start (|0>+|1>)(|xi0>+|xi1>)/norm evolved two ways:
// exactly with U(tau), and with the conditional displacement dropped from the
// coherent labels (keeping its phase), valid for lambda << |xi|.
struct CoherentPairEvolution {
  VectorXcd exact;
  VectorXcd approximate;
  double fidelity = 0.0;
};

inline CoherentPairEvolution coherent_pair_evolution(cplx xi0, cplx xi1,
                                                     double tau,
                                                     const ModelParams& params,
                                                     const Config& cfg) {
  Space sp = build_space(params, cfg);
  int n = sp.n_fock;
  OscillatorInit pair = OscillatorInit::coherent_pair(xi0, xi1);
  VectorXcd osc = oscillator_vector(n, pair, cfg.tol_truncation);

  VectorXcd psi0 = VectorXcd::Zero(2 * n);
  psi0.head(n) = osc;
  psi0.tail(n) = osc;
  psi0.normalize();

  CoherentPairEvolution out;
  out.exact = evolve_operator(sp, tau) * psi0;

  double W = sp.params.omega_ratio;
  double lam = sp.params.lambda;
  cplx alpha = std::polar(1.0, -tau) - 1.0;  // omega-scaled kernel
  cplx rot = std::polar(1.0, -tau);
  VectorXcd approx = VectorXcd::Zero(2 * n);
  for (cplx xi : {xi0, xi1}) {
    double ph = lam * std::imag(alpha * xi);
    VectorXcd label = coherent_vector(n, xi * rot);
    approx.head(n) += std::polar(1.0, -W * tau + ph) * label;
    approx.tail(n) += std::polar(1.0, W * tau - ph) * label;
  }
  approx.normalize();
  out.approximate = approx;
  out.fidelity = fidelity(out.approximate, out.exact);
  return out;
}

}  // namespace lgq::fock
