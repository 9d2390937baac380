#include "sfqgate/fidelity.hpp"

#include <cmath>

#include "sfqgate/error.hpp"
#include "sfqgate/gates.hpp"

namespace sfq {

namespace {

constexpr int kGrid = 64;
constexpr int kNewtonIterations = 50;

// Z eigenvalue sign of qubit `q` (0 = left) in logical state j.
double z_sign(int j, int q) { return ((j >> (1 - q)) & 1) ? -1.0 : 1.0; }

struct Overlap {
  Complex tau;
  std::array<Complex, 2> d;
  std::array<std::array<Complex, 2>, 2> dd;
};

Overlap overlap(const Eigen::Vector4cd& c, double phi1, double phi2) {
  Overlap o{};
  for (int j = 0; j < 4; ++j) {
    const std::array<double, 2> s{z_sign(j, 0), z_sign(j, 1)};
    const Complex term = c(j) * std::polar(1.0, 0.5 * (s[0] * phi1 + s[1] * phi2));
    o.tau += term;
    for (int a = 0; a < 2; ++a) {
      o.d[a] += Complex(0.0, 0.5 * s[a]) * term;
      for (int b = 0; b < 2; ++b) o.dd[a][b] += -0.25 * s[a] * s[b] * term;
    }
  }
  return o;
}

}  // namespace

Matrix4c logical_matrix(const CMatrix& psi, const LogicalFrame& frame, double duration) {
  require(psi.cols() == 4 && psi.rows() == frame.states.rows(), ErrorClass::InvalidArgument,
          "logical states have the wrong shape");
  Matrix4c m = frame.states.adjoint() * psi;
  for (int j = 0; j < 4; ++j) m.row(j) *= std::polar(1.0, frame.energies(j) * duration);
  return m;
}

double average_gate_fidelity(const Matrix4c& m, const Matrix4c& target) {
  require(is_unitary(target, 1e-8), ErrorClass::InvalidArgument, "target is not unitary");
  const double tr = (m * m.adjoint()).trace().real();
  const double ov = std::norm((target.adjoint() * m).trace());
  return (tr + ov) / 20.0;
}

Matrix4c z_rotated_target(const Matrix4c& target, double phi1, double phi2) {
  return kron(rz(phi1), rz(phi2)) * target;
}

ZCompensation z_compensate(const Matrix4c& m, const Matrix4c& target) {
  require(is_unitary(target, 1e-8), ErrorClass::InvalidArgument, "target is not unitary");
  const Eigen::Vector4cd c = (m * target.adjoint()).diagonal();
  const double trace_mm = (m * m.adjoint()).trace().real();

  double best = -1.0, phi1 = 0.0, phi2 = 0.0;
  for (int a = 0; a < kGrid; ++a) {
    for (int b = 0; b < kGrid; ++b) {
      const double p1 = kTwoPi * a / kGrid, p2 = kTwoPi * b / kGrid;
      const double v = std::norm(overlap(c, p1, p2).tau);
      if (v > best) {
        best = v;
        phi1 = p1;
        phi2 = p2;
      }
    }
  }

  for (int it = 0; it < kNewtonIterations; ++it) {
    const Overlap o = overlap(c, phi1, phi2);
    Eigen::Vector2d g;
    Eigen::Matrix2d h;
    for (int a = 0; a < 2; ++a) {
      g(a) = 2.0 * (std::conj(o.tau) * o.d[a]).real();
      for (int b = 0; b < 2; ++b)
        h(a, b) = 2.0 * (std::conj(o.d[b]) * o.d[a] + std::conj(o.tau) * o.dd[a][b]).real();
    }
    Eigen::Vector2d step;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(h);
    if (es.eigenvalues().maxCoeff() < 0.0) {
      step = -h.ldlt().solve(g);
    } else {
      step = 0.1 * g;
    }
    double t = 1.0;
    while (t > 1e-8 &&
           std::norm(overlap(c, phi1 + t * step(0), phi2 + t * step(1)).tau) < best - 1e-15) {
      t *= 0.5;
    }
    if (t <= 1e-8) break;
    phi1 += t * step(0);
    phi2 += t * step(1);
    best = std::max(best, std::norm(overlap(c, phi1, phi2).tau));
    if (step.norm() * t < 1e-13) break;
  }
  phi1 = std::remainder(phi1, 2.0 * kTwoPi);
  phi2 = std::remainder(phi2, 2.0 * kTwoPi);
  return {phi1, phi2, (trace_mm + best) / 20.0};
}

Matrix4c fidelity_gradient(const Matrix4c& m, const Matrix4c& target) {
  const Complex tau = (target.adjoint() * m).trace();
  return (m + tau * target) / 20.0;
}

GateReport gate_report_from_states(const CMatrix& psi, const Matrix4c& target,
                                   const LogicalFrame& frame, double duration, bool z_comp) {
  GateReport r;
  r.logical = logical_matrix(psi, frame, duration);
  r.fidelity_raw = average_gate_fidelity(r.logical, target);
  r.leakage = 1.0 - (r.logical.adjoint() * r.logical).trace().real() / 4.0;
  r.fidelity = r.fidelity_raw;
  if (z_comp) {
    const ZCompensation z = z_compensate(r.logical, target);
    r.z_compensated = true;
    r.phi_z1 = z.phi1;
    r.phi_z2 = z.phi2;
    r.fidelity = std::max(z.fidelity, r.fidelity_raw);
    if (r.fidelity == r.fidelity_raw) r.phi_z1 = r.phi_z2 = 0.0;
  }
  return r;
}

GateReport gate_report(const CMatrix& u, const Matrix4c& target, const LogicalFrame& frame,
                       double duration, bool z_comp) {
  require(u.rows() == frame.states.rows() && u.cols() == u.rows(), ErrorClass::InvalidArgument,
          "propagator has the wrong shape");
  return gate_report_from_states(u * frame.states, target, frame, duration, z_comp);
}

}  // namespace sfq
