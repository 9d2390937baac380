#include "sfqgate/basis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sfqgate/error.hpp"

namespace sfq {

namespace {

constexpr double kPhaseFloor = 1e-14;

// Rotate the column so its largest-magnitude component is real and positive.
void normalize_phase(Eigen::Ref<CVector> v) {
  Eigen::Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  const Complex c = v(arg);
  if (std::abs(c) > 0.0) v *= std::conj(c) / std::abs(c);
}

Complex unit_phase(Complex z) { return std::abs(z) > 0.0 ? z / std::abs(z) : Complex(1.0, 0.0); }

CMatrix identity_kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

ModeBasis diagonalize_mode(const CMatrix& h, int levels, const ChargeBasisOperators& ops) {
  require(h.rows() == h.cols() && h.rows() == ops.dimension(), ErrorClass::InvalidArgument,
          "mode Hamiltonian must be square with the charge-basis dimension");
  require(levels >= 1 && levels <= h.rows(), ErrorClass::InvalidArgument,
          "levels must lie in [1, dimension]");
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  require((h - h.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * scale, ErrorClass::InvalidArgument,
          "mode Hamiltonian is not Hermitian");

  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
  require(solver.info() == Eigen::Success, ErrorClass::InvalidArgument,
          "mode diagonalization failed");

  ModeBasis out;
  out.energies = solver.eigenvalues().head(levels);
  out.vectors = solver.eigenvectors().leftCols(levels);
  for (int i = 0; i + 1 < levels; ++i) {
    require(out.energies(i + 1) - out.energies(i) > 1e-9, ErrorClass::Degeneracy,
            "adjacent mode levels " + std::to_string(i) + " and " + std::to_string(i + 1) +
                " are degenerate");
  }

  const CMatrix n_charge = ops.n_op.cast<Complex>();
  normalize_phase(out.vectors.col(0));
  for (int i = 0; i + 1 < levels; ++i) {
    const Complex x = out.vectors.col(i).dot(n_charge * out.vectors.col(i + 1));
    if (std::abs(x) < kPhaseFloor) {
      normalize_phase(out.vectors.col(i + 1));
      continue;
    }
    // Make <psi_i|n|psi_{i+1}> = -i|x|.
    out.vectors.col(i + 1) *= Complex(0.0, -std::abs(x)) / x;
  }

  const CMatrix& v = out.vectors;
  out.n = v.adjoint() * n_charge * v;
  out.n2 = v.adjoint() * (n_charge * n_charge) * v;
  out.cos = v.adjoint() * ops.cos_op.cast<Complex>() * v;
  out.sin = v.adjoint() * ops.sin_op * v;
  return out;
}

CMatrix SpectralBasis::mode_hamiltonian(Mode m, double flux) const {
  const ModeBasis& b = mode(m);
  const auto coeff = josephson_terms(params, m, flux);
  return 4.0 * ec(m, m) * b.n2 - coeff.cos_coeff * b.cos - coeff.sin_coeff * b.sin;
}

CMatrix SpectralBasis::mode_hamiltonian_flux_derivative(Mode m, double flux) const {
  const ModeBasis& b = mode(m);
  const auto d = josephson_terms_flux_derivative(params, m, flux);
  return -d.cos_coeff * b.cos - d.sin_coeff * b.sin;
}

SpectralBasis build_spectral_basis(const CircuitParams& params, const FluxVector& reference_flux,
                                   int levels, int n_max) {
  params.validate();
  require(levels >= 2, ErrorClass::InvalidArgument, "levels must be >= 2");
  SpectralBasis basis;
  basis.params = params;
  basis.ec = charging_energy(params);
  basis.levels = levels;
  basis.n_max = n_max;
  basis.reference_flux = reference_flux;
  const auto ops = ChargeBasisOperators::build(n_max);
  for (Mode m : kModes) {
    const CMatrix h = single_mode_hamiltonian(basis.ec, params, m, reference_flux[index(m)], ops);
    basis.modes[index(m)] = diagonalize_mode(h, levels, ops);
  }
  return basis;
}

CMatrix embed(const CMatrix& op, Mode m, int levels) {
  const CMatrix id = CMatrix::Identity(levels, levels);
  switch (m) {
    case Mode::Qubit1:
      return identity_kron(op, identity_kron(id, id));
    case Mode::Coupler:
      return identity_kron(id, identity_kron(op, id));
    case Mode::Qubit2:
      return identity_kron(identity_kron(id, id), op);
  }
  return {};
}

CMatrix coupling_hamiltonian(const SpectralBasis& basis) {
  const int l = basis.levels;
  const CMatrix n1 = embed(basis.mode(Mode::Qubit1).n, Mode::Qubit1, l);
  const CMatrix nc = embed(basis.mode(Mode::Coupler).n, Mode::Coupler, l);
  const CMatrix n2 = embed(basis.mode(Mode::Qubit2).n, Mode::Qubit2, l);
  const auto& ec = basis.ec;
  return 8.0 * (ec(Mode::Qubit1, Mode::Coupler) * n1 * nc +
                ec(Mode::Qubit1, Mode::Qubit2) * n1 * n2 +
                ec(Mode::Coupler, Mode::Qubit2) * nc * n2);
}

CMatrix joint_hamiltonian(const SpectralBasis& basis, const FluxVector& fluxes) {
  CMatrix h = coupling_hamiltonian(basis);
  for (Mode m : kModes) h += embed(basis.mode_hamiltonian(m, fluxes[index(m)]), m, basis.levels);
  return 0.5 * (h + h.adjoint());
}

CMatrix rediagonalized_joint_hamiltonian(const CircuitParams& params, const FluxVector& fluxes,
                                         int levels, int n_max) {
  return joint_hamiltonian(build_spectral_basis(params, fluxes, levels, n_max), fluxes);
}

std::vector<double> ramp_flux_levels(double off, double on, int n_ramp) {
  require(n_ramp >= 1, ErrorClass::InvalidArgument, "n_ramp must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(n_ramp) + 1);
  for (int i = 0; i <= n_ramp; ++i) out[i] = off + (on - off) * i / n_ramp;
  return out;
}

CMatrix hermitian_propagator(const CMatrix& h, double t) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
  const CMatrix& v = solver.eigenvectors();
  const CVector phases =
      (solver.eigenvalues() * (-t)).unaryExpr([](double a) { return std::polar(1.0, a); });
  return v * phases.asDiagonal() * v.adjoint();
}

FluxOperatorTable flux_operator_table(const SpectralBasis& basis,
                                      std::span<const double> coupler_flux, double clock_period) {
  require(!coupler_flux.empty(), ErrorClass::InvalidArgument, "flux level list is empty");
  require(clock_period > 0.0, ErrorClass::InvalidArgument, "clock period must be > 0");
  FluxOperatorTable table;
  table.clock_period = clock_period;
  for (double f : coupler_flux) {
    require(f >= 0.0 && f < 1.0, ErrorClass::InvalidArgument, "coupler flux must lie in [0, 1)");
    FluxVector fluxes = basis.reference_flux;
    fluxes[index(Mode::Coupler)] = f;
    table.coupler_flux.push_back(f);
    table.hamiltonians.push_back(joint_hamiltonian(basis, fluxes));
    table.propagators.push_back(hermitian_propagator(table.hamiltonians.back(), clock_period));
  }
  return table;
}

CMatrix lowdin_orthogonalize(const CMatrix& w) {
  const CMatrix s = w.adjoint() * w;
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(s);
  const RVector& ev = solver.eigenvalues();
  require(ev.minCoeff() > 0.0 && ev.maxCoeff() / ev.minCoeff() <= 1e8,
          ErrorClass::FrameConstruction, "overlap matrix is singular (condition number > 1e8)");
  const RVector inv_sqrt = ev.cwiseSqrt().cwiseInverse();
  const CMatrix s_inv_sqrt =
      solver.eigenvectors() * inv_sqrt.cast<Complex>().asDiagonal() * solver.eigenvectors().adjoint();
  return w * s_inv_sqrt;
}

LogicalFrame build_logical_frame(const CMatrix& h_idle, int levels, const FrameSettings& settings) {
  const int dim = levels * levels * levels;
  require(h_idle.rows() == dim && h_idle.cols() == dim, ErrorClass::InvalidArgument,
          "idle Hamiltonian dimension does not match levels^3");
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h_idle);
  const RVector& e = solver.eigenvalues();
  const CMatrix& v = solver.eigenvectors();
  require(dim >= 9, ErrorClass::LevelIdentification, "joint space too small for a logical frame");

  const int b00 = bare_index(0, 0, 0, levels);
  const int b01 = bare_index(0, 0, 1, levels);
  const int b10 = bare_index(1, 0, 0, levels);
  const int b11 = bare_index(1, 0, 1, levels);

  LogicalFrame frame;
  frame.states = CMatrix::Zero(dim, 4);

  auto fix_sign = [](CVector state, int bare) {
    state *= std::conj(unit_phase(state(bare)));
    return state;
  };

  frame.states.col(0) = fix_sign(v.col(0), b00);

  // |11>: the excited level (5th..8th) with the largest |<101|.>|.
  int best = -1;
  double best_overlap = -1.0;
  for (int k = 5; k <= std::min(8, dim - 1); ++k) {
    const double ov = std::abs(v(b11, k));
    if (ov > best_overlap) {
      best_overlap = ov;
      best = k;
    }
  }
  require(best_overlap >= 0.5, ErrorClass::LevelIdentification,
          "no excited level has |<101|psi>| >= 0.5");
  frame.eleven_level = best;
  frame.states.col(3) = fix_sign(v.col(best), b11);

  frame.pair_splitting = e(2) - e(1);
  const CMatrix pair = v.middleCols(1, 2);
  if (frame.pair_splitting < settings.degeneracy_threshold) {
    CMatrix bare = CMatrix::Zero(dim, 2);
    bare(b01, 0) = 1.0;
    bare(b10, 1) = 1.0;
    const CMatrix projected = pair * (pair.adjoint() * bare);
    const CMatrix ortho = lowdin_orthogonalize(projected);
    frame.states.col(1) = fix_sign(ortho.col(0), b01);
    frame.states.col(2) = fix_sign(ortho.col(1), b10);
    frame.lowdin_applied = true;
  } else {
    const bool first_is_01 = std::abs(v(b01, 1)) >= std::abs(v(b01, 2));
    frame.states.col(1) = fix_sign(v.col(first_is_01 ? 1 : 2), b01);
    frame.states.col(2) = fix_sign(v.col(first_is_01 ? 2 : 1), b10);
  }

  for (int j = 0; j < 4; ++j) {
    frame.energies(j) = frame.states.col(j).dot(h_idle * frame.states.col(j)).real();
  }
  return frame;
}

}  // namespace sfq
