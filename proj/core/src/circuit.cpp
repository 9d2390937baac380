#include "sfqgate/circuit.hpp"

#include <cmath>
#include <string>

#include "sfqgate/error.hpp"

namespace sfq {

namespace {

// fF -> F and J -> rad/ns.
constexpr double kFemto = 1e-15;
constexpr double kNano = 1e-9;

}  // namespace

void CircuitParams::validate() const {
  const std::array<std::pair<const char*, double>, 8> caps{{{"C1", c1},
                                                            {"C2", c2},
                                                            {"Cc", cc},
                                                            {"C12", c12},
                                                            {"C1c", c1c},
                                                            {"C2c", c2c},
                                                            {"C1e", c1e},
                                                            {"C2e", c2e}}};
  for (const auto& [name, value] : caps) {
    require(std::isfinite(value) && value >= 0.0, ErrorClass::InvalidCircuit,
            std::string("capacitance ") + name + " must be finite and >= 0");
  }
  for (Mode m : kModes) {
    const auto& j = junction(m);
    require(j.left_nA > 0.0 && j.right_nA > 0.0 && std::isfinite(j.left_nA) &&
                std::isfinite(j.right_nA),
            ErrorClass::InvalidCircuit, "junction critical currents must be > 0");
  }
  for (int k = 0; k < 3; ++k) {
    for (double f : {phi_off[k], phi_on[k]}) {
      require(f >= 0.0 && f < 1.0, ErrorClass::InvalidCircuit,
              "external fluxes must lie in [0, 1) flux quanta");
    }
  }
}

ChargeBasisOperators ChargeBasisOperators::build(int n_max) {
  require(n_max >= 1, ErrorClass::InvalidArgument, "n_max must be >= 1");
  ChargeBasisOperators ops;
  ops.n_max = n_max;
  const int dim = 2 * n_max + 1;
  ops.n_op = RMatrix::Zero(dim, dim);
  ops.cos_op = RMatrix::Zero(dim, dim);
  ops.sin_op = CMatrix::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) ops.n_op(i, i) = static_cast<double>(i - n_max);
  const Complex half_i(0.0, 0.5);
  for (int i = 0; i + 1 < dim; ++i) {
    ops.cos_op(i, i + 1) = 0.5;
    ops.cos_op(i + 1, i) = 0.5;
    ops.sin_op(i, i + 1) = half_i;
    ops.sin_op(i + 1, i) = -half_i;
  }
  return ops;
}

double josephson_energy(double critical_current_nA) {
  // E_J / hbar = I_c / (2e), converted from rad/s to rad/ns.
  return critical_current_nA * kNano / (2.0 * constants::kElementaryCharge) * kNano;
}

Eigen::Matrix3d build_capacitance_matrix(const CircuitParams& p) {
  Eigen::Matrix3d m;
  m << p.c1e + p.c1 + p.c1c + p.c12, -p.c1c, -p.c12,  //
      -p.c1c, p.cc + p.c1c + p.c2c, -p.c2c,           //
      -p.c12, -p.c2c, p.c2e + p.c2 + p.c2c + p.c12;
  const double scale = m.cwiseAbs().maxCoeff();
  const double det = m.determinant();
  require(scale > 0.0 && std::abs(det) > 1e-12 * scale * scale * scale, ErrorClass::InvalidCircuit,
          "capacitance matrix is singular");
  return m;
}

ChargingMatrix charging_energy(const CircuitParams& params) {
  const Eigen::Matrix3d farads = build_capacitance_matrix(params) * kFemto;
  const Eigen::Matrix3d inv = farads.inverse();
  const double e = constants::kElementaryCharge;
  ChargingMatrix out;
  out.ec = (e * e / 2.0) * inv / constants::kHbar * kNano;
  // Exact symmetry; the inverse of a symmetric matrix can differ in the last ulp.
  out.ec = 0.5 * (out.ec + out.ec.transpose()).eval();
  return out;
}

JosephsonCoefficients josephson_terms(const CircuitParams& params, Mode mode, double flux) {
  const auto& j = params.junction(mode);
  const double el = josephson_energy(j.left_nA);
  const double er = josephson_energy(j.right_nA);
  const double angle = kTwoPi * flux;
  return {el + er * std::cos(angle), er * std::sin(angle)};
}

JosephsonCoefficients josephson_terms_flux_derivative(const CircuitParams& params, Mode mode,
                                                      double flux) {
  const double er = josephson_energy(params.junction(mode).right_nA);
  const double angle = kTwoPi * flux;
  return {-kTwoPi * er * std::sin(angle), kTwoPi * er * std::cos(angle)};
}

CMatrix single_mode_hamiltonian(const ChargingMatrix& ec, const CircuitParams& params, Mode mode,
                                double flux, const ChargeBasisOperators& ops) {
  require(ops.n_max >= 20, ErrorClass::InvalidArgument, "charge truncation n_max must be >= 20");
  const auto coeff = josephson_terms(params, mode, flux);
  const double ekk = ec(mode, mode);
  CMatrix h = (4.0 * ekk * ops.n_op * ops.n_op - coeff.cos_coeff * ops.cos_op).cast<Complex>();
  h -= coeff.sin_coeff * ops.sin_op;
  return h;
}

CMatrix single_mode_hamiltonian(const CircuitParams& params, Mode mode, double flux,
                                const ChargeBasisOperators& ops) {
  return single_mode_hamiltonian(charging_energy(params), params, mode, flux, ops);
}

}  // namespace sfq
