#pragma once

#include <array>
#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace sfq {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using Matrix4c = Eigen::Matrix4cd;
using Matrix2c = Eigen::Matrix2cd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Circuit modes in tensor order: qubit 1 is the most significant factor.
enum class Mode : int { Qubit1 = 0, Coupler = 1, Qubit2 = 2 };

inline constexpr std::array<Mode, 3> kModes{Mode::Qubit1, Mode::Coupler, Mode::Qubit2};

constexpr int index(Mode m) { return static_cast<int>(m); }

/// Angular frequency (rad/ns) of a frequency given in GHz.
constexpr double angular_ghz(double ghz) { return kTwoPi * ghz; }

/// Fluxes for the three modes, in units of the flux quantum.
using FluxVector = std::array<double, 3>;

}  // namespace sfq
