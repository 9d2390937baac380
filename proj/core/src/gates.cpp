#include "sfqgate/gates.hpp"

#include <charconv>
#include <cmath>

#include "sfqgate/error.hpp"

namespace sfq {

namespace {

constexpr Complex kI{0.0, 1.0};

double parse_angle(std::string_view text, std::string_view id) {
  std::string s(text);
  double scale = 1.0;
  if (s.starts_with("pi")) {
    s = s.substr(2);
    scale = kPi;
    if (s.empty()) return kPi;
    require(s[0] == '/', ErrorClass::InvalidArgument, "bad angle in target id " + std::string(id));
    s = s.substr(1);
    double div = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), div);
    require(ec == std::errc() && p == s.data() + s.size() && div != 0.0,
            ErrorClass::InvalidArgument, "bad angle in target id " + std::string(id));
    return scale / div;
  }
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  require(ec == std::errc() && p == s.data() + s.size(), ErrorClass::InvalidArgument,
          "bad angle in target id " + std::string(id));
  return v;
}

}  // namespace

Matrix2c rx(double angle) {
  Matrix2c m;
  const double c = std::cos(angle / 2), s = std::sin(angle / 2);
  m << c, -kI * s, -kI * s, c;
  return m;
}

Matrix2c ry(double angle) {
  Matrix2c m;
  const double c = std::cos(angle / 2), s = std::sin(angle / 2);
  m << c, -s, s, c;
  return m;
}

Matrix2c rz(double angle) {
  Matrix2c m = Matrix2c::Zero();
  m(0, 0) = std::polar(1.0, -angle / 2);
  m(1, 1) = std::polar(1.0, angle / 2);
  return m;
}

Matrix2c hadamard() {
  Matrix2c m;
  m << 1, 1, 1, -1;
  return m / std::sqrt(2.0);
}

Matrix4c kron(const Matrix2c& a, const Matrix2c& b) {
  Matrix4c m;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return m;
}

Matrix4c cz() {
  Matrix4c m = Matrix4c::Identity();
  m(3, 3) = -1;
  return m;
}

Matrix4c cnot() {
  Matrix4c m = Matrix4c::Zero();
  m(0, 0) = m(1, 1) = 1;
  m(2, 3) = m(3, 2) = 1;
  return m;
}

Matrix4c iswap() {
  Matrix4c m = Matrix4c::Zero();
  m(0, 0) = m(3, 3) = 1;
  m(1, 2) = m(2, 1) = kI;
  return m;
}

Matrix4c target_gate(std::string_view id) {
  const Matrix2c one = Matrix2c::Identity();
  if (id == "identity") return Matrix4c::Identity();
  if (id == "cz") return cz();
  if (id == "cnot") return cnot();
  if (id == "iswap") return iswap();
  if (id == "sqrt_iswap") {
    Matrix4c m = Matrix4c::Identity();
    const double r = 1.0 / std::sqrt(2.0);
    m(1, 1) = m(2, 2) = r;
    m(1, 2) = m(2, 1) = kI * r;
    return m;
  }
  if (id == "x90_q1") return kron(rx(kPi / 2), one);
  if (id == "x90_q2") return kron(one, rx(kPi / 2));
  if (id == "x180_q1") return kron(rx(kPi), one);
  if (id == "x180_q2") return kron(one, rx(kPi));
  if (id.starts_with("rx_q1:")) return kron(rx(parse_angle(id.substr(6), id)), one);
  if (id.starts_with("rx_q2:")) return kron(one, rx(parse_angle(id.substr(6), id)));
  fail(ErrorClass::InvalidArgument, "unknown target gate '" + std::string(id) + "'");
}

bool is_two_qubit_target(std::string_view id) {
  return id == "cz" || id == "cnot" || id == "iswap" || id == "sqrt_iswap";
}

bool is_unitary(const CMatrix& u, double tol) {
  if (u.rows() != u.cols()) return false;
  return (u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).norm() <= tol;
}

}  // namespace sfq
