#include "sfqgate/lbfgsb.hpp"

#include <cmath>
#include <deque>

#include "sfqgate/error.hpp"

namespace sfq {

namespace {

RVector project(const RVector& x, const RVector& lo, const RVector& hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

double projected_gradient_norm(const RVector& x, const RVector& g, const RVector& lo,
                               const RVector& hi) {
  return (project(x - g, lo, hi) - x).lpNorm<Eigen::Infinity>();
}

}  // namespace

LbfgsbResult minimize_bounded(const Objective& objective, RVector x0, const RVector& lower,
                              const RVector& upper, const LbfgsbSettings& settings) {
  const Eigen::Index n = x0.size();
  require(lower.size() == n && upper.size() == n, ErrorClass::InvalidArgument,
          "bound vectors must match the parameter count");
  require((lower.array() <= upper.array()).all(), ErrorClass::InvalidArgument,
          "lower bounds must not exceed upper bounds");
  require(settings.memory >= 1, ErrorClass::InvalidArgument, "memory must be >= 1");

  LbfgsbResult r;
  r.x = project(x0, lower, upper);
  r.g.resize(n);
  r.f = objective(r.x, r.g);
  r.evaluations = 1;
  if (!std::isfinite(r.f)) fail(ErrorClass::NonFiniteCost, "objective is not finite at the start");

  std::deque<RVector> s_hist, y_hist;
  std::deque<double> rho_hist;
  RVector g_new(n);

  for (r.iterations = 0; r.iterations < settings.max_iterations; ++r.iterations) {
    if (projected_gradient_norm(r.x, r.g, lower, upper) < settings.projected_gradient_tol) {
      r.status = LbfgsbStatus::Converged;
      return r;
    }
    // Variables held at a bound by the gradient are fixed for this step.
    Eigen::Array<bool, Eigen::Dynamic, 1> free(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const bool at_lower = r.x(i) <= lower(i) && r.g(i) > 0.0;
      const bool at_upper = r.x(i) >= upper(i) && r.g(i) < 0.0;
      free(i) = !(at_lower || at_upper);
    }
    const auto mask = [&](RVector v) {
      for (Eigen::Index i = 0; i < n; ++i)
        if (!free(i)) v(i) = 0.0;
      return v;
    };

    RVector q = mask(r.g);
    const std::size_t m = s_hist.size();
    std::vector<double> alpha(m);
    for (std::size_t k = m; k-- > 0;) {
      alpha[k] = rho_hist[k] * mask(s_hist[k]).dot(q);
      q -= alpha[k] * mask(y_hist[k]);
    }
    if (m > 0) {
      const RVector s = mask(s_hist.back()), y = mask(y_hist.back());
      const double yy = y.squaredNorm();
      if (yy > 0.0 && s.dot(y) > 0.0) q *= s.dot(y) / yy;
    }
    for (std::size_t k = 0; k < m; ++k) {
      const double beta = rho_hist[k] * mask(y_hist[k]).dot(q);
      q += (alpha[k] - beta) * mask(s_hist[k]);
    }
    RVector d = -q;
    if (d.dot(r.g) >= 0.0) {
      d = -mask(r.g);
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
    }

    double t = 1.0;
    if (s_hist.empty()) {
      const double dn = d.lpNorm<Eigen::Infinity>();
      if (dn > 0.0) t = std::min(1.0, 1.0 / dn);
    }
    bool accepted = false;
    RVector x_new;
    double f_new = 0.0;
    for (int b = 0; b < settings.max_backtracks; ++b, t *= 0.5) {
      x_new = project(r.x + t * d, lower, upper);
      const RVector step = x_new - r.x;
      if (step.lpNorm<Eigen::Infinity>() == 0.0) break;
      f_new = objective(x_new, g_new);
      ++r.evaluations;
      if (!std::isfinite(f_new)) continue;
      if (f_new <= r.f + settings.armijo * r.g.dot(step)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      r.status = LbfgsbStatus::LineSearchFailed;
      return r;
    }
    const RVector s = x_new - r.x;
    const RVector y = g_new - r.g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      s_hist.push_back(s);
      y_hist.push_back(y);
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > settings.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    r.x = x_new;
    r.f = f_new;
    r.g = g_new;
    r.history.push_back(r.f);
  }
  r.status = LbfgsbStatus::MaxIterations;
  return r;
}

}  // namespace sfq
