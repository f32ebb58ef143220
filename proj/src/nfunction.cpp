#include "crvex/nfunction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace crvex {

namespace {

constexpr int kMaxRootIterations = 200;
constexpr double kRootTolerance = 1e-13;  // on log(s); relative 1e-13 in s

// g(r) = int_0^r (1+x)^(q-2) x dx, the N-function at delta = 1.
// phi(t) = delta^q g(t/delta) for delta > 0.
double unit_phi(double q, double r) {
  if (r <= 0.25) {
    // Binomial series of (1+x)^(q-2) x integrated term by term.
    double coeff = 1.0;
    double power = r * r;
    double sum = 0.0;
    for (int j = 0; j < 60; ++j) {
      double term = coeff * power / (j + 2);
      sum += term;
      if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
      coeff *= (q - 2.0 - j) / (j + 1);
      power *= r;
    }
    return sum;
  }
  double L = std::log1p(r);
  return std::expm1(q * L) / q - std::expm1((q - 1.0) * L) / (q - 1.0);
}

// Solves (1+x)^(q-2) x = tau for x > 0, written in y = log x where the map
// k(y) = (q-2) log(1+e^y) + y - log(tau) has slope between min(1,q-1) and
// max(1,q-1).
struct UnitRoot {
  double x;
  int iterations;
};

UnitRoot unit_dphi_inverse(double q, double tau) {
  const double log_tau = std::log(tau);
  auto k = [&](double y) {
    double ey = std::exp(y);
    double log1pe = y > 30.0 ? y + std::log1p(std::exp(-y)) : std::log1p(ey);
    return (q - 2.0) * log1pe + y - log_tau;
  };
  auto dk = [&](double y) {
    double sigma = 1.0 / (1.0 + std::exp(-y));
    return 1.0 + (q - 2.0) * sigma;
  };
  // |y - y*| <= |k(y)| / min slope gives the initial bracket.
  const double m = std::min(1.0, q - 1.0);
  double y = log_tau;
  double k0 = k(y);
  if (k0 == 0.0) return {tau, 0};
  double lo, hi;
  if (k0 > 0.0) {
    lo = y - k0 / m;
    hi = y;
  } else {
    lo = y;
    hi = y - k0 / m;
  }
  y = y - k0 / dk(y);
  if (!(y > lo && y < hi)) y = 0.5 * (lo + hi);
  for (int it = 1; it <= kMaxRootIterations; ++it) {
    double ky = k(y);
    if (ky == 0.0) return {std::exp(y), it};
    if (ky > 0.0) {
      hi = y;
    } else {
      lo = y;
    }
    double next = y - ky / dk(y);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - y) <= kRootTolerance * std::max(1.0, std::abs(y)) ||
        hi - lo <= kRootTolerance * std::max(1.0, std::abs(y))) {
      return {std::exp(next), it};
    }
    y = next;
  }
  throw NumericalError("conjugate N-function: root finder did not converge");
}

}  // namespace

PhiKit::PhiKit(double q, double delta) : q_(q), delta_(delta) {
  if (!(q > 1.0) || !std::isfinite(q)) throw std::domain_error("exponent must satisfy q > 1");
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw std::domain_error("delta must be >= 0");
}

Vec2 PhiKit::A(const Vec2& a) const {
  const double n = a.norm();
  if (n == 0.0) return Vec2::Zero();
  return std::pow(delta_ + n, q_ - 2.0) * a;
}

Mat2 PhiKit::DA(const Vec2& a) const {
  const double n = a.norm();
  if (n == 0.0) {
    if (delta_ > 0.0) return std::pow(delta_, q_ - 2.0) * Mat2::Identity();
    if (q_ == 2.0) return Mat2::Identity();
    if (q_ > 2.0) return Mat2::Zero();
    throw std::domain_error("DA is singular at a = 0 for delta = 0 and q < 2");
  }
  const double base = delta_ + n;
  const double c1 = std::pow(base, q_ - 2.0);
  const double c2 = (q_ - 2.0) * c1 / base / n;  // (q-2) base^(q-3) |a| / |a|^2
  return c1 * Mat2::Identity() + c2 * (a * a.transpose());
}

Vec2 PhiKit::F(const Vec2& a) const {
  const double n = a.norm();
  if (n == 0.0) return Vec2::Zero();
  return std::pow(delta_ + n, 0.5 * (q_ - 2.0)) * a;
}

Vec2 PhiKit::Fstar(const Vec2& a) const {
  const double n = a.norm();
  if (n == 0.0) return Vec2::Zero();
  const double qc = q_conjugate();
  return std::pow(std::pow(delta_, q_ - 1.0) + n, 0.5 * (qc - 2.0)) * a;
}

double PhiKit::dphi(double t) const {
  if (t < 0.0) throw std::domain_error("N-function argument must be >= 0");
  if (t == 0.0) return 0.0;
  return std::pow(delta_ + t, q_ - 2.0) * t;
}

double PhiKit::phi(double t) const {
  if (t < 0.0) throw std::domain_error("N-function argument must be >= 0");
  if (t == 0.0) return 0.0;
  if (delta_ == 0.0) return std::pow(t, q_) / q_;
  return std::pow(delta_, q_) * unit_phi(q_, t / delta_);
}

PhiKit::Conjugate PhiKit::conjugate_with_maximizer(double t) const {
  if (t < 0.0) throw std::domain_error("N-function argument must be >= 0");
  if (t == 0.0) return {0.0, 0.0, 0};
  if (delta_ == 0.0) {
    const double qc = q_conjugate();
    return {std::pow(t, qc) / qc, std::pow(t, 1.0 / (q_ - 1.0)), 0};
  }
  // phi'(delta x) = delta^(q-1) (1+x)^(q-2) x.
  const double scale = std::pow(delta_, q_ - 1.0);
  const double tau = t / scale;
  const UnitRoot root = unit_dphi_inverse(q_, tau);
  const double value = std::pow(delta_, q_) * (root.x * tau - unit_phi(q_, root.x));
  return {value, delta_ * root.x, root.iterations};
}

PhiKit PhiKit::shifted(double a) const {
  if (!(a >= 0.0)) throw std::domain_error("shift must be >= 0");
  return PhiKit(q_, delta_ + a);
}

Vec2 eval_A(double q, double delta, const Vec2& a) { return PhiKit(q, delta).A(a); }
Mat2 eval_DA(double q, double delta, const Vec2& a) { return PhiKit(q, delta).DA(a); }
Vec2 eval_F(double q, double delta, const Vec2& a) { return PhiKit(q, delta).F(a); }
Vec2 eval_Fstar(double q, double delta, const Vec2& a) { return PhiKit(q, delta).Fstar(a); }
double eval_phi(double q, double delta, double t) { return PhiKit(q, delta).phi(t); }
double eval_phi_conjugate(double q, double delta, double t) {
  return PhiKit(q, delta).phi_conjugate(t);
}
double eval_phi_shifted(double q, double delta, double shift, double t) {
  return PhiKit(q, delta).shifted(shift).phi(t);
}
double eval_phi_shifted_conjugate(double q, double delta, double shift, double t) {
  return PhiKit(q, delta).shifted(shift).phi_conjugate(t);
}

void ExponentField::validate() const {
  if (!(p_min > 1.0)) throw std::domain_error("p_min must be > 1");
  if (!(eps >= 0.0)) throw std::domain_error("eps must be >= 0");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::domain_error("alpha must lie in (0, 1]");
}

double ExponentField::operator()(const Vec2& x) const {
  const double r = (x - center).norm();
  return r == 0.0 ? p_min : p_min + eps * std::pow(r, alpha);
}

double ExponentField::p_max(const Rectangle& domain) const {
  double r = 0.0;
  for (double x : {domain.x0, domain.x1}) {
    for (double y : {domain.y0, domain.y1}) r = std::max(r, (Vec2(x, y) - center).norm());
  }
  return p_min + eps * std::pow(r, alpha);
}

ElementExponents ElementExponents::constant(int num_elements, double p) {
  if (!(p > 1.0)) throw std::domain_error("exponent must be > 1");
  ElementExponents e;
  e.p_h.assign(num_elements, p);
  return e;
}

ElementExponents discretize_exponent(const ExponentField& p, const MeshMetrics& metrics) {
  p.validate();
  return discretize_exponent(std::function<double(const Vec2&)>(p), metrics);
}

ElementExponents discretize_exponent(const std::function<double(const Vec2&)>& p,
                                     const MeshMetrics& metrics) {
  ElementExponents e;
  e.p_h.reserve(metrics.x_T.size());
  for (const Vec2& xT : metrics.x_T) {
    double v = p(xT);
    if (!(v > 1.0)) throw std::domain_error("discretized exponent must be > 1");
    e.p_h.push_back(v);
  }
  return e;
}

}  // namespace crvex
