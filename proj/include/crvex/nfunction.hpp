#pragma once

#include "crvex/mesh.hpp"
#include "crvex/types.hpp"

#include <functional>
#include <vector>

namespace crvex {

/// Point evaluators of the (q, delta)-structured operator and its N-function
/// at a fixed exponent value q > 1 and regularization delta >= 0.
///
///   A(a)    = (delta + |a|)^(q-2) a
///   F(a)    = (delta + |a|)^((q-2)/2) a
///   F*(a)   = (delta^(q-1) + |a|)^((q'-2)/2) a,   q' = q/(q-1)
///   phi'(t) = (delta + t)^(q-2) t,  phi(t) = int_0^t phi'(s) ds
///   phi_a   = phi with delta replaced by delta + a (shifted N-function)
///
/// Conjugates are evaluated through the maximizer s of s*t - phi(s), i.e. the
/// root of phi'(s) = t, found by safeguarded Newton/bisection.
class PhiKit {
 public:
  /// Throws std::domain_error unless q > 1 and delta >= 0.
  PhiKit(double q, double delta);

  double q() const { return q_; }
  double delta() const { return delta_; }
  double q_conjugate() const { return q_ / (q_ - 1.0); }

  Vec2 A(const Vec2& a) const;
  /// Jacobian of A. At a = 0 this is delta^(q-2) I; throws std::domain_error
  /// in the singular case delta = 0, q < 2, a = 0.
  Mat2 DA(const Vec2& a) const;
  Vec2 F(const Vec2& a) const;
  Vec2 Fstar(const Vec2& a) const;

  double dphi(double t) const;
  double phi(double t) const;

  struct Conjugate {
    double value;      ///< phi*(t)
    double maximizer;  ///< s with phi'(s) = t
    int iterations;
  };
  Conjugate conjugate_with_maximizer(double t) const;
  double phi_conjugate(double t) const { return conjugate_with_maximizer(t).value; }

  /// The shifted kit phi_a (requires a >= 0).
  PhiKit shifted(double a) const;

 private:
  double q_;
  double delta_;
};

// Free-function forms of the kernel.
Vec2 eval_A(double q, double delta, const Vec2& a);
Mat2 eval_DA(double q, double delta, const Vec2& a);
Vec2 eval_F(double q, double delta, const Vec2& a);
Vec2 eval_Fstar(double q, double delta, const Vec2& a);
double eval_phi(double q, double delta, double t);
double eval_phi_conjugate(double q, double delta, double t);
double eval_phi_shifted(double q, double delta, double shift, double t);
double eval_phi_shifted_conjugate(double q, double delta, double shift, double t);

/// Radial variable exponent p(x) = p_min + eps |x - center|^alpha.
struct ExponentField {
  double p_min = 1.5;
  double eps = 1.0;
  double alpha = 1.0;
  Vec2 center = Vec2::Zero();

  /// Throws std::domain_error unless p_min > 1, eps >= 0, alpha in (0, 1].
  void validate() const;
  double operator()(const Vec2& x) const;
  double conjugate(const Vec2& x) const {
    double p = (*this)(x);
    return p / (p - 1.0);
  }
  /// Upper bound of p over the rectangle.
  double p_max(const Rectangle& domain) const;
};

/// One exponent value per element, p_h|_T = p(xi_T).
struct ElementExponents {
  enum class Rule { Barycenter };
  std::vector<double> p_h;
  Rule xi_rule = Rule::Barycenter;

  static ElementExponents constant(int num_elements, double p);
};

ElementExponents discretize_exponent(const ExponentField& p, const MeshMetrics& metrics);
ElementExponents discretize_exponent(const std::function<double(const Vec2&)>& p,
                                     const MeshMetrics& metrics);

}  // namespace crvex
