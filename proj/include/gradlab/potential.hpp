#pragma once

#include <cmath>
#include <functional>
#include <string>

#include <json.hpp>

namespace gradlab::potential {

struct Derivs {
  double v;
  double d1;
  double d2;
};

/// Even, uniformly convex interaction V with lambda <= V'' <= Lambda and
/// Lipschitz V''.
class Potential {
 public:
  enum class Kind { quadratic, cos_perturbed, custom };

  struct Custom {
    std::function<double(double)> v, d1, d2;
  };

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  double eps() const { return eps_; }
  double lambda() const { return lambda_; }
  double Lambda() const { return Lambda_; }
  double lipschitz() const { return lipschitz_; }

  double value(double t) const {
    switch (kind_) {
      case Kind::quadratic: return 0.5 * t * t;
      case Kind::cos_perturbed: return 0.5 * t * t + eps_ * std::cos(t);
      default: return custom_.v(t);
    }
  }
  double d1(double t) const {
    switch (kind_) {
      case Kind::quadratic: return t;
      case Kind::cos_perturbed: return t - eps_ * std::sin(t);
      default: return custom_.d1(t);
    }
  }
  double d2(double t) const {
    switch (kind_) {
      case Kind::quadratic: return 1.0;
      case Kind::cos_perturbed: return 1.0 - eps_ * std::cos(t);
      default: return custom_.d2(t);
    }
  }
  /// V, V' and V'' together; one sincos for cos_perturbed.
  Derivs eval(double t) const {
    switch (kind_) {
      case Kind::quadratic: return {0.5 * t * t, t, 1.0};
      case Kind::cos_perturbed: {
        const double s = std::sin(t), c = std::cos(t);
        return {0.5 * t * t + eps_ * c, t - eps_ * s, 1.0 - eps_ * c};
      }
      default: return {custom_.v(t), custom_.d1(t), custom_.d2(t)};
    }
  }

  nlohmann::json descriptor() const;

  friend Potential quadratic();
  friend Potential cos_perturbed(double eps);
  friend Potential custom(std::string name, Custom fns, double lambda, double Lambda,
                          double lipschitz);

 private:
  Kind kind_ = Kind::quadratic;
  std::string name_ = "quadratic";
  double eps_ = 0.0;
  double lambda_ = 1.0;
  double Lambda_ = 1.0;
  double lipschitz_ = 0.0;
  Custom custom_;
};

/// V(t) = t^2 / 2.
Potential quadratic();
/// V(t) = t^2 / 2 + eps cos t, requires 0 < eps < 1.
Potential cos_perturbed(double eps);
/// User-supplied V with claimed constants (used to exercise the verifier).
Potential custom(std::string name, Potential::Custom fns, double lambda, double Lambda,
                 double lipschitz);

Potential from_descriptor(const nlohmann::json& j);

struct AssumptionReport {
  double lambda_hat = 0.0;
  double Lambda_hat = 0.0;
  double symmetry_residual = 0.0;
  double lipschitz_ratio = 0.0;
  bool lambda_ok = false;
  bool Lambda_ok = false;
  bool symmetric = false;
  bool lipschitz_ok = false;
  bool ok() const { return lambda_ok && Lambda_ok && symmetric && lipschitz_ok; }
  nlohmann::json to_json() const;
};

/// Scan V on a uniform grid over [-halfwidth, halfwidth].
AssumptionReport verify_assumptions(const Potential& p, double halfwidth = 50.0,
                                    double step = 1e-3);

}  // namespace gradlab::potential
