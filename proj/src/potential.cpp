#include "gradlab/potential.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace gradlab::potential {

Potential quadratic() { return Potential{}; }

Potential cos_perturbed(double eps) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("cos_perturbed: eps must lie in (0, 1)");
  Potential p;
  p.kind_ = Potential::Kind::cos_perturbed;
  p.name_ = "cos_perturbed";
  p.eps_ = eps;
  p.lambda_ = 1.0 - eps;
  p.Lambda_ = 1.0 + eps;
  p.lipschitz_ = eps;
  return p;
}

Potential custom(std::string name, Potential::Custom fns, double lambda, double Lambda,
                 double lipschitz) {
  if (!fns.v || !fns.d1 || !fns.d2) throw std::invalid_argument("custom potential: missing function");
  if (!(lambda > 0.0 && Lambda >= lambda)) throw std::invalid_argument("custom potential: bad constants");
  Potential p;
  p.kind_ = Potential::Kind::custom;
  p.name_ = std::move(name);
  p.lambda_ = lambda;
  p.Lambda_ = Lambda;
  p.lipschitz_ = lipschitz;
  p.custom_ = std::move(fns);
  return p;
}

nlohmann::json Potential::descriptor() const {
  nlohmann::json j{{"kind", name_}};
  if (kind_ == Kind::cos_perturbed) j["eps"] = eps_;
  j["lambda"] = lambda_;
  j["Lambda"] = Lambda_;
  return j;
}

Potential from_descriptor(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "quadratic") return quadratic();
  if (kind == "cos_perturbed") return cos_perturbed(j.at("eps").get<double>());
  throw std::invalid_argument("unknown potential kind: " + kind);
}

nlohmann::json AssumptionReport::to_json() const {
  return {{"lambda_hat", lambda_hat},         {"Lambda_hat", Lambda_hat},
          {"symmetry_residual", symmetry_residual}, {"lipschitz_ratio", lipschitz_ratio},
          {"lambda_ok", lambda_ok},           {"Lambda_ok", Lambda_ok},
          {"symmetric", symmetric},           {"lipschitz_ok", lipschitz_ok}};
}

AssumptionReport verify_assumptions(const Potential& p, double halfwidth, double step) {
  if (!(halfwidth > 0.0 && step > 0.0)) throw std::invalid_argument("verify_assumptions: bad grid");
  constexpr double tol = 1e-9;
  AssumptionReport r;
  r.lambda_hat = std::numeric_limits<double>::infinity();
  r.Lambda_hat = -std::numeric_limits<double>::infinity();
  const long n = long(std::floor(halfwidth / step));
  double prev = p.d2(-double(n) * step);
  for (long i = -n; i <= n; ++i) {
    const double t = double(i) * step;
    const double c = p.d2(t);
    r.lambda_hat = std::min(r.lambda_hat, c);
    r.Lambda_hat = std::max(r.Lambda_hat, c);
    if (i > -n) r.lipschitz_ratio = std::max(r.lipschitz_ratio, std::abs(c - prev) / step);
    prev = c;
    const double vt = p.value(t);
    r.symmetry_residual =
        std::max(r.symmetry_residual, std::abs(vt - p.value(-t)) / std::max(1.0, std::abs(vt)));
  }
  r.lambda_ok = r.lambda_hat >= p.lambda() - tol;
  r.Lambda_ok = r.Lambda_hat <= p.Lambda() + tol;
  r.symmetric = r.symmetry_residual <= 1e-12;
  r.lipschitz_ok = r.lipschitz_ratio <= p.lipschitz() + tol;
  return r;
}

}  // namespace gradlab::potential
