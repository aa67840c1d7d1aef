#include "sps/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sps/errors.hpp"

namespace sps {

namespace {

void check_iteration(std::int64_t k) {
  if (k < 1) {
    throw InvalidParameter("iteration index must be >= 1, got " + std::to_string(k));
  }
}

StepSizes power_law(double c, double alpha_exponent, double rho_exponent, std::int64_t k) {
  check_iteration(k);
  const auto kk = static_cast<double>(k);
  return {c * std::pow(kk, -alpha_exponent), c * std::pow(kk, -rho_exponent)};
}

}  // namespace

StepSizes schedule_decay(double c_d, std::int64_t k) {
  if (!(c_d > 0.0)) throw InvalidParameter("decay constant must be positive");
  return power_law(c_d, StepSchedule::kDefaultAlphaExponent, StepSchedule::kDefaultRhoExponent, k);
}

StepSizes schedule_fixed(double c_f, std::int64_t budget, double lipschitz, std::int64_t k) {
  if (!(c_f > 0.0)) throw InvalidParameter("fixed-schedule constant must be positive");
  if (budget < 1) throw InvalidParameter("iteration budget must be >= 1");
  if (!(lipschitz > 0.0)) throw InvalidParameter("Lipschitz bound must be positive");
  check_iteration(k);
  const double rho = std::min(std::pow(static_cast<double>(budget), -0.25), 1.0 / (2.0 * lipschitz));
  return {c_f * rho * rho, rho};
}

StepSchedule StepSchedule::decay(double c_d, double alpha_exponent, double rho_exponent, double tau) {
  if (!(c_d > 0.0)) throw InvalidParameter("decay constant must be positive");
  if (!(tau > 0.0)) throw InvalidParameter("tau must be positive");
  // With alpha_k ~ k^-a and rho_k ~ k^-b:
  //   sum alpha_k rho_k   = inf  <=>  a + b <= 1
  //   sum alpha_k^2       < inf  <=>  a > 1/2
  //   sum alpha_k rho_k^2 < inf  <=>  a + 2b > 1
  // and b >= 0 keeps rho_k bounded.
  const double a = alpha_exponent;
  const double b = rho_exponent;
  if (!(a > 0.5 && a <= 1.0) || !(b >= 0.0) || !(a + b <= 1.0) || !(a + 2.0 * b > 1.0)) {
    throw InvalidParameter("decay exponents (" + std::to_string(a) + ", " + std::to_string(b) +
                           ") violate the summability conditions");
  }
  StepSchedule s;
  s.kind_ = Kind::kDecay;
  s.constant_ = c_d;
  s.alpha_exponent_ = a;
  s.rho_exponent_ = b;
  s.tau_ = tau;
  return s;
}

StepSchedule StepSchedule::fixed(double c_f, std::int64_t budget, double lipschitz, double tau) {
  if (!(c_f > 0.0)) throw InvalidParameter("fixed-schedule constant must be positive");
  if (budget < 1) throw InvalidParameter("iteration budget must be >= 1");
  if (!(lipschitz > 0.0)) throw InvalidParameter("Lipschitz bound must be positive");
  if (!(tau > 0.0)) throw InvalidParameter("tau must be positive");
  StepSchedule s;
  s.kind_ = Kind::kFixed;
  s.constant_ = c_f;
  s.budget_ = budget;
  s.lipschitz_ = lipschitz;
  s.tau_ = tau;
  return s;
}

StepSizes StepSchedule::at(std::int64_t k) const {
  if (kind_ == Kind::kFixed) {
    return schedule_fixed(constant_, budget_, lipschitz_, k);
  }
  return power_law(constant_, alpha_exponent_, rho_exponent_, k);
}

}  // namespace sps
