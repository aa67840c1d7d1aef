#pragma once

#include <cstdint>

namespace sps {

struct StepSizes {
  double alpha = 0.0;  // projection (update) stepsize
  double rho = 0.0;    // forward (exploration) stepsize for B
};

// alpha_k = c_d * k^-0.51, rho_k = c_d * k^-0.25.
StepSizes schedule_decay(double c_d, std::int64_t k);

// rho = min{K^{-1/4}, 1/(2L)}, alpha = c_f * rho^2, constant in k.
StepSizes schedule_fixed(double c_f, std::int64_t budget, double lipschitz, std::int64_t k);

// Deterministic (alpha_k, rho_k) sequence together with the resolvent stepsize tau.
class StepSchedule {
 public:
  enum class Kind { kDecay, kFixed };

  static constexpr double kDefaultAlphaExponent = 0.51;
  static constexpr double kDefaultRhoExponent = 0.25;

  // Rejects exponents for which sum alpha_k rho_k < inf, sum alpha_k^2 = inf or
  // sum alpha_k rho_k^2 = inf.
  static StepSchedule decay(double c_d, double alpha_exponent = kDefaultAlphaExponent,
                            double rho_exponent = kDefaultRhoExponent, double tau = 1.0);
  static StepSchedule fixed(double c_f, std::int64_t budget, double lipschitz, double tau = 1.0);

  StepSizes at(std::int64_t k) const;

  Kind kind() const noexcept { return kind_; }
  double tau() const noexcept { return tau_; }
  double constant() const noexcept { return constant_; }
  double alpha_exponent() const noexcept { return alpha_exponent_; }
  double rho_exponent() const noexcept { return rho_exponent_; }
  std::int64_t budget() const noexcept { return budget_; }
  double lipschitz() const noexcept { return lipschitz_; }

 private:
  StepSchedule() = default;

  Kind kind_ = Kind::kDecay;
  double constant_ = 1.0;
  double alpha_exponent_ = kDefaultAlphaExponent;
  double rho_exponent_ = kDefaultRhoExponent;
  std::int64_t budget_ = 1;
  double lipschitz_ = 1.0;
  double tau_ = 1.0;
};

}  // namespace sps
