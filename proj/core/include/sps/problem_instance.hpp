#pragma once

#include <string>
#include <vector>

#include "sps/operator_core.hpp"

namespace sps {

// 0 in A_1(z) + ... + A_n(z) + B(z), with z in R^dimension.
struct ProblemInstance {
  std::string name;
  Index dimension = 0;
  std::vector<SetValuedOperator> operators;
  LipschitzMap field;

  std::size_t num_operators() const noexcept { return operators.size(); }
};

}  // namespace sps
