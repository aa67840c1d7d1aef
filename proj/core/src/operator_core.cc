#include "sps/operator_core.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "sps/errors.hpp"

namespace sps {

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0)) {
    throw InvalidParameter(std::string(name) + " must be positive, got " + std::to_string(value));
  }
}

}  // namespace

Vector SetValuedOperator::resolve(double tau, const Vector& t) const {
  require_positive(tau, "resolvent stepsize");
  if (t.size() != dimension) {
    throw ShapeError("resolvent input has dimension " + std::to_string(t.size()) + ", operator expects " +
                     std::to_string(dimension));
  }
  return resolvent(tau, t);
}

Vector soft_threshold(const Vector& t, double kappa) {
  if (!(kappa >= 0.0)) {
    throw InvalidParameter("soft-threshold level must be nonnegative");
  }
  return t.unaryExpr([kappa](double v) {
    const double mag = std::abs(v) - kappa;
    return mag > 0.0 ? std::copysign(mag, v) : 0.0;
  });
}

Vector project_linf_ball(const Vector& g, double radius) {
  require_positive(radius, "l-infinity radius");
  if (!g.allFinite()) {
    throw InvalidParameter("l-infinity projection of a non-finite vector");
  }
  return g.cwiseMax(-radius).cwiseMin(radius);
}

std::pair<double, Vector> project_scaled_soc(double lambda, const Vector& beta, double s) {
  require_positive(s, "cone scale");
  const double aperture = 1.0 / s;
  const double r = beta.norm();
  if (r <= aperture * lambda) {
    return {lambda, beta};
  }
  if (r <= -lambda / aperture) {
    return {0.0, Vector::Zero(beta.size())};
  }
  const double c = (aperture * r + lambda) / (aperture * aperture + 1.0);
  return {c, (c * aperture / r) * beta};
}

Vector resolvent_of_normal_cone(const Projection& proj, double tau, const Vector& t) {
  require_positive(tau, "resolvent stepsize");
  return proj(t);
}

Vector product_resolvent(std::span<const SetValuedOperator> blocks, double tau, const Vector& t) {
  const Index total = std::accumulate(blocks.begin(), blocks.end(), Index{0},
                                      [](Index acc, const SetValuedOperator& b) { return acc + b.dimension; });
  if (total != t.size()) {
    throw ShapeError("product resolvent blocks cover " + std::to_string(total) + " coordinates, input has " +
                     std::to_string(t.size()));
  }
  Vector out(t.size());
  Index offset = 0;
  for (const auto& block : blocks) {
    out.segment(offset, block.dimension) = block.resolve(tau, t.segment(offset, block.dimension));
    offset += block.dimension;
  }
  return out;
}

Vector inverse_resolvent_via_moreau(const SetValuedOperator& op, double alpha, const Vector& w) {
  require_positive(alpha, "inverse resolvent stepsize");
  return w - alpha * op.resolve(1.0 / alpha, w / alpha);
}

SetValuedOperator zero_operator(Index dimension) {
  return {[](double, const Vector& t) { return t; }, dimension};
}

SetValuedOperator normal_cone(Projection proj, Index dimension) {
  return {[proj = std::move(proj)](double tau, const Vector& t) { return resolvent_of_normal_cone(proj, tau, t); },
          dimension};
}

SetValuedOperator l1_subdifferential(double weight, Index dimension) {
  if (!(weight >= 0.0)) {
    throw InvalidParameter("l1 weight must be nonnegative");
  }
  return {[weight](double tau, const Vector& t) { return soft_threshold(t, tau * weight); }, dimension};
}

SetValuedOperator box_normal_cone(Vector lower, Vector upper) {
  if (lower.size() != upper.size()) {
    throw ShapeError("box bounds differ in dimension");
  }
  if ((lower.array() > upper.array()).any()) {
    throw InvalidParameter("box lower bound exceeds upper bound");
  }
  const Index dim = lower.size();
  return normal_cone(
      [lower = std::move(lower), upper = std::move(upper)](const Vector& t) -> Vector {
        return t.cwiseMax(lower).cwiseMin(upper);
      },
      dim);
}

SetValuedOperator product_operator(std::vector<SetValuedOperator> blocks) {
  Index dim = 0;
  for (const auto& b : blocks) dim += b.dimension;
  return {[blocks = std::move(blocks)](double tau, const Vector& t) { return product_resolvent(blocks, tau, t); },
          dim};
}

}  // namespace sps
