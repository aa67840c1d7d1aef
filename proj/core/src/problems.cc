#include "sps/problems.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "sps/errors.hpp"

namespace sps {

namespace {

constexpr int kMaxPowerSteps = 500;
constexpr double kPowerTolerance = 1e-9;

double fd_step(const Vector& z) { return 1e-5 * (1.0 + z.norm()); }

// Central-difference derivative of `field` at z along the unit vector of the
// step actually taken, (z + h v) - (z - h v).
Vector directional_derivative(const LipschitzMap::Eval& field, const Vector& z, const Vector& v) {
  const double h = fd_step(z);
  const Vector up = z + h * v, down = z - h * v;
  return (field(up) - field(down)) / (up - down).norm();
}

Vector fd_adjoint(const LipschitzMap::Eval& field, const Vector& z, const Vector& u) {
  const double h = fd_step(z);
  Vector g(z.size());
  Vector up = z, down = z;
  for (Index j = 0; j < z.size(); ++j) {
    up[j] = z[j] + h;
    down[j] = z[j] - h;
    g[j] = u.dot(field(up) - field(down)) / (up[j] - down[j]);
    up[j] = z[j];
    down[j] = z[j];
  }
  return g;
}

// sqrt of the top eigenvalue of J^T J at z.
double local_spectral_norm(const LipschitzMap::Eval& field, const AdjointProduct& adjoint, const Vector& z,
                           Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(z.size());
  for (Index j = 0; j < z.size(); ++j) v[j] = normal(rng);
  v.normalize();
  double previous = -1.0;
  for (int step = 0; step < kMaxPowerSteps; ++step) {
    const Vector jv = directional_derivative(field, z, v);
    const Vector jtjv = adjoint ? adjoint(z, jv) : fd_adjoint(field, z, jv);
    const double mu = jtjv.norm();
    if (mu == 0.0) return 0.0;
    if (std::abs(mu - previous) <= kPowerTolerance * mu) return std::sqrt(mu);
    previous = mu;
    v = jtjv / mu;
  }
  throw EstimationError("power iteration did not converge in " + std::to_string(kMaxPowerSteps) + " steps");
}

}  // namespace

double estimate_lipschitz_bound(const LipschitzMap::Eval& field, const AdjointProduct& adjoint, Index dimension,
                                std::uint64_t seed, int points, double safety) {
  if (points < 1) throw InvalidParameter("need at least one sample point");
  Rng rng(seed);
  double best = local_spectral_norm(field, adjoint, Vector::Zero(dimension), rng);
  for (int p = 1; p < points; ++p) {
    const Vector z = initial_primal(dimension, rng);
    best = std::max(best, local_spectral_norm(field, adjoint, z, rng));
  }
  return safety * best;
}

// ---------------------------------------------------------------------------

DrslrProblem::DrslrProblem(std::shared_ptr<const SparseDataset> data, Params params)
    : data_(std::move(data)), params_(params) {
  if (!data_ || data_->num_rows() < 1) throw InvalidParameter("DRSLR needs a nonempty dataset");
  if (!(params_.delta >= 0.0) || !(params_.kappa >= 0.0) || !(params_.c >= 0.0)) {
    throw InvalidParameter("delta, kappa and c must be nonnegative");
  }
  for (double y : data_->labels) {
    if (y != 1.0 && y != -1.0) throw InvalidParameter("DRSLR labels must be -1 or +1");
  }
}

double DrslrProblem::psi(double t) {
  const double a = std::abs(t);
  return a + std::log1p(std::exp(-2.0 * a));
}

double DrslrProblem::psi_prime(double t) { return std::tanh(t); }

void DrslrProblem::check_point(const Vector& z) const {
  if (z.size() != dimension()) {
    throw ShapeError("DRSLR point has dimension " + std::to_string(z.size()) + ", expected " +
                     std::to_string(dimension()));
  }
}

double DrslrProblem::lagrangian(const Vector& z) const {
  check_point(z);
  const Index d = num_features();
  const Index m = num_samples();
  const double lambda = z[0];
  const auto beta = z.segment(1, d);
  const auto gamma = z.tail(m);
  double loss = 0.0;
  double coupling = 0.0;
  for (Index i = 0; i < m; ++i) {
    const double a = data_->row_dot(i, beta);
    loss += psi(a);
    coupling += gamma[i] * (data_->labels[i] * a - lambda * params_.kappa);
  }
  return lambda * (params_.delta - params_.kappa) + (loss + coupling) / static_cast<double>(m);
}

Vector DrslrProblem::full_field(const Vector& z) const {
  check_point(z);
  const Index d = num_features();
  const Index m = num_samples();
  const double inv_m = 1.0 / static_cast<double>(m);
  const double lambda = z[0];
  const auto beta = z.segment(1, d);
  const auto gamma = z.tail(m);

  Vector out = Vector::Zero(dimension());
  out[0] = params_.delta - params_.kappa * (1.0 + gamma.mean());
  auto out_beta = out.segment(1, d);
  for (Index i = 0; i < m; ++i) {
    const double y = data_->labels[i];
    const double a = data_->row_dot(i, beta);
    data_->add_row(i, inv_m * (psi_prime(a) + gamma[i] * y), out_beta);
    out[1 + d + i] = -inv_m * (y * a - lambda * params_.kappa);
  }
  return out;
}

Vector DrslrProblem::component(Index i, const Vector& z) const {
  check_point(z);
  if (i < 0 || i >= num_samples()) {
    throw IndexError("sample index " + std::to_string(i) + " outside [0, " + std::to_string(num_samples()) + ")");
  }
  const Index d = num_features();
  const double y = data_->labels[i];
  const double gamma_i = z[1 + d + i];
  const double a = data_->row_dot(i, z.segment(1, d));
  Vector out = Vector::Zero(dimension());
  out[0] = params_.delta - params_.kappa * (1.0 + gamma_i);
  data_->add_row(i, psi_prime(a) + gamma_i * y, out.segment(1, d));
  out[1 + d + i] = -(y * a - z[0] * params_.kappa);
  return out;
}

Vector DrslrProblem::batch_average(const Vector& z, std::span<const Index> batch) const {
  check_point(z);
  if (batch.empty()) throw InvalidParameter("empty minibatch");
  const Index d = num_features();
  const double lambda = z[0];
  const auto beta = z.segment(1, d);
  Vector out = Vector::Zero(dimension());
  auto out_beta = out.segment(1, d);
  for (Index i : batch) {
    if (i < 0 || i >= num_samples()) throw IndexError("minibatch index out of range");
    const double y = data_->labels[i];
    const double gamma_i = z[1 + d + i];
    const double a = data_->row_dot(i, beta);
    out[0] += params_.delta - params_.kappa * (1.0 + gamma_i);
    data_->add_row(i, psi_prime(a) + gamma_i * y, out_beta);
    out[1 + d + i] += -(y * a - lambda * params_.kappa);
  }
  out /= static_cast<double>(batch.size());
  return out;
}

Vector DrslrProblem::minibatch_oracle(const Vector& z, Index batch_size, Rng& rng) const {
  if (batch_size < 1) throw InvalidParameter("batch size must be >= 1");
  if (batch_size > num_samples()) throw InvalidParameter("batch size exceeds the number of samples");
  std::uniform_int_distribution<Index> pick(0, num_samples() - 1);
  std::vector<Index> batch(static_cast<std::size_t>(batch_size));
  for (auto& i : batch) i = pick(rng);
  return batch_average(z, batch);
}

Vector DrslrProblem::jacobian_transpose_product(const Vector& z, const Vector& u) const {
  check_point(z);
  check_point(u);
  const Index d = num_features();
  const Index m = num_samples();
  const double inv_m = 1.0 / static_cast<double>(m);
  const double kappa = params_.kappa;
  const auto beta = z.segment(1, d);
  const auto u_beta = u.segment(1, d);
  const auto u_gamma = u.tail(m);

  Vector out = Vector::Zero(dimension());
  out[0] = kappa * inv_m * u_gamma.sum();
  auto out_beta = out.segment(1, d);
  for (Index i = 0; i < m; ++i) {
    const double y = data_->labels[i];
    const double a = data_->row_dot(i, beta);
    const double xu = data_->row_dot(i, u_beta);
    const double sech = 1.0 / std::cosh(a);
    data_->add_row(i, inv_m * (sech * sech * xu - y * u_gamma[i]), out_beta);
    out[1 + d + i] = inv_m * (y * xu - kappa * u[0]);
  }
  return out;
}

SetValuedOperator DrslrProblem::constraint_operator() const {
  const Index d = num_features();
  const Index m = num_samples();
  const double cone_scale = kPsiLipschitz + 1.0;
  return normal_cone(
      [d, m, cone_scale](const Vector& t) -> Vector {
        Vector out(t.size());
        auto [lambda, beta] = project_scaled_soc(t[0], t.segment(1, d), cone_scale);
        out[0] = lambda;
        out.segment(1, d) = beta;
        out.tail(m) = project_linf_ball(t.tail(m), 1.0);
        return out;
      },
      dimension());
}

SetValuedOperator DrslrProblem::l1_operator() const {
  const Index d = num_features();
  const Index m = num_samples();
  return product_operator({zero_operator(1), l1_subdifferential(params_.c, d), zero_operator(m)});
}

double DrslrProblem::lipschitz_bound(std::uint64_t seed) const {
  return estimate_lipschitz_bound([this](const Vector& z) { return full_field(z); },
                                  [this](const Vector& z, const Vector& u) { return jacobian_transpose_product(z, u); },
                                  dimension(), seed);
}

ProblemInstance DrslrProblem::instance(OracleMode mode, Index batch_size, double lipschitz) const {
  if (mode == OracleMode::kMinibatch && (batch_size < 1 || batch_size > num_samples())) {
    throw InvalidParameter("batch size must lie in [1, m]");
  }
  ProblemInstance inst;
  inst.name = "drslr";
  inst.dimension = dimension();
  inst.operators = {constraint_operator(), l1_operator()};
  // The instance owns a copy of the problem so it can outlive *this.
  auto self = std::make_shared<const DrslrProblem>(*this);
  inst.field.eval = [self](const Vector& z) { return self->full_field(z); };
  if (mode == OracleMode::kExact) {
    inst.field.stochastic_eval = [self](const Vector& z, Rng&) { return self->full_field(z); };
  } else {
    inst.field.stochastic_eval = [self, batch_size](const Vector& z, Rng& rng) {
      return self->minibatch_oracle(z, batch_size, rng);
    };
  }
  inst.field.lipschitz_bound = lipschitz > 0.0 ? lipschitz : lipschitz_bound();
  return inst;
}

Vector drslr_full_field(const DrslrProblem& problem, const Vector& z) { return problem.full_field(z); }

Vector drslr_component(const DrslrProblem& problem, Index i, const Vector& z) { return problem.component(i, z); }

Vector drslr_minibatch_oracle(const DrslrProblem& problem, const Vector& z, Index batch_size, Rng& rng) {
  return problem.minibatch_oracle(z, batch_size, rng);
}

double drslr_lipschitz_bound(const DrslrProblem& problem) { return problem.lipschitz_bound(); }

// ---------------------------------------------------------------------------

namespace {

LipschitzMap::StochasticEval with_gaussian_noise(LipschitzMap::Eval exact, double sigma) {
  if (sigma == 0.0) {
    return [exact = std::move(exact)](const Vector& z, Rng&) { return exact(z); };
  }
  return [exact = std::move(exact), sigma](const Vector& z, Rng& rng) {
    std::normal_distribution<double> normal(0.0, sigma);
    Vector out = exact(z);
    for (Index j = 0; j < out.size(); ++j) out[j] += normal(rng);
    return out;
  };
}

// S v with S = scale * blockdiag([[0, 1], [-1, 0]]).
Vector paired_skew(const Vector& v, double scale) {
  Vector out(v.size());
  for (Index j = 0; j + 1 < v.size(); j += 2) {
    out[j] = scale * v[j + 1];
    out[j + 1] = -scale * v[j];
  }
  return out;
}

}  // namespace

ProblemInstance make_bilinear_game(Index d_x, Index d_y, double scale, double noise_sigma) {
  if (!(scale > 0.0)) throw InvalidParameter("bilinear coupling scale must be positive");
  if (d_x < 1 || d_x != d_y) throw InvalidParameter("bilinear game needs d_x == d_y >= 1");
  if (!(noise_sigma >= 0.0)) throw InvalidParameter("noise level must be nonnegative");
  ProblemInstance inst;
  inst.name = "bilinear";
  inst.dimension = d_x + d_y;
  LipschitzMap::Eval exact = [d_x, scale](const Vector& z) {
    Vector out(z.size());
    out.head(d_x) = scale * z.tail(d_x);
    out.tail(d_x) = -scale * z.head(d_x);
    return out;
  };
  inst.field.eval = exact;
  inst.field.stochastic_eval = with_gaussian_noise(std::move(exact), noise_sigma);
  inst.field.lipschitz_bound = scale;
  return inst;
}

KnownSolutionGame make_known_solution_game(Index half_dimension, double scale, double l1_weight,
                                           std::uint64_t seed, double noise_sigma) {
  if (half_dimension < 1) throw InvalidParameter("half dimension must be >= 1");
  if (!(scale > 0.0) || !(l1_weight > 0.0)) throw InvalidParameter("scale and l1 weight must be positive");
  const Index d = 2 * half_dimension;
  Rng rng(seed);
  std::uniform_real_distribution<double> magnitude(0.2, 0.8);
  std::bernoulli_distribution coin(0.5);
  Vector z_star(d);
  for (Index j = 0; j < d; ++j) z_star[j] = (coin(rng) ? 1.0 : -1.0) * magnitude(rng);
  const Vector subgrad = z_star.unaryExpr([](double v) { return v > 0.0 ? 1.0 : -1.0; });
  const Vector offset = -l1_weight * subgrad;

  KnownSolutionGame game;
  game.problem.name = "known-solution";
  game.problem.dimension = d;
  game.problem.operators = {box_normal_cone(Vector::Constant(d, -1.0), Vector::Constant(d, 1.0)),
                            l1_subdifferential(l1_weight, d)};
  LipschitzMap::Eval exact = [z_star, offset, scale](const Vector& z) {
    Vector out = paired_skew(z - z_star, scale);
    out += offset;
    return out;
  };
  game.problem.field.eval = exact;
  game.problem.field.stochastic_eval = with_gaussian_noise(std::move(exact), noise_sigma);
  game.problem.field.lipschitz_bound = scale;

  game.solution.z = z_star;
  game.solution.w = {Vector::Zero(d), l1_weight * subgrad, offset};
  return game;
}

}  // namespace sps
