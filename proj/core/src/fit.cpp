#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <thread>
#include <vector>

#include <Eigen/Core>

#include "squeezelab/decoherence.hpp"
#include "squeezelab/errors.hpp"

namespace squeezelab {
namespace {

// Upper bound on the loss explored by the refinement; at total loss 1 the dB
// residuals stay finite but carry no information.
constexpr double kMaxLoss = 0.999;

class Objective {
 public:
  Objective(std::span<const SqueezeMeasurement> data, const FitOptions& options)
      : data_(data), options_(options) {}

  // Sum of squared dB residuals; sigma enters squared, so its sign is free.
  double operator()(double loss, double sigma_degrees) const {
    if (!(loss >= 0.0 && loss <= kMaxLoss)) {
      const double excess = loss < 0.0 ? -loss : loss - kMaxLoss;
      return 1e6 * (1.0 + excess);
    }
    DecoherenceModel model;
    model.gain = options_.gain;
    model.intrinsic_loss = loss;
    model.phase_noise = PhaseNoise::from_degrees(std::abs(sigma_degrees));
    model.omega = options_.omega;
    model.gamma = options_.gamma;
    double sum = 0.0;
    for (const auto& m : data_) {
      const SqueezeDb predicted = forward_model(model, m.added_loss);
      const double ds = predicted.squeeze_db - m.squeeze_db;
      const double da = predicted.antisqueeze_db - m.antisqueeze_db;
      sum += ds * ds + da * da;
    }
    return sum;
  }

 private:
  std::span<const SqueezeMeasurement> data_;
  const FitOptions& options_;
};

void validate_inputs(std::span<const SqueezeMeasurement> data,
                     const FitOptions& options) {
  std::set<double> distinct;
  for (const auto& m : data) {
    detail::require_fraction(m.added_loss, "added loss");
    detail::require(m.squeeze_db <= 0.0 && m.antisqueeze_db >= 0.0,
                    "measurement must have squeeze_db <= 0 <= antisqueeze_db");
    distinct.insert(m.added_loss);
  }
  if (distinct.size() < 2) {
    throw UnderDeterminedError(
        "under-determined: need at least 2 measurements at distinct added "
        "loss values");
  }
  detail::require(options.gain >= 1.0, "parametric gain must be >= 1");
  detail::require(options.gamma > 0.0, "half linewidth must be > 0");
  detail::require(options.loss_max > 0.0 && options.loss_max <= kMaxLoss,
                  "loss_max must lie in (0, 0.999]");
  detail::require(options.sigma_max_degrees >= 0.0,
                  "sigma_max_degrees must be >= 0");
  detail::require(options.loss_grid_points >= 2 && options.sigma_grid_points >= 2,
                  "grid needs at least 2 points per axis");
  detail::require(options.threads >= 1, "threads must be >= 1");
  if (options.fixed_phase_noise) {
    detail::require(options.fixed_phase_noise->sigma >= 0.0,
                    "fixed phase noise must be >= 0");
  }
}

struct GridBest {
  double loss;
  double sigma_degrees;
  double value;
};

GridBest grid_search(const Objective& objective, const FitOptions& options) {
  const bool free_sigma = !options.fixed_phase_noise.has_value();
  const int n_loss = options.loss_grid_points;
  const int n_sigma = free_sigma ? options.sigma_grid_points : 1;
  const double loss_step = options.loss_max / (n_loss - 1);
  const double sigma_step = options.sigma_max_degrees / (n_sigma > 1 ? n_sigma - 1 : 1);
  const double fixed_sigma =
      free_sigma ? 0.0 : options.fixed_phase_noise->degrees();

  auto loss_at = [&](int i) { return i * loss_step; };
  auto sigma_at = [&](int j) { return free_sigma ? j * sigma_step : fixed_sigma; };

  const std::size_t cells = static_cast<std::size_t>(n_loss) * n_sigma;
  std::vector<double> values(cells);
  auto evaluate = [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const int i = static_cast<int>(k / n_sigma);
      const int j = static_cast<int>(k % n_sigma);
      values[k] = objective(loss_at(i), sigma_at(j));
    }
  };

  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(options.threads), cells);
  if (workers <= 1) {
    evaluate(0, cells);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (cells + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(cells, begin + chunk);
      if (begin < end) pool.emplace_back(evaluate, begin, end);
    }
  }

  // First minimum in index order, so the result is independent of scheduling.
  const auto best = std::min_element(values.begin(), values.end());
  const std::size_t k = static_cast<std::size_t>(best - values.begin());
  return {loss_at(static_cast<int>(k / n_sigma)),
          sigma_at(static_cast<int>(k % n_sigma)), *best};
}

struct SimplexResult {
  Eigen::VectorXd point;
  double value;
  int iterations;
  bool converged;
};

template <typename F>
SimplexResult nelder_mead(const F& f, Eigen::VectorXd start,
                          const Eigen::VectorXd& step,
                          const Eigen::VectorXd& tolerance, int max_iterations) {
  const Eigen::Index n = start.size();
  std::vector<Eigen::VectorXd> vertex(n + 1, start);
  std::vector<double> value(n + 1);
  for (Eigen::Index i = 0; i < n; ++i) vertex[i + 1](i) += step(i);
  for (Eigen::Index i = 0; i <= n; ++i) value[i] = f(vertex[i]);

  std::vector<Eigen::Index> order(n + 1);
  int iteration = 0;
  bool converged = false;
  for (; iteration < max_iterations; ++iteration) {
    for (Eigen::Index i = 0; i <= n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
      return value[a] < value[b];
    });
    const Eigen::Index best = order.front();
    const Eigen::Index worst = order.back();
    const Eigen::Index second_worst = order[n - 1];

    bool small = true;
    for (Eigen::Index i = 0; i <= n && small; ++i) {
      const Eigen::VectorXd diff = (vertex[i] - vertex[best]).cwiseAbs();
      small = (diff.array() <= tolerance.array()).all();
    }
    if (small) {
      converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i <= n; ++i) {
      if (i != worst) centroid += vertex[i];
    }
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd reflected = centroid + (centroid - vertex[worst]);
    const double f_reflected = f(reflected);
    if (f_reflected < value[best]) {
      const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - vertex[worst]);
      const double f_expanded = f(expanded);
      if (f_expanded < f_reflected) {
        vertex[worst] = expanded;
        value[worst] = f_expanded;
      } else {
        vertex[worst] = reflected;
        value[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < value[second_worst]) {
      vertex[worst] = reflected;
      value[worst] = f_reflected;
      continue;
    }
    const bool outside = f_reflected < value[worst];
    const Eigen::VectorXd contracted =
        outside ? Eigen::VectorXd(centroid + 0.5 * (reflected - centroid))
                : Eigen::VectorXd(centroid + 0.5 * (vertex[worst] - centroid));
    const double f_contracted = f(contracted);
    if (f_contracted < (outside ? f_reflected : value[worst])) {
      vertex[worst] = contracted;
      value[worst] = f_contracted;
      continue;
    }
    for (Eigen::Index i = 0; i <= n; ++i) {
      if (i == best) continue;
      vertex[i] = vertex[best] + 0.5 * (vertex[i] - vertex[best]);
      value[i] = f(vertex[i]);
    }
  }

  const auto best_it = std::min_element(value.begin(), value.end());
  const auto best = static_cast<std::size_t>(best_it - value.begin());
  return {vertex[best], *best_it, iteration, converged};
}

}  // namespace

FitResult fit_loss_phase(std::span<const SqueezeMeasurement> data,
                         const FitOptions& options) {
  validate_inputs(data, options);
  const Objective objective(data, options);
  const GridBest coarse = grid_search(objective, options);

  const double loss_step = options.loss_max / (options.loss_grid_points - 1);
  FitResult result;
  if (options.fixed_phase_noise) {
    const double sigma = options.fixed_phase_noise->degrees();
    auto f = [&](const Eigen::VectorXd& p) { return objective(p(0), sigma); };
    const SimplexResult refined = nelder_mead(
        f, Eigen::VectorXd::Constant(1, coarse.loss),
        Eigen::VectorXd::Constant(1, loss_step),
        Eigen::VectorXd::Constant(1, options.loss_tolerance),
        options.max_iterations);
    result.intrinsic_loss = refined.point(0);
    result.phase_noise = *options.fixed_phase_noise;
    result.residual = refined.value;
    result.converged = refined.converged;
    result.iterations = refined.iterations;
  } else {
    const double sigma_step =
        options.sigma_max_degrees / (options.sigma_grid_points - 1);
    auto f = [&](const Eigen::VectorXd& p) { return objective(p(0), p(1)); };
    Eigen::VectorXd start(2), step(2), tolerance(2);
    start << coarse.loss, coarse.sigma_degrees;
    step << loss_step, std::max(sigma_step, 1e-3);
    tolerance << options.loss_tolerance, options.sigma_tolerance_degrees;
    const SimplexResult refined =
        nelder_mead(f, start, step, tolerance, options.max_iterations);
    result.intrinsic_loss = refined.point(0);
    result.phase_noise = PhaseNoise::from_degrees(std::abs(refined.point(1)));
    result.residual = refined.value;
    result.converged = refined.converged;
    result.iterations = refined.iterations;
  }
  // The refinement never leaves the feasible box at its optimum, but the
  // reported loss must satisfy the FitResult invariant regardless.
  if (result.intrinsic_loss < 0.0 || result.intrinsic_loss > 1.0) {
    result.intrinsic_loss = std::clamp(result.intrinsic_loss, 0.0, 1.0);
    result.converged = false;
  }
  return result;
}

}  // namespace squeezelab
