#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "minnorm/model.hpp"

namespace minnorm {

/// f(x) = sum_j a_j relu(w_j x + b_j) [+ a0 x + b0 when skip is set].
struct NetworkParams {
  std::vector<double> a, w, b;
  bool skip = false;
  double a0 = 0.0;
  double b0 = 0.0;

  [[nodiscard]] std::size_t width() const { return a.size(); }
  [[nodiscard]] double operator()(double x) const;
};

struct TrainConfig {
  std::size_t m = 200;
  double lambda = 1e-3;
  bool penalize_biases = true;
  bool skip_connection = false;
  double learning_rate = 1e-2;
  std::size_t steps = 200000;
  std::uint64_t seed = 0;
  /// Standard deviation of the Gaussian initialisation; <= 0 selects m^(-1/4).
  double init_std = 0.0;

  void validate() const;
  [[nodiscard]] double effective_init_std() const;
};

/// Terms of the training objective; the reg_* entries already include lambda.
/// reg_b is always reported but only counted in total when biases are penalised.
struct LossBreakdown {
  double data = 0.0;
  double reg_a = 0.0;
  double reg_w = 0.0;
  double reg_b = 0.0;
  double total = 0.0;
};

struct TrainResult {
  NetworkParams params;
  LossBreakdown initial;
  LossBreakdown final;
  std::size_t steps = 0;
  std::size_t rejected_steps = 0;
  double final_learning_rate = 0.0;
};

[[nodiscard]] NetworkParams init_network(const TrainConfig& cfg);

[[nodiscard]] LossBreakdown loss_breakdown(const NetworkParams& p, const Dataset& d, double lambda,
                                           bool penalize_biases);

/// Full-batch gradient descent from init_network(cfg).  The loss is checked
/// every 1000 steps and the learning rate halved whenever it rose since the
/// previous check.  Throws ConvergenceError when the loss stops being finite.
[[nodiscard]] TrainResult train_network(const Dataset& d, const TrainConfig& cfg);

/// Number of separated clusters of curvature of the trained function
/// sampled on a 2000-point grid extending 10% beyond the data on each side.
/// Grid cells whose second-difference mass exceeds tol_fraction of the total
/// are marked; marked cells closer than merge_gap of the data range form one
/// cluster.
[[nodiscard]] std::size_t effective_kink_count(const NetworkParams& p, const Dataset& d, double tol_fraction = 0.02,
                                               double merge_gap = 0.0);

struct NeuronScatter {
  /// (-b_j / w_j, a_j) per neuron with |w_j| > tol.
  std::vector<std::pair<double, double>> neurons;
  /// Indices of neurons with |w_j| <= tol.
  std::vector<std::size_t> degenerate;
};

[[nodiscard]] NeuronScatter neuron_scatter(const NetworkParams& p, double tol = 1e-12);

}  // namespace minnorm
