#include "minnorm/train.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "minnorm/errors.hpp"

namespace minnorm {

double NetworkParams::operator()(double x) const {
  double v = skip ? a0 * x + b0 : 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double pre = w[j] * x + b[j];
    if (pre > 0.0) v += a[j] * pre;
  }
  return v;
}

void TrainConfig::validate() const {
  if (m == 0) throw InputError("network width must be positive");
  if (!(lambda > 0.0)) throw InputError("lambda must be positive");
  if (!(learning_rate > 0.0)) throw InputError("learning rate must be positive");
  if (steps == 0) throw InputError("steps must be positive");
}

double TrainConfig::effective_init_std() const {
  return init_std > 0.0 ? init_std : std::pow(static_cast<double>(m), -0.25);
}

NetworkParams init_network(const TrainConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, cfg.effective_init_std());
  NetworkParams p;
  p.a.resize(cfg.m);
  p.w.resize(cfg.m);
  p.b.resize(cfg.m);
  for (std::size_t j = 0; j < cfg.m; ++j) {
    p.a[j] = normal(rng);
    p.w[j] = normal(rng);
    p.b[j] = normal(rng);
  }
  p.skip = cfg.skip_connection;
  return p;
}

LossBreakdown loss_breakdown(const NetworkParams& p, const Dataset& d, double lambda, bool penalize_biases) {
  LossBreakdown l;
  for (const auto& pt : d.points()) {
    const double r = p(pt.x) - pt.y;
    l.data += r * r;
  }
  for (std::size_t j = 0; j < p.width(); ++j) {
    l.reg_a += p.a[j] * p.a[j];
    l.reg_w += p.w[j] * p.w[j];
    l.reg_b += p.b[j] * p.b[j];
  }
  l.reg_a *= lambda;
  l.reg_w *= lambda;
  l.reg_b *= lambda;
  l.total = l.data + l.reg_a + l.reg_w + (penalize_biases ? l.reg_b : 0.0);
  return l;
}

namespace {

constexpr std::size_t kCheckEvery = 1000;

double objective(const NetworkParams& p, const Dataset& d, const TrainConfig& cfg) {
  return loss_breakdown(p, d, cfg.lambda, cfg.penalize_biases).total;
}

void gradient(const NetworkParams& p, const Dataset& d, const TrainConfig& cfg, NetworkParams& g) {
  const std::size_t m = p.width();
  g.a.assign(m, 0.0);
  g.w.assign(m, 0.0);
  g.b.assign(m, 0.0);
  g.a0 = g.b0 = 0.0;
  for (const auto& pt : d.points()) {
    const double r2 = 2.0 * (p(pt.x) - pt.y);
    for (std::size_t j = 0; j < m; ++j) {
      const double pre = p.w[j] * pt.x + p.b[j];
      if (pre <= 0.0) continue;  // relu'(0) = 0
      g.a[j] += r2 * pre;
      g.w[j] += r2 * p.a[j] * pt.x;
      g.b[j] += r2 * p.a[j];
    }
    if (p.skip) {
      g.a0 += r2 * pt.x;
      g.b0 += r2;
    }
  }
  const double l2 = 2.0 * cfg.lambda;
  for (std::size_t j = 0; j < m; ++j) {
    g.a[j] += l2 * p.a[j];
    g.w[j] += l2 * p.w[j];
    if (cfg.penalize_biases) g.b[j] += l2 * p.b[j];
  }
}

}  // namespace

TrainResult train_network(const Dataset& d, const TrainConfig& cfg) {
  cfg.validate();
  TrainResult res;
  NetworkParams p = init_network(cfg);
  NetworkParams g, trial;
  res.initial = loss_breakdown(p, d, cfg.lambda, cfg.penalize_biases);
  double loss = res.initial.total;
  if (!std::isfinite(loss)) throw ConvergenceError("initial loss is not finite");
  double lr = cfg.learning_rate;
  double checkpoint = loss;
  const std::size_t m = p.width();
  gradient(p, d, cfg, g);
  for (std::size_t step = 0; step < cfg.steps; ++step) {
    trial = p;
    for (std::size_t j = 0; j < m; ++j) {
      trial.a[j] -= lr * g.a[j];
      trial.w[j] -= lr * g.w[j];
      trial.b[j] -= lr * g.b[j];
    }
    if (p.skip) {
      trial.a0 -= lr * g.a0;
      trial.b0 -= lr * g.b0;
    }
    const double next = objective(trial, d, cfg);
    if (!std::isfinite(next)) {
      std::ostringstream msg;
      msg << "training diverged at step " << step;
      throw ConvergenceError(msg.str());
    }
    ++res.steps;
    std::swap(p, trial);
    loss = next;
    if ((step + 1) % kCheckEvery == 0) {
      if (loss > checkpoint) {
        lr *= 0.5;
        ++res.rejected_steps;
      }
      checkpoint = loss;
    }
    gradient(p, d, cfg, g);
  }
  res.params = std::move(p);
  res.final = loss_breakdown(res.params, d, cfg.lambda, cfg.penalize_biases);
  res.final_learning_rate = lr;
  return res;
}

std::size_t effective_kink_count(const NetworkParams& p, const Dataset& d, double tol_fraction, double merge_gap) {
  constexpr std::size_t kGrid = 2000;
  const double lo0 = d.x(0), hi0 = d.x(d.size() - 1);
  const double range = d.size() > 1 ? hi0 - lo0 : 1.0;
  const double lo = lo0 - 0.1 * range, hi = hi0 + 0.1 * range;
  const double h = (hi - lo) / double(kGrid - 1);
  std::vector<double> v(kGrid);
  for (std::size_t i = 0; i < kGrid; ++i) v[i] = p(lo + h * double(i));
  std::vector<double> mass(kGrid - 2);
  double total = 0.0;
  for (std::size_t i = 0; i + 2 < kGrid; ++i) {
    mass[i] = std::fabs(v[i + 2] - 2.0 * v[i + 1] + v[i]);
    total += mass[i];
  }
  if (total <= 1e-12 * (1.0 + std::fabs(v.front()) + std::fabs(v.back()))) return 0;
  const std::size_t gap_cells = static_cast<std::size_t>(merge_gap * range / h);
  std::size_t clusters = 0;
  std::size_t last_marked = 0;
  bool any = false;
  for (std::size_t i = 0; i < mass.size(); ++i) {
    if (mass[i] <= tol_fraction * total) continue;
    if (!any || i - last_marked > gap_cells + 1) ++clusters;
    any = true;
    last_marked = i;
  }
  return clusters;
}

NeuronScatter neuron_scatter(const NetworkParams& p, double tol) {
  NeuronScatter s;
  for (std::size_t j = 0; j < p.width(); ++j) {
    if (std::fabs(p.w[j]) > tol) {
      s.neurons.emplace_back(-p.b[j] / p.w[j], p.a[j]);
    } else {
      s.degenerate.push_back(j);
    }
  }
  return s;
}

}  // namespace minnorm
