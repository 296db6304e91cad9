#include "sfm/flow.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sfm/errors.hpp"
#include "sfm/rng.hpp"

namespace sfm {

namespace {

// Exact power-of-two test for the dyadic grid (dt = 2^-k, k >= 0).
bool is_dyadic(double dt) {
  if (!(dt > 0.0 && dt <= 1.0)) return false;
  const double k = -std::log2(dt);
  return std::abs(k - std::round(k)) < 1e-12 &&
         dt == std::exp2(-std::round(k));
}

// t must be m * step for integer m; both are exact binary fractions here.
bool on_grid(double t, double step) {
  const double m = t / step;
  return std::abs(m - std::round(m)) < 1e-12;
}

void check_pair_shapes(const ComplexSpectrogram& a,
                       const ComplexSpectrogram& b, const char* what) {
  if (!a.same_shape(b))
    throw ContractError(std::string("shape mismatch between ") + what);
}

}  // namespace

void validate_query(const StepQuery& q, double dt_min, double dt_max) {
  if (!is_dyadic(q.dt) || q.dt < dt_min - 1e-15 || q.dt > dt_max + 1e-15)
    throw ContractError("query dt is not a power of two within bounds");
  if (q.kind == TargetKind::kFlowMatching) {
    if (q.dt != dt_min)
      throw ContractError("flow-matching queries must use dt_min");
    if (!on_grid(q.t, dt_min) || q.t < 0.0 || q.t + dt_min > 1.0 + 1e-15)
      throw ContractError("flow-matching t off the dt_min grid");
  } else {
    if (!on_grid(q.t, 2.0 * q.dt) || q.t < 0.0 || q.t + 2.0 * q.dt > 1.0 + 1e-15)
      throw ContractError("self-consistency t off the 2*dt grid");
  }
}

std::vector<StepQuery> sample_step_queries(int batch_size, double rate_sc,
                                           double rho, double dt_min,
                                           double dt_max, Rng& rng) {
  if (batch_size <= 0) throw ContractError("batch_size must be positive");
  if (!(rate_sc >= 0.0 && rate_sc <= 1.0))
    throw ContractError("rate_sc must lie in [0,1]");
  if (!(rho >= 0.0 && rho <= 1.0)) throw ContractError("rho must lie in [0,1]");
  if (!is_dyadic(dt_min) || !is_dyadic(dt_max) || dt_min > dt_max ||
      dt_max > 0.5)
    throw ConfigError("dt bounds must be powers of two with dt_min <= dt_max <= 1/2");

  const int k_min = static_cast<int>(std::round(-std::log2(dt_max)));
  const int k_max = static_cast<int>(std::round(-std::log2(dt_min)));
  const int num_sc =
      static_cast<int>(std::ceil(rate_sc * static_cast<double>(batch_size)));

  std::vector<StepQuery> queries;
  queries.reserve(static_cast<std::size_t>(batch_size));
  for (int i = 0; i < num_sc; ++i) {
    StepQuery q;
    q.kind = TargetKind::kSelfConsistency;
    const int k = static_cast<int>(rng.uniform_int(k_min, k_max));
    q.dt = std::exp2(-k);
    // Admissible starts: multiples of 2*dt with t + 2*dt <= 1.
    const std::int64_t slots = static_cast<std::int64_t>(std::round(1.0 / (2.0 * q.dt)));
    q.t = 2.0 * q.dt * static_cast<double>(rng.uniform_int(0, slots - 1));
    if (rng.uniform01() < rho) q.t = 0.0;  // in-place remap to the entry state
    queries.push_back(q);
  }
  const std::int64_t fm_slots = static_cast<std::int64_t>(std::round(1.0 / dt_min));
  for (int i = num_sc; i < batch_size; ++i) {
    StepQuery q;
    q.kind = TargetKind::kFlowMatching;
    q.dt = dt_min;
    q.t = dt_min * static_cast<double>(rng.uniform_int(0, fm_slots - 1));
    queries.push_back(q);
  }
  return queries;
}

PathSample interpolate(const ComplexSpectrogram& x0,
                       const ComplexSpectrogram& x1, double t) {
  check_pair_shapes(x0, x1, "path endpoints");
  if (!(t >= 0.0 && t <= 1.0)) throw ContractError("interpolation time outside [0,1]");
  PathSample s;
  s.x0 = x0;
  s.x1 = x1;
  s.xt = x1;
  s.xt.bins = (1.0 - t) * x1.bins + t * x0.bins;
  s.v_target = x0;
  s.v_target.bins = x0.bins - x1.bins;
  return s;
}

namespace {

// Shared loss plumbing: residual -> mean-square value plus (optionally)
// backprop of the quadratic cotangent through the taped branch.
double mean_square(const Eigen::MatrixXcd& r) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    acc += std::norm(r.data()[i]);
  }
  return acc / (2.0 * static_cast<double>(r.size()));
}

Eigen::MatrixXd quadratic_cotangent(const Eigen::MatrixXcd& residual,
                                    double scale) {
  // d/d out of scale * mean |out - target|^2 over 2*F*T real components.
  const Eigen::Index f = residual.rows();
  Eigen::MatrixXd cot(2 * f, residual.cols());
  const double c = scale / static_cast<double>(residual.size());
  for (Eigen::Index col = 0; col < residual.cols(); ++col) {
    for (Eigen::Index k = 0; k < f; ++k) {
      cot(k, col) = c * residual(k, col).real();
      cot(f + k, col) = c * residual(k, col).imag();
    }
  }
  return cot;
}

}  // namespace

double fm_loss(VelocityNet& net, std::span<const FmExample> batch,
               double dt_min, double grad_weight) {
  if (batch.empty()) return 0.0;
  double total = 0.0;
  const double per_item = 1.0 / static_cast<double>(batch.size());
  for (const FmExample& ex : batch) {
    check_pair_shapes(*ex.xt, *ex.v_target, "state and target velocity");
    Tape tape;
    ComplexSpectrogram pred =
        net.forward(*ex.xt, ex.t, dt_min, *ex.y,
                    grad_weight != 0.0 ? &tape : nullptr);
    Eigen::MatrixXcd residual = pred.bins - ex.v_target->bins;
    const double item_loss = mean_square(residual);
    if (!std::isfinite(item_loss))
      throw TrainError("non-finite flow-matching loss", 0);
    total += per_item * item_loss;
    if (grad_weight != 0.0)
      net.backward(tape, quadratic_cotangent(residual, grad_weight * per_item));
  }
  return total;
}

double sc_residual(const VelocityNet& net, const ComplexSpectrogram& xt,
                   double t, double dt, const ComplexSpectrogram& y) {
  ComplexSpectrogram v1 = net.forward(xt, t, dt, y);
  ComplexSpectrogram x2 = xt;
  x2.bins += dt * v1.bins;
  ComplexSpectrogram v2 = net.forward(x2, t + dt, dt, y);
  ComplexSpectrogram pred = net.forward(xt, t, 2.0 * dt, y);
  Eigen::MatrixXcd residual = pred.bins - 0.5 * (v1.bins + v2.bins);
  return mean_square(residual);
}

double sc_loss(VelocityNet& net, std::span<const ScExample> batch,
               double grad_weight) {
  if (batch.empty()) return 0.0;
  double total = 0.0;
  const double per_item = 1.0 / static_cast<double>(batch.size());
  for (const ScExample& ex : batch) {
    if (!(ex.dt > 0.0 && ex.t >= 0.0 && ex.t + 2.0 * ex.dt <= 1.0 + 1e-15))
      throw ContractError("inadmissible (t, dt) for a composite step");
    // Frozen target: two chained dt steps, no tape.
    ComplexSpectrogram v1 = net.forward(*ex.xt, ex.t, ex.dt, *ex.y);
    ComplexSpectrogram x2 = *ex.xt;
    x2.bins += ex.dt * v1.bins;
    ComplexSpectrogram v2 = net.forward(x2, ex.t + ex.dt, ex.dt, *ex.y);
    Eigen::MatrixXcd target = 0.5 * (v1.bins + v2.bins);

    Tape tape;
    ComplexSpectrogram pred =
        net.forward(*ex.xt, ex.t, 2.0 * ex.dt, *ex.y,
                    grad_weight != 0.0 ? &tape : nullptr);
    Eigen::MatrixXcd residual = pred.bins - target;
    const double item_loss = mean_square(residual);
    if (!std::isfinite(item_loss))
      throw TrainError("non-finite self-consistency loss", 0);
    total += per_item * item_loss;
    if (grad_weight != 0.0)
      net.backward(tape, quadratic_cotangent(residual, grad_weight * per_item));
  }
  return total;
}

std::vector<LossBreakdown> train_epoch(VelocityNet& net, AdamState& opt,
                                       std::span<const TrainItem> items,
                                       const PriorSpec& prior,
                                       const TrainHyper& hyper, Rng& rng) {
  if (items.empty()) throw ContractError("empty training set");
  if (hyper.batch_size <= 0) throw ConfigError("batch_size must be positive");

  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), 0);
  // Fisher-Yates with the epoch stream; std::shuffle is implementation-defined.
  for (std::size_t i = order.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
    std::swap(order[i - 1], order[j]);
  }

  std::vector<LossBreakdown> history;
  const std::size_t batches =
      (items.size() + static_cast<std::size_t>(hyper.batch_size) - 1) /
      static_cast<std::size_t>(hyper.batch_size);
  for (std::size_t b = 0; b < batches; ++b) {
    const std::size_t begin = b * static_cast<std::size_t>(hyper.batch_size);
    const std::size_t count =
        std::min(static_cast<std::size_t>(hyper.batch_size),
                 items.size() - begin);

    const auto queries =
        sample_step_queries(static_cast<int>(count), hyper.rate_sc, hyper.rho,
                            hyper.dt_min, hyper.dt_max, rng);

    // Materialize the interpolants for this batch.
    std::vector<PathSample> paths;
    paths.reserve(count);
    std::vector<FmExample> fm_batch;
    std::vector<ScExample> sc_batch;
    for (std::size_t i = 0; i < count; ++i) {
      const TrainItem& item = items[order[begin + i]];
      const StepQuery& q = queries[i];
      ComplexSpectrogram x1 = sample_prior(prior, item.noisy, rng);
      paths.push_back(interpolate(item.clean, x1, q.t));
      const PathSample& p = paths.back();
      if (q.kind == TargetKind::kFlowMatching) {
        fm_batch.push_back({&p.xt, &p.v_target, &item.noisy, q.t});
      } else {
        sc_batch.push_back({&p.xt, &item.noisy, q.t, q.dt});
      }
    }

    LossBreakdown entry;
    entry.lambda_sc = hyper.lambda_sc;
    entry.rate_sc = hyper.rate_sc;
    entry.rho = hyper.rho;
    try {
      entry.fm = fm_loss(net, fm_batch, hyper.dt_min, 1.0);
      entry.sc = sc_loss(net, sc_batch, hyper.lambda_sc);
    } catch (const TrainError& e) {
      throw TrainError(std::string(e.what()) + " in batch " + std::to_string(b),
                       static_cast<long>(b));
    }
    entry.total = entry.fm + hyper.lambda_sc * entry.sc;
    if (!std::isfinite(entry.total))
      throw TrainError("non-finite total loss in batch " + std::to_string(b),
                       static_cast<long>(b));
    adam_step(opt, net);
    history.push_back(entry);
  }
  return history;
}

}  // namespace sfm
