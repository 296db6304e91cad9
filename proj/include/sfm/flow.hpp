#pragma once

#include <span>
#include <vector>

#include "sfm/net.hpp"
#include "sfm/priors.hpp"
#include "sfm/stft.hpp"

namespace sfm {

class Rng;

// Which training target a drawn (t, dt) pair feeds.
enum class TargetKind { kFlowMatching, kSelfConsistency };

// A point on the dyadic training grid. dt is a power of two in
// [dt_min, dt_max]. Flow-matching queries run at dt = dt_min with t any
// multiple of dt_min such that t + dt_min <= 1; self-consistency queries
// need room for a composite 2*dt step, so t is a multiple of 2*dt with
// t + 2*dt <= 1.
struct StepQuery {
  double t = 0.0;
  double dt = 0.0;
  TargetKind kind = TargetKind::kFlowMatching;
};

// Throws ContractError if the query violates the grid rules above.
void validate_query(const StepQuery& q, double dt_min, double dt_max);

// Draws batch_size queries: ceil(rate_sc * batch_size) self-consistency
// queries first, flow-matching queries after. For self-consistency, dt is
// uniform over the powers of two in [dt_min, dt_max] and t uniform over the
// admissible grid given dt; with probability rho the pair is remapped in
// place to (0, dt). dt bounds must be powers of two with
// dt_min <= dt_max <= 1/2.
//
// rho is accepted anywhere in [0,1] so tests can force the remap; training
// configurations are validated to the supported [0, 0.2] range separately.
std::vector<StepQuery> sample_step_queries(int batch_size, double rate_sc,
                                           double rho, double dt_min,
                                           double dt_max, Rng& rng);

// Linear interpolation between a coupled endpoint pair. Time runs from 0 at
// the prior endpoint x1 to 1 at the clean endpoint x0:
//   xt = (1 - t) * x1 + t * x0,   v_target = x0 - x1.
// The target velocity is constant along the path.
struct PathSample {
  ComplexSpectrogram x0;        // clean endpoint
  ComplexSpectrogram x1;        // prior endpoint
  ComplexSpectrogram xt;        // interpolant at the query time
  ComplexSpectrogram v_target;  // x0 - x1
};

PathSample interpolate(const ComplexSpectrogram& x0,
                       const ComplexSpectrogram& x1, double t);

// One flow-matching regression example: match the net's velocity at
// (xt, t, dt_min) against the path's constant target velocity.
struct FmExample {
  const ComplexSpectrogram* xt;
  const ComplexSpectrogram* v_target;
  const ComplexSpectrogram* y;
  double t;
};

// One self-consistency example: the 2*dt prediction at (xt, t) must match
// the frozen average of two chained dt predictions.
struct ScExample {
  const ComplexSpectrogram* xt;
  const ComplexSpectrogram* y;
  double t;
  double dt;
};

// Mean over the batch and over all real/imag components of the squared
// velocity error. grad_weight scales the gradient contribution accumulated
// into net.grad(); pass 0 to evaluate the loss only.
double fm_loss(VelocityNet& net, std::span<const FmExample> batch,
               double dt_min, double grad_weight);

// Squared deviation from step-halving self-consistency. The target
//   0.5 * f(xt, t, dt) + 0.5 * f(xt + dt * f(xt, t, dt), t + dt, dt)
// is treated as a constant (no gradient flows through it); only the 2*dt
// branch is differentiated.
double sc_loss(VelocityNet& net, std::span<const ScExample> batch,
               double grad_weight);

// Per-example mean-square self-consistency residual (no gradients).
double sc_residual(const VelocityNet& net, const ComplexSpectrogram& xt,
                   double t, double dt, const ComplexSpectrogram& y);

// One batch's loss record. total = fm + lambda_sc * sc.
struct LossBreakdown {
  double fm = 0.0;
  double sc = 0.0;
  double total = 0.0;
  double lambda_sc = 0.0;
  double rate_sc = 0.0;
  double rho = 0.0;
};

struct TrainHyper {
  double dt_min = 1.0 / 128.0;
  double dt_max = 0.5;
  double rate_sc = 0.25;
  double lambda_sc = 0.1;
  double rho = 0.1;
  int batch_size = 16;
};

// One training utterance: clean/noisy spectrogram pair.
struct TrainItem {
  std::string id;
  ComplexSpectrogram clean;
  ComplexSpectrogram noisy;
};

// One pass over the items in a seeded shuffled order. Every batch draws its
// step queries and prior endpoints from `rng`, accumulates gradients of
// fm + lambda_sc * sc, and applies one optimizer update. Returns one
// LossBreakdown per batch. Throws TrainError (with the batch index) if a
// loss turns non-finite.
std::vector<LossBreakdown> train_epoch(VelocityNet& net, AdamState& opt,
                                       std::span<const TrainItem> items,
                                       const PriorSpec& prior,
                                       const TrainHyper& hyper, Rng& rng);

}  // namespace sfm
