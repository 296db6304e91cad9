#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sfm/errors.hpp"
#include "sfm/net.hpp"
#include "sfm/priors.hpp"
#include "sfm/stft.hpp"

namespace sfm {

class Rng;

// Uniform K-step schedule on the internal clock (0 at the prior endpoint,
// 1 at the clean endpoint): step = 1/K, times k/K for k = 0..K-1. For K a
// power of two these are exact binary fractions and K * step == 1 exactly.
struct OdeSchedule {
  int num_steps = 1;
  double step = 1.0;
  std::vector<double> times;

  static OdeSchedule uniform(int num_steps);
};

struct EnhanceResult {
  ComplexSpectrogram estimate;
  int nfe = 0;  // network evaluations performed; equals K on success
};

// Deterministic ODE inference: draw the start point from the prior, then
// apply K uniform updates x += step * field(x, t_k, step, y). The field is
// any callable with the network's signature; the network overload below is
// the production path. Throws InferError carrying the failing step index
// and the evaluations completed if the state turns non-finite.
template <typename Field>
EnhanceResult enhance_with_field(Field&& field, const ComplexSpectrogram& y,
                                 const PriorSpec& prior, int num_steps,
                                 Rng& rng) {
  const OdeSchedule sched = OdeSchedule::uniform(num_steps);
  ComplexSpectrogram x = sample_prior(prior, y, rng);
  int nfe = 0;
  for (int k = 0; k < sched.num_steps; ++k) {
    ComplexSpectrogram v = field(x, sched.times[static_cast<std::size_t>(k)],
                                 sched.step, y);
    ++nfe;
    x.bins += sched.step * v.bins;
    if (!x.bins.allFinite())
      throw InferError("non-finite state after update " + std::to_string(k),
                       k, nfe);
  }
  return {std::move(x), nfe};
}

EnhanceResult enhance(const VelocityNet& net, const ComplexSpectrogram& y,
                      const PriorSpec& prior, int num_steps, Rng& rng);

// Analytic SDE pieces for the reference stepper. No learned quantities:
// the score slot takes closed-form expressions only.
struct SdeCoeffs {
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)> drift;
  std::function<double(double)> diffusion;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)> score;
};

// One Euler-Maruyama update of the reverse-time dynamics, stepping from t_k
// down to t_k - dt:
//   x <- x - dt * (drift(x, t_k) - g(t_k)^2 * score(x, t_k)) + g(t_k) * sqrt(dt) * z
// with z standard normal. When g(t_k) == 0 no randomness is consumed and
// the update reduces bit-exactly to euler_step_backward on the same drift.
Eigen::VectorXd euler_maruyama_step(const Eigen::VectorXd& x, double t_k,
                                    double dt, const SdeCoeffs& coeffs,
                                    Rng& rng);

// Deterministic backward Euler update x - dt * drift(x, t_k).
Eigen::VectorXd euler_step_backward(
    const Eigen::VectorXd& x, double t_k, double dt,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)>& drift);

}  // namespace sfm
