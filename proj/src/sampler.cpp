#include "sfm/sampler.hpp"

#include <cmath>

#include "sfm/errors.hpp"
#include "sfm/rng.hpp"

namespace sfm {

OdeSchedule OdeSchedule::uniform(int num_steps) {
  if (num_steps < 1) throw ContractError("step count must be >= 1");
  OdeSchedule s;
  s.num_steps = num_steps;
  s.step = 1.0 / static_cast<double>(num_steps);
  s.times.resize(static_cast<std::size_t>(num_steps));
  for (int k = 0; k < num_steps; ++k)
    s.times[static_cast<std::size_t>(k)] =
        static_cast<double>(k) / static_cast<double>(num_steps);
  return s;
}

EnhanceResult enhance(const VelocityNet& net, const ComplexSpectrogram& y,
                      const PriorSpec& prior, int num_steps, Rng& rng) {
  return enhance_with_field(
      [&net](const ComplexSpectrogram& x, double t, double dt,
             const ComplexSpectrogram& cond) {
        return net.forward(x, t, dt, cond);
      },
      y, prior, num_steps, rng);
}

Eigen::VectorXd euler_maruyama_step(const Eigen::VectorXd& x, double t_k,
                                    double dt, const SdeCoeffs& coeffs,
                                    Rng& rng) {
  if (!(dt > 0.0)) throw ContractError("step size must be positive");
  if (t_k - dt < -1e-12) throw ContractError("step would cross t = 0");
  const double g = coeffs.diffusion(t_k);
  if (g < 0.0) throw ContractError("diffusion schedule must be non-negative");

  Eigen::VectorXd drift = coeffs.drift(x, t_k);
  if (g != 0.0) drift -= (g * g) * coeffs.score(x, t_k);
  Eigen::VectorXd next = x - dt * drift;
  if (g != 0.0) {
    const double amp = g * std::sqrt(dt);
    for (Eigen::Index i = 0; i < next.size(); ++i) next[i] += amp * rng.normal();
  }
  return next;
}

Eigen::VectorXd euler_step_backward(
    const Eigen::VectorXd& x, double t_k, double dt,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)>& drift) {
  if (!(dt > 0.0)) throw ContractError("step size must be positive");
  return x - dt * drift(x, t_k);
}

}  // namespace sfm
