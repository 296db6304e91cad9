#pragma once

#include <Eigen/Core>

#include "sfm/net.hpp"
#include "sfm/stft.hpp"

namespace sfm {

class Rng;

// Independent reference computations used by tests and the `oracle` CLI
// subcommand. Nothing here shares arithmetic helpers with the production
// path: agreement between the two is evidence, not tautology.
namespace oracle {

// Small Gaussian endpoint pair (means and covariances) for transport checks.
struct GaussianPair {
  Eigen::VectorXd mean0, mean1;
  Eigen::MatrixXd cov0, cov1;  // symmetric positive-definite
};

// Conditional target velocity of a coupled endpoint pair under the linear
// path, with time 0 at the prior endpoint: x0 - x1.
Eigen::VectorXd exact_pair_velocity(const Eigen::VectorXd& x0,
                                    const Eigen::VectorXd& x1);

struct Moments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

// Closed-form marginal moments of the linear interpolant between
// independently drawn endpoints:
//   mean(t) = (1-t) mean1 + t mean0,  cov(t) = (1-t)^2 cov1 + t^2 cov0.
Moments marginal_flow_moments(const GaussianPair& pair, double t);

// Draws an independent (x0, x1) endpoint pair from the Gaussian pair.
std::pair<Eigen::VectorXd, Eigen::VectorXd> sample_pair(
    const GaussianPair& pair, Rng& rng);

// Self-consistency residual recomputed with deliberately naive scalar
// loops (same network, independent composition arithmetic): mean square of
//   f(x, t, 2dt) - [ f(x, t, dt) + f(x + dt f(x, t, dt), t + dt, dt) ] / 2
// over all real/imag components.
double brute_force_sc_residual(const VelocityNet& net,
                               const ComplexSpectrogram& xt, double t,
                               double dt, const ComplexSpectrogram& y);

}  // namespace oracle
}  // namespace sfm
