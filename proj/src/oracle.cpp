#include "sfm/oracle.hpp"

#include <Eigen/Cholesky>

#include "sfm/errors.hpp"
#include "sfm/rng.hpp"

namespace sfm {
namespace oracle {

Eigen::VectorXd exact_pair_velocity(const Eigen::VectorXd& x0,
                                    const Eigen::VectorXd& x1) {
  if (x0.size() != x1.size()) throw ContractError("endpoint dimensions differ");
  Eigen::VectorXd v(x0.size());
  for (Eigen::Index i = 0; i < x0.size(); ++i) v[i] = x0[i] - x1[i];
  return v;
}

Moments marginal_flow_moments(const GaussianPair& pair, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw ContractError("time outside [0,1]");
  Moments m;
  m.mean = (1.0 - t) * pair.mean1 + t * pair.mean0;
  m.cov = (1.0 - t) * (1.0 - t) * pair.cov1 + t * t * pair.cov0;
  return m;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> sample_pair(
    const GaussianPair& pair, Rng& rng) {
  const auto draw = [&rng](const Eigen::VectorXd& mean,
                           const Eigen::MatrixXd& cov) {
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
      throw ContractError("covariance is not positive-definite");
    Eigen::VectorXd z(mean.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
    return Eigen::VectorXd(mean + llt.matrixL() * z);
  };
  auto x0 = draw(pair.mean0, pair.cov0);
  auto x1 = draw(pair.mean1, pair.cov1);
  return {std::move(x0), std::move(x1)};
}

double brute_force_sc_residual(const VelocityNet& net,
                               const ComplexSpectrogram& xt, double t,
                               double dt, const ComplexSpectrogram& y) {
  const ComplexSpectrogram v1 = net.forward(xt, t, dt, y);

  ComplexSpectrogram x2 = xt;
  for (int col = 0; col < xt.frames(); ++col) {
    for (int k = 0; k < xt.freq_bins(); ++k) {
      const double re = xt.bins(k, col).real() + dt * v1.bins(k, col).real();
      const double im = xt.bins(k, col).imag() + dt * v1.bins(k, col).imag();
      x2.bins(k, col) = std::complex<double>(re, im);
    }
  }
  const ComplexSpectrogram v2 = net.forward(x2, t + dt, dt, y);
  const ComplexSpectrogram pred = net.forward(xt, t, 2.0 * dt, y);

  double acc = 0.0;
  long count = 0;
  for (int col = 0; col < xt.frames(); ++col) {
    for (int k = 0; k < xt.freq_bins(); ++k) {
      const double tr = 0.5 * (v1.bins(k, col).real() + v2.bins(k, col).real());
      const double ti = 0.5 * (v1.bins(k, col).imag() + v2.bins(k, col).imag());
      const double dr = pred.bins(k, col).real() - tr;
      const double di = pred.bins(k, col).imag() - ti;
      acc += dr * dr + di * di;
      count += 2;
    }
  }
  return acc / static_cast<double>(count);
}

}  // namespace oracle
}  // namespace sfm
