#include "sfm/net.hpp"

#include <cmath>

#include "sfm/errors.hpp"
#include "sfm/rng.hpp"

namespace sfm {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using ConstMat = Eigen::Map<const MatrixXd>;
using ConstVec = Eigen::Map<const VectorXd>;
using MutMat = Eigen::Map<MatrixXd>;
using MutVec = Eigen::Map<VectorXd>;

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline double silu(double x) { return x * sigmoid(x); }

inline double silu_deriv(double x) {
  const double s = sigmoid(x);
  return s * (1.0 + x * (1.0 - s));
}

}  // namespace

TimeEmbedding::TimeEmbedding(int dim_in, double min_freq, double max_freq)
    : dim(dim_in) {
  if (dim <= 0 || dim % 2 != 0)
    throw ContractError("embedding dim must be even and positive");
  const int half = dim / 2;
  freqs.resize(static_cast<std::size_t>(half));
  for (int i = 0; i < half; ++i) {
    const double u = half == 1 ? 0.0 : static_cast<double>(i) / (half - 1);
    freqs[static_cast<std::size_t>(i)] =
        min_freq * std::pow(max_freq / min_freq, u);
  }
}

void TimeEmbedding::write(double value, double* out) const {
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    const double a = freqs[i] * value;
    out[2 * i] = std::sin(a);
    out[2 * i + 1] = std::cos(a);
  }
}

Eigen::VectorXd TimeEmbedding::operator()(double value) const {
  VectorXd v(dim);
  write(value, v.data());
  return v;
}

VelocityNet::Layout VelocityNet::make_layout(const NetConfig& cfg) {
  Layout l;
  std::ptrdiff_t off = 0;
  auto take = [&off](std::ptrdiff_t count) {
    const std::ptrdiff_t at = off;
    off += count;
    return at;
  };
  const std::ptrdiff_t in = cfg.input_dim();
  const std::ptrdiff_t h = cfg.hidden;
  const std::ptrdiff_t out = cfg.output_dim();
  l.w_in = take(h * in);
  l.b_in = take(h);
  for (int b = 0; b < cfg.blocks; ++b) {
    l.w1.push_back(take(h * h));
    l.b1.push_back(take(h));
    l.w2.push_back(take(h * h));
    l.b2.push_back(take(h));
  }
  l.w_out = take(out * h);
  l.b_out = take(out);
  l.total = off;
  return l;
}

VelocityNet::VelocityNet(const NetConfig& cfg, std::uint64_t init_seed)
    : cfg_(cfg),
      layout_(make_layout(cfg)),
      embed_t_(cfg.embed_dim, 1.0, 64.0),
      embed_dt_(cfg.embed_dim, 1.0, 64.0) {
  if (cfg.freq_bins <= 0 || cfg.context < 0 || cfg.hidden <= 0 ||
      cfg.blocks <= 0 || cfg.embed_dim <= 0)
    throw ConfigError("invalid network configuration");
  params_.assign(static_cast<std::size_t>(layout_.total), 0.0);
  grad_.assign(params_.size(), 0.0);

  Rng rng(init_seed);
  auto fill_gaussian = [&rng, this](std::ptrdiff_t off, std::ptrdiff_t count,
                                    double stddev) {
    for (std::ptrdiff_t i = 0; i < count; ++i)
      params_[static_cast<std::size_t>(off + i)] = stddev * rng.normal();
  };
  const std::ptrdiff_t in = cfg.input_dim();
  const std::ptrdiff_t h = cfg.hidden;
  fill_gaussian(layout_.w_in, h * in, std::sqrt(2.0 / static_cast<double>(in)));
  const double block_std =
      std::sqrt(2.0 / static_cast<double>(h)) / std::sqrt(2.0 * cfg.blocks);
  for (int b = 0; b < cfg.blocks; ++b) {
    fill_gaussian(layout_.w1[static_cast<std::size_t>(b)], h * h,
                  std::sqrt(2.0 / static_cast<double>(h)));
    fill_gaussian(layout_.w2[static_cast<std::size_t>(b)], h * h, block_std);
  }
  // Output layer stays zero: a fresh model predicts zero displacement.
}

void VelocityNet::zero_grad() {
  std::fill(grad_.begin(), grad_.end(), 0.0);
}

Eigen::MatrixXd VelocityNet::assemble_input(const ComplexSpectrogram& x,
                                            double t, double dt,
                                            const ComplexSpectrogram& y) const {
  const int f = cfg_.freq_bins;
  const int ctx = cfg_.context;
  const int taps = 2 * ctx + 1;
  const Eigen::Index frames = x.bins.cols();

  MatrixXd in(cfg_.input_dim(), frames);
  const std::ptrdiff_t y_base = 2 * f * taps;
  for (Eigen::Index col = 0; col < frames; ++col) {
    double* dst = in.data() + col * in.rows();
    for (int j = -ctx; j <= ctx; ++j) {
      const Eigen::Index src = col + j;
      const std::ptrdiff_t tap = (j + ctx) * 2 * f;
      if (src < 0 || src >= frames) {
        std::fill(dst + tap, dst + tap + 2 * f, 0.0);
        std::fill(dst + y_base + tap, dst + y_base + tap + 2 * f, 0.0);
        continue;
      }
      const std::complex<double>* xc = x.bins.data() + src * f;
      const std::complex<double>* yc = y.bins.data() + src * f;
      for (int k = 0; k < f; ++k) {
        dst[tap + k] = xc[k].real();
        dst[tap + f + k] = xc[k].imag();
        dst[y_base + tap + k] = yc[k].real();
        dst[y_base + tap + f + k] = yc[k].imag();
      }
    }
    double* cond = dst + 2 * y_base;
    embed_t_.write(t, cond);
    embed_dt_.write(std::log2(dt), cond + cfg_.embed_dim);
  }
  return in;
}

ComplexSpectrogram VelocityNet::forward(const ComplexSpectrogram& x, double t,
                                        double dt, const ComplexSpectrogram& y,
                                        Tape* tape) const {
  if (x.freq_bins() != cfg_.freq_bins || y.freq_bins() != cfg_.freq_bins)
    throw ContractError("spectrogram bin count does not match the network");
  if (!x.same_shape(y))
    throw ContractError("state and conditioner frame counts differ");
  if (!(t >= 0.0 && t <= 1.0)) throw ContractError("t must lie in [0,1]");
  if (!(dt > 0.0 && dt <= 1.0)) throw ContractError("dt must lie in (0,1]");

  const std::ptrdiff_t h = cfg_.hidden;
  const std::ptrdiff_t in_dim = cfg_.input_dim();
  const std::ptrdiff_t out_dim = cfg_.output_dim();
  const double* p = params_.data();

  MatrixXd input = assemble_input(x, t, dt, y);
  const Eigen::Index frames = input.cols();

  ConstMat w_in(p + layout_.w_in, h, in_dim);
  ConstVec b_in(p + layout_.b_in, h);
  MatrixXd hcur = (w_in * input).colwise() + b_in;

  if (tape) {
    tape->input = input;
    tape->h.clear();
    tape->preact.clear();
    tape->act.clear();
    tape->h.push_back(hcur);
  }
  for (int b = 0; b < cfg_.blocks; ++b) {
    ConstMat w1(p + layout_.w1[static_cast<std::size_t>(b)], h, h);
    ConstVec b1(p + layout_.b1[static_cast<std::size_t>(b)], h);
    ConstMat w2(p + layout_.w2[static_cast<std::size_t>(b)], h, h);
    ConstVec b2(p + layout_.b2[static_cast<std::size_t>(b)], h);
    MatrixXd a = (w1 * hcur).colwise() + b1;
    MatrixXd u = a.unaryExpr([](double v) { return silu(v); });
    hcur.noalias() += w2 * u;
    hcur.colwise() += b2;
    if (tape) {
      tape->preact.push_back(std::move(a));
      tape->act.push_back(std::move(u));
      tape->h.push_back(hcur);
    }
  }

  ConstMat w_out(p + layout_.w_out, out_dim, h);
  ConstVec b_out(p + layout_.b_out, out_dim);
  MatrixXd out = (w_out * hcur).colwise() + b_out;

  ComplexSpectrogram vel;
  vel.config = x.config;
  vel.num_samples = x.num_samples;
  vel.sample_rate = x.sample_rate;
  vel.bins.resize(cfg_.freq_bins, frames);
  for (Eigen::Index col = 0; col < frames; ++col) {
    for (int k = 0; k < cfg_.freq_bins; ++k) {
      vel.bins(k, col) =
          std::complex<double>(out(k, col), out(cfg_.freq_bins + k, col));
    }
  }
  return vel;
}

void VelocityNet::backward(const Tape& tape, const MatrixXd& out_cotangent) {
  if (tape.h.empty() || tape.input.size() == 0)
    throw ContractError("backward called without a recorded forward pass");
  if (out_cotangent.rows() != cfg_.output_dim() ||
      out_cotangent.cols() != tape.input.cols())
    throw ContractError("cotangent shape does not match the recorded forward");

  const std::ptrdiff_t h = cfg_.hidden;
  const double* p = params_.data();
  double* g = grad_.data();

  // Output layer.
  {
    MutMat gw(g + layout_.w_out, cfg_.output_dim(), h);
    MutVec gb(g + layout_.b_out, cfg_.output_dim());
    gw.noalias() += out_cotangent * tape.h.back().transpose();
    gb.noalias() += out_cotangent.rowwise().sum();
  }
  ConstMat w_out(p + layout_.w_out, cfg_.output_dim(), h);
  MatrixXd gh = w_out.transpose() * out_cotangent;

  // Residual blocks, reversed: h_{b+1} = h_b + W2 silu(W1 h_b + b1) + b2.
  for (int b = cfg_.blocks - 1; b >= 0; --b) {
    const auto bi = static_cast<std::size_t>(b);
    ConstMat w1(p + layout_.w1[bi], h, h);
    ConstMat w2(p + layout_.w2[bi], h, h);
    MutMat gw1(g + layout_.w1[bi], h, h);
    MutVec gb1(g + layout_.b1[bi], h);
    MutMat gw2(g + layout_.w2[bi], h, h);
    MutVec gb2(g + layout_.b2[bi], h);

    gw2.noalias() += gh * tape.act[bi].transpose();
    gb2.noalias() += gh.rowwise().sum();
    MatrixXd gu = w2.transpose() * gh;
    MatrixXd ga =
        gu.array() * tape.preact[bi].unaryExpr([](double v) {
                        return silu_deriv(v);
                      }).array();
    gw1.noalias() += ga * tape.h[bi].transpose();
    gb1.noalias() += ga.rowwise().sum();
    gh.noalias() += w1.transpose() * ga;
  }

  MutMat gw_in(g + layout_.w_in, h, cfg_.input_dim());
  MutVec gb_in(g + layout_.b_in, h);
  gw_in.noalias() += gh * tape.input.transpose();
  gb_in.noalias() += gh.rowwise().sum();
}

bool VelocityNet::grad_is_finite() const {
  for (double v : grad_)
    if (!std::isfinite(v)) return false;
  return true;
}

void VelocityNet::randomize_all(Rng& rng, double scale) {
  for (double& v : params_) v = scale * rng.normal();
}

AdamState::AdamState(const VelocityNet& net, double learning_rate)
    : lr(learning_rate),
      m(net.num_params(), 0.0),
      v(net.num_params(), 0.0) {}

void adam_step(AdamState& opt, VelocityNet& net) {
  auto& params = net.params();
  auto& grad = net.grad();
  if (opt.m.size() != params.size() || opt.v.size() != params.size())
    throw ContractError("optimizer state does not match the parameter vector");
  const long step = opt.step + 1;
  for (std::size_t i = 0; i < grad.size(); ++i) {
    if (!std::isfinite(grad[i]))
      throw TrainError("non-finite gradient at parameter " + std::to_string(i) +
                           " before optimizer step " + std::to_string(step),
                       step);
  }
  opt.step = step;
  const double bc1 = 1.0 - std::pow(opt.beta1, static_cast<double>(step));
  const double bc2 = 1.0 - std::pow(opt.beta2, static_cast<double>(step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double gi = grad[i];
    opt.m[i] = opt.beta1 * opt.m[i] + (1.0 - opt.beta1) * gi;
    opt.v[i] = opt.beta2 * opt.v[i] + (1.0 - opt.beta2) * gi * gi;
    const double mhat = opt.m[i] / bc1;
    const double vhat = opt.v[i] / bc2;
    params[i] -= opt.lr * mhat / (std::sqrt(vhat) + opt.eps);
  }
  net.zero_grad();
}

}  // namespace sfm
