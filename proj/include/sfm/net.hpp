#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "sfm/stft.hpp"

namespace sfm {

class Rng;

// Sinusoidal features of a scalar over a geometric frequency ladder.
// Output layout: [sin(f_0 v), cos(f_0 v), sin(f_1 v), cos(f_1 v), ...].
struct TimeEmbedding {
  int dim;                    // even, = 2 * freqs.size()
  std::vector<double> freqs;  // geometric ladder

  TimeEmbedding(int dim, double min_freq, double max_freq);
  void write(double value, double* out) const;
  Eigen::VectorXd operator()(double value) const;
};

struct NetConfig {
  int freq_bins = 129;  // F; must match the STFT config in use
  int context = 1;      // temporal context radius, frames per side
  int hidden = 128;
  int blocks = 3;
  int embed_dim = 16;   // per conditioning scalar (time and step size)

  // Per-frame feature vector: real/imag of the state and the conditioner
  // over the context window, then the two embeddings.
  int input_dim() const {
    return 4 * freq_bins * (2 * context + 1) + 2 * embed_dim;
  }
  int output_dim() const { return 2 * freq_bins; }
  bool operator==(const NetConfig&) const = default;
};

// Forward-pass record for reverse mode. Frames are columns throughout.
struct Tape {
  Eigen::MatrixXd input;                    // input_dim x T
  std::vector<Eigen::MatrixXd> h;           // blocks+1 entries, hidden x T
  std::vector<Eigen::MatrixXd> preact;      // blocks entries, hidden x T
  std::vector<Eigen::MatrixXd> act;         // blocks entries, hidden x T
};

// Step-conditioned velocity field over complex spectrograms.
//
// Each output frame is produced by a residual MLP over a window of input
// frames (the state and the conditioner, split into real/imag channels)
// concatenated with sinusoidal embeddings of the time t and of log2 of the
// step size dt. One parameter set serves every (t, dt); the final layer is
// zero-initialized so an untrained model predicts zero displacement.
//
// Time convention: t = 0 at the prior endpoint, t = 1 at the clean signal.
// The output is a velocity; integrators advance by x + dt * forward(...).
class VelocityNet {
 public:
  VelocityNet(const NetConfig& cfg, std::uint64_t init_seed);

  const NetConfig& config() const { return cfg_; }
  std::size_t num_params() const { return params_.size(); }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }
  std::vector<double>& grad() { return grad_; }
  const std::vector<double>& grad() const { return grad_; }
  void zero_grad();

  // Predicted velocity field, same shape as x. Deterministic in
  // (params, inputs). t in [0,1], dt in (0,1]; x and y must share the
  // net's bin count and each other's frame count. When tape is non-null
  // the activations needed by backward() are recorded.
  ComplexSpectrogram forward(const ComplexSpectrogram& x, double t, double dt,
                             const ComplexSpectrogram& y,
                             Tape* tape = nullptr) const;

  // Accumulates d(loss)/d(params) into grad() for the forward pass recorded
  // on `tape`, given the loss cotangent of the output. The cotangent is the
  // real 2F x T stack [d/d Re; d/d Im].
  void backward(const Tape& tape, const Eigen::MatrixXd& out_cotangent);

  // Gradient energy check used by the optimizer's error reporting.
  bool grad_is_finite() const;

  // Test helper: overwrite all parameters (including the zero-initialized
  // output layer) with small random values.
  void randomize_all(Rng& rng, double scale);

 private:
  struct Layout {
    // offsets into the flat parameter vector
    std::ptrdiff_t w_in, b_in;
    std::vector<std::ptrdiff_t> w1, b1, w2, b2;
    std::ptrdiff_t w_out, b_out;
    std::ptrdiff_t total;
  };
  static Layout make_layout(const NetConfig& cfg);

  Eigen::MatrixXd assemble_input(const ComplexSpectrogram& x, double t,
                                 double dt, const ComplexSpectrogram& y) const;

  NetConfig cfg_;
  Layout layout_;
  TimeEmbedding embed_t_;
  TimeEmbedding embed_dt_;
  std::vector<double> params_;
  std::vector<double> grad_;
};

// Adam with bias correction over the net's flat parameter vector.
struct AdamState {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step = 0;
  std::vector<double> m;
  std::vector<double> v;

  AdamState() = default;
  explicit AdamState(const VelocityNet& net, double learning_rate = 1e-4);
};

// One optimizer update from net.grad(); clears the gradient afterwards.
// Throws TrainError (carrying the step index) if the gradient is non-finite.
void adam_step(AdamState& opt, VelocityNet& net);

}  // namespace sfm
