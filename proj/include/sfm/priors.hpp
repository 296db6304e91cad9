#pragma once

#include <string>

#include "sfm/stft.hpp"

namespace sfm {

class Rng;

enum class PriorKind { kGaussian, kObservationCentered, kDataAdaptive, kDelta };

// Endpoint distribution the ODE trajectories start from, conditioned on the
// observation y:
//   G - standard complex Gaussian per bin (ignores y's values)
//   S - y plus complex Gaussian noise with fixed std sigma_end
//   D - y plus Gaussian noise scaled by the observation's own coefficient
//       spread: per-component std sqrt(alpha) * sigma_hat(y)
//   F - y itself, no randomness
struct PriorSpec {
  PriorKind kind = PriorKind::kObservationCentered;
  double sigma_end = 0.389;  // S: complex std-dev per coefficient
  double alpha = 0.2;        // D: variance scale

  static PriorSpec parse(const std::string& name, double sigma_end = 0.389,
                         double alpha = 0.2);
};

std::string to_string(PriorKind kind);

// Pooled unbiased sample variance over all real and imaginary coefficient
// components of the spectrogram (the D prior's spread estimate).
double pooled_component_variance(const ComplexSpectrogram& y);

// Draws the trajectory start point. Shape equals y's. The complex Gaussian
// convention is unit variance per complex coefficient, i.e. 1/2 per
// real/imag component; D instead uses per-component variance
// alpha * pooled_component_variance(y), so the spread of (x1 - y) matches
// alpha times the spread of y under the same estimator. The delta prior
// returns y without consuming any randomness.
ComplexSpectrogram sample_prior(const PriorSpec& spec,
                                const ComplexSpectrogram& y, Rng& rng);

}  // namespace sfm
