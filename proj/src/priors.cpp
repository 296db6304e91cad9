#include "sfm/priors.hpp"

#include <cmath>

#include "sfm/errors.hpp"
#include "sfm/rng.hpp"

namespace sfm {

PriorSpec PriorSpec::parse(const std::string& name, double sigma_end,
                           double alpha) {
  PriorSpec spec;
  spec.sigma_end = sigma_end;
  spec.alpha = alpha;
  if (name == "G") {
    spec.kind = PriorKind::kGaussian;
  } else if (name == "S") {
    spec.kind = PriorKind::kObservationCentered;
    if (!(sigma_end > 0.0)) throw ConfigError("sigma_end must be positive");
  } else if (name == "D") {
    spec.kind = PriorKind::kDataAdaptive;
    if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  } else if (name == "F") {
    spec.kind = PriorKind::kDelta;
  } else {
    throw ConfigError("unknown prior kind: '" + name + "' (expected G|S|D|F)");
  }
  return spec;
}

std::string to_string(PriorKind kind) {
  switch (kind) {
    case PriorKind::kGaussian: return "G";
    case PriorKind::kObservationCentered: return "S";
    case PriorKind::kDataAdaptive: return "D";
    case PriorKind::kDelta: return "F";
  }
  return "?";
}

double pooled_component_variance(const ComplexSpectrogram& y) {
  const std::size_t n = static_cast<std::size_t>(y.bins.size()) * 2;
  if (n < 2) throw ContractError("need at least two components for a variance");
  double mean = 0.0;
  for (Eigen::Index i = 0; i < y.bins.size(); ++i) {
    mean += y.bins.data()[i].real();
    mean += y.bins.data()[i].imag();
  }
  mean /= static_cast<double>(n);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < y.bins.size(); ++i) {
    const double re = y.bins.data()[i].real() - mean;
    const double im = y.bins.data()[i].imag() - mean;
    acc += re * re + im * im;
  }
  return acc / static_cast<double>(n - 1);
}

ComplexSpectrogram sample_prior(const PriorSpec& spec,
                                const ComplexSpectrogram& y, Rng& rng) {
  for (Eigen::Index i = 0; i < y.bins.size(); ++i) {
    const auto& c = y.bins.data()[i];
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw ContractError("conditioner contains non-finite coefficients");
  }

  ComplexSpectrogram x1 = y;  // shape, config and metadata carried over
  switch (spec.kind) {
    case PriorKind::kDelta:
      return x1;  // exactly y, zero draws
    case PriorKind::kGaussian: {
      const double comp = 1.0 / std::sqrt(2.0);  // unit complex variance
      for (Eigen::Index i = 0; i < x1.bins.size(); ++i) {
        auto [a, b] = rng.normal_pair();
        x1.bins.data()[i] = std::complex<double>(comp * a, comp * b);
      }
      return x1;
    }
    case PriorKind::kObservationCentered: {
      const double comp = spec.sigma_end / std::sqrt(2.0);
      for (Eigen::Index i = 0; i < x1.bins.size(); ++i) {
        auto [a, b] = rng.normal_pair();
        x1.bins.data()[i] += std::complex<double>(comp * a, comp * b);
      }
      return x1;
    }
    case PriorKind::kDataAdaptive: {
      const double comp =
          std::sqrt(spec.alpha * pooled_component_variance(y));
      for (Eigen::Index i = 0; i < x1.bins.size(); ++i) {
        auto [a, b] = rng.normal_pair();
        x1.bins.data()[i] += std::complex<double>(comp * a, comp * b);
      }
      return x1;
    }
  }
  throw ContractError("unreachable prior kind");
}

}  // namespace sfm
