#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "sfm/stft.hpp"
#include "sfm/waveform.hpp"

namespace sfm {

// Scale-invariant signal-to-distortion ratio in dB. Both signals are
// de-meaned first; the estimate is projected onto the reference and the
// ratio of projection to residual energy is reported. Clamped to
// [-100, +100] dB: +100 is the sentinel for est being an exact (nonzero)
// scalar multiple of ref, and keeps downstream CSVs finite.
double si_sdr(const Waveform& reference, const Waveform& estimate);

// Mean over complete frames of per-frame SNR, each clamped to [-10, 35] dB.
// Frames whose reference energy is zero are excluded; if none remain the
// reference is effectively silent and a DomainError is thrown.
double seg_snr(const Waveform& reference, const Waveform& estimate,
               std::size_t frame_len = 256);

// RMS over frames and bins of natural-log magnitude differences between the
// two signals' spectrograms, with magnitudes floored at 1e-8.
double log_spectral_distance(const Waveform& reference,
                             const Waveform& estimate, const StftConfig& cfg);

struct RtfMeasurement {
  double wall_seconds = 0.0;   // median over repetitions
  double audio_seconds = 0.0;
  double rtf = 0.0;            // wall_seconds / audio_seconds
};

// Times `enhancer` on `input`: one warm-up call, then `repetitions` timed
// calls; reports the median. repetitions must be >= 3. Run this with the
// process otherwise idle; the measurement itself is single-threaded.
RtfMeasurement measure_rtf(const std::function<void(const Waveform&)>& enhancer,
                           const Waveform& input, int repetitions);

// One evaluated utterance under a (prior, steps) configuration.
struct EvalRow {
  std::string utterance;
  std::string prior;
  int steps = 1;  // NFE per chunk == steps
  double si_sdr_db = 0.0;
  double seg_snr_db = 0.0;
  double lsd = 0.0;
  double rtf = 0.0;
};

// Mean and 95% confidence half-width (Student t, n-1 dof) per metric for
// one (prior, steps) group. n == 1 reports zero half-widths.
struct EvalAggregate {
  std::string prior;
  int steps = 1;
  int count = 0;
  double si_sdr_mean = 0.0, si_sdr_ci = 0.0;
  double seg_snr_mean = 0.0, seg_snr_ci = 0.0;
  double lsd_mean = 0.0, lsd_ci = 0.0;
  double rtf_mean = 0.0, rtf_ci = 0.0;
};

struct EvalReport {
  std::vector<EvalRow> rows;
  std::vector<EvalAggregate> aggregates;

  // Groups rows by (prior, steps) and computes the aggregate block.
  static EvalReport from_rows(std::vector<EvalRow> rows);

  // CSV layout: a fixed header, one line per row, then one `#agg`-prefixed
  // line per aggregate. See README for the exact columns.
  void write_csv(const std::filesystem::path& path) const;

  // Long format for external plotting: utterance,prior,steps,metric,value.
  void write_long_csv(const std::filesystem::path& path) const;
};

// 95% two-sided Student-t quantile helper exposed for the aggregate tests.
double student_t_975(int dof);

}  // namespace sfm
