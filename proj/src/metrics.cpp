#include "sfm/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>

#include <boost/math/distributions/students_t.hpp>

#include "sfm/errors.hpp"

namespace sfm {

namespace {

void check_equal_lengths(const Waveform& a, const Waveform& b) {
  validate(a);
  validate(b);
  if (a.samples.size() != b.samples.size())
    throw ContractError("signals differ in length");
}

double mean_of(const std::vector<double>& xs) {
  double acc = 0.0;
  for (double x : xs) acc += x;
  return acc / static_cast<double>(xs.size());
}

}  // namespace

double si_sdr(const Waveform& reference, const Waveform& estimate) {
  check_equal_lengths(reference, estimate);
  const std::size_t n = reference.samples.size();
  double ref_mean = 0.0, est_mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ref_mean += reference.samples[i];
    est_mean += estimate.samples[i];
  }
  ref_mean /= static_cast<double>(n);
  est_mean /= static_cast<double>(n);

  double dot = 0.0, ref_energy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = reference.samples[i] - ref_mean;
    const double e = estimate.samples[i] - est_mean;
    dot += e * r;
    ref_energy += r * r;
  }
  if (ref_energy <= 0.0) throw DomainError("silent reference; SI-SDR undefined");

  const double alpha = dot / ref_energy;
  double target_energy = 0.0, error_energy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = reference.samples[i] - ref_mean;
    const double e = estimate.samples[i] - est_mean;
    const double proj = alpha * r;
    target_energy += proj * proj;
    error_energy += (e - proj) * (e - proj);
  }
  if (error_energy <= 0.0) return 100.0;  // exact scalar multiple of ref
  if (target_energy <= 0.0) return -100.0;
  const double value = 10.0 * std::log10(target_energy / error_energy);
  return std::clamp(value, -100.0, 100.0);
}

double seg_snr(const Waveform& reference, const Waveform& estimate,
               std::size_t frame_len) {
  check_equal_lengths(reference, estimate);
  if (frame_len == 0) throw ContractError("frame_len must be positive");
  constexpr double kFloorDb = -10.0;
  constexpr double kCeilDb = 35.0;

  const std::size_t frames = reference.samples.size() / frame_len;
  double acc = 0.0;
  std::size_t used = 0;
  for (std::size_t f = 0; f < frames; ++f) {
    double ref_energy = 0.0, err_energy = 0.0;
    for (std::size_t i = f * frame_len; i < (f + 1) * frame_len; ++i) {
      const double r = reference.samples[i];
      const double d = reference.samples[i] - estimate.samples[i];
      ref_energy += r * r;
      err_energy += d * d;
    }
    if (ref_energy <= 0.0) continue;  // silent reference frame: excluded
    double snr;
    if (err_energy <= 0.0) {
      snr = kCeilDb;
    } else {
      snr = std::clamp(10.0 * std::log10(ref_energy / err_energy), kFloorDb,
                       kCeilDb);
    }
    acc += snr;
    ++used;
  }
  if (used == 0)
    throw DomainError("no frames with reference energy; segSNR undefined");
  return acc / static_cast<double>(used);
}

double log_spectral_distance(const Waveform& reference,
                             const Waveform& estimate, const StftConfig& cfg) {
  check_equal_lengths(reference, estimate);
  constexpr double kFloor = 1e-8;
  const ComplexSpectrogram r = stft(reference, cfg);
  const ComplexSpectrogram e = stft(estimate, cfg);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < r.bins.size(); ++i) {
    const double lr = std::log(std::max(std::abs(r.bins.data()[i]), kFloor));
    const double le = std::log(std::max(std::abs(e.bins.data()[i]), kFloor));
    acc += (lr - le) * (lr - le);
  }
  return std::sqrt(acc / static_cast<double>(r.bins.size()));
}

RtfMeasurement measure_rtf(const std::function<void(const Waveform&)>& enhancer,
                           const Waveform& input, int repetitions) {
  if (repetitions < 3) throw ContractError("need at least 3 repetitions");
  validate(input);
  using clock = std::chrono::steady_clock;

  enhancer(input);  // warm-up
  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(repetitions));
  for (int i = 0; i < repetitions; ++i) {
    const auto t0 = clock::now();
    enhancer(input);
    const auto t1 = clock::now();
    times.push_back(std::chrono::duration<double>(t1 - t0).count());
  }
  std::sort(times.begin(), times.end());
  const std::size_t mid = times.size() / 2;
  const double median = times.size() % 2 == 1
                            ? times[mid]
                            : 0.5 * (times[mid - 1] + times[mid]);

  RtfMeasurement m;
  m.wall_seconds = median;
  m.audio_seconds = input.duration_seconds();
  m.rtf = m.wall_seconds / m.audio_seconds;
  return m;
}

double student_t_975(int dof) {
  if (dof < 1) throw ContractError("t quantile needs dof >= 1");
  boost::math::students_t dist(static_cast<double>(dof));
  return boost::math::quantile(dist, 0.975);
}

EvalReport EvalReport::from_rows(std::vector<EvalRow> rows) {
  EvalReport report;
  report.rows = std::move(rows);

  std::map<std::pair<std::string, int>, std::vector<const EvalRow*>> groups;
  for (const EvalRow& r : report.rows) groups[{r.prior, r.steps}].push_back(&r);

  for (const auto& [key, members] : groups) {
    EvalAggregate agg;
    agg.prior = key.first;
    agg.steps = key.second;
    agg.count = static_cast<int>(members.size());
    const auto stat = [&members](auto getter, double& mean_out, double& ci_out) {
      std::vector<double> xs;
      xs.reserve(members.size());
      for (const EvalRow* r : members) xs.push_back(getter(*r));
      mean_out = mean_of(xs);
      if (xs.size() < 2) {
        ci_out = 0.0;
        return;
      }
      double var = 0.0;
      for (double x : xs) var += (x - mean_out) * (x - mean_out);
      var /= static_cast<double>(xs.size() - 1);
      const double se = std::sqrt(var / static_cast<double>(xs.size()));
      ci_out = student_t_975(static_cast<int>(xs.size()) - 1) * se;
    };
    stat([](const EvalRow& r) { return r.si_sdr_db; }, agg.si_sdr_mean, agg.si_sdr_ci);
    stat([](const EvalRow& r) { return r.seg_snr_db; }, agg.seg_snr_mean, agg.seg_snr_ci);
    stat([](const EvalRow& r) { return r.lsd; }, agg.lsd_mean, agg.lsd_ci);
    stat([](const EvalRow& r) { return r.rtf; }, agg.rtf_mean, agg.rtf_ci);
    report.aggregates.push_back(agg);
  }
  return report;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot open for writing: " + path.string());
  f.precision(10);
  return f;
}

}  // namespace

void EvalReport::write_csv(const std::filesystem::path& path) const {
  auto f = open_out(path);
  f << "utterance,prior,steps,si_sdr_db,seg_snr_db,lsd,rtf\n";
  for (const EvalRow& r : rows) {
    f << r.utterance << ',' << r.prior << ',' << r.steps << ',' << r.si_sdr_db
      << ',' << r.seg_snr_db << ',' << r.lsd << ',' << r.rtf << '\n';
  }
  for (const EvalAggregate& a : aggregates) {
    f << "#agg," << a.prior << ',' << a.steps << ',' << a.count << ','
      << a.si_sdr_mean << ',' << a.si_sdr_ci << ',' << a.seg_snr_mean << ','
      << a.seg_snr_ci << ',' << a.lsd_mean << ',' << a.lsd_ci << ','
      << a.rtf_mean << ',' << a.rtf_ci << '\n';
  }
  if (!f) throw IoError("write failed: " + path.string());
}

void EvalReport::write_long_csv(const std::filesystem::path& path) const {
  auto f = open_out(path);
  f << "utterance,prior,steps,metric,value\n";
  for (const EvalRow& r : rows) {
    f << r.utterance << ',' << r.prior << ',' << r.steps << ",si_sdr_db,"
      << r.si_sdr_db << '\n';
    f << r.utterance << ',' << r.prior << ',' << r.steps << ",seg_snr_db,"
      << r.seg_snr_db << '\n';
    f << r.utterance << ',' << r.prior << ',' << r.steps << ",lsd," << r.lsd
      << '\n';
    f << r.utterance << ',' << r.prior << ',' << r.steps << ",rtf," << r.rtf
      << '\n';
  }
  if (!f) throw IoError("write failed: " + path.string());
}

}  // namespace sfm
