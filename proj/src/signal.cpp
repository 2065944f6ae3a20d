#include "escphase/signal.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <numeric>

#include "escphase/error.hpp"

namespace escphase {
namespace {

// The FFTW planner is not re-entrant; execution of a plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class ComplexTransform {
 public:
  ComplexTransform(std::size_t n, int sign) : n_(n) {
    buffer_ = fftw_alloc_complex(n);
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_1d(static_cast<int>(n), buffer_, buffer_, sign, FFTW_ESTIMATE);
  }
  ~ComplexTransform() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
    fftw_free(buffer_);
  }
  ComplexTransform(const ComplexTransform&) = delete;
  ComplexTransform& operator=(const ComplexTransform&) = delete;

  std::complex<double>* data() { return reinterpret_cast<std::complex<double>*>(buffer_); }
  void execute() { fftw_execute(plan_); }
  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  fftw_complex* buffer_ = nullptr;
  fftw_plan plan_ = nullptr;
};

double mean_of(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

}  // namespace

TimeSeries::TimeSeries(std::vector<double> samples, double dt, std::string subject_id,
                       std::string dataset_id)
    : samples_(std::move(samples)),
      dt_(dt),
      subject_id_(std::move(subject_id)),
      dataset_id_(std::move(dataset_id)) {
  if (samples_.empty()) throw Error(ErrorCode::InvalidInput, "time series has no samples");
  if (!(dt_ > 0.0) || !std::isfinite(dt_))
    throw Error(ErrorCode::InvalidInput, "sample period must be positive");
  for (std::size_t t = 0; t < samples_.size(); ++t) {
    if (!std::isfinite(samples_[t]))
      throw Error(ErrorCode::InvalidInput, "non-finite sample at index " + std::to_string(t));
  }
}

double phase_of(std::complex<double> z) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double psi = std::atan2(z.imag(), z.real());
  if (psi < 0.0) psi += two_pi;
  if (psi >= two_pi) psi = 0.0;
  return psi;
}

std::vector<double> scale_force(std::span<const double> x) {
  if (x.empty()) throw Error(ErrorCode::InvalidInput, "empty signal");
  const double mean = mean_of(x);
  double max_dev = 0.0;
  for (double v : x) max_dev = std::max(max_dev, std::abs(v - mean));
  if (max_dev == 0.0) throw Error(ErrorCode::ConstantSignal, "signal has zero deviation");
  std::vector<double> out(x.size());
  std::transform(x.begin(), x.end(), out.begin(),
                 [&](double v) { return (v - mean) / max_dev; });
  return out;
}

std::vector<std::complex<double>> fourier_transform(std::span<const double> x) {
  ComplexTransform fft(x.size(), FFTW_FORWARD);
  std::copy(x.begin(), x.end(), fft.data());
  fft.execute();
  return {fft.data(), fft.data() + x.size()};
}

namespace {

// Discrete analytic signal of the whole input (unscaled).
std::vector<std::complex<double>> analytic_signal(std::span<const double> x) {
  const std::size_t n = x.size();
  ComplexTransform forward(n, FFTW_FORWARD);
  ComplexTransform backward(n, FFTW_BACKWARD);
  std::copy(x.begin(), x.end(), forward.data());
  forward.execute();

  // One-sided spectrum: keep DC (and Nyquist for even n), double positive bins.
  auto* spec = forward.data();
  auto* out = backward.data();
  const std::size_t half = n / 2;
  out[0] = spec[0];
  for (std::size_t k = 1; k < n; ++k) {
    if (k < (n + 1) / 2)
      out[k] = 2.0 * spec[k];
    else if (n % 2 == 0 && k == half)
      out[k] = spec[k];
    else
      out[k] = 0.0;
  }
  backward.execute();

  std::vector<std::complex<double>> analytic(out, out + n);
  for (auto& z : analytic) z /= static_cast<double>(n);
  return analytic;
}

EmbeddedSignal centre_and_scale(std::span<const std::complex<double>> analytic, double dt) {
  const auto n = static_cast<double>(analytic.size());
  const std::complex<double> mean =
      std::accumulate(analytic.begin(), analytic.end(), std::complex<double>{}) / n;
  double max_abs = 0.0;
  for (auto z : analytic) max_abs = std::max(max_abs, std::abs(z - mean));
  if (max_abs == 0.0) throw Error(ErrorCode::ConstantSignal, "window is constant");

  EmbeddedSignal emb;
  emb.dt = dt;
  emb.values.reserve(analytic.size());
  emb.amplitude.reserve(analytic.size());
  emb.phase.reserve(analytic.size());
  for (auto z : analytic) {
    z = (z - mean) / max_abs;
    emb.values.push_back(z);
    emb.amplitude.push_back(std::abs(z));
    emb.phase.push_back(phase_of(z));
  }
  return emb;
}

void check_window(std::span<const double> x, Window window) {
  if (window.end < window.start || window.end >= x.size())
    throw Error(ErrorCode::InvalidInput, "window outside signal");
  if (window.length() < 4) throw Error(ErrorCode::WindowTooShort, "embedding needs at least 4 samples");
}

}  // namespace

EmbeddedSignal hilbert_embed(std::span<const double> x, Window window, double dt) {
  check_window(x, window);
  const auto analytic = analytic_signal(x.subspan(window.start, window.length()));
  return centre_and_scale(analytic, dt);
}

EmbeddedSignal hilbert_embed_in_record(std::span<const double> x, Window window, double dt) {
  check_window(x, window);
  const auto analytic = analytic_signal(x);
  return centre_and_scale(std::span(analytic).subspan(window.start, window.length()), dt);
}

EmbeddedSignal hilbert_embed(const TimeSeries& ts, Window window, EmbeddingScope scope) {
  return scope == EmbeddingScope::Window ? hilbert_embed(ts.samples(), window, ts.dt())
                                         : hilbert_embed_in_record(ts.samples(), window, ts.dt());
}

SpectrumReport power_spectrum(const TimeSeries& ts) {
  const auto x = ts.samples();
  const std::size_t n = x.size();
  if (n < 2) throw Error(ErrorCode::InsufficientLength, "spectrum needs at least 2 samples");
  const double mean = mean_of(x);
  std::vector<double> centered(n);
  std::transform(x.begin(), x.end(), centered.begin(), [&](double v) { return v - mean; });
  const auto coeffs = fourier_transform(centered);

  SpectrumReport report;
  const std::size_t bins = n / 2 + 1;
  report.frequencies.resize(bins);
  report.power.resize(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    report.frequencies[k] = static_cast<double>(k) / (static_cast<double>(n) * ts.dt());
    report.power[k] = std::norm(coeffs[k]);
  }
  const double peak = *std::max_element(report.power.begin(), report.power.end());
  if (peak > 0.0) {
    for (double& p : report.power) p /= peak;
  }
  std::size_t best = 1;
  for (std::size_t k = 1; k < bins; ++k) {
    if (report.power[k] > report.power[best]) best = k;
  }
  report.dominant_frequency = report.frequencies[std::min(best, bins - 1)];
  return report;
}

std::vector<std::vector<double>> delay_embed(std::span<const double> x, std::size_t delay,
                                             std::size_t dim) {
  if (dim < 1 || delay < 1) throw Error(ErrorCode::InvalidInput, "dim and delay must be >= 1");
  const std::size_t span_len = (dim - 1) * delay;
  if (x.size() <= span_len)
    throw Error(ErrorCode::InsufficientLength, "signal shorter than embedding window");
  const std::size_t count = x.size() - span_len;
  std::vector<std::vector<double>> out(count, std::vector<double>(dim));
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t d = 0; d < dim; ++d) out[i][d] = x[i + d * delay];
  return out;
}

std::vector<double> fnn_fraction(std::span<const double> x, std::size_t delay,
                                 std::span<const std::size_t> dims, FnnOptions options) {
  std::vector<double> result;
  result.reserve(dims.size());
  for (std::size_t dim : dims) {
    if (dim < 1 || delay < 1) throw Error(ErrorCode::InvalidInput, "dim and delay must be >= 1");
    if (x.size() <= dim * delay + 1)
      throw Error(ErrorCode::InsufficientLength, "signal too short for FNN at this dimension");
    // Only points that also exist in dim+1 dimensions take part.
    const std::size_t count = x.size() - dim * delay;
    std::size_t false_count = 0;
    for (std::size_t i = 0; i < count; ++i) {
      double best = std::numeric_limits<double>::infinity();
      std::size_t best_j = count;
      for (std::size_t j = 0; j < count; ++j) {
        const std::size_t gap = i > j ? i - j : j - i;
        if (gap <= delay) continue;
        double d2 = 0.0;
        for (std::size_t d = 0; d < dim && d2 < best; ++d) {
          const double diff = x[i + d * delay] - x[j + d * delay];
          d2 += diff * diff;
        }
        if (d2 < best) {
          best = d2;
          best_j = j;
        }
      }
      if (best_j == count) continue;
      const double lifted = std::abs(x[i + dim * delay] - x[best_j + dim * delay]);
      const double dist = std::sqrt(best);
      if (dist == 0.0 ? lifted > 0.0 : lifted / dist > options.ratio_threshold) ++false_count;
    }
    result.push_back(static_cast<double>(false_count) / static_cast<double>(count));
  }
  return result;
}

std::size_t quarter_period_delay(double dominant_frequency, double dt) {
  if (!(dominant_frequency > 0.0) || !(dt > 0.0))
    throw Error(ErrorCode::InvalidInput, "frequency and dt must be positive");
  return static_cast<std::size_t>(std::lround(1.0 / (4.0 * dominant_frequency * dt)));
}

}  // namespace escphase
