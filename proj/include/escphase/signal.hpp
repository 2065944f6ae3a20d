#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace escphase {

/// Uniformly sampled scalar force record. Construction validates that the
/// record is non-empty, finite and has a positive sample period.
class TimeSeries {
 public:
  TimeSeries(std::vector<double> samples, double dt, std::string subject_id = {},
             std::string dataset_id = {});

  std::span<const double> samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  double dt() const { return dt_; }
  const std::string& subject_id() const { return subject_id_; }
  const std::string& dataset_id() const { return dataset_id_; }

 private:
  std::vector<double> samples_;
  double dt_;
  std::string subject_id_;
  std::string dataset_id_;
};

/// Closed sample-index interval [start, end].
struct Window {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start + 1; }
};

/// Analytic-signal embedding scaled into the unit disk.
struct EmbeddedSignal {
  std::vector<std::complex<double>> values;
  std::vector<double> amplitude;  // |values[t]|
  std::vector<double> phase;      // arg(values[t]) in [0, 2pi)
  double dt = 1.0;

  std::size_t size() const { return values.size(); }
};

struct SpectrumReport {
  std::vector<double> frequencies;  // Hz, bins 0..N/2
  std::vector<double> power;        // scaled to max 1
  double dominant_frequency = 0.0;
};

/// Phase of z mapped into [0, 2pi).
double phase_of(std::complex<double> z);

/// (x - mean) / max|x - mean|. Throws ConstantSignal for a constant record.
std::vector<double> scale_force(std::span<const double> x);
inline std::vector<double> scale_force(const TimeSeries& ts) { return scale_force(ts.samples()); }

/// Full complex DFT of a real sequence (unnormalized forward transform).
std::vector<std::complex<double>> fourier_transform(std::span<const double> x);

/// Analytic signal x + i*H[x] of the window, computed on the whole window
/// with one FFT (no padding), then centered and scaled so max|X| = 1.
/// Samples near both window edges carry the usual finite-record distortion.
EmbeddedSignal hilbert_embed(std::span<const double> x, Window window, double dt = 1.0);

/// Same centring and scaling over the window, but the analytic signal is
/// taken from one FFT of the whole record and then restricted to the window,
/// so the periodic wrap of the finite transform falls at the record ends.
EmbeddedSignal hilbert_embed_in_record(std::span<const double> x, Window window, double dt = 1.0);

enum class EmbeddingScope { Window, Record };

EmbeddedSignal hilbert_embed(const TimeSeries& ts, Window window,
                             EmbeddingScope scope = EmbeddingScope::Window);

/// Mean-removed periodogram, rectangular window.
SpectrumReport power_spectrum(const TimeSeries& ts);

/// Row i is (x[i], x[i+delay], ..., x[i+(dim-1)*delay]).
std::vector<std::vector<double>> delay_embed(std::span<const double> x, std::size_t delay,
                                             std::size_t dim);

struct FnnOptions {
  double ratio_threshold = 15.0;
};

/// Fraction of false nearest neighbours for each embedding dimension in `dims`
/// (Kennel distance-ratio test when lifting from d to d+1 dimensions).
/// Neighbours closer in time than `delay` samples are excluded.
std::vector<double> fnn_fraction(std::span<const double> x, std::size_t delay,
                                 std::span<const std::size_t> dims, FnnOptions options = {});

/// round(1 / (4 * f * dt)): a quarter of the dominant period in samples.
std::size_t quarter_period_delay(double dominant_frequency, double dt);

}  // namespace escphase
