#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "escphase/error.hpp"
#include "escphase/signal.hpp"
#include "oracles.hpp"

using namespace escphase;
using std::numbers::pi;

namespace {

std::vector<double> cosine(double freq, double dt, std::size_t n, double phase = 0.0) {
  std::vector<double> x(n);
  for (std::size_t t = 0; t < n; ++t) x[t] = std::cos(2 * pi * freq * dt * static_cast<double>(t) + phase);
  return x;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an escphase::Error");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("time series validation") {
  CHECK(code_of([] { TimeSeries({}, 0.01); }) == ErrorCode::InvalidInput);
  CHECK(code_of([] { TimeSeries({1.0}, 0.0); }) == ErrorCode::InvalidInput);
  CHECK(code_of([] { TimeSeries({1.0, NAN}, 0.01); }) == ErrorCode::InvalidInput);
  TimeSeries ts({1.0, 2.0}, 0.01, "ST31", "1");
  CHECK(ts.subject_id() == "ST31");
  CHECK(ts.size() == 2);
}

TEST_CASE("scale_force examples") {
  const std::vector<double> a{1, 3};
  CHECK(scale_force(a) == std::vector<double>{-1, 1});

  const std::vector<double> b{0, 1, 2, 3};
  const auto sb = scale_force(b);
  REQUIRE(sb.size() == 4);
  CHECK(sb[0] == doctest::Approx(-1.0));
  CHECK(sb[1] == doctest::Approx(-1.0 / 3));
  CHECK(sb[2] == doctest::Approx(1.0 / 3));
  CHECK(sb[3] == doctest::Approx(1.0));

  const std::vector<double> flat{5, 5, 5};
  CHECK(code_of([&] { scale_force(flat); }) == ErrorCode::ConstantSignal);
}

TEST_CASE("scale_force is invariant under positive affine maps") {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> n01;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x(257);
    for (auto& v : x) v = n01(gen);
    const double a = std::exp(n01(gen)), b = 10 * n01(gen);
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = a * x[i] + b;
    const auto sx = scale_force(x), sy = scale_force(y);
    double maxdiff = 0, maxabs = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      maxdiff = std::max(maxdiff, std::abs(sx[i] - sy[i]));
      maxabs = std::max(maxabs, std::abs(sx[i]));
    }
    CHECK(maxdiff <= 1e-12);
    CHECK(maxabs == doctest::Approx(1.0));
  }
}

namespace {

double unwrapped_slope(const EmbeddedSignal& emb, std::size_t from, std::size_t to) {
  double total = 0;
  for (std::size_t t = from + 1; t <= to; ++t) {
    double d = emb.phase[t] - emb.phase[t - 1];
    while (d > pi) d -= 2 * pi;
    while (d < -pi) d += 2 * pi;
    total += d;
  }
  return total / (static_cast<double>(to - from) * emb.dt);
}

}  // namespace

TEST_CASE("hilbert embedding of a whole number of periods") {
  // 0.9 Hz over 90 s is exactly 81 periods, so the finite transform is exact.
  const double dt = 0.01, f = 0.9;
  const std::size_t n = 9000;
  const auto emb = hilbert_embed(cosine(f, dt, n), Window{0, n - 1}, dt);
  REQUIRE(emb.size() == n);
  double worst = 0;
  for (double a : emb.amplitude) worst = std::max(worst, std::abs(a - 1.0));
  CHECK(worst <= 0.01);
  CHECK(unwrapped_slope(emb, n / 20, n - n / 20) == doctest::Approx(2 * pi * f).epsilon(0.01));
}

TEST_CASE("hilbert embedding of a 0.88 Hz cosine") {
  const double dt = 0.01, f = 0.88;
  const std::size_t n = 9000;
  const auto emb = hilbert_embed(cosine(f, dt, n), Window{0, n - 1}, dt);
  REQUIRE(emb.size() == n);

  double max_abs = 0;
  for (double a : emb.amplitude) max_abs = std::max(max_abs, a);
  CHECK(max_abs == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(unwrapped_slope(emb, n / 20, n - n / 20) == doctest::Approx(2 * pi * f).epsilon(0.01));
  for (std::size_t t = 0; t < n; ++t) {
    CHECK(emb.phase[t] >= 0.0);
    CHECK(emb.phase[t] < 2 * pi);
    CHECK(emb.amplitude[t] == doctest::Approx(std::abs(emb.values[t])).epsilon(1e-15));
  }
}

TEST_CASE("hilbert embedding matches a direct transform") {
  std::mt19937_64 gen(17);
  std::normal_distribution<double> n01;
  for (std::size_t n : {4u, 5u, 64u, 301u}) {
    std::vector<double> x(n);
    for (std::size_t t = 0; t < n; ++t) x[t] = std::sin(0.3 * static_cast<double>(t)) + 0.4 * n01(gen);
    const auto emb = hilbert_embed(x, Window{0, n - 1}, 0.01);
    const auto ref = oracle::analytic_signal_direct(x);
    double worst = 0;
    for (std::size_t t = 0; t < n; ++t) worst = std::max(worst, std::abs(emb.values[t] - ref[t]));
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("hilbert embedding of a sub-window") {
  const auto x = cosine(0.88, 0.01, 2000);
  const auto emb = hilbert_embed(x, Window{500, 1499}, 0.01);
  CHECK(emb.size() == 1000);
  CHECK(emb.dt == 0.01);
  CHECK(code_of([&] { hilbert_embed(x, Window{10, 10}, 0.01); }) == ErrorCode::WindowTooShort);
  CHECK(code_of([&] { hilbert_embed(x, Window{1500, 2500}, 0.01); }) == ErrorCode::InvalidInput);
}

TEST_CASE("record-scope embedding") {
  std::mt19937_64 gen(23);
  std::normal_distribution<double> n01;
  std::vector<double> x(700);
  for (std::size_t t = 0; t < x.size(); ++t) x[t] = std::cos(0.2 * static_cast<double>(t)) + 0.2 * n01(gen);
  const Window w{100, 399};
  const auto emb = hilbert_embed_in_record(x, w, 0.01);
  REQUIRE(emb.size() == w.length());

  // Restriction of the whole-record analytic signal, centred and scaled on the window.
  const auto full = oracle::analytic_signal_direct(x);  // scaling cancels below
  std::complex<double> mean = 0;
  for (std::size_t t = w.start; t <= w.end; ++t) mean += full[t];
  mean /= static_cast<double>(w.length());
  double peak = 0;
  for (std::size_t t = w.start; t <= w.end; ++t) peak = std::max(peak, std::abs(full[t] - mean));
  double worst = 0;
  for (std::size_t t = 0; t < w.length(); ++t)
    worst = std::max(worst, std::abs(emb.values[t] - (full[w.start + t] - mean) / peak));
  CHECK(worst <= 1e-9);

  // Whole-record window: both scopes agree.
  const Window all{0, x.size() - 1};
  const auto a = hilbert_embed(x, all, 0.01), b = hilbert_embed_in_record(x, all, 0.01);
  for (std::size_t t = 0; t < x.size(); ++t) CHECK(std::abs(a.values[t] - b.values[t]) <= 1e-12);

  const TimeSeries ts(x, 0.01);
  CHECK(hilbert_embed(ts, w, EmbeddingScope::Record).values == emb.values);
  CHECK(code_of([&] { hilbert_embed_in_record(x, Window{0, 700}, 0.01); }) == ErrorCode::InvalidInput);
}

TEST_CASE("fourier transform satisfies Parseval") {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> n01;
  for (std::size_t n : {1u, 2u, 7u, 64u, 1001u}) {
    std::vector<double> x(n);
    for (auto& v : x) v = n01(gen);
    const auto spec = fourier_transform(x);
    REQUIRE(spec.size() == n);
    double time_energy = 0, freq_energy = 0;
    for (double v : x) time_energy += v * v;
    for (auto c : spec) freq_energy += std::norm(c);
    CHECK(freq_energy / static_cast<double>(n) == doctest::Approx(time_energy).epsilon(1e-10));
  }
}

TEST_CASE("power spectrum dominant frequency") {
  const double dt = 0.01;
  TimeSeries ts(cosine(0.88, dt, 9000, 0.3), dt);
  const auto rep = power_spectrum(ts);
  CHECK(std::abs(rep.dominant_frequency - 0.88) <= 1.0 / 90.0);
  CHECK(rep.frequencies.size() == 4501);
  CHECK(rep.frequencies.back() == doctest::Approx(50.0));

  std::mt19937_64 gen(3);
  std::normal_distribution<double> n01;
  std::vector<double> noise(4096);
  for (auto& v : noise) v = n01(gen);
  const auto white = power_spectrum(TimeSeries(noise, dt));
  double peak = 0;
  for (double p : white.power) peak = std::max(peak, p);
  CHECK(peak == doctest::Approx(1.0));
}

TEST_CASE("delay embedding") {
  const std::vector<double> a{1, 2, 3, 4};
  const auto ea = delay_embed(a, 1, 2);
  CHECK(ea == std::vector<std::vector<double>>{{1, 2}, {2, 3}, {3, 4}});

  const std::vector<double> b{1, 2, 3, 4, 5};
  const auto eb = delay_embed(b, 2, 2);
  CHECK(eb == std::vector<std::vector<double>>{{1, 3}, {2, 4}, {3, 5}});

  for (std::size_t delay = 1; delay < 5; ++delay)
    for (std::size_t dim = 1; dim < 5; ++dim) {
      const std::vector<double> x(30, 1.0);
      CHECK(delay_embed(x, delay, dim).size() == 30 - (dim - 1) * delay);
    }

  CHECK(code_of([&] { delay_embed(a, 2, 3); }) == ErrorCode::InsufficientLength);
  CHECK(code_of([&] { delay_embed(a, 0, 2); }) == ErrorCode::InvalidInput);
}

TEST_CASE("quarter period delay") {
  CHECK(quarter_period_delay(0.88, 0.01) == 28);
  CHECK(quarter_period_delay(1.0, 0.01) == 25);
  CHECK(code_of([] { quarter_period_delay(0.0, 0.01); }) == ErrorCode::InvalidInput);
}

TEST_CASE("false nearest neighbours") {
  const std::size_t dims[] = {1, 2, 3, 4};

  SUBCASE("a sinusoid unfolds in two dimensions") {
    const auto x = cosine(0.88, 0.01, 1500);
    const auto fnn = fnn_fraction(x, 28, dims);
    REQUIRE(fnn.size() == 4);
    CHECK(fnn[1] <= 0.01);
    CHECK(fnn[0] > fnn[1]);
  }

  SUBCASE("non-increasing in dimension on deterministic signals") {
    std::vector<std::vector<double>> signals;
    signals.push_back(cosine(0.88, 0.01, 1200));
    std::vector<double> two_tone(1200);
    for (std::size_t t = 0; t < two_tone.size(); ++t)
      two_tone[t] = std::cos(0.07 * static_cast<double>(t)) + 0.6 * std::sin(0.07 * std::sqrt(2.0) * static_cast<double>(t));
    signals.push_back(two_tone);
    std::vector<double> logistic(800);
    logistic[0] = 0.3;
    for (std::size_t t = 1; t < logistic.size(); ++t) logistic[t] = 3.9 * logistic[t - 1] * (1 - logistic[t - 1]);
    signals.push_back(logistic);

    const std::size_t delays[] = {28, 22, 1};
    for (std::size_t s = 0; s < signals.size(); ++s) {
      const auto fnn = fnn_fraction(signals[s], delays[s], dims);
      for (std::size_t d = 1; d < fnn.size(); ++d) CHECK(fnn[d] <= fnn[d - 1] + 1e-12);
      for (double v : fnn) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
      }
    }
  }

  SUBCASE("errors") {
    const std::vector<double> short_x{1, 2, 3, 4, 5};
    CHECK(code_of([&] { fnn_fraction(short_x, 2, dims); }) == ErrorCode::InsufficientLength);
  }
}
