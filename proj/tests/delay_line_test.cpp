#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "vibxfer/delay_line.hpp"

using namespace vibxfer;

namespace {

constexpr double pi = std::numbers::pi;

} // namespace

TEST (DelayLine, DefaultCapacityIs4096)
{
  DelayLine<double> line;
  EXPECT_EQ (line.capacity(), 4096u);
  EXPECT_EQ (line.max_delay(), 4095.0);
  EXPECT_EQ (line.min_delay(), 1.0);
}

TEST (DelayLine, RejectsBadCapacity)
{
  EXPECT_THROW (DelayLine<double> (1000), ParameterError);
  EXPECT_THROW (DelayLine<double> (4), ParameterError);
}

TEST (DelayLine, WriteIndexWrapsAfterCapacity)
{
  DelayLine<double> line;
  const auto        start = line.write_index();
  for (int i = 0; i < 4096; ++i) {
    line.write (static_cast<double> (i));
  }
  EXPECT_EQ (line.write_index(), start);
}

TEST (DelayLine, DelayOneReturnsPreviousSample)
{
  DelayLine<double> line;
  line.write (0.25);
  line.write (-0.5);
  EXPECT_EQ (line.read_fractional (1.0), 0.25);
}

TEST (DelayLine, ImpulseEmergesAt512)
{
  // Write-then-read per step, as the engine does: the impulse written at
  // step 0 is read at step 512.
  DelayLine<double> line;
  for (int n = 0; n <= 600; ++n) {
    line.write (n == 0 ? 1.0 : 0.0);
    const double y = line.read_fractional (512.0);
    ASSERT_EQ (y, n == 512 ? 1.0 : 0.0) << n;
  }
}

TEST (DelayLine, IntegerDelaysAreExact)
{
  for (auto interp : {Interpolation::cubic, Interpolation::lagrange8}) {
    DelayLine<double> line {4096, interp};
    std::vector<double> x (5000);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = (i % 37 == 0) ? 1.0 : std::sin (0.3 * static_cast<double> (i));
      line.write (x[i]);
      if (i >= 4095) {
        for (std::size_t d : {1u, 2u, 3u, 17u, 512u, 4095u}) {
          ASSERT_EQ (line.read_fractional (static_cast<double> (d)), x[i - d]);
        }
      }
    }
  }
}

TEST (DelayLine, CubicHalfSampleBetweenZeroAndOne)
{
  // Taps (0, 0, 1, 0) around delay 512.5: the sample at 512 is 0 and the one
  // at 513 is the impulse.
  DelayLine<double> line {4096, Interpolation::cubic};
  line.write (1.0);
  for (int i = 0; i < 513; ++i) {
    line.write (0.0);
  }
  EXPECT_DOUBLE_EQ (line.read_fractional (512.5), 0.5625);
  EXPECT_DOUBLE_EQ (DelayLine<double>::catmull_rom (0.0, 0.0, 1.0, 0.0, 0.5), 0.5625);
}

TEST (DelayLine, ClampsAboveCapacity)
{
  DelayLine<double> line;
  for (int i = 0; i < 4096; ++i) {
    line.write (static_cast<double> (i));
  }
  EXPECT_EQ (line.read_fractional (5000.0), line.read_fractional (4095.0));
  EXPECT_EQ (line.read_fractional (5000.0), 0.0);
  EXPECT_EQ (line.read_fractional (0.2), 4094.0);
  EXPECT_EQ (line.clamped_delays(), 3u);
}

TEST (DelayLine, NonFiniteDelayReusesPrevious)
{
  DelayLine<double> line;
  for (int i = 0; i < 100; ++i) {
    line.write (static_cast<double> (i));
  }
  EXPECT_EQ (line.read_fractional (10.0), 89.0);
  EXPECT_EQ (line.read_fractional (std::numeric_limits<double>::quiet_NaN()), 89.0);
  EXPECT_EQ (line.read_fractional (std::numeric_limits<double>::infinity()), 89.0);
  EXPECT_EQ (line.non_finite_delays(), 2u);
}

TEST (DelayLine, Lagrange8WeightsSumToOneAndInterpolateCubics)
{
  for (double t : {0.0, 0.1, 0.5, 0.77, 0.999}) {
    const auto w   = DelayLine<double>::lagrange8_weights (t);
    double     sum = 0.0, cubic = 0.0;
    for (int k = 0; k < 8; ++k) {
      const double node = k - 3;
      sum += w[k];
      cubic += w[k] * (node * node * node - 2.0 * node);
    }
    EXPECT_NEAR (sum, 1.0, 1e-12);
    EXPECT_NEAR (cubic, t * t * t - 2.0 * t, 1e-10);
  }
}

// Steady-state error of a constant fractional delay against the exact
// shifted sinusoid, relative to the signal amplitude.
TEST (DelayLine, ConstantDelayPhaseShiftBelowMinus60dB)
{
  const double fs = 44100.0;
  for (double f : {100.0, 1000.0, 3000.0, 5000.0, fs / 8.0 - 1.0}) {
    for (double d : {3.25, 100.5, 512.37, 700.9}) {
      DelayLine<double> line;
      double            err2 = 0.0;
      int               cnt  = 0;
      for (int n = 0; n < 8192; ++n) {
        line.write (std::sin (2.0 * pi * f * n / fs));
        const double y = line.read_fractional (d);
        if (n > 4096) {
          const double ref = std::sin (2.0 * pi * f * (n - d) / fs);
          err2 += (y - ref) * (y - ref);
          ++cnt;
        }
      }
      const double err_db = 10.0 * std::log10 (err2 / cnt / 0.5);
      EXPECT_LT (err_db, -60.0) << "f=" << f << " d=" << d;
    }
  }
}

TEST (DelayLine, DelayNeverReadsUnwrittenSamples)
{
  // A sample written now must not affect any read made before the next write.
  DelayLine<double> line;
  line.write (0.0);
  for (double d : {0.0, 0.5, 0.99, -3.0}) {
    EXPECT_EQ (line.read_fractional (d), 0.0);
  }
}

TEST (DelayLine, LinearRampShiftsFrequency)
{
  const double fs = 44100.0, fc = 440.0;
  for (double s : {-0.01, -0.005, 0.005, 0.01}) {
    DelayLine<double>   line;
    std::vector<double> y;
    const int           n_total = 44100;
    for (int n = 0; n < n_total; ++n) {
      line.write (std::sin (2.0 * pi * fc * n / fs));
      const double d = 2000.0 + s * (n - n_total / 2);
      y.push_back (line.read_fractional (d));
    }
    const auto   wi = vibxfer::oracles::offline_instantaneous_frequency (y, fs);
    double       mean = 0.0;
    int          cnt  = 0;
    for (int n = 11025; n < 33075; ++n) {
      mean += wi[static_cast<std::size_t> (n)];
      ++cnt;
    }
    mean /= cnt;
    const double expected = fc * (1.0 - s);
    EXPECT_NEAR (mean, expected, 0.01 * expected * std::abs (s)) << "s=" << s;
  }
}
