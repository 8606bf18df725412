#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "urllc/errors.hpp"
#include "urllc/radio.hpp"
#include "urllc/rng.hpp"

using namespace urllc;

TEST_CASE("q_function: symmetry, midpoint, and oracle agreement") {
  CHECK(radio::q_function(0.0) == 0.5);
  for (double x = -8.0; x <= 8.0; x += 0.37) {
    CHECK(std::fabs(radio::q_function(x) + radio::q_function(-x) - 1.0) < 1e-12);
  }
  // Against the independent series/continued-fraction reference.
  for (double x = -6.0; x <= 38.0; x += 0.61) {
    const double got = radio::q_function(x);
    const double want = oracles::q_reference(x);
    CHECK(std::fabs(got - want) <= 1e-11 * std::max(want, 1e-300));
  }
  // Deep tail keeps meaning.
  CHECK(radio::q_function(6.0) == doctest::Approx(9.865876450376946e-10).epsilon(1e-9));
}

TEST_CASE("large_scale_gain follows the documented log-distance law") {
  CHECK(radio::large_scale_gain(1.0) == doctest::Approx(std::pow(10.0, -3.53)).epsilon(1e-12));
  const double d = 100.0;
  const double want = std::pow(10.0, -(35.3 + 37.6 * std::log10(d)) / 10.0);
  CHECK(radio::large_scale_gain(d) == doctest::Approx(want).epsilon(1e-12));
  CHECK(radio::large_scale_gain(10.0) > radio::large_scale_gain(11.0));
  CHECK_THROWS_AS(radio::large_scale_gain(0.5), DomainError);
}

TEST_CASE("small-scale fading is unit-mean exponential") {
  RngStream rng(42);
  const int n = 1000000;
  double sum = 0.0;
  std::int64_t below_01 = 0;
  for (int i = 0; i < n; ++i) {
    const double g = radio::sample_small_scale(rng);
    CHECK(g > 0.0);
    sum += g;
    if (g < 0.1) ++below_01;
  }
  const double mean = sum / n;
  CHECK(mean > 0.99);
  CHECK(mean < 1.01);
  const double p01 = static_cast<double>(below_01) / n;
  CHECK(std::fabs(p01 - (1.0 - std::exp(-0.1))) < 1e-3);
}

TEST_CASE("decoding_error_prob: capacity-matched point is exactly one half") {
  const radio::CodingConfig coding{200, 1600};
  // Choose snr so n*ln(1+snr) lands on L*ln2 to the last ulp.
  const double c_target = 1600.0 * std::log(2.0) / 200.0;
  const double snr = std::expm1(c_target);
  CHECK(std::fabs(radio::decoding_error_prob(snr, coding) - 0.5) < 1e-12);
}

TEST_CASE("decoding_error_prob: strictly decreasing in snr") {
  // Grid spanning the representable transition region (saturated tails
  // round to exactly 0/1 in doubles and carry no ordering information).
  const radio::CodingConfig coding{300, 600};
  double prev = 2.0;
  for (int i = 0; i < 1000; ++i) {
    const double snr = 2.0 + 0.0025 * i;
    const double eps = radio::decoding_error_prob(snr, coding);
    CHECK(eps < prev);
    prev = eps;
  }
}

TEST_CASE("decoding_error_prob: long-blocklength limits") {
  // Rate below capacity: error vanishes; above: error saturates.
  const double snr = 1.0;  // capacity ~ 1 bit/symbol
  CHECK(radio::decoding_error_prob(snr, {100000, 50000}) < 1e-9);
  CHECK(radio::decoding_error_prob(snr, {100000, 150000}) > 1.0 - 1e-9);
}

TEST_CASE("decoding_error_prob agrees with the reference evaluation") {
  RngStream rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const double snr = std::exp(rng.uniform(std::log(0.05), std::log(500.0)));
    const int n = 50 + static_cast<int>(rng.uniform01() * 5000.0);
    const int bits = 100 + static_cast<int>(rng.uniform01() * 4000.0);
    const double got = radio::decoding_error_prob(snr, {n, bits});
    const double x = (n * std::log1p(snr) - bits * std::log(2.0)) /
                     std::sqrt(n * (1.0 - 1.0 / ((1.0 + snr) * (1.0 + snr))));
    const double want = oracles::q_reference(x);
    CHECK(std::fabs(got - want) <= 1e-10 * std::max(want, 1e-300));
  }
  // The 10 dB / 200-symbol / 200-byte spot value: rate far above capacity.
  const double eps = radio::decoding_error_prob(10.0, {200, 1600});
  CHECK(eps == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(radio::decoding_error_prob(0.0, {200, 1600}), DomainError);
  CHECK_THROWS_AS(radio::decoding_error_prob(1.0, {0, 1600}), DomainError);
}
