#include "urllc/radio.hpp"

#include <cmath>
#include <string>

#include "urllc/errors.hpp"

namespace urllc::radio {

namespace {
constexpr double kLn2 = 0.6931471805599453;
constexpr double kInvSqrt2 = 0.7071067811865476;
}  // namespace

double q_function(double x) { return 0.5 * std::erfc(x * kInvSqrt2); }

double large_scale_gain(double distance_m) {
  if (distance_m < 1.0) {
    throw DomainError("large_scale_gain: distance must be >= 1 m, got " +
                      std::to_string(distance_m));
  }
  const double pl_db = 35.3 + 37.6 * std::log10(distance_m);
  return std::pow(10.0, -pl_db / 10.0);
}

double sample_small_scale(RngStream& rng) { return rng.exponential(1.0); }

double capacity_nats(double snr) { return std::log1p(snr); }

double dispersion(double snr) {
  const double a = 1.0 + snr;
  return 1.0 - 1.0 / (a * a);
}

double decoding_error_prob(double snr, const CodingConfig& coding) {
  if (!(snr > 0.0)) {
    throw DomainError("decoding_error_prob: snr must be positive");
  }
  if (coding.blocklength_symbols < 1 || coding.payload_bits < 1) {
    throw DomainError("decoding_error_prob: need n >= 1 and L >= 1");
  }
  const double n = static_cast<double>(coding.blocklength_symbols);
  const double bits = static_cast<double>(coding.payload_bits);
  const double margin_nats = n * capacity_nats(snr) - bits * kLn2;
  const double spread = std::sqrt(n * dispersion(snr));
  return q_function(margin_nats / spread);
}

}  // namespace urllc::radio
