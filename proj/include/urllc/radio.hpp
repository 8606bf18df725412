#pragma once

#include "urllc/rng.hpp"

namespace urllc::radio {

// Channel and short-packet reliability model. Everything is a pure
// function of its arguments; fading draws come from caller-owned streams.

// Thermal noise density at ~290 K plus a few dB noise figure folds into
// this default (-174 dBm/Hz).
inline constexpr double kDefaultNoisePsd = 3.9810717055349565e-21;  // W/Hz

struct RadioLink {
  double distance_m = 0.0;
  double large_scale_gain = 1.0;   // linear power ratio
  double small_scale_gain = 1.0;   // linear, unit mean
  double tx_power_w = 0.1;
  double noise_psd = kDefaultNoisePsd;  // W/Hz
  double bandwidth_hz = 5e6;

  double snr() const {
    return tx_power_w * large_scale_gain * small_scale_gain /
           (noise_psd * bandwidth_hz);
  }
};

struct CodingConfig {
  int blocklength_symbols = 0;  // n
  int payload_bits = 0;         // L
};

// Gaussian tail probability Q(x) = P(N(0,1) > x), via erfc. Relative
// accuracy is ~1e-15 near the mean and stays meaningful far into the tail
// (Q(6) ~ 1e-9 region), which the reliability targets here require.
double q_function(double x);

// Log-distance urban-micro path loss: PL(dB) = 35.3 + 37.6*log10(d).
// Valid for d >= 1 m.
double large_scale_gain(double distance_m);

// Rayleigh-fading power gain: exponential with unit mean, strictly positive.
double sample_small_scale(RngStream& rng);

// Shannon capacity in nats and channel dispersion for a real SNR.
double capacity_nats(double snr);
double dispersion(double snr);

// Normal approximation for the decoding error probability of an
// (n, L)-coded short packet at the given SNR:
//   eps = Q( (n*ln(1+snr) - L*ln 2) / sqrt(n * (1 - (1+snr)^-2)) )
// First-order form in the nat domain, no (log n)/2 correction.
double decoding_error_prob(double snr, const CodingConfig& coding);

}  // namespace urllc::radio
