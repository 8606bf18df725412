#pragma once

// Test-side reference implementations, deliberately independent of the
// library code paths they check.

#include <cmath>
#include <span>
#include <vector>

#include "urllc/nn.hpp"

namespace oracles {

// erfc via power series for small |x| and the Lentz continued fraction for
// the tail; good to ~1e-14 relative everywhere we probe. Distinct from the
// libm implementation used by radio::q_function.
inline double erfc_reference(double x) {
  const double ax = std::fabs(x);
  double result;
  if (ax < 2.0) {
    // erf(x) = 2/sqrt(pi) * sum_k (-1)^k x^(2k+1) / (k! (2k+1))
    double term = ax;
    double sum = ax;
    const double x2 = ax * ax;
    for (int k = 1; k < 200; ++k) {
      term *= -x2 / static_cast<double>(k);
      const double contrib = term / static_cast<double>(2 * k + 1);
      sum += contrib;
      if (std::fabs(contrib) < 1e-18 * std::fabs(sum)) break;
    }
    result = 1.0 - 2.0 / std::sqrt(M_PI) * sum;
  } else {
    // DLMF 7.9.1: erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x +
    // (3/2)/(x + 2/(x + ...))))), evaluated with modified Lentz.
    double f = 1e-300;
    double c = f;
    double d = 0.0;
    for (int n = 1; n < 400; ++n) {
      const double an = n == 1 ? 1.0 : static_cast<double>(n - 1) / 2.0;
      const double bn = ax;
      d = bn + an * d;
      if (d == 0.0) d = 1e-300;
      c = bn + an / c;
      if (c == 0.0) c = 1e-300;
      d = 1.0 / d;
      const double delta = c * d;
      f *= delta;
      if (std::fabs(delta - 1.0) < 1e-17) break;
    }
    result = std::exp(-ax * ax) / std::sqrt(M_PI) * f;
  }
  return x >= 0.0 ? result : 2.0 - result;
}

inline double q_reference(double x) { return 0.5 * erfc_reference(x / std::sqrt(2.0)); }

// Layer-by-layer forward pass written from the definition, separate from
// nn::forward, for cross-checking.
inline std::vector<double> forward_reference(const urllc::nn::MlpParams& p,
                                             std::span<const double> input) {
  std::vector<double> a(input.begin(), input.end());
  for (int l = 0; l < p.num_weight_layers(); ++l) {
    const int in = p.layer_sizes[static_cast<std::size_t>(l)];
    const int out = p.layer_sizes[static_cast<std::size_t>(l) + 1];
    std::vector<double> z(static_cast<std::size_t>(out));
    for (int r = 0; r < out; ++r) {
      double acc = p.biases[static_cast<std::size_t>(l)][static_cast<std::size_t>(r)];
      for (int c = 0; c < in; ++c) {
        acc += p.weights[static_cast<std::size_t>(l)]
                        [static_cast<std::size_t>(r) * static_cast<std::size_t>(in) +
                         static_cast<std::size_t>(c)] *
               a[static_cast<std::size_t>(c)];
      }
      z[static_cast<std::size_t>(r)] = acc;
    }
    using urllc::nn::Activation;
    switch (p.activations[static_cast<std::size_t>(l)]) {
      case Activation::kIdentity:
        break;
      case Activation::kRelu:
        for (double& v : z) v = std::max(0.0, v);
        break;
      case Activation::kTanh:
        for (double& v : z) v = std::tanh(v);
        break;
      case Activation::kSigmoid:
        for (double& v : z) v = 1.0 / (1.0 + std::exp(-v));
        break;
      case Activation::kSoftmax: {
        const int g = p.softmax_group > 0 ? p.softmax_group : out;
        for (int s = 0; s < out; s += g) {
          double m = z[static_cast<std::size_t>(s)];
          for (int i = s; i < s + g; ++i) m = std::max(m, z[static_cast<std::size_t>(i)]);
          double sum = 0.0;
          for (int i = s; i < s + g; ++i) {
            z[static_cast<std::size_t>(i)] = std::exp(z[static_cast<std::size_t>(i)] - m);
            sum += z[static_cast<std::size_t>(i)];
          }
          for (int i = s; i < s + g; ++i) z[static_cast<std::size_t>(i)] /= sum;
        }
        break;
      }
    }
    a = std::move(z);
  }
  return a;
}

// Central finite differences of an arbitrary scalar loss over every
// parameter of the net.
template <typename LossFn>
urllc::nn::Gradients fd_gradients(const urllc::nn::MlpParams& params, LossFn loss,
                                  double h = 1e-5) {
  urllc::nn::Gradients g = urllc::nn::zero_gradients(params);
  urllc::nn::MlpParams work = params;
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    for (std::size_t i = 0; i < params.weights[l].size(); ++i) {
      const double orig = work.weights[l][i];
      work.weights[l][i] = orig + h;
      const double up = loss(work);
      work.weights[l][i] = orig - h;
      const double down = loss(work);
      work.weights[l][i] = orig;
      g.weights[l][i] = (up - down) / (2.0 * h);
    }
    for (std::size_t i = 0; i < params.biases[l].size(); ++i) {
      const double orig = work.biases[l][i];
      work.biases[l][i] = orig + h;
      const double up = loss(work);
      work.biases[l][i] = orig - h;
      const double down = loss(work);
      work.biases[l][i] = orig;
      g.biases[l][i] = (up - down) / (2.0 * h);
    }
  }
  return g;
}

}  // namespace oracles
