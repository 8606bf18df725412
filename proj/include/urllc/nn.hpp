#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace urllc::nn {

// Minimal fully-connected network engine. Parameters are plain values
// (64-bit doubles throughout) so nets can be copied, serialized, and
// averaged without ceremony. All functions here are pure and
// single-threaded; parallelism belongs to the callers.

enum class Activation : std::uint8_t {
  kIdentity = 0,
  kRelu = 1,
  kTanh = 2,
  kSigmoid = 3,
  kSoftmax = 4,  // output layers only; grouped via MlpParams::softmax_group
};

struct MlpParams {
  std::vector<int> layer_sizes;                // input, hidden..., output widths
  std::vector<std::vector<double>> weights;    // weights[l]: (out x in), row-major
  std::vector<std::vector<double>> biases;     // biases[l]: out
  std::vector<Activation> activations;         // one per parameterized layer; back() is the output activation
  int softmax_group = 0;                       // 0 = softmax over the whole output vector

  int num_weight_layers() const { return static_cast<int>(layer_sizes.size()) - 1; }
  int input_dim() const { return layer_sizes.front(); }
  int output_dim() const { return layer_sizes.back(); }
  std::size_t parameter_count() const;
  bool shape_congruent_with(const MlpParams& other) const;
};

struct Gradients {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
};

// Per-layer trainability: trainable[l] == 0 freezes layer l (weights and
// bias) bitwise. Used for transfer fine-tuning of the last few layers.
struct FreezeMask {
  std::vector<std::uint8_t> trainable;

  static FreezeMask all_trainable(int layers) {
    return FreezeMask{std::vector<std::uint8_t>(static_cast<std::size_t>(layers), 1)};
  }
  // Freeze everything except the last k parameterized layers.
  static FreezeMask last_k_trainable(int layers, int k);
};

// Scaled-uniform init on +-1/sqrt(fan_in); deterministic per seed.
MlpParams mlp_init(const std::vector<int>& layer_sizes, Activation hidden,
                   Activation output, std::uint64_t seed, int softmax_group = 0);

std::vector<double> forward(const MlpParams& params, std::span<const double> input);

struct BackwardResult {
  Gradients grads;
  std::vector<double> input_grad;  // dL/dx, needed to chain critics into actors
};

// Reverse-mode gradients of an arbitrary loss given dL/dy at the
// post-activation output. Throws NumericalError (naming the layer) if an
// intermediate goes non-finite.
BackwardResult backward(const MlpParams& params, std::span<const double> input,
                        std::span<const double> output_grad);

Gradients zero_gradients(const MlpParams& params);

// theta <- theta - lr * g on trainable layers; frozen layers are returned
// bit-identical.
MlpParams apply_update(const MlpParams& params, const Gradients& grads,
                       double learning_rate, const FreezeMask& mask);
void apply_update_in_place(MlpParams& params, const Gradients& grads,
                           double learning_rate, const FreezeMask& mask);

// Plain SGD with optional momentum (velocity kept per optimizer instance).
class SgdMomentum {
 public:
  SgdMomentum(const MlpParams& params, double learning_rate, double momentum);

  void step(MlpParams& params, const Gradients& grads, const FreezeMask& mask);
  void set_learning_rate(double lr) { learning_rate_ = lr; }
  double learning_rate() const { return learning_rate_; }

 private:
  double learning_rate_;
  double momentum_;
  Gradients velocity_;
};

// Versioned binary model format: magic "MLP1", little-endian header
// (layer count, sizes, activation codes, softmax group), then per layer
// the row-major weights followed by the bias vector as 64-bit floats.
std::vector<std::uint8_t> serialize(const MlpParams& params);
MlpParams deserialize(std::span<const std::uint8_t> bytes);
void save_mlp(const MlpParams& params, const std::string& path);
MlpParams load_mlp(const std::string& path);

// Loss helpers shared by the training loops.
double mse(std::span<const double> prediction, std::span<const double> target);
std::vector<double> mse_output_grad(std::span<const double> prediction,
                                    std::span<const double> target);
// Summed cross-entropy over the softmax groups of `output`; labels hold one
// class index per group. Returns dL/dy at the post-softmax output.
double cross_entropy(std::span<const double> output, std::span<const int> labels,
                     int group);
std::vector<double> cross_entropy_output_grad(std::span<const double> output,
                                              std::span<const int> labels, int group);

}  // namespace urllc::nn
