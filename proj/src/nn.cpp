#include "urllc/nn.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "urllc/errors.hpp"
#include "urllc/rng.hpp"

namespace urllc::nn {

namespace {

bool is_hidden_activation(Activation a) {
  return a == Activation::kRelu || a == Activation::kTanh;
}

bool is_output_activation(Activation a) {
  return a == Activation::kIdentity || a == Activation::kSigmoid ||
         a == Activation::kSoftmax;
}

void check_finite(const std::vector<double>& v, int layer, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw NumericalError("non-finite " + std::string(what) + " at layer " +
                           std::to_string(layer));
    }
  }
}

// In-place grouped softmax with the usual max-shift stabilization.
void softmax_groups(std::vector<double>& z, int group) {
  const int n = static_cast<int>(z.size());
  const int g = group > 0 ? group : n;
  for (int start = 0; start < n; start += g) {
    const int end = std::min(start + g, n);
    double zmax = z[start];
    for (int i = start + 1; i < end; ++i) zmax = std::max(zmax, z[i]);
    double sum = 0.0;
    for (int i = start; i < end; ++i) {
      z[i] = std::exp(z[i] - zmax);
      sum += z[i];
    }
    for (int i = start; i < end; ++i) z[i] /= sum;
  }
}

struct Trace {
  std::vector<std::vector<double>> pre;   // z[l], l = 0..L-1
  std::vector<std::vector<double>> post;  // a[0] = input, a[l+1] = act(z[l])
};

Trace forward_traced(const MlpParams& p, std::span<const double> input) {
  if (static_cast<int>(input.size()) != p.input_dim()) {
    throw ShapeError("forward: input length " + std::to_string(input.size()) +
                     " != layer_sizes[0] " + std::to_string(p.input_dim()));
  }
  const int layers = p.num_weight_layers();
  Trace t;
  t.pre.resize(layers);
  t.post.resize(layers + 1);
  t.post[0].assign(input.begin(), input.end());

  for (int l = 0; l < layers; ++l) {
    const int in = p.layer_sizes[l];
    const int out = p.layer_sizes[l + 1];
    const double* w = p.weights[l].data();
    const std::vector<double>& a = t.post[l];
    std::vector<double>& z = t.pre[l];
    z.assign(p.biases[l].begin(), p.biases[l].end());
    for (int r = 0; r < out; ++r) {
      const double* row = w + static_cast<std::size_t>(r) * in;
      double acc = z[r];
      for (int c = 0; c < in; ++c) acc += row[c] * a[c];
      z[r] = acc;
    }
    check_finite(z, l, "pre-activation");

    std::vector<double>& y = t.post[l + 1];
    y = z;
    switch (p.activations[l]) {
      case Activation::kIdentity:
        break;
      case Activation::kRelu:
        for (double& v : y) v = v > 0.0 ? v : 0.0;
        break;
      case Activation::kTanh:
        for (double& v : y) v = std::tanh(v);
        break;
      case Activation::kSigmoid:
        for (double& v : y) v = 1.0 / (1.0 + std::exp(-v));
        break;
      case Activation::kSoftmax:
        softmax_groups(y, p.softmax_group);
        break;
    }
  }
  return t;
}

template <typename T>
void append_raw(std::vector<std::uint8_t>& out, const T& v) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
  out.insert(out.end(), p, p + sizeof(T));
}

template <typename T>
T read_raw(std::span<const std::uint8_t> bytes, std::size_t& off) {
  if (off + sizeof(T) > bytes.size()) {
    throw ParseError("model stream truncated at byte " + std::to_string(off));
  }
  T v;
  std::memcpy(&v, bytes.data() + off, sizeof(T));
  off += sizeof(T);
  return v;
}

}  // namespace

std::size_t MlpParams::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    n += weights[l].size() + biases[l].size();
  }
  return n;
}

bool MlpParams::shape_congruent_with(const MlpParams& other) const {
  return layer_sizes == other.layer_sizes;
}

FreezeMask FreezeMask::last_k_trainable(int layers, int k) {
  FreezeMask m{std::vector<std::uint8_t>(static_cast<std::size_t>(layers), 0)};
  for (int l = std::max(0, layers - k); l < layers; ++l) m.trainable[l] = 1;
  return m;
}

MlpParams mlp_init(const std::vector<int>& layer_sizes, Activation hidden,
                   Activation output, std::uint64_t seed, int softmax_group) {
  if (layer_sizes.size() < 2) {
    throw ConfigError("mlp_init: need at least input and output widths");
  }
  for (int s : layer_sizes) {
    if (s < 1) throw ConfigError("mlp_init: layer width must be >= 1");
  }
  if (!is_hidden_activation(hidden) && layer_sizes.size() > 2) {
    throw ConfigError("mlp_init: hidden activation must be relu or tanh");
  }
  if (!is_output_activation(output)) {
    throw ConfigError("mlp_init: output activation must be identity, sigmoid or softmax");
  }
  if (output == Activation::kSoftmax) {
    const int g = softmax_group > 0 ? softmax_group : layer_sizes.back();
    if (layer_sizes.back() % g != 0) {
      throw ConfigError("mlp_init: softmax group must divide the output width");
    }
  }

  MlpParams p;
  p.layer_sizes = layer_sizes;
  p.softmax_group = softmax_group;
  const int layers = p.num_weight_layers();
  p.weights.resize(layers);
  p.biases.resize(layers);
  p.activations.assign(static_cast<std::size_t>(layers), hidden);
  p.activations.back() = output;

  RngStream rng(seed);
  for (int l = 0; l < layers; ++l) {
    const int in = layer_sizes[l];
    const int out = layer_sizes[l + 1];
    const double scale = 1.0 / std::sqrt(static_cast<double>(in));
    p.weights[l].resize(static_cast<std::size_t>(out) * in);
    for (double& w : p.weights[l]) w = rng.uniform(-scale, scale);
    p.biases[l].assign(static_cast<std::size_t>(out), 0.0);
  }
  return p;
}

std::vector<double> forward(const MlpParams& params, std::span<const double> input) {
  Trace t = forward_traced(params, input);
  return std::move(t.post.back());
}

BackwardResult backward(const MlpParams& params, std::span<const double> input,
                        std::span<const double> output_grad) {
  if (static_cast<int>(output_grad.size()) != params.output_dim()) {
    throw ShapeError("backward: output_grad length mismatch");
  }
  const Trace t = forward_traced(params, input);
  const int layers = params.num_weight_layers();

  BackwardResult res;
  res.grads = zero_gradients(params);

  // delta = dL/dz at the current layer, starting from the output activation.
  std::vector<double> delta(output_grad.begin(), output_grad.end());
  const std::vector<double>& y_out = t.post.back();
  switch (params.activations.back()) {
    case Activation::kIdentity:
      break;
    case Activation::kSigmoid:
      for (std::size_t i = 0; i < delta.size(); ++i) {
        delta[i] *= y_out[i] * (1.0 - y_out[i]);
      }
      break;
    case Activation::kTanh:
      for (std::size_t i = 0; i < delta.size(); ++i) {
        delta[i] *= 1.0 - y_out[i] * y_out[i];
      }
      break;
    case Activation::kRelu:
      for (std::size_t i = 0; i < delta.size(); ++i) {
        if (t.pre.back()[i] <= 0.0) delta[i] = 0.0;
      }
      break;
    case Activation::kSoftmax: {
      const int n = params.output_dim();
      const int g = params.softmax_group > 0 ? params.softmax_group : n;
      std::vector<double> dz(delta.size());
      for (int start = 0; start < n; start += g) {
        const int end = std::min(start + g, n);
        double dot = 0.0;
        for (int i = start; i < end; ++i) dot += delta[i] * y_out[i];
        for (int i = start; i < end; ++i) dz[i] = y_out[i] * (delta[i] - dot);
      }
      delta = std::move(dz);
      break;
    }
  }

  for (int l = layers - 1; l >= 0; --l) {
    const int in = params.layer_sizes[l];
    const int out = params.layer_sizes[l + 1];
    const std::vector<double>& a_prev = t.post[l];

    check_finite(delta, l, "gradient");
    std::vector<double>& gw = res.grads.weights[l];
    for (int r = 0; r < out; ++r) {
      const double d = delta[r];
      double* grow = gw.data() + static_cast<std::size_t>(r) * in;
      for (int c = 0; c < in; ++c) grow[c] = d * a_prev[c];
    }
    res.grads.biases[l] = delta;

    // Propagate to the previous layer's post-activation, then through its
    // activation derivative.
    std::vector<double> da(static_cast<std::size_t>(in), 0.0);
    const double* w = params.weights[l].data();
    for (int r = 0; r < out; ++r) {
      const double d = delta[r];
      const double* row = w + static_cast<std::size_t>(r) * in;
      for (int c = 0; c < in; ++c) da[c] += d * row[c];
    }
    if (l == 0) {
      res.input_grad = std::move(da);
      break;
    }
    const std::vector<double>& z_prev = t.pre[l - 1];
    const std::vector<double>& a = t.post[l];
    (void)a;
    switch (params.activations[l - 1]) {
      case Activation::kIdentity:
        break;
      case Activation::kRelu:
        for (int i = 0; i < in; ++i) {
          if (z_prev[i] <= 0.0) da[i] = 0.0;
        }
        break;
      case Activation::kTanh:
        for (int i = 0; i < in; ++i) {
          const double th = t.post[l][i];
          da[i] *= 1.0 - th * th;
        }
        break;
      case Activation::kSigmoid:
        for (int i = 0; i < in; ++i) {
          const double s = t.post[l][i];
          da[i] *= s * (1.0 - s);
        }
        break;
      case Activation::kSoftmax:
        throw ConfigError("softmax is only supported as the output activation");
    }
    delta = std::move(da);
  }
  return res;
}

Gradients zero_gradients(const MlpParams& params) {
  Gradients g;
  g.weights.resize(params.weights.size());
  g.biases.resize(params.biases.size());
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    g.weights[l].assign(params.weights[l].size(), 0.0);
    g.biases[l].assign(params.biases[l].size(), 0.0);
  }
  return g;
}

void apply_update_in_place(MlpParams& params, const Gradients& grads,
                           double learning_rate, const FreezeMask& mask) {
  if (grads.weights.size() != params.weights.size() ||
      mask.trainable.size() != params.weights.size()) {
    throw ShapeError("apply_update: gradient/mask layer count mismatch");
  }
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    if (!mask.trainable[l]) continue;
    if (grads.weights[l].size() != params.weights[l].size() ||
        grads.biases[l].size() != params.biases[l].size()) {
      throw ShapeError("apply_update: gradient shape mismatch at layer " +
                       std::to_string(l));
    }
    double* w = params.weights[l].data();
    const double* gw = grads.weights[l].data();
    for (std::size_t i = 0; i < params.weights[l].size(); ++i) {
      w[i] -= learning_rate * gw[i];
    }
    double* b = params.biases[l].data();
    const double* gb = grads.biases[l].data();
    for (std::size_t i = 0; i < params.biases[l].size(); ++i) {
      b[i] -= learning_rate * gb[i];
    }
  }
}

MlpParams apply_update(const MlpParams& params, const Gradients& grads,
                       double learning_rate, const FreezeMask& mask) {
  MlpParams out = params;
  apply_update_in_place(out, grads, learning_rate, mask);
  return out;
}

SgdMomentum::SgdMomentum(const MlpParams& params, double learning_rate, double momentum)
    : learning_rate_(learning_rate), momentum_(momentum), velocity_(zero_gradients(params)) {}

void SgdMomentum::step(MlpParams& params, const Gradients& grads, const FreezeMask& mask) {
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    if (!mask.trainable[l]) continue;
    double* vw = velocity_.weights[l].data();
    const double* gw = grads.weights[l].data();
    for (std::size_t i = 0; i < velocity_.weights[l].size(); ++i) {
      vw[i] = momentum_ * vw[i] + gw[i];
    }
    double* vb = velocity_.biases[l].data();
    const double* gb = grads.biases[l].data();
    for (std::size_t i = 0; i < velocity_.biases[l].size(); ++i) {
      vb[i] = momentum_ * vb[i] + gb[i];
    }
  }
  apply_update_in_place(params, velocity_, learning_rate_, mask);
}

std::vector<std::uint8_t> serialize(const MlpParams& params) {
  std::vector<std::uint8_t> out;
  out.reserve(16 + params.parameter_count() * sizeof(double));
  const char magic[4] = {'M', 'L', 'P', '1'};
  out.insert(out.end(), magic, magic + 4);
  append_raw<std::uint32_t>(out, static_cast<std::uint32_t>(params.layer_sizes.size()));
  for (int s : params.layer_sizes) append_raw<std::int32_t>(out, s);
  for (Activation a : params.activations) {
    append_raw<std::uint8_t>(out, static_cast<std::uint8_t>(a));
  }
  append_raw<std::uint32_t>(out, static_cast<std::uint32_t>(params.softmax_group));
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    for (double w : params.weights[l]) append_raw<double>(out, w);
    for (double b : params.biases[l]) append_raw<double>(out, b);
  }
  return out;
}

MlpParams deserialize(std::span<const std::uint8_t> bytes) {
  std::size_t off = 0;
  if (bytes.size() < 4 || std::memcmp(bytes.data(), "MLP1", 4) != 0) {
    throw ParseError("bad model magic; expected MLP1");
  }
  off = 4;
  const auto n_sizes = read_raw<std::uint32_t>(bytes, off);
  if (n_sizes < 2 || n_sizes > 64) {
    throw ParseError("implausible layer count " + std::to_string(n_sizes));
  }
  MlpParams p;
  p.layer_sizes.resize(n_sizes);
  for (auto& s : p.layer_sizes) {
    const auto v = read_raw<std::int32_t>(bytes, off);
    if (v < 1) throw ParseError("non-positive layer width in header");
    s = v;
  }
  const int layers = p.num_weight_layers();
  p.activations.resize(layers);
  for (auto& a : p.activations) {
    const auto code = read_raw<std::uint8_t>(bytes, off);
    if (code > static_cast<std::uint8_t>(Activation::kSoftmax)) {
      throw ParseError("unknown activation code " + std::to_string(code));
    }
    a = static_cast<Activation>(code);
  }
  p.softmax_group = static_cast<int>(read_raw<std::uint32_t>(bytes, off));
  p.weights.resize(layers);
  p.biases.resize(layers);
  for (int l = 0; l < layers; ++l) {
    const std::size_t in = static_cast<std::size_t>(p.layer_sizes[l]);
    const std::size_t out = static_cast<std::size_t>(p.layer_sizes[l + 1]);
    p.weights[l].resize(in * out);
    for (double& w : p.weights[l]) w = read_raw<double>(bytes, off);
    p.biases[l].resize(out);
    for (double& b : p.biases[l]) b = read_raw<double>(bytes, off);
  }
  if (off != bytes.size()) {
    throw ParseError("trailing bytes after model payload");
  }
  return p;
}

void save_mlp(const MlpParams& params, const std::string& path) {
  const std::vector<std::uint8_t> bytes = serialize(params);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open model file for writing: " + path);
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
}

MlpParams load_mlp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open model file: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

double mse(std::span<const double> prediction, std::span<const double> target) {
  if (prediction.size() != target.size()) throw ShapeError("mse: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < prediction.size(); ++i) {
    const double d = prediction[i] - target[i];
    acc += d * d;
  }
  return acc / static_cast<double>(prediction.size());
}

std::vector<double> mse_output_grad(std::span<const double> prediction,
                                    std::span<const double> target) {
  if (prediction.size() != target.size()) throw ShapeError("mse grad: length mismatch");
  std::vector<double> g(prediction.size());
  const double scale = 2.0 / static_cast<double>(prediction.size());
  for (std::size_t i = 0; i < prediction.size(); ++i) {
    g[i] = scale * (prediction[i] - target[i]);
  }
  return g;
}

double cross_entropy(std::span<const double> output, std::span<const int> labels,
                     int group) {
  const int g = group > 0 ? group : static_cast<int>(output.size());
  if (output.size() % static_cast<std::size_t>(g) != 0 ||
      labels.size() != output.size() / static_cast<std::size_t>(g)) {
    throw ShapeError("cross_entropy: group/label layout mismatch");
  }
  double loss = 0.0;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    const double p = output[k * g + static_cast<std::size_t>(labels[k])];
    loss -= std::log(std::max(p, 1e-300));
  }
  return loss;
}

std::vector<double> cross_entropy_output_grad(std::span<const double> output,
                                              std::span<const int> labels, int group) {
  const int g = group > 0 ? group : static_cast<int>(output.size());
  if (output.size() % static_cast<std::size_t>(g) != 0 ||
      labels.size() != output.size() / static_cast<std::size_t>(g)) {
    throw ShapeError("cross_entropy grad: group/label layout mismatch");
  }
  // dL/dy_i = -1/y_i on the label entry; combined with the softmax Jacobian
  // in backward() this reproduces the usual (y - onehot) logits gradient.
  std::vector<double> grad(output.size(), 0.0);
  for (std::size_t k = 0; k < labels.size(); ++k) {
    const std::size_t idx = k * g + static_cast<std::size_t>(labels[k]);
    grad[idx] = -1.0 / std::max(output[idx], 1e-12);
  }
  return grad;
}

}  // namespace urllc::nn
