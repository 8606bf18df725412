#include "urllc/federated.hpp"

#include <cmath>
#include <string>

#include "urllc/errors.hpp"

namespace urllc::federated {

AggregationWeights compute_weights(const std::vector<std::int64_t>& sample_counts) {
  if (sample_counts.empty()) throw DomainError("compute_weights: no counts");
  std::int64_t total = 0;
  for (std::int64_t c : sample_counts) {
    if (c < 0) throw DomainError("compute_weights: negative sample count");
    total += c;
  }
  if (total == 0) throw DomainError("compute_weights: all sample counts are zero");
  AggregationWeights w;
  w.weights.reserve(sample_counts.size());
  for (std::int64_t c : sample_counts) {
    w.weights.push_back(static_cast<double>(c) / static_cast<double>(total));
  }
  return w;
}

nn::MlpParams aggregate(const ModelSet& set, const AggregationWeights& weights) {
  if (set.models.empty()) throw ShapeError("aggregate: empty model set");
  if (weights.weights.size() != set.models.size()) {
    throw ShapeError("aggregate: weight count != model count");
  }
  double sum = 0.0;
  for (double w : weights.weights) {
    if (w < 0.0) throw DomainError("aggregate: negative weight");
    sum += w;
  }
  if (std::fabs(sum - 1.0) > 1e-12) {
    throw DomainError("aggregate: weights must sum to 1 (got " + std::to_string(sum) + ")");
  }
  const nn::MlpParams& ref = set.models.front();
  for (std::size_t m = 1; m < set.models.size(); ++m) {
    if (!set.models[m].shape_congruent_with(ref)) {
      throw ShapeError("aggregate: model " + std::to_string(m) + " shape mismatch");
    }
  }

  // Delta form around model 0: out = ref + sum_m w_m (theta_m - ref). The
  // convex-combination fixed point (identical inputs -> identical output)
  // then holds bit-exactly, not just to rounding.
  nn::MlpParams out = ref;
  for (std::size_t m = 0; m < set.models.size(); ++m) {
    const double w = weights.weights[m];
    const nn::MlpParams& src = set.models[m];
    for (std::size_t l = 0; l < out.weights.size(); ++l) {
      for (std::size_t i = 0; i < out.weights[l].size(); ++i) {
        out.weights[l][i] += w * (src.weights[l][i] - ref.weights[l][i]);
      }
      for (std::size_t i = 0; i < out.biases[l].size(); ++i) {
        out.biases[l][i] += w * (src.biases[l][i] - ref.biases[l][i]);
      }
    }
  }
  return out;
}

HierarchicalResult hierarchical_round(const std::vector<ModelSet>& cells) {
  if (cells.empty()) throw ShapeError("hierarchical_round: no cells");
  HierarchicalResult res;
  res.edge_models.reserve(cells.size());
  std::vector<std::int64_t> cell_totals;
  cell_totals.reserve(cells.size());

  const nn::MlpParams* ref = nullptr;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (cells[c].models.empty()) {
      throw ShapeError("hierarchical_round: cell " + std::to_string(c) + " is empty");
    }
    for (const nn::MlpParams& m : cells[c].models) {
      if (ref == nullptr) {
        ref = &m;
      } else if (!m.shape_congruent_with(*ref)) {
        throw ShapeError("hierarchical_round: shape mismatch in cell " + std::to_string(c));
      }
    }
    res.edge_models.push_back(
        aggregate(cells[c], compute_weights(cells[c].sample_counts)));
    std::int64_t total = 0;
    for (std::int64_t n : cells[c].sample_counts) total += n;
    cell_totals.push_back(total);
  }

  ModelSet edge_set;
  edge_set.models = res.edge_models;
  edge_set.sample_counts = cell_totals;
  res.global_model = aggregate(edge_set, compute_weights(cell_totals));
  return res;
}

}  // namespace urllc::federated
