#pragma once

#include <cstdint>
#include <vector>

#include "urllc/nn.hpp"

namespace urllc::federated {

// Hierarchical federated averaging over MlpParams values: locals aggregate
// into one edge model per cell, edge models into a global model. Weight
// policy is count-proportional (FedAvg convention) and pluggable.

struct ModelSet {
  std::vector<nn::MlpParams> models;
  std::vector<std::int64_t> sample_counts;
};

struct AggregationWeights {
  std::vector<double> weights;  // nonnegative, sums to 1
};

// w_k = count_k / sum(counts). Throws DomainError when all counts are zero.
AggregationWeights compute_weights(const std::vector<std::int64_t>& sample_counts);

// Parameter-wise convex combination; all models must be shape-congruent.
nn::MlpParams aggregate(const ModelSet& set, const AggregationWeights& weights);

struct HierarchicalResult {
  std::vector<nn::MlpParams> edge_models;  // one per cell
  nn::MlpParams global_model;
};

// Per-cell aggregation with count-proportional weights, then a global
// aggregation weighted by per-cell total counts.
HierarchicalResult hierarchical_round(const std::vector<ModelSet>& cells);

}  // namespace urllc::federated
