// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "mnnas/candidate_ops.hpp"
#include "mnnas/graph.hpp"
#include "mnnas/graph_stats.hpp"
#include "mnnas/tensor.hpp"

namespace mnnas {

class Rng;

// mnnas: per-node probabilities over ops in Z = K parallel search dimensions.
// nodenas_single_dim: one learnable score row per node, single dimension.
// graph_level_nas: per-node probabilities averaged over nodes (all nodes of a
// graph share one architecture), the differentiable-NAS baseline.
enum class SearchMode { kMnnas, kNodeNasSingleDim, kGraphLevelNas };

SearchMode parse_search_mode(const std::string& s);
std::string to_string(SearchMode m);

struct ModelConfig {
  int64_t d_i = 12;  // input feature dim
  int64_t d_e = 16;  // encoder embedding dim
  int64_t d_m = 16;  // mapped embedding dim; must equal d_e for the residual
  int64_t d_o = 3;   // output head dim (classes or clusters)
  int64_t layers = 2;
  std::vector<std::string> op_names = default_op_names();
  double eta_init = 0.1;  // init of the encoder's learnable global-mix scalar
  double beta = 0.1;      // weight of the cosine diversity regularizer
  SearchMode mode = SearchMode::kMnnas;

  int64_t K() const { return static_cast<int64_t>(op_names.size()); }
  void validate() const;
};

// Everything about one graph the model consumes, precomputed once so repeated
// epochs re-use message routing and structure statistics.
struct GraphInputs {
  GraphContext ctx;
  Tensor lp_features;  // (n, 4) [assortativity, log1p(d^2/msd), log1p(d/md), log1p(edpm)]
  Tensor features;     // (n, d_i)

  explicit GraphInputs(const Graph& g);
  GraphInputs(const Graph& g, Tensor features_override);
};

struct ForwardResult {
  Tensor node_repr;                       // (n, d_e), post-residual final layer
  std::vector<std::vector<Tensor>> probs;  // [layer][dim] -> (n, K) simplex rows
  Tensor l_cos;                           // scalar, summed over layers
};

class Model {
 public:
  explicit Model(ModelConfig cfg);

  const ModelConfig& config() const { return cfg_; }
  void init(Rng& rng);

  ForwardResult forward(const GraphInputs& in);

  // Stable order (serialized with checkpoints): encoder, then per layer
  // [op weights..., link-pattern map, attention map, (node scores)], head.
  std::vector<Tensor> parameters();
  std::vector<std::pair<std::string, Tensor>> named_parameters();
  int64_t count_parameters();

  // Reinstates a single-dim score table from a checkpoint (those tensors are
  // created lazily on forward, so a fresh model has nowhere to copy into).
  void restore_node_scores(int64_t layer, Tensor scores);

  Tensor head_weights() { return head_w_; }
  OperationSet& layer_ops(int64_t l) { return layers_[static_cast<size_t>(l)].ops; }

 private:
  struct Layer {
    OperationSet ops;
    Tensor lp_w;         // (4, K)
    Tensor attn_w;       // (d_m, d_m)
    Tensor node_scores;  // (n, K); single-dim mode only, sized on first forward
  };

  Tensor encode(const Tensor& features);
  std::vector<Tensor> attention(Layer& layer, const std::vector<Tensor>& mapped,
                                const Tensor& lp);
  Tensor cosine_regularizer(const std::vector<Tensor>& mapped);

  ModelConfig cfg_;
  Tensor enc_w1_, enc_g1_, enc_w2_, enc_g2_, eta_;
  std::vector<Layer> layers_;
  Tensor head_w_;
};

}  // namespace mnnas
