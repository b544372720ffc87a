// SPDX-License-Identifier: Apache-2.0
#include "mnnas/model.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "mnnas/rng.hpp"

namespace mnnas {

SearchMode parse_search_mode(const std::string& s) {
  if (s == "mnnas") return SearchMode::kMnnas;
  if (s == "nodenas_single_dim") return SearchMode::kNodeNasSingleDim;
  if (s == "graph_level_nas") return SearchMode::kGraphLevelNas;
  throw std::invalid_argument("unknown search mode: " + s);
}

std::string to_string(SearchMode m) {
  switch (m) {
    case SearchMode::kMnnas: return "mnnas";
    case SearchMode::kNodeNasSingleDim: return "nodenas_single_dim";
    case SearchMode::kGraphLevelNas: return "graph_level_nas";
  }
  throw std::logic_error("invalid search mode");
}

void ModelConfig::validate() const {
  if (d_i < 1 || d_e < 1 || d_m < 1 || d_o < 1)
    throw std::invalid_argument("model config: dimensions must be >= 1");
  if (layers < 1) throw std::invalid_argument("model config: layers must be >= 1");
  if (op_names.empty())
    throw std::invalid_argument("model config: candidate op set must not be empty");
  if (d_e != d_m)
    throw std::invalid_argument(
        "model config: d_e must equal d_m (residual adds encoder output to fused "
        "mapped embeddings)");
  std::set<std::string> seen;
  for (const auto& name : op_names) {
    make_candidate_op(name, 1, 1);  // throws on unknown names
    if (!seen.insert(name).second)
      throw std::invalid_argument("model config: duplicate candidate op: " + name);
  }
}

namespace {

Tensor build_lp_features(const Graph& g) {
  const DegreeStats stats = compute_degree_stats(g);
  const AssortativityResult assort = assortativity_edge_pearson(g);
  const auto degs = g.degrees();
  const int64_t n = g.num_nodes();
  std::vector<double> rows(static_cast<size_t>(n) * 4);
  for (int64_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(degs[static_cast<size_t>(i)]);
    rows[static_cast<size_t>(i) * 4 + 0] = assort.value;
    rows[static_cast<size_t>(i) * 4 + 1] = std::log1p(d * d / stats.mean_square_degree);
    rows[static_cast<size_t>(i) * 4 + 2] = std::log1p(d / stats.mean_degree);
    rows[static_cast<size_t>(i) * 4 + 3] = std::log1p(stats.edge_degree_product_mean);
  }
  return Tensor::from_values({n, 4}, std::move(rows));
}

Tensor feature_tensor(const Graph& g) {
  const int64_t n = g.num_nodes();
  const int64_t d = g.feature_dim();
  std::vector<double> rows(static_cast<size_t>(n * d));
  for (int64_t i = 0; i < n; ++i) {
    const auto row = g.feature_row(static_cast<NodeId>(i));
    std::copy(row.begin(), row.end(), rows.begin() + static_cast<size_t>(i * d));
  }
  return Tensor::from_values({n, d}, std::move(rows));
}

}  // namespace

GraphInputs::GraphInputs(const Graph& g)
    : ctx(g), lp_features(build_lp_features(g)), features(feature_tensor(g)) {}

GraphInputs::GraphInputs(const Graph& g, Tensor features_override)
    : ctx(g), lp_features(build_lp_features(g)), features(std::move(features_override)) {
  if (features.rows() != g.num_nodes())
    throw std::invalid_argument("graph inputs: feature override must have one row per node");
}

Model::Model(ModelConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  enc_w1_ = Tensor::zeros({cfg_.d_i, cfg_.d_e}, /*requires_grad=*/true);
  enc_g1_ = Tensor::zeros({cfg_.d_i, cfg_.d_i}, /*requires_grad=*/true);
  enc_w2_ = Tensor::zeros({cfg_.d_e, cfg_.d_e}, /*requires_grad=*/true);
  enc_g2_ = Tensor::zeros({cfg_.d_e, cfg_.d_e}, /*requires_grad=*/true);
  eta_ = Tensor::scalar(cfg_.eta_init, /*requires_grad=*/true);
  layers_.reserve(static_cast<size_t>(cfg_.layers));
  for (int64_t l = 0; l < cfg_.layers; ++l) {
    Layer layer{OperationSet(cfg_.op_names, cfg_.d_e, cfg_.d_m),
                Tensor::zeros({4, cfg_.K()}, /*requires_grad=*/true),
                Tensor::zeros({cfg_.d_m, cfg_.d_m}, /*requires_grad=*/true),
                Tensor()};
    layers_.push_back(std::move(layer));
  }
  head_w_ = Tensor::zeros({cfg_.d_m, cfg_.d_o}, /*requires_grad=*/true);
}

void Model::init(Rng& rng) {
  fill_xavier_uniform(enc_w1_, cfg_.d_i, cfg_.d_e, rng);
  fill_xavier_uniform(enc_g1_, cfg_.d_i, cfg_.d_i, rng);
  fill_xavier_uniform(enc_w2_, cfg_.d_e, cfg_.d_e, rng);
  fill_xavier_uniform(enc_g2_, cfg_.d_e, cfg_.d_e, rng);
  eta_.mutable_values()[0] = cfg_.eta_init;
  for (auto& layer : layers_) {
    layer.ops.init(rng);
    fill_xavier_uniform(layer.lp_w, 4, cfg_.K(), rng);
    fill_xavier_uniform(layer.attn_w, cfg_.d_m, cfg_.d_m, rng);
  }
  fill_xavier_uniform(head_w_, cfg_.d_m, cfg_.d_o, rng);
}

// Two stacked applications of h <- relu((h + eta * LINEAR(mean_rows(h))) W),
// sharing one learnable eta. The mean row mixes a whiff of global context into
// every node before the per-node projection.
Tensor Model::encode(const Tensor& features) {
  auto app = [this](const Tensor& h, const Tensor& g, const Tensor& w) {
    Tensor mixed = ops::mul(ops::matmul(ops::mean(h, 0), g), eta_);  // (1, d)
    return ops::relu(ops::matmul(ops::add(h, mixed), w));
  };
  Tensor h = app(features, enc_g1_, enc_w1_);
  return app(h, enc_g2_, enc_w2_);
}

// Scaled bilinear scores between each dimension's query embedding and every
// mapped embedding, gated elementwise by the link-pattern code, then softmaxed
// over ops. Each search dimension z uses mapped embedding z as its query.
std::vector<Tensor> Model::attention(Layer& layer, const std::vector<Tensor>& mapped,
                                     const Tensor& lp) {
  const int64_t n = mapped.front().rows();
  const int64_t K = cfg_.K();
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(cfg_.d_m));

  if (cfg_.mode == SearchMode::kNodeNasSingleDim) {
    if (!layer.node_scores.defined()) {
      layer.node_scores = Tensor::zeros({n, K}, /*requires_grad=*/true);
    } else if (layer.node_scores.rows() != n) {
      throw std::runtime_error(
          "single-dim mode: per-node score table was sized for " +
          std::to_string(layer.node_scores.rows()) + " nodes but the graph has " +
          std::to_string(n) + "; this mode cannot transfer across graphs");
    }
    return {ops::softmax_rows(layer.node_scores)};
  }

  std::vector<Tensor> probs;
  probs.reserve(static_cast<size_t>(K));
  for (int64_t z = 0; z < K; ++z) {
    Tensor query = ops::matmul(mapped[static_cast<size_t>(z)], layer.attn_w);  // (n, d_m)
    std::vector<Tensor> cols;
    cols.reserve(static_cast<size_t>(K));
    for (int64_t o = 0; o < K; ++o)
      cols.push_back(ops::sum(ops::mul(query, mapped[static_cast<size_t>(o)]), 1));
    Tensor scores = ops::mul(lp, ops::scalar_mul(ops::concat_cols(cols), inv_sqrt_d));
    Tensor p = ops::softmax_rows(scores);
    if (cfg_.mode == SearchMode::kGraphLevelNas) {
      // Collapse to one architecture per graph: average rows, broadcast back.
      p = ops::add(Tensor::zeros({n, K}), ops::mean(p, 0));
    }
    probs.push_back(std::move(p));
  }
  return probs;
}

// Mean pairwise cosine similarity mass between mapped embeddings, summed over
// nodes and ordered op pairs. Zero-norm rows are guarded so they contribute 0.
Tensor Model::cosine_regularizer(const std::vector<Tensor>& mapped) {
  const size_t K = mapped.size();
  std::vector<Tensor> norms(K);
  for (size_t o = 0; o < K; ++o)
    norms[o] = ops::sqrt(
        ops::clamp_min(ops::sum(ops::mul(mapped[o], mapped[o]), 1), 1e-24));
  Tensor total;
  for (size_t o = 0; o < K; ++o) {
    for (size_t p = o + 1; p < K; ++p) {
      Tensor dots = ops::sum(ops::mul(mapped[o], mapped[p]), 1);
      Tensor cos = ops::div(dots, ops::mul(norms[o], norms[p]));
      Tensor s = ops::sum_all(cos);
      total = total.defined() ? ops::add(total, s) : s;
    }
  }
  return ops::scalar_mul(total, 2.0);  // each unordered pair counts both ways
}

ForwardResult Model::forward(const GraphInputs& in) {
  if (in.features.cols() != cfg_.d_i)
    throw std::invalid_argument("forward: features have dim " +
                                std::to_string(in.features.cols()) + ", model expects " +
                                std::to_string(cfg_.d_i));
  ForwardResult out;
  Tensor h = encode(in.features);
  Tensor l_cos;
  for (auto& layer : layers_) {
    std::vector<Tensor> mapped = layer.ops.apply_all(in.ctx, h);
    if (cfg_.K() >= 2) {
      Tensor reg = cosine_regularizer(mapped);
      l_cos = l_cos.defined() ? ops::add(l_cos, reg) : reg;
    }
    Tensor lp = ops::matmul(in.lp_features, layer.lp_w);  // (n, K)
    std::vector<Tensor> probs = attention(layer, mapped, lp);

    // Fuse: mean over dimensions of prob-weighted mapped embeddings, then a
    // nonlinearity and a residual connection back to the layer input.
    Tensor acc;
    for (const auto& p : probs) {
      for (int64_t o = 0; o < cfg_.K(); ++o) {
        Tensor term = ops::scale_rows(mapped[static_cast<size_t>(o)], ops::col_slice(p, o));
        acc = acc.defined() ? ops::add(acc, term) : term;
      }
    }
    const double inv_z = 1.0 / static_cast<double>(probs.size());
    h = ops::add(ops::relu(ops::scalar_mul(acc, inv_z)), h);
    out.probs.push_back(std::move(probs));
  }
  out.node_repr = h;
  out.l_cos = l_cos.defined() ? l_cos : Tensor::scalar(0.0);
  return out;
}

std::vector<Tensor> Model::parameters() {
  std::vector<Tensor> params;
  for (auto& [name, p] : named_parameters()) params.push_back(p);
  return params;
}

std::vector<std::pair<std::string, Tensor>> Model::named_parameters() {
  std::vector<std::pair<std::string, Tensor>> params{{"encoder/w1", enc_w1_},
                                                     {"encoder/g1", enc_g1_},
                                                     {"encoder/w2", enc_w2_},
                                                     {"encoder/g2", enc_g2_},
                                                     {"encoder/eta", eta_}};
  for (size_t l = 0; l < layers_.size(); ++l) {
    auto& layer = layers_[l];
    const std::string prefix = "layer" + std::to_string(l) + "/";
    const auto names = layer.ops.names();
    for (size_t o = 0; o < names.size(); ++o) {
      size_t idx = 0;
      for (auto& p : layer.ops.op(static_cast<int64_t>(o)).parameters())
        params.emplace_back(prefix + names[o] + "/p" + std::to_string(idx++), p);
    }
    params.emplace_back(prefix + "lp_w", layer.lp_w);
    params.emplace_back(prefix + "attn_w", layer.attn_w);
    if (layer.node_scores.defined())
      params.emplace_back(prefix + "node_scores", layer.node_scores);
  }
  params.emplace_back("head_w", head_w_);
  return params;
}

void Model::restore_node_scores(int64_t layer, Tensor scores) {
  if (cfg_.mode != SearchMode::kNodeNasSingleDim)
    throw std::invalid_argument("node score tables only exist in single-dim mode");
  if (layer < 0 || layer >= cfg_.layers)
    throw std::invalid_argument("restore_node_scores: layer out of range");
  if (scores.cols() != cfg_.K())
    throw std::invalid_argument("restore_node_scores: expected K columns");
  layers_[static_cast<size_t>(layer)].node_scores = std::move(scores);
}

int64_t Model::count_parameters() {
  int64_t total = 0;
  for (const auto& p : parameters()) total += p.numel();
  return total;
}

}  // namespace mnnas
