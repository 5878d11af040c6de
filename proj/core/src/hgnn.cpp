#include "hgkt/hgnn.hpp"

#include <cmath>
#include <regex>

#include "hgkt/errors.hpp"

namespace hgkt {

std::string GnnLayout::str() const { return "B-" + std::to_string(bottom) + "_T-" + std::to_string(top); }

GnnLayout GnnLayout::parse(std::string_view text) {
  static const std::regex pattern(R"(B-([0-9]+)_T-([0-9]+))");
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_match(text.begin(), text.end(), m, pattern)) {
    throw ValidationError("gnn layout must look like B-3_T-1, got \"" + std::string(text) + "\"");
  }
  GnnLayout layout{std::stoul(m[1].str()), std::stoul(m[2].str())};
  if (layout.bottom == 0 || layout.top == 0) throw ValidationError("gnn layout needs at least one layer per level");
  return layout;
}

std::string_view to_string(SchemaPreset preset) {
  switch (preset) {
    case SchemaPreset::none: return "none";
    case SchemaPreset::direct_only: return "direct_only";
    case SchemaPreset::indirect_only: return "indirect_only";
    case SchemaPreset::merge: return "merge";
    case SchemaPreset::both: return "both";
  }
  return "both";
}

SchemaPreset parse_schema_preset(std::string_view name) {
  for (auto p : {SchemaPreset::none, SchemaPreset::direct_only, SchemaPreset::indirect_only, SchemaPreset::merge,
                 SchemaPreset::both}) {
    if (to_string(p) == name) return p;
  }
  throw ValidationError("unknown ablation preset \"" + std::string(name) +
                        "\" (expected none, direct_only, indirect_only, merge or both)");
}

std::vector<double> normalize_adjacency(std::span<const double> a, std::size_t n) {
  if (a.size() != n * n) throw DimensionError("normalize_adjacency: matrix is not " + std::to_string(n) + "x" + std::to_string(n));
  std::vector<double> out(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] = std::max(a[i * n + j], a[j * n + i]) + (i == j ? 1.0 : 0.0);
  std::vector<double> inv_sqrt(n);
  for (std::size_t i = 0; i < n; ++i) {
    double d = 0;
    for (std::size_t j = 0; j < n; ++j) d += out[i * n + j];
    inv_sqrt[i] = 1.0 / std::sqrt(d);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] *= inv_sqrt[i] * inv_sqrt[j];
  return out;
}

std::vector<double> adjacency_matrix(const DirectSupportGraph& graph) {
  return std::vector<double>(graph.adjacency.begin(), graph.adjacency.end());
}

namespace nn {

namespace {

template <typename T>
Tensor<T> to_tensor(Shape shape, const std::vector<double>& values) {
  return Tensor<T>::constant(shape, std::vector<T>(values.begin(), values.end()));
}

}  // namespace

template <typename T>
Tensor<T> gcn_layer(const Tensor<T>& a_hat, const Tensor<T>& h, const Tensor<T>& w, const Tensor<T>& b) {
  return relu(add(matmul(a_hat, matmul(h, w)), b));
}

template <typename T>
Pooled<T> pool(const Tensor<T>& a_e, const Tensor<T>& h_e, const Tensor<T>& s_e) {
  if (a_e.rows() != s_e.rows() || h_e.rows() != s_e.rows()) {
    throw DimensionError("pool: assignment " + s_e.shape().str() + " vs adjacency " + a_e.shape().str() +
                         " and features " + h_e.shape().str());
  }
  Tensor<T> s_t = transpose(s_e);
  return {matmul(s_t, matmul(a_e, s_e)), matmul(s_t, h_e)};
}

template <typename T>
SchemaEncoder<T>::SchemaEncoder(EncoderConfig config, const Heg& heg, std::mt19937_64& rng)
    : config_(config), exercises_(heg.exercise_count()), schemas_(heg.schema_count()), assign_(heg.assignment.assign) {
  heg.validate();
  const std::size_t n = exercises_, s = schemas_;
  const std::size_t d = config_.exer_dim, k = config_.schema_dim;
  auto add_param = [&](std::string name, Shape shape, std::size_t fan_in) {
    auto v = uniform_init<T>(shape.size(), fan_in, rng);
    // convolution biases start at zero: a random bias outweighs the shrinking
    // propagated signal after a few layers and makes every row alike
    if (name.ends_with(".bias") && !name.starts_with("indirect.")) std::fill(v.begin(), v.end(), T(0));
    params_.push_back({std::move(name), Tensor<T>::parameter(shape, std::move(v))});
  };
  const bool uses_bottom = config_.preset == SchemaPreset::both || config_.preset == SchemaPreset::direct_only ||
                           config_.preset == SchemaPreset::merge;
  const bool uses_indirect = config_.preset == SchemaPreset::indirect_only || config_.preset == SchemaPreset::merge;

  if (uses_bottom) {
    std::vector<double> adj = adjacency_matrix(heg.graph);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) adj[i * n + j] = std::max(adj[i * n + j], adj[j * n + i]);
    a_e_hat_ = to_tensor<T>({n, n}, normalize_adjacency(adj, n));
    for (std::size_t l = 0; l < config_.layout.bottom; ++l) {
      const std::size_t in = l == 0 ? n : d;
      add_param("hgnn.bottom." + std::to_string(l) + ".weight", {in, d}, in);
      add_param("hgnn.bottom." + std::to_string(l) + ".bias", {1, d}, in);
    }
    std::vector<double> st(s * n, 0.0);
    std::vector<double> sizes(s, 0.0);
    for (std::size_t i = 0; i < n; ++i) sizes[assign_[i]] += 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      st[assign_[i] * n + i] = config_.mean_pool ? 1.0 / sizes[assign_[i]] : 1.0;
    }
    if (config_.preset == SchemaPreset::both) {
      pool_matrix_ = to_tensor<T>({s, n}, st);
      std::vector<double> dense = heg.assignment.dense();
      auto pooled = pool(to_tensor<double>({n, n}, adj), Tensor<double>::zeros({n, 1}),
                         to_tensor<double>({n, s}, dense));
      auto a_s = pooled.adjacency.values();
      a_s_hat_ = to_tensor<T>({s, s}, normalize_adjacency(std::vector<double>(a_s.begin(), a_s.end()), s));
      for (std::size_t l = 0; l < config_.layout.top; ++l) {
        const std::size_t in = l == 0 ? d : k;
        add_param("hgnn.top." + std::to_string(l) + ".weight", {in, k}, in);
        add_param("hgnn.top." + std::to_string(l) + ".bias", {1, k}, in);
      }
    } else {
      // direct_only / merge: schema memory is the per-schema mean of exercise rows
      for (std::size_t i = 0; i < n; ++i) st[assign_[i] * n + i] = 1.0 / sizes[assign_[i]];
      pool_matrix_ = to_tensor<T>({s, n}, st);
      add_param("direct.weight", {d, k}, d);
      add_param("direct.bias", {1, k}, d);
    }
  }
  if (uses_indirect) {
    add_param("indirect.weight", {s, k}, s);
    add_param("indirect.bias", {1, k}, s);
  }
}

template <typename T>
Tensor<T> SchemaEncoder<T>::param(std::string_view name) const {
  for (const auto& p : params_) {
    if (p.name == name) return p.tensor;
  }
  throw DimensionError("schema encoder has no parameter " + std::string(name));
}

template <typename T>
Tensor<T> SchemaEncoder<T>::bottom() const {
  // F is the identity, so the first layer reduces to A_hat W0.
  Tensor<T> h = relu(add(matmul(a_e_hat_, param("hgnn.bottom.0.weight")), param("hgnn.bottom.0.bias")));
  for (std::size_t l = 1; l < config_.layout.bottom; ++l) {
    h = gcn_layer(a_e_hat_, h, param("hgnn.bottom." + std::to_string(l) + ".weight"),
                  param("hgnn.bottom." + std::to_string(l) + ".bias"));
  }
  return h;
}

template <typename T>
Tensor<T> SchemaEncoder<T>::direct(const Tensor<T>& h) const {
  return gcn_layer(a_e_hat_, h, param("direct.weight"), param("direct.bias"));
}

template <typename T>
Tensor<T> SchemaEncoder<T>::indirect() const {
  // one-hot(schema) times a dense layer is a row lookup of the weight table
  return tanh(add(param("indirect.weight"), param("indirect.bias")));
}

template <typename T>
SchemaEmbedding<T> SchemaEncoder<T>::forward() const {
  const std::size_t k = config_.schema_dim;
  switch (config_.preset) {
    case SchemaPreset::none:
      return {Tensor<T>::zeros({exercises_, k}), Tensor<T>::zeros({schemas_, k})};
    case SchemaPreset::indirect_only: {
      Tensor<T> table = indirect();
      return {gather_rows(table, std::span<const std::size_t>(assign_)), table};
    }
    case SchemaPreset::direct_only: {
      Tensor<T> rows = direct(bottom());
      return {rows, matmul(pool_matrix_, rows)};
    }
    case SchemaPreset::merge: {
      Tensor<T> rows = direct(bottom());
      Tensor<T> table = indirect();
      Tensor<T> ex = concat<T>({rows, gather_rows(table, std::span<const std::size_t>(assign_))}, 1);
      return {ex, concat<T>({matmul(pool_matrix_, rows), table}, 1)};
    }
    case SchemaPreset::both: {
      Tensor<T> h_s = matmul(pool_matrix_, bottom());
      for (std::size_t l = 0; l < config_.layout.top; ++l) {
        h_s = gcn_layer(a_s_hat_, h_s, param("hgnn.top." + std::to_string(l) + ".weight"),
                        param("hgnn.top." + std::to_string(l) + ".bias"));
      }
      return {gather_rows(h_s, std::span<const std::size_t>(assign_)), h_s};
    }
  }
  throw DimensionError("unknown schema preset");
}

template Tensor<float> gcn_layer(const Tensor<float>&, const Tensor<float>&, const Tensor<float>&, const Tensor<float>&);
template Tensor<double> gcn_layer(const Tensor<double>&, const Tensor<double>&, const Tensor<double>&,
                                  const Tensor<double>&);
template Pooled<float> pool(const Tensor<float>&, const Tensor<float>&, const Tensor<float>&);
template Pooled<double> pool(const Tensor<double>&, const Tensor<double>&, const Tensor<double>&);
template class SchemaEncoder<float>;
template class SchemaEncoder<double>;

}  // namespace nn
}  // namespace hgkt
