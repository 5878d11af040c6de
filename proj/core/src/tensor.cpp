#include "hgkt/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Core>

#include "hgkt/errors.hpp"

namespace hgkt::nn {

std::string Shape::str() const { return "(" + std::to_string(rows) + "x" + std::to_string(cols) + ")"; }

namespace {

template <typename T>
Tape<T>*& tape_slot() {
  thread_local Tape<T>* slot = nullptr;
  return slot;
}

BranchRecorder*& recorder_slot() {
  thread_local BranchRecorder* slot = nullptr;
  return slot;
}

template <typename T>
using NodePtr = std::shared_ptr<Node<T>>;

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

[[noreturn]] void shape_error(const char* op, const Shape& a, const Shape& b) {
  throw DimensionError(std::string(op) + ": incompatible shapes " + a.str() + " and " + b.str());
}

template <typename T>
Tensor<T> finish(Shape shape, std::vector<T> value, std::vector<NodePtr<T>> inputs,
                 std::function<void(Node<T>&)> backward) {
  auto node = std::make_shared<Node<T>>();
  node->shape = shape;
  node->value = std::move(value);
  Tape<T>* tape = tape_slot<T>();
  bool grad = tape && std::any_of(inputs.begin(), inputs.end(), [](const NodePtr<T>& n) { return n->requires_grad; });
  if (grad) {
    node->requires_grad = true;
    node->inputs = std::move(inputs);
    node->backward = std::move(backward);
    tape->record(node);
  }
  return Tensor<T>(std::move(node));
}

Shape broadcast_shape(const char* op, const Shape& a, const Shape& b) {
  auto dim = [&](std::size_t x, std::size_t y) {
    if (x == y || y == 1) return x;
    if (x == 1) return y;
    shape_error(op, a, b);
  };
  return {dim(a.rows, b.rows), dim(a.cols, b.cols)};
}

inline std::size_t bidx(const Shape& s, std::size_t r, std::size_t c) {
  return (s.rows == 1 ? 0 : r) * s.cols + (s.cols == 1 ? 0 : c);
}

enum class BinOp { add, sub, mul };

template <typename T>
Tensor<T> binary(const char* name, BinOp op, const Tensor<T>& a, const Tensor<T>& b) {
  const Shape sa = a.shape(), sb = b.shape();
  const Shape so = broadcast_shape(name, sa, sb);
  std::vector<T> out(so.size());
  const T* av = a.values().data();
  const T* bv = b.values().data();
  if (sa == so && sb == so) {
    for (std::size_t k = 0; k < out.size(); ++k) {
      out[k] = op == BinOp::add ? av[k] + bv[k] : op == BinOp::sub ? av[k] - bv[k] : av[k] * bv[k];
    }
  } else {
    for (std::size_t r = 0; r < so.rows; ++r)
      for (std::size_t c = 0; c < so.cols; ++c) {
        T x = av[bidx(sa, r, c)], y = bv[bidx(sb, r, c)];
        out[r * so.cols + c] = op == BinOp::add ? x + y : op == BinOp::sub ? x - y : x * y;
      }
  }
  return finish<T>(so, std::move(out), {a.node(), b.node()}, [sa, sb, so, op](Node<T>& self) {
    const auto& na = self.inputs[0];
    const auto& nb = self.inputs[1];
    const T* g = self.grad.data();
    T* ga = na->requires_grad ? na->ensure_grad() : nullptr;
    T* gb = nb->requires_grad ? nb->ensure_grad() : nullptr;
    for (std::size_t r = 0; r < so.rows; ++r)
      for (std::size_t c = 0; c < so.cols; ++c) {
        const T go = g[r * so.cols + c];
        const std::size_t ia = bidx(sa, r, c), ib = bidx(sb, r, c);
        switch (op) {
          case BinOp::add:
            if (ga) ga[ia] += go;
            if (gb) gb[ib] += go;
            break;
          case BinOp::sub:
            if (ga) ga[ia] += go;
            if (gb) gb[ib] -= go;
            break;
          case BinOp::mul:
            if (ga) ga[ia] += go * nb->value[ib];
            if (gb) gb[ib] += go * na->value[ia];
            break;
        }
      }
  });
}

template <typename T, typename F, typename D>
Tensor<T> unary(const Tensor<T>& a, F f, D dfdx_from_y) {
  std::vector<T> out(a.size());
  const T* av = a.values().data();
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = f(av[k]);
  return finish<T>(a.shape(), std::move(out), {a.node()}, [dfdx_from_y](Node<T>& self) {
    auto& in = self.inputs[0];
    T* gi = in->ensure_grad();
    for (std::size_t k = 0; k < self.value.size(); ++k) gi[k] += self.grad[k] * dfdx_from_y(in->value[k], self.value[k]);
  });
}

}  // namespace

BranchRecorder::BranchRecorder() : previous_(recorder_slot()) { recorder_slot() = this; }
BranchRecorder::~BranchRecorder() { recorder_slot() = previous_; }

namespace {

template <typename T>
void record_branches(std::span<const T> values, T lo, T hi) {
  BranchRecorder* rec = recorder_slot();
  if (!rec) return;
  for (T x : values) rec->push(x <= lo ? 0 : (x > hi ? 2 : 1));
}

}  // namespace

template <typename T>
Tape<T>* active_tape() {
  return tape_slot<T>();
}

template <typename T>
TapeScope<T>::TapeScope(Tape<T>& tape) : previous_(tape_slot<T>()) {
  tape_slot<T>() = &tape;
}

template <typename T>
TapeScope<T>::~TapeScope() {
  tape_slot<T>() = previous_;
}

template <typename T>
void Tape<T>::backward(const Tensor<T>& loss) {
  if (loss.shape() != Shape{1, 1}) throw DimensionError("backward: loss must be a scalar, got " + loss.shape().str());
  if (!loss.requires_grad()) throw DimensionError("backward: loss does not depend on any parameter");
  loss.node()->ensure_grad()[0] += T(1);
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    Node<T>& n = **it;
    if (n.backward && !n.grad.empty()) n.backward(n);
  }
}

template <typename T>
Tensor<T> Tensor<T>::zeros(Shape shape) {
  return constant(shape, std::vector<T>(shape.size(), T(0)));
}

template <typename T>
Tensor<T> Tensor<T>::filled(Shape shape, T value) {
  return constant(shape, std::vector<T>(shape.size(), value));
}

template <typename T>
Tensor<T> Tensor<T>::constant(Shape shape, std::vector<T> values) {
  if (values.size() != shape.size()) {
    throw DimensionError("constant: " + std::to_string(values.size()) + " values for shape " + shape.str());
  }
  auto node = std::make_shared<Node<T>>();
  node->shape = shape;
  node->value = std::move(values);
  return Tensor(std::move(node));
}

template <typename T>
Tensor<T> Tensor<T>::parameter(Shape shape, std::vector<T> values) {
  Tensor t = constant(shape, std::move(values));
  t.node_->requires_grad = true;
  return t;
}

template <typename T>
Tensor<T> Tensor<T>::custom(Shape shape, std::vector<T> values, const std::vector<Tensor>& inputs,
                            CustomBackward<T> backward) {
  if (values.size() != shape.size()) throw DimensionError("custom: value count does not match shape " + shape.str());
  std::vector<NodePtr<T>> nodes;
  for (const auto& t : inputs) nodes.push_back(t.node());
  return finish<T>(shape, std::move(values), std::move(nodes), [backward](Node<T>& self) {
    std::vector<std::span<T>> grads;
    for (auto& in : self.inputs) {
      grads.push_back(in->requires_grad ? std::span<T>(in->ensure_grad(), in->value.size()) : std::span<T>());
    }
    backward(self.grad, grads);
  });
}

template <typename T>
T Tensor<T>::item() const {
  if (size() != 1) throw DimensionError("item: tensor of shape " + shape().str() + " is not a scalar");
  return node_->value[0];
}

template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.cols() != b.rows()) shape_error("matmul", a.shape(), b.shape());
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  std::vector<T> out(m * n);
  using Map = Eigen::Map<RowMat<T>>;
  using CMap = Eigen::Map<const RowMat<T>>;
  const auto em = static_cast<Eigen::Index>(m), ek = static_cast<Eigen::Index>(k), en = static_cast<Eigen::Index>(n);
  Map(out.data(), em, en).noalias() = CMap(a.values().data(), em, ek) * CMap(b.values().data(), ek, en);
  return finish<T>({m, n}, std::move(out), {a.node(), b.node()}, [em, ek, en](Node<T>& self) {
    auto& na = self.inputs[0];
    auto& nb = self.inputs[1];
    CMap g(self.grad.data(), em, en);
    if (na->requires_grad) Map(na->ensure_grad(), em, ek).noalias() += g * CMap(nb->value.data(), ek, en).transpose();
    if (nb->requires_grad) Map(nb->ensure_grad(), ek, en).noalias() += CMap(na->value.data(), em, ek).transpose() * g;
  });
}

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  return binary("add", BinOp::add, a, b);
}

template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
  return binary("sub", BinOp::sub, a, b);
}

template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
  return binary("mul", BinOp::mul, a, b);
}

template <typename T>
Tensor<T> scale(const Tensor<T>& a, T factor) {
  return unary(a, [factor](T x) { return x * factor; }, [factor](T, T) { return factor; });
}

template <typename T>
Tensor<T> relu(const Tensor<T>& a) {
  record_branches<T>(a.values(), T(0), std::numeric_limits<T>::infinity());
  return unary(a, [](T x) { return x > T(0) ? x : T(0); }, [](T x, T) { return x > T(0) ? T(1) : T(0); });
}

template <typename T>
Tensor<T> sigmoid(const Tensor<T>& a) {
  return unary(
      a,
      [](T x) {
        if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
        T e = std::exp(x);
        return e / (T(1) + e);
      },
      [](T, T y) { return y * (T(1) - y); });
}

template <typename T>
Tensor<T> tanh(const Tensor<T>& a) {
  return unary(a, [](T x) { return std::tanh(x); }, [](T, T y) { return T(1) - y * y; });
}

template <typename T>
Tensor<T> softmax(const Tensor<T>& a, int axis) {
  if (axis != 0 && axis != 1) throw DimensionError("softmax: axis must be 0 or 1");
  const Shape s = a.shape();
  // Lines are rows (axis 1) or columns (axis 0).
  const std::size_t lines = axis == 1 ? s.rows : s.cols;
  const std::size_t len = axis == 1 ? s.cols : s.rows;
  const std::size_t line_stride = axis == 1 ? s.cols : 1;
  const std::size_t elem_stride = axis == 1 ? 1 : s.cols;
  std::vector<T> out(s.size());
  const T* av = a.values().data();
  for (std::size_t l = 0; l < lines; ++l) {
    const std::size_t base = l * line_stride;
    T mx = av[base];
    for (std::size_t e = 1; e < len; ++e) mx = std::max(mx, av[base + e * elem_stride]);
    T total = 0;
    for (std::size_t e = 0; e < len; ++e) {
      T v = std::exp(av[base + e * elem_stride] - mx);
      out[base + e * elem_stride] = v;
      total += v;
    }
    for (std::size_t e = 0; e < len; ++e) out[base + e * elem_stride] /= total;
  }
  return finish<T>(s, std::move(out), {a.node()}, [lines, len, line_stride, elem_stride](Node<T>& self) {
    T* gi = self.inputs[0]->ensure_grad();
    for (std::size_t l = 0; l < lines; ++l) {
      const std::size_t base = l * line_stride;
      T dot = 0;
      for (std::size_t e = 0; e < len; ++e) {
        std::size_t k = base + e * elem_stride;
        dot += self.grad[k] * self.value[k];
      }
      for (std::size_t e = 0; e < len; ++e) {
        std::size_t k = base + e * elem_stride;
        gi[k] += self.value[k] * (self.grad[k] - dot);
      }
    }
  });
}

template <typename T>
Tensor<T> concat(const std::vector<Tensor<T>>& parts, int axis) {
  if (parts.empty()) throw DimensionError("concat: no inputs");
  if (axis != 0 && axis != 1) throw DimensionError("concat: axis must be 0 or 1");
  Shape so = parts.front().shape();
  for (std::size_t p = 1; p < parts.size(); ++p) {
    const Shape& sp = parts[p].shape();
    if (axis == 1) {
      if (sp.rows != so.rows) shape_error("concat", so, sp);
      so.cols += sp.cols;
    } else {
      if (sp.cols != so.cols) shape_error("concat", so, sp);
      so.rows += sp.rows;
    }
  }
  std::vector<T> out(so.size());
  std::vector<std::size_t> offsets;
  std::size_t off = 0;
  for (const auto& p : parts) {
    offsets.push_back(off);
    const T* pv = p.values().data();
    if (axis == 1) {
      for (std::size_t r = 0; r < so.rows; ++r)
        std::copy_n(pv + r * p.cols(), p.cols(), out.data() + r * so.cols + off);
      off += p.cols();
    } else {
      std::copy_n(pv, p.size(), out.data() + off * so.cols);
      off += p.rows();
    }
  }
  std::vector<NodePtr<T>> nodes;
  for (const auto& p : parts) nodes.push_back(p.node());
  return finish<T>(so, std::move(out), std::move(nodes), [so, axis, offsets](Node<T>& self) {
    for (std::size_t p = 0; p < self.inputs.size(); ++p) {
      auto& in = self.inputs[p];
      if (!in->requires_grad) continue;
      T* gi = in->ensure_grad();
      if (axis == 1) {
        for (std::size_t r = 0; r < so.rows; ++r)
          for (std::size_t c = 0; c < in->shape.cols; ++c) gi[r * in->shape.cols + c] += self.grad[r * so.cols + offsets[p] + c];
      } else {
        const T* src = self.grad.data() + offsets[p] * so.cols;
        for (std::size_t k = 0; k < in->value.size(); ++k) gi[k] += src[k];
      }
    }
  });
}

template <typename T>
Tensor<T> slice(const Tensor<T>& a, int axis, std::size_t begin, std::size_t end) {
  const Shape s = a.shape();
  const std::size_t extent = axis == 1 ? s.cols : s.rows;
  if ((axis != 0 && axis != 1) || begin > end || end > extent) {
    throw DimensionError("slice: range [" + std::to_string(begin) + ", " + std::to_string(end) + ") invalid for " +
                         s.str() + " on axis " + std::to_string(axis));
  }
  Shape so = axis == 1 ? Shape{s.rows, end - begin} : Shape{end - begin, s.cols};
  std::vector<T> out(so.size());
  const T* av = a.values().data();
  if (axis == 1) {
    for (std::size_t r = 0; r < s.rows; ++r) std::copy_n(av + r * s.cols + begin, so.cols, out.data() + r * so.cols);
  } else {
    std::copy_n(av + begin * s.cols, so.size(), out.data());
  }
  return finish<T>(so, std::move(out), {a.node()}, [s, so, axis, begin](Node<T>& self) {
    T* gi = self.inputs[0]->ensure_grad();
    if (axis == 1) {
      for (std::size_t r = 0; r < s.rows; ++r)
        for (std::size_t c = 0; c < so.cols; ++c) gi[r * s.cols + begin + c] += self.grad[r * so.cols + c];
    } else {
      for (std::size_t k = 0; k < so.size(); ++k) gi[begin * s.cols + k] += self.grad[k];
    }
  });
}

template <typename T>
Tensor<T> transpose(const Tensor<T>& a) {
  const Shape s = a.shape();
  std::vector<T> out(s.size());
  const T* av = a.values().data();
  for (std::size_t r = 0; r < s.rows; ++r)
    for (std::size_t c = 0; c < s.cols; ++c) out[c * s.rows + r] = av[r * s.cols + c];
  return finish<T>({s.cols, s.rows}, std::move(out), {a.node()}, [s](Node<T>& self) {
    T* gi = self.inputs[0]->ensure_grad();
    for (std::size_t r = 0; r < s.rows; ++r)
      for (std::size_t c = 0; c < s.cols; ++c) gi[r * s.cols + c] += self.grad[c * s.rows + r];
  });
}

template <typename T>
Tensor<T> sum(const Tensor<T>& a) {
  T total = 0;
  for (T v : a.values()) total += v;
  return finish<T>({1, 1}, {total}, {a.node()}, [](Node<T>& self) {
    auto& in = self.inputs[0];
    T* gi = in->ensure_grad();
    for (std::size_t k = 0; k < in->value.size(); ++k) gi[k] += self.grad[0];
  });
}

template <typename T>
Tensor<T> sum(const Tensor<T>& a, int axis) {
  if (axis != 0 && axis != 1) throw DimensionError("sum: axis must be 0 or 1");
  const Shape s = a.shape();
  Shape so = axis == 1 ? Shape{s.rows, 1} : Shape{1, s.cols};
  std::vector<T> out(so.size(), T(0));
  const T* av = a.values().data();
  for (std::size_t r = 0; r < s.rows; ++r)
    for (std::size_t c = 0; c < s.cols; ++c) out[axis == 1 ? r : c] += av[r * s.cols + c];
  return finish<T>(so, std::move(out), {a.node()}, [s, axis](Node<T>& self) {
    T* gi = self.inputs[0]->ensure_grad();
    for (std::size_t r = 0; r < s.rows; ++r)
      for (std::size_t c = 0; c < s.cols; ++c) gi[r * s.cols + c] += self.grad[axis == 1 ? r : c];
  });
}

template <typename T>
Tensor<T> mean(const Tensor<T>& a) {
  return scale(sum(a), T(1) / static_cast<T>(a.size()));
}

template <typename T>
Tensor<T> cosine(const Tensor<T>& u, const Tensor<T>& v) {
  if (u.shape() != v.shape()) shape_error("cosine", u.shape(), v.shape());
  const std::size_t rows = u.rows(), cols = u.cols();
  std::vector<T> out(rows);
  std::vector<T> nu(rows), nv(rows);
  const T* uv = u.values().data();
  const T* vv = v.values().data();
  for (std::size_t r = 0; r < rows; ++r) {
    T dot = 0, su = 0, sv = 0;
    for (std::size_t c = 0; c < cols; ++c) {
      T x = uv[r * cols + c], y = vv[r * cols + c];
      dot += x * y;
      su += x * x;
      sv += y * y;
    }
    nu[r] = std::sqrt(su);
    nv[r] = std::sqrt(sv);
    out[r] = (su == T(0) || sv == T(0)) ? T(0) : dot / (nu[r] * nv[r]);
  }
  return finish<T>({rows, 1}, std::move(out), {u.node(), v.node()}, [rows, cols, nu, nv](Node<T>& self) {
    auto& a = self.inputs[0];
    auto& b = self.inputs[1];
    T* ga = a->requires_grad ? a->ensure_grad() : nullptr;
    T* gb = b->requires_grad ? b->ensure_grad() : nullptr;
    for (std::size_t r = 0; r < rows; ++r) {
      if (nu[r] == T(0) || nv[r] == T(0)) continue;
      const T g = self.grad[r], c = self.value[r];
      const T inv = T(1) / (nu[r] * nv[r]);
      for (std::size_t k = 0; k < cols; ++k) {
        const T x = a->value[r * cols + k], y = b->value[r * cols + k];
        if (ga) ga[r * cols + k] += g * (y * inv - c * x / (nu[r] * nu[r]));
        if (gb) gb[r * cols + k] += g * (x * inv - c * y / (nv[r] * nv[r]));
      }
    }
  });
}

template <typename T>
Tensor<T> dropout(const Tensor<T>& a, double p, bool train, std::mt19937_64& rng) {
  if (p < 0.0 || p >= 1.0) throw DimensionError("dropout: p must lie in [0, 1)");
  if (!train || p == 0.0) return a;
  const T keep_scale = static_cast<T>(1.0 / (1.0 - p));
  std::vector<T> mask(a.size());
  for (auto& m : mask) {
    double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    m = u < p ? T(0) : keep_scale;
  }
  std::vector<T> out(a.size());
  const T* av = a.values().data();
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = av[k] * mask[k];
  return finish<T>(a.shape(), std::move(out), {a.node()}, [mask = std::move(mask)](Node<T>& self) {
    T* gi = self.inputs[0]->ensure_grad();
    for (std::size_t k = 0; k < mask.size(); ++k) gi[k] += self.grad[k] * mask[k];
  });
}

template <typename T>
Tensor<T> gather_rows(const Tensor<T>& a, std::span<const std::size_t> rows) {
  const std::size_t cols = a.cols();
  std::vector<T> out(rows.size() * cols);
  const T* av = a.values().data();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= a.rows()) {
      throw DimensionError("gather_rows: row " + std::to_string(rows[r]) + " out of range for " + a.shape().str());
    }
    std::copy_n(av + rows[r] * cols, cols, out.data() + r * cols);
  }
  std::vector<std::size_t> idx(rows.begin(), rows.end());
  return finish<T>({rows.size(), cols}, std::move(out), {a.node()}, [idx = std::move(idx), cols](Node<T>& self) {
    T* gi = self.inputs[0]->ensure_grad();
    for (std::size_t r = 0; r < idx.size(); ++r)
      for (std::size_t c = 0; c < cols; ++c) gi[idx[r] * cols + c] += self.grad[r * cols + c];
  });
}

template <typename T>
Tensor<T> binary_cross_entropy(const Tensor<T>& pred, std::span<const T> labels, std::span<const T> mask) {
  if (pred.cols() != 1 || labels.size() != pred.rows() || mask.size() != pred.rows()) {
    throw DimensionError("binary_cross_entropy: prediction " + pred.shape().str() + " vs " +
                         std::to_string(labels.size()) + " labels and " + std::to_string(mask.size()) + " mask entries");
  }
  const T lo = static_cast<T>(kProbabilityClamp), hi = T(1) - static_cast<T>(kProbabilityClamp);
  record_branches<T>(pred.values(), lo, hi);
  T total = 0;
  const T* p = pred.values().data();
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (mask[k] == T(0)) continue;
    T q = std::clamp(p[k], lo, hi);
    total -= mask[k] * (labels[k] * std::log(q) + (T(1) - labels[k]) * std::log(T(1) - q));
  }
  std::vector<T> y(labels.begin(), labels.end()), m(mask.begin(), mask.end());
  return finish<T>({1, 1}, {total}, {pred.node()}, [y = std::move(y), m = std::move(m), lo, hi](Node<T>& self) {
    auto& in = self.inputs[0];
    T* gi = in->ensure_grad();
    for (std::size_t k = 0; k < y.size(); ++k) {
      const T q = in->value[k];
      if (m[k] == T(0) || q < lo || q > hi) continue;
      gi[k] += self.grad[0] * m[k] * (-(y[k] / q) + (T(1) - y[k]) / (T(1) - q));
    }
  });
}

template <typename T>
std::vector<T> uniform_init(std::size_t count, std::size_t fan_in, std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(fan_in, 1)));
  std::vector<T> v(count);
  for (auto& x : v) {
    double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    x = static_cast<T>((2.0 * u - 1.0) * bound);
  }
  return v;
}

template <typename T>
Tensor<T> one_hot_rows(std::span<const std::size_t> indices, std::size_t width) {
  std::vector<T> v(indices.size() * width, T(0));
  for (std::size_t r = 0; r < indices.size(); ++r) {
    if (indices[r] >= width) {
      throw DimensionError("one_hot_rows: index " + std::to_string(indices[r]) + " >= width " + std::to_string(width));
    }
    v[r * width + indices[r]] = T(1);
  }
  return Tensor<T>::constant({indices.size(), width}, std::move(v));
}

#define HGKT_INSTANTIATE(T)                                                                           \
  template class Tape<T>;                                                                             \
  template class TapeScope<T>;                                                                        \
  template class Tensor<T>;                                                                           \
  template Tape<T>* active_tape<T>();                                                                 \
  template Tensor<T> matmul(const Tensor<T>&, const Tensor<T>&);                                      \
  template Tensor<T> add(const Tensor<T>&, const Tensor<T>&);                                         \
  template Tensor<T> sub(const Tensor<T>&, const Tensor<T>&);                                         \
  template Tensor<T> mul(const Tensor<T>&, const Tensor<T>&);                                         \
  template Tensor<T> scale(const Tensor<T>&, T);                                                      \
  template Tensor<T> relu(const Tensor<T>&);                                                          \
  template Tensor<T> sigmoid(const Tensor<T>&);                                                       \
  template Tensor<T> tanh(const Tensor<T>&);                                                          \
  template Tensor<T> softmax(const Tensor<T>&, int);                                                  \
  template Tensor<T> concat(const std::vector<Tensor<T>>&, int);                                      \
  template Tensor<T> slice(const Tensor<T>&, int, std::size_t, std::size_t);                          \
  template Tensor<T> transpose(const Tensor<T>&);                                                     \
  template Tensor<T> sum(const Tensor<T>&);                                                           \
  template Tensor<T> sum(const Tensor<T>&, int);                                                      \
  template Tensor<T> mean(const Tensor<T>&);                                                          \
  template Tensor<T> cosine(const Tensor<T>&, const Tensor<T>&);                                      \
  template Tensor<T> dropout(const Tensor<T>&, double, bool, std::mt19937_64&);                       \
  template Tensor<T> gather_rows(const Tensor<T>&, std::span<const std::size_t>);                     \
  template Tensor<T> binary_cross_entropy(const Tensor<T>&, std::span<const T>, std::span<const T>);  \
  template std::vector<T> uniform_init<T>(std::size_t, std::size_t, std::mt19937_64&);                \
  template Tensor<T> one_hot_rows<T>(std::span<const std::size_t>, std::size_t);

HGKT_INSTANTIATE(float)
HGKT_INSTANTIATE(double)

#undef HGKT_INSTANTIATE

}  // namespace hgkt::nn
