#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace hgkt::nn {

/// Every tensor is a row-major matrix; vectors are 1 x n rows.
struct Shape {
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::size_t size() const { return rows * cols; }
  bool operator==(const Shape&) const = default;
  std::string str() const;
};

template <typename T>
struct Node {
  Shape shape;
  std::vector<T> value;
  std::vector<T> grad;  // allocated on first use
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> inputs;
  std::function<void(Node&)> backward;  // pushes this->grad into inputs

  T* ensure_grad() {
    if (grad.empty()) grad.assign(value.size(), T(0));
    return grad.data();
  }
};

template <typename T>
class Tensor;

/// Records differentiable operations in creation (= topological) order.
template <typename T>
class Tape {
 public:
  void record(std::shared_ptr<Node<T>> node) { nodes_.push_back(std::move(node)); }
  /// Seeds d(loss)/d(loss) = 1 and runs every recorded backward rule in
  /// reverse. Gradients accumulate into parameters until zero_grad().
  void backward(const Tensor<T>& loss);
  void clear() { nodes_.clear(); }
  std::size_t size() const { return nodes_.size(); }

 private:
  std::vector<std::shared_ptr<Node<T>>> nodes_;
};

/// Makes `tape` the recording target for operations on this thread.
template <typename T>
class TapeScope {
 public:
  explicit TapeScope(Tape<T>& tape);
  ~TapeScope();
  TapeScope(const TapeScope&) = delete;
  TapeScope& operator=(const TapeScope&) = delete;

 private:
  Tape<T>* previous_;
};

template <typename T>
Tape<T>* active_tape();

/// While alive, relu and the cross-entropy clamp append one branch flag per
/// element they see on this thread. Two evaluations that produce different
/// patterns sit on different sides of a kink.
class BranchRecorder {
 public:
  BranchRecorder();
  ~BranchRecorder();
  BranchRecorder(const BranchRecorder&) = delete;
  BranchRecorder& operator=(const BranchRecorder&) = delete;

  void push(std::uint8_t branch) { pattern_.push_back(branch); }
  const std::vector<std::uint8_t>& pattern() const { return pattern_; }

 private:
  std::vector<std::uint8_t> pattern_;
  BranchRecorder* previous_;
};

/// Receives the output gradient and one span per input (empty when that
/// input does not need a gradient); must accumulate, not overwrite.
template <typename T>
using CustomBackward = std::function<void(std::span<const T> grad_out, std::vector<std::span<T>>& grad_in)>;

/// Cheap shared handle to a node of the computation graph.
template <typename T>
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::shared_ptr<Node<T>> node) : node_(std::move(node)) {}

  static Tensor zeros(Shape shape);
  static Tensor filled(Shape shape, T value);
  static Tensor constant(Shape shape, std::vector<T> values);
  static Tensor parameter(Shape shape, std::vector<T> values);
  /// User-defined differentiable operation.
  static Tensor custom(Shape shape, std::vector<T> values, const std::vector<Tensor>& inputs,
                       CustomBackward<T> backward);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  std::size_t rows() const { return node_->shape.rows; }
  std::size_t cols() const { return node_->shape.cols; }
  std::size_t size() const { return node_->value.size(); }
  bool requires_grad() const { return node_->requires_grad; }

  std::span<const T> values() const { return node_->value; }
  std::span<T> mutable_values() { return node_->value; }
  std::span<const T> grad() const { return node_->grad; }
  std::span<T> mutable_grad() { return std::span<T>(node_->ensure_grad(), node_->value.size()); }
  void zero_grad() { node_->grad.clear(); }

  T item() const;
  T at(std::size_t r, std::size_t c) const { return node_->value[r * cols() + c]; }

  const std::shared_ptr<Node<T>>& node() const { return node_; }

 private:
  std::shared_ptr<Node<T>> node_;
};

template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b);
/// Element-wise ops broadcast any dimension of size 1.
template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> scale(const Tensor<T>& a, T factor);
template <typename T>
Tensor<T> relu(const Tensor<T>& a);
template <typename T>
Tensor<T> sigmoid(const Tensor<T>& a);
template <typename T>
Tensor<T> tanh(const Tensor<T>& a);
/// axis 1: each row sums to one; axis 0: each column.
template <typename T>
Tensor<T> softmax(const Tensor<T>& a, int axis = 1);
template <typename T>
Tensor<T> concat(const std::vector<Tensor<T>>& parts, int axis = 1);
template <typename T>
Tensor<T> slice(const Tensor<T>& a, int axis, std::size_t begin, std::size_t end);
template <typename T>
Tensor<T> transpose(const Tensor<T>& a);
template <typename T>
Tensor<T> sum(const Tensor<T>& a);
template <typename T>
Tensor<T> sum(const Tensor<T>& a, int axis);
template <typename T>
Tensor<T> mean(const Tensor<T>& a);
/// Row-wise cosine similarity -> rows x 1. A zero row gives 0 with zero gradient.
template <typename T>
Tensor<T> cosine(const Tensor<T>& u, const Tensor<T>& v);
/// Inverted dropout; identity when !train or p == 0.
template <typename T>
Tensor<T> dropout(const Tensor<T>& a, double p, bool train, std::mt19937_64& rng);
template <typename T>
Tensor<T> gather_rows(const Tensor<T>& a, std::span<const std::size_t> rows);
/// -sum_t mask_t [y_t ln p_t + (1 - y_t) ln(1 - p_t)] with p clamped to
/// [1e-7, 1 - 1e-7]; `pred` is n x 1.
template <typename T>
Tensor<T> binary_cross_entropy(const Tensor<T>& pred, std::span<const T> labels, std::span<const T> mask);

inline constexpr double kProbabilityClamp = 1e-7;

/// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) initial values.
template <typename T>
std::vector<T> uniform_init(std::size_t count, std::size_t fan_in, std::mt19937_64& rng);

/// Constant row-stacked one-hot matrix.
template <typename T>
Tensor<T> one_hot_rows(std::span<const std::size_t> indices, std::size_t width);

}  // namespace hgkt::nn
