#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace signforge::ad {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& s) noexcept;
std::string shape_string(const Shape& s);

enum class NodeKind { Constant, Parameter, Intermediate };

template <class T>
struct Node {
  Shape shape;
  std::vector<T> value;
  std::vector<T> grad;  // sized on first use
  NodeKind kind = NodeKind::Constant;
  bool requires_grad = false;
};

// Handle to a value in the computation graph. Copies share the node.
template <class T>
class Tensor {
 public:
  Tensor() = default;

  static Tensor constant(Shape shape, std::vector<T> values);
  static Tensor zeros(Shape shape);
  // A leaf whose gradient is collected by every tape that uses it.
  static Tensor parameter(Shape shape, std::vector<T> values);

  bool defined() const noexcept { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  std::size_t rank() const { return node_->shape.size(); }
  std::size_t size() const { return node_->value.size(); }
  std::size_t rows() const;  // leading extent (1 for scalars)
  std::size_t cols() const;  // trailing extent (1 for scalars)

  std::span<const T> values() const { return node_->value; }
  std::span<T> mutable_values() { return node_->value; }
  // Empty until a backward pass (or accumulate) has written a gradient.
  std::span<const T> grad() const { return node_->grad; }
  std::span<T> mutable_grad();
  void clear_grad() { node_->grad.clear(); }
  T item() const;

  bool requires_grad() const { return node_->requires_grad; }
  NodeKind kind() const { return node_->kind; }
  Node<T>* node() const noexcept { return node_.get(); }
  const std::shared_ptr<Node<T>>& shared() const noexcept { return node_; }

 private:
  template <class>
  friend class Tape;
  explicit Tensor(std::shared_ptr<Node<T>> n) : node_(std::move(n)) {}
  std::shared_ptr<Node<T>> node_;
};

// Records operations of one forward pass and replays them in reverse.
//
// Gradients of intermediate nodes live in the nodes themselves; gradients
// of parameters are kept per tape (see grad()), so independent tapes may
// share parameters across threads and be reduced in a fixed order later.
template <class T>
class Tape {
 public:
  // A non-recording tape computes values only (inference).
  explicit Tape(bool record = true) : record_(record) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool recording() const noexcept { return record_; }

  // [m,k] x [k,n] -> [m,n]; with transpose_b, b is [n,k].
  Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b, bool transpose_b = false);
  // Same shapes, or a:[m,n] + b:[n] (bias over the leading axis).
  Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);
  Tensor<T> multiply(const Tensor<T>& a, const Tensor<T>& b);
  Tensor<T> scale(const Tensor<T>& a, T factor);
  // Over the last axis. With `causal`, entry (i, j) of an [m,n] input is
  // masked when j > i + (n - m).
  Tensor<T> softmax(const Tensor<T>& a, bool causal = false);
  Tensor<T> layer_norm(const Tensor<T>& x, const Tensor<T>& gain, const Tensor<T>& bias,
                       T eps = T(1e-5));
  Tensor<T> relu(const Tensor<T>& a);
  // table:[V,d], ids -> [ids.size(), d]
  Tensor<T> embedding_lookup(const Tensor<T>& table, std::span<const std::size_t> ids);
  // axis 0 stacks rows, axis 1 joins columns (rank-2 inputs).
  Tensor<T> concat(const std::vector<Tensor<T>>& parts, std::size_t axis);
  Tensor<T> slice(const Tensor<T>& a, std::size_t axis, std::size_t begin, std::size_t end);
  Tensor<T> mean(const Tensor<T>& a);
  Tensor<T> mse(const Tensor<T>& pred, const Tensor<T>& target);
  // logits:[m,V]; mean over rows whose target != ignore_index.
  Tensor<T> cross_entropy(const Tensor<T>& logits, std::span<const std::size_t> targets,
                          std::size_t ignore_index = static_cast<std::size_t>(-1));

  // Throws NonScalarLoss, or DoubleBackward on a second call.
  void backward(const Tensor<T>& loss);

  // Gradient of `t` after backward(); empty if `t` did not influence the loss.
  std::span<const T> grad(const Tensor<T>& t) const;

  std::size_t size() const noexcept { return entries_.size(); }

 private:
  struct Entry {
    std::shared_ptr<Node<T>> out;
    std::vector<std::shared_ptr<Node<T>>> inputs;
    std::function<void(Tape&, Node<T>&)> backward;
  };

  Tensor<T> emit(Shape shape, std::vector<T> value, std::vector<Tensor<T>> inputs,
                 std::function<void(Tape&, Node<T>&)> backward);
  // Gradient accumulator for `n`, or nullptr when `n` needs none.
  T* grad_buffer(Node<T>* n);

  bool record_;
  bool done_ = false;
  std::vector<Entry> entries_;
  std::unordered_map<const Node<T>*, std::vector<T>> leaf_grads_;
};

// Ordered, named parameter collection.
template <class T>
class ParameterSet {
 public:
  Tensor<T>& add(std::string name, Shape shape, std::vector<T> values);
  Tensor<T>& at(const std::string& name);
  const Tensor<T>& at(const std::string& name) const;
  bool contains(const std::string& name) const;

  const std::vector<std::pair<std::string, Tensor<T>>>& entries() const noexcept {
    return params_;
  }
  std::size_t count() const noexcept { return params_.size(); }
  std::size_t scalar_count() const;

  // Adds this tape's parameter gradients into each parameter's grad,
  // scaled by `weight`.
  void accumulate(const Tape<T>& tape, T weight = T(1));
  void zero_grad();

  // Order-sensitive digest of every parameter's bytes.
  std::uint64_t checksum() const;

 private:
  std::vector<std::pair<std::string, Tensor<T>>> params_;
  std::unordered_map<std::string, std::size_t> index_;
};

// p -= lr * grad(p) for every parameter, then clears the grads.
template <class T>
void sgd_step(ParameterSet<T>& params, T lr);

// Adam moments keyed by parameter position in the set.
template <class T>
class Adam {
 public:
  explicit Adam(T beta1 = T(0.9), T beta2 = T(0.98), T eps = T(1e-9))
      : beta1_(beta1), beta2_(beta2), eps_(eps) {}

  // Applies one update and clears the grads.
  void step(ParameterSet<T>& params, T lr);
  std::size_t steps() const noexcept { return t_; }

 private:
  T beta1_, beta2_, eps_;
  std::size_t t_ = 0;
  std::vector<std::vector<T>> m_, v_;
};

extern template class Tensor<float>;
extern template class Tensor<double>;
extern template class Tape<float>;
extern template class Tape<double>;
extern template class ParameterSet<float>;
extern template class ParameterSet<double>;
extern template class Adam<float>;
extern template class Adam<double>;
extern template void sgd_step<float>(ParameterSet<float>&, float);
extern template void sgd_step<double>(ParameterSet<double>&, double);

}  // namespace signforge::ad
