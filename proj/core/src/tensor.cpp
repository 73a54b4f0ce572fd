#include "signforge/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "signforge/error.hpp"
#include "signforge/parallel.hpp"

namespace signforge::ad {

std::size_t shape_size(const Shape& s) noexcept {
  std::size_t n = 1;
  for (std::size_t d : s) n *= d;
  return n;
}

std::string shape_string(const Shape& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + "]";
}

namespace {

[[noreturn]] void shape_error(const char* op, const Shape& a, const Shape& b) {
  fail(ErrorCode::ShapeMismatch,
       std::string(op) + ": incompatible shapes " + shape_string(a) + " and " + shape_string(b));
}

void require_rank2(const char* op, const Shape& s) {
  if (s.size() != 2)
    fail(ErrorCode::ShapeMismatch, std::string(op) + ": expected a matrix, got " + shape_string(s));
}

std::size_t last_extent(const Shape& s) { return s.empty() ? 1 : s.back(); }

}  // namespace

// ---------------------------------------------------------------------------
// Tensor

template <class T>
Tensor<T> Tensor<T>::constant(Shape shape, std::vector<T> values) {
  if (shape_size(shape) != values.size())
    fail(ErrorCode::ShapeMismatch, "constant: " + std::to_string(values.size()) +
                                       " values for shape " + shape_string(shape));
  auto n = std::make_shared<Node<T>>();
  n->shape = std::move(shape);
  n->value = std::move(values);
  return Tensor(std::move(n));
}

template <class T>
Tensor<T> Tensor<T>::zeros(Shape shape) {
  std::vector<T> v(shape_size(shape), T(0));
  return constant(std::move(shape), std::move(v));
}

template <class T>
Tensor<T> Tensor<T>::parameter(Shape shape, std::vector<T> values) {
  Tensor t = constant(std::move(shape), std::move(values));
  t.node_->kind = NodeKind::Parameter;
  t.node_->requires_grad = true;
  return t;
}

template <class T>
std::size_t Tensor<T>::rows() const {
  return node_->shape.empty() ? 1 : node_->shape.front();
}

template <class T>
std::size_t Tensor<T>::cols() const {
  return last_extent(node_->shape);
}

template <class T>
std::span<T> Tensor<T>::mutable_grad() {
  if (node_->grad.size() != node_->value.size()) node_->grad.assign(node_->value.size(), T(0));
  return node_->grad;
}

template <class T>
T Tensor<T>::item() const {
  if (node_->value.size() != 1)
    fail(ErrorCode::NonScalarLoss, "item() on tensor of shape " + shape_string(node_->shape));
  return node_->value[0];
}

// ---------------------------------------------------------------------------
// Tape plumbing

template <class T>
Tensor<T> Tape<T>::emit(Shape shape, std::vector<T> value, std::vector<Tensor<T>> inputs,
                        std::function<void(Tape&, Node<T>&)> backward) {
  auto out = std::make_shared<Node<T>>();
  out->shape = std::move(shape);
  out->value = std::move(value);
  out->kind = NodeKind::Intermediate;
  bool needs = false;
  for (const auto& in : inputs) needs = needs || in.requires_grad();
  out->requires_grad = record_ && needs;
  if (out->requires_grad) {
    if (done_) fail(ErrorCode::DoubleBackward, "tape already consumed by backward()");
    Entry e;
    e.out = out;
    e.inputs.reserve(inputs.size());
    for (auto& in : inputs) e.inputs.push_back(in.shared());
    e.backward = std::move(backward);
    entries_.push_back(std::move(e));
  }
  return Tensor<T>(std::move(out));
}

template <class T>
T* Tape<T>::grad_buffer(Node<T>* n) {
  if (!n->requires_grad) return nullptr;
  std::vector<T>& g = n->kind == NodeKind::Parameter ? leaf_grads_[n] : n->grad;
  if (g.size() != n->value.size()) g.assign(n->value.size(), T(0));
  return g.data();
}

template <class T>
void Tape<T>::backward(const Tensor<T>& loss) {
  if (done_) fail(ErrorCode::DoubleBackward, "backward() called twice on the same tape");
  if (loss.size() != 1)
    fail(ErrorCode::NonScalarLoss, "backward() needs a scalar loss, got " + shape_string(loss.shape()));
  done_ = true;
  if (!loss.requires_grad()) {
    entries_.clear();
    return;
  }
  T* g = grad_buffer(loss.node());
  g[0] = T(1);
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    Node<T>& out = *it->out;
    if (out.grad.empty()) continue;  // did not reach the loss
    it->backward(*this, out);
  }
  entries_.clear();
}

template <class T>
std::span<const T> Tape<T>::grad(const Tensor<T>& t) const {
  const Node<T>* n = t.node();
  if (n->kind == NodeKind::Parameter) {
    auto it = leaf_grads_.find(n);
    if (it == leaf_grads_.end()) return {};
    return it->second;
  }
  return n->grad;
}

// ---------------------------------------------------------------------------
// Operators

template <class T>
Tensor<T> Tape<T>::matmul(const Tensor<T>& a, const Tensor<T>& b, bool transpose_b) {
  require_rank2("matmul", a.shape());
  require_rank2("matmul", b.shape());
  const std::size_t m = a.shape()[0], k = a.shape()[1];
  const std::size_t bk = transpose_b ? b.shape()[1] : b.shape()[0];
  const std::size_t n = transpose_b ? b.shape()[0] : b.shape()[1];
  if (bk != k) shape_error("matmul", a.shape(), b.shape());

  std::vector<T> out(m * n, T(0));
  const T* A = a.values().data();
  const T* B = b.values().data();
  if (!transpose_b) {
    for (std::size_t i = 0; i < m; ++i) {
      T* o = out.data() + i * n;
      for (std::size_t p = 0; p < k; ++p) {
        const T av = A[i * k + p];
        const T* brow = B + p * n;
        for (std::size_t j = 0; j < n; ++j) o[j] += av * brow[j];
      }
    }
  } else {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        T s = T(0);
        const T* arow = A + i * k;
        const T* brow = B + j * k;
        for (std::size_t p = 0; p < k; ++p) s += arow[p] * brow[p];
        out[i * n + j] = s;
      }
  }
  Node<T>* an = a.node();
  Node<T>* bn = b.node();
  return emit({m, n}, std::move(out), {a, b}, [=](Tape& tape, Node<T>& o) {
    const T* G = o.grad.data();
    const T* A = an->value.data();
    const T* B = bn->value.data();
    if (T* ga = tape.grad_buffer(an)) {
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
          T s = T(0);
          if (!transpose_b)
            for (std::size_t j = 0; j < n; ++j) s += G[i * n + j] * B[p * n + j];
          else
            for (std::size_t j = 0; j < n; ++j) s += G[i * n + j] * B[j * k + p];
          ga[i * k + p] += s;
        }
    }
    if (T* gb = tape.grad_buffer(bn)) {
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
          const T av = A[i * k + p];
          if (!transpose_b)
            for (std::size_t j = 0; j < n; ++j) gb[p * n + j] += av * G[i * n + j];
          else
            for (std::size_t j = 0; j < n; ++j) gb[j * k + p] += av * G[i * n + j];
        }
    }
  });
}

template <class T>
Tensor<T> Tape<T>::add(const Tensor<T>& a, const Tensor<T>& b) {
  const bool same = a.shape() == b.shape();
  const bool bias = !same && a.rank() == 2 && b.rank() == 1 && b.shape()[0] == a.shape()[1];
  if (!same && !bias) shape_error("add", a.shape(), b.shape());
  const std::size_t n = a.size(), w = b.size();
  std::vector<T> out(a.values().begin(), a.values().end());
  const T* B = b.values().data();
  for (std::size_t i = 0; i < n; ++i) out[i] += B[same ? i : i % w];
  Node<T>* an = a.node();
  Node<T>* bn = b.node();
  return emit(a.shape(), std::move(out), {a, b}, [=](Tape& tape, Node<T>& o) {
    const T* G = o.grad.data();
    if (T* ga = tape.grad_buffer(an))
      for (std::size_t i = 0; i < n; ++i) ga[i] += G[i];
    if (T* gb = tape.grad_buffer(bn))
      for (std::size_t i = 0; i < n; ++i) gb[same ? i : i % w] += G[i];
  });
}

template <class T>
Tensor<T> Tape<T>::multiply(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.shape() != b.shape()) shape_error("multiply", a.shape(), b.shape());
  const std::size_t n = a.size();
  std::vector<T> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = a.values()[i] * b.values()[i];
  Node<T>* an = a.node();
  Node<T>* bn = b.node();
  return emit(a.shape(), std::move(out), {a, b}, [=](Tape& tape, Node<T>& o) {
    const T* G = o.grad.data();
    if (T* ga = tape.grad_buffer(an))
      for (std::size_t i = 0; i < n; ++i) ga[i] += G[i] * bn->value[i];
    if (T* gb = tape.grad_buffer(bn))
      for (std::size_t i = 0; i < n; ++i) gb[i] += G[i] * an->value[i];
  });
}

template <class T>
Tensor<T> Tape<T>::scale(const Tensor<T>& a, T factor) {
  const std::size_t n = a.size();
  std::vector<T> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = a.values()[i] * factor;
  Node<T>* an = a.node();
  return emit(a.shape(), std::move(out), {a}, [=](Tape& tape, Node<T>& o) {
    if (T* ga = tape.grad_buffer(an))
      for (std::size_t i = 0; i < n; ++i) ga[i] += o.grad[i] * factor;
  });
}

template <class T>
Tensor<T> Tape<T>::softmax(const Tensor<T>& a, bool causal) {
  const std::size_t n = a.cols();
  const std::size_t rows = n ? a.size() / n : 0;
  std::size_t offset = 0;
  if (causal) {
    require_rank2("softmax(causal)", a.shape());
    if (n < rows) shape_error("softmax(causal)", a.shape(), a.shape());
    offset = n - rows;
  }
  std::vector<T> out(a.size(), T(0));
  const T* X = a.values().data();
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t limit = causal ? r + offset + 1 : n;
    const T* x = X + r * n;
    T* y = out.data() + r * n;
    T mx = -std::numeric_limits<T>::infinity();
    for (std::size_t j = 0; j < limit; ++j) mx = std::max(mx, x[j]);
    T sum = T(0);
    for (std::size_t j = 0; j < limit; ++j) sum += (y[j] = std::exp(x[j] - mx));
    for (std::size_t j = 0; j < limit; ++j) y[j] /= sum;
  }
  Node<T>* an = a.node();
  return emit(a.shape(), std::move(out), {a}, [=](Tape& tape, Node<T>& o) {
    T* ga = tape.grad_buffer(an);
    if (!ga) return;
    for (std::size_t r = 0; r < rows; ++r) {
      const T* y = o.value.data() + r * n;
      const T* g = o.grad.data() + r * n;
      T dot = T(0);
      for (std::size_t j = 0; j < n; ++j) dot += g[j] * y[j];
      for (std::size_t j = 0; j < n; ++j) ga[r * n + j] += y[j] * (g[j] - dot);
    }
  });
}

template <class T>
Tensor<T> Tape<T>::layer_norm(const Tensor<T>& x, const Tensor<T>& gain, const Tensor<T>& bias,
                              T eps) {
  const std::size_t n = x.cols();
  if (gain.size() != n || bias.size() != n) shape_error("layer_norm", x.shape(), gain.shape());
  const std::size_t rows = x.size() / n;
  std::vector<T> out(x.size());
  std::vector<T> xhat(x.size());
  std::vector<T> inv_std(rows);
  const T* X = x.values().data();
  const T* g = gain.values().data();
  const T* b = bias.values().data();
  for (std::size_t r = 0; r < rows; ++r) {
    const T* xr = X + r * n;
    T mu = T(0);
    for (std::size_t j = 0; j < n; ++j) mu += xr[j];
    mu /= T(n);
    T var = T(0);
    for (std::size_t j = 0; j < n; ++j) var += (xr[j] - mu) * (xr[j] - mu);
    var /= T(n);
    const T is = T(1) / std::sqrt(var + eps);
    inv_std[r] = is;
    for (std::size_t j = 0; j < n; ++j) {
      const T h = (xr[j] - mu) * is;
      xhat[r * n + j] = h;
      out[r * n + j] = h * g[j] + b[j];
    }
  }
  Node<T>* xn = x.node();
  Node<T>* gn = gain.node();
  Node<T>* bn = bias.node();
  return emit(x.shape(), std::move(out), {x, gain, bias},
              [=, xhat = std::move(xhat), inv_std = std::move(inv_std)](Tape& tape, Node<T>& o) {
                const T* G = o.grad.data();
                if (T* gg = tape.grad_buffer(gn))
                  for (std::size_t r = 0; r < rows; ++r)
                    for (std::size_t j = 0; j < n; ++j) gg[j] += G[r * n + j] * xhat[r * n + j];
                if (T* gb = tape.grad_buffer(bn))
                  for (std::size_t r = 0; r < rows; ++r)
                    for (std::size_t j = 0; j < n; ++j) gb[j] += G[r * n + j];
                if (T* gx = tape.grad_buffer(xn)) {
                  const T* gain_v = gn->value.data();
                  for (std::size_t r = 0; r < rows; ++r) {
                    T m1 = T(0), m2 = T(0);
                    for (std::size_t j = 0; j < n; ++j) {
                      const T gh = G[r * n + j] * gain_v[j];
                      m1 += gh;
                      m2 += gh * xhat[r * n + j];
                    }
                    m1 /= T(n);
                    m2 /= T(n);
                    for (std::size_t j = 0; j < n; ++j) {
                      const T gh = G[r * n + j] * gain_v[j];
                      gx[r * n + j] += inv_std[r] * (gh - m1 - xhat[r * n + j] * m2);
                    }
                  }
                }
              });
}

template <class T>
Tensor<T> Tape<T>::relu(const Tensor<T>& a) {
  const std::size_t n = a.size();
  std::vector<T> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = a.values()[i] > T(0) ? a.values()[i] : T(0);
  Node<T>* an = a.node();
  return emit(a.shape(), std::move(out), {a}, [=](Tape& tape, Node<T>& o) {
    if (T* ga = tape.grad_buffer(an))
      for (std::size_t i = 0; i < n; ++i)
        if (an->value[i] > T(0)) ga[i] += o.grad[i];
  });
}

template <class T>
Tensor<T> Tape<T>::embedding_lookup(const Tensor<T>& table, std::span<const std::size_t> ids) {
  require_rank2("embedding_lookup", table.shape());
  const std::size_t V = table.shape()[0], d = table.shape()[1];
  std::vector<std::size_t> idx(ids.begin(), ids.end());
  std::vector<T> out(idx.size() * d);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    if (idx[r] >= V)
      fail(ErrorCode::ShapeMismatch, "embedding_lookup: id " + std::to_string(idx[r]) +
                                         " out of range for table " + shape_string(table.shape()));
    std::copy_n(table.values().data() + idx[r] * d, d, out.data() + r * d);
  }
  Node<T>* tn = table.node();
  const std::size_t n = idx.size();
  return emit({n, d}, std::move(out), {table},
              [=, idx = std::move(idx)](Tape& tape, Node<T>& o) {
                if (T* gt = tape.grad_buffer(tn))
                  for (std::size_t r = 0; r < idx.size(); ++r)
                    for (std::size_t j = 0; j < d; ++j) gt[idx[r] * d + j] += o.grad[r * d + j];
              });
}

template <class T>
Tensor<T> Tape<T>::concat(const std::vector<Tensor<T>>& parts, std::size_t axis) {
  if (parts.empty()) fail(ErrorCode::ShapeMismatch, "concat: no inputs");
  if (axis > 1) fail(ErrorCode::ShapeMismatch, "concat: axis must be 0 or 1");
  for (const auto& p : parts) require_rank2("concat", p.shape());
  const std::size_t fixed = parts[0].shape()[1 - axis];
  std::size_t total = 0;
  for (const auto& p : parts) {
    if (p.shape()[1 - axis] != fixed) shape_error("concat", parts[0].shape(), p.shape());
    total += p.shape()[axis];
  }
  const std::size_t rows = axis == 0 ? total : fixed;
  const std::size_t cols = axis == 0 ? fixed : total;
  std::vector<T> out(rows * cols);
  std::vector<Node<T>*> nodes;
  std::vector<std::size_t> offsets;
  std::size_t off = 0;
  for (const auto& p : parts) {
    const std::size_t pr = p.shape()[0], pc = p.shape()[1];
    for (std::size_t r = 0; r < pr; ++r)
      for (std::size_t c = 0; c < pc; ++c) {
        const std::size_t orow = axis == 0 ? off + r : r;
        const std::size_t ocol = axis == 0 ? c : off + c;
        out[orow * cols + ocol] = p.values()[r * pc + c];
      }
    nodes.push_back(p.node());
    offsets.push_back(off);
    off += p.shape()[axis];
  }
  return emit({rows, cols}, std::move(out), parts,
              [=, nodes = std::move(nodes), offsets = std::move(offsets)](Tape& tape, Node<T>& o) {
                for (std::size_t i = 0; i < nodes.size(); ++i) {
                  T* gp = tape.grad_buffer(nodes[i]);
                  if (!gp) continue;
                  const std::size_t pr = nodes[i]->shape[0], pc = nodes[i]->shape[1];
                  for (std::size_t r = 0; r < pr; ++r)
                    for (std::size_t c = 0; c < pc; ++c) {
                      const std::size_t orow = axis == 0 ? offsets[i] + r : r;
                      const std::size_t ocol = axis == 0 ? c : offsets[i] + c;
                      gp[r * pc + c] += o.grad[orow * cols + ocol];
                    }
                }
              });
}

template <class T>
Tensor<T> Tape<T>::slice(const Tensor<T>& a, std::size_t axis, std::size_t begin, std::size_t end) {
  require_rank2("slice", a.shape());
  if (axis > 1 || begin > end || end > a.shape()[axis])
    fail(ErrorCode::ShapeMismatch, "slice [" + std::to_string(begin) + "," + std::to_string(end) +
                                       ") on axis " + std::to_string(axis) + " of " +
                                       shape_string(a.shape()));
  const std::size_t R = a.shape()[0], C = a.shape()[1];
  const std::size_t rows = axis == 0 ? end - begin : R;
  const std::size_t cols = axis == 0 ? C : end - begin;
  const std::size_t r0 = axis == 0 ? begin : 0, c0 = axis == 0 ? 0 : begin;
  std::vector<T> out(rows * cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) out[r * cols + c] = a.values()[(r0 + r) * C + c0 + c];
  Node<T>* an = a.node();
  return emit({rows, cols}, std::move(out), {a}, [=](Tape& tape, Node<T>& o) {
    if (T* ga = tape.grad_buffer(an))
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) ga[(r0 + r) * C + c0 + c] += o.grad[r * cols + c];
  });
}

template <class T>
Tensor<T> Tape<T>::mean(const Tensor<T>& a) {
  const std::size_t n = a.size();
  if (n == 0) fail(ErrorCode::ShapeMismatch, "mean of an empty tensor");
  T s = T(0);
  for (T v : a.values()) s += v;
  Node<T>* an = a.node();
  return emit({}, {s / T(n)}, {a}, [=](Tape& tape, Node<T>& o) {
    if (T* ga = tape.grad_buffer(an)) {
      const T g = o.grad[0] / T(n);
      for (std::size_t i = 0; i < n; ++i) ga[i] += g;
    }
  });
}

template <class T>
Tensor<T> Tape<T>::mse(const Tensor<T>& pred, const Tensor<T>& target) {
  if (pred.shape() != target.shape()) shape_error("mse", pred.shape(), target.shape());
  const std::size_t n = pred.size();
  if (n == 0) fail(ErrorCode::ShapeMismatch, "mse of empty tensors");
  T s = T(0);
  for (std::size_t i = 0; i < n; ++i) {
    const T d = pred.values()[i] - target.values()[i];
    s += d * d;
  }
  Node<T>* pn = pred.node();
  Node<T>* tn = target.node();
  return emit({}, {s / T(n)}, {pred, target}, [=](Tape& tape, Node<T>& o) {
    const T k = T(2) * o.grad[0] / T(n);
    T* gp = tape.grad_buffer(pn);
    T* gt = tape.grad_buffer(tn);
    for (std::size_t i = 0; i < n; ++i) {
      const T d = k * (pn->value[i] - tn->value[i]);
      if (gp) gp[i] += d;
      if (gt) gt[i] -= d;
    }
  });
}

template <class T>
Tensor<T> Tape<T>::cross_entropy(const Tensor<T>& logits, std::span<const std::size_t> targets,
                                 std::size_t ignore_index) {
  require_rank2("cross_entropy", logits.shape());
  const std::size_t m = logits.shape()[0], V = logits.shape()[1];
  if (targets.size() != m)
    fail(ErrorCode::ShapeMismatch, "cross_entropy: " + std::to_string(targets.size()) +
                                       " targets for logits " + shape_string(logits.shape()));
  std::vector<std::size_t> tgt(targets.begin(), targets.end());
  std::vector<T> probs(m * V, T(0));
  T total = T(0);
  std::size_t counted = 0;
  const T* L = logits.values().data();
  for (std::size_t r = 0; r < m; ++r) {
    if (tgt[r] == ignore_index) continue;
    if (tgt[r] >= V)
      fail(ErrorCode::ShapeMismatch, "cross_entropy: target " + std::to_string(tgt[r]) +
                                         " out of range for " + std::to_string(V) + " classes");
    const T* x = L + r * V;
    const T mx = *std::max_element(x, x + V);
    T sum = T(0);
    for (std::size_t j = 0; j < V; ++j) sum += (probs[r * V + j] = std::exp(x[j] - mx));
    for (std::size_t j = 0; j < V; ++j) probs[r * V + j] /= sum;
    total += std::log(sum) + mx - x[tgt[r]];
    ++counted;
  }
  const T denom = counted ? T(counted) : T(1);
  Node<T>* ln = logits.node();
  return emit({}, {total / denom}, {logits},
              [=, tgt = std::move(tgt), probs = std::move(probs)](Tape& tape, Node<T>& o) {
                T* gl = tape.grad_buffer(ln);
                if (!gl) return;
                const T k = o.grad[0] / denom;
                for (std::size_t r = 0; r < m; ++r) {
                  if (tgt[r] == ignore_index) continue;
                  for (std::size_t j = 0; j < V; ++j) gl[r * V + j] += k * probs[r * V + j];
                  gl[r * V + tgt[r]] -= k;
                }
              });
}

// ---------------------------------------------------------------------------
// Parameters and optimizers

template <class T>
Tensor<T>& ParameterSet<T>::add(std::string name, Shape shape, std::vector<T> values) {
  if (index_.count(name)) fail(ErrorCode::DuplicateKey, "duplicate parameter '" + name + "'");
  index_.emplace(name, params_.size());
  params_.emplace_back(std::move(name), Tensor<T>::parameter(std::move(shape), std::move(values)));
  return params_.back().second;
}

template <class T>
Tensor<T>& ParameterSet<T>::at(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) fail(ErrorCode::InvalidArgument, "no parameter named '" + name + "'");
  return params_[it->second].second;
}

template <class T>
const Tensor<T>& ParameterSet<T>::at(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) fail(ErrorCode::InvalidArgument, "no parameter named '" + name + "'");
  return params_[it->second].second;
}

template <class T>
bool ParameterSet<T>::contains(const std::string& name) const {
  return index_.count(name) != 0;
}

template <class T>
std::size_t ParameterSet<T>::scalar_count() const {
  std::size_t n = 0;
  for (const auto& [name, p] : params_) n += p.size();
  return n;
}

template <class T>
void ParameterSet<T>::accumulate(const Tape<T>& tape, T weight) {
  for (auto& [name, p] : params_) {
    const auto g = tape.grad(p);
    if (g.empty()) continue;
    auto acc = p.mutable_grad();
    for (std::size_t i = 0; i < g.size(); ++i) acc[i] += weight * g[i];
  }
}

template <class T>
void ParameterSet<T>::zero_grad() {
  for (auto& [name, p] : params_) p.clear_grad();
}

template <class T>
std::uint64_t ParameterSet<T>::checksum() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& [name, p] : params_) {
    h = fnv1a(name, h);
    const auto v = p.values();
    h = fnv1a(std::string_view(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(T)), h);
  }
  return h;
}

template <class T>
void sgd_step(ParameterSet<T>& params, T lr) {
  if (!(lr >= T(0))) fail(ErrorCode::InvalidArgument, "learning rate must be >= 0");
  for (const auto& entry : params.entries()) {
    Tensor<T> p = entry.second;
    const auto g = p.grad();
    if (g.empty()) continue;
    auto v = p.mutable_values();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= lr * g[i];
  }
  params.zero_grad();
}

template <class T>
void Adam<T>::step(ParameterSet<T>& params, T lr) {
  const auto& entries = params.entries();
  if (m_.size() != entries.size()) {
    m_.assign(entries.size(), {});
    v_.assign(entries.size(), {});
  }
  ++t_;
  const T c1 = T(1) - std::pow(beta1_, T(t_));
  const T c2 = T(1) - std::pow(beta2_, T(t_));
  for (std::size_t k = 0; k < entries.size(); ++k) {
    Tensor<T> p = entries[k].second;
    const auto g = p.grad();
    if (g.empty()) continue;
    auto val = p.mutable_values();
    auto& m = m_[k];
    auto& v = v_[k];
    if (m.size() != val.size()) {
      m.assign(val.size(), T(0));
      v.assign(val.size(), T(0));
    }
    for (std::size_t i = 0; i < val.size(); ++i) {
      m[i] = beta1_ * m[i] + (T(1) - beta1_) * g[i];
      v[i] = beta2_ * v[i] + (T(1) - beta2_) * g[i] * g[i];
      val[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps_);
    }
  }
  params.zero_grad();
}

template class Tensor<float>;
template class Tensor<double>;
template class Tape<float>;
template class Tape<double>;
template class ParameterSet<float>;
template class ParameterSet<double>;
template class Adam<float>;
template class Adam<double>;
template void sgd_step<float>(ParameterSet<float>&, float);
template void sgd_step<double>(ParameterSet<double>&, double);

}  // namespace signforge::ad
