#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "nmt/rng.hpp"

namespace nmt {

class Tape;

using Shape = std::vector<int>;

// Dense rank-1/rank-2 tensor of doubles, row-major. Copies share storage;
// clone() deep-copies. `tape`/`node` tie a tensor to the tape that produced
// it; leaves enter a tape through Tape::watch.
class Tensor {
 public:
  Tensor() = default;
  Tensor(Shape shape, std::vector<double> values);

  static Tensor zeros(const Shape& shape);
  static Tensor scalar(double v);
  static Tensor randn(const Shape& shape, std::uint64_t seed, double scale);
  static Tensor randn(const Shape& shape, Rng& rng, double scale);
  static Tensor uniform(const Shape& shape, Rng& rng, double lo, double hi);

  const Shape& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  int size() const { return size_; }
  int rows() const;
  int cols() const;
  bool empty() const { return !data_; }

  double* data() { return data_->data(); }
  const double* data() const { return data_->data(); }
  double& at(int i) { return (*data_)[i]; }
  double at(int i) const { return (*data_)[i]; }
  double& at(int r, int c) { return (*data_)[r * cols() + c]; }
  double at(int r, int c) const { return (*data_)[r * cols() + c]; }
  double value() const;  // scalar convenience, size must be 1

  Tensor clone() const;
  bool all_finite() const;
  void fill(double v);
  const void* storage_id() const { return data_.get(); }

  Tape* tape = nullptr;
  int node = -1;
  bool tracked() const { return tape != nullptr && node >= 0; }

 private:
  Shape shape_;
  int size_ = 0;
  std::shared_ptr<std::vector<double>> data_;
};

[[noreturn]] void fail(const std::string& msg);

// Define-by-run gradient tape. Nodes are recorded in execution order, which
// is a topological order; backward() walks them once in reverse. One tape is
// confined to one thread.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Registers an external parameter as a leaf. Repeat calls for the same
  // storage return the same node, so gradients from multiple uses add up.
  Tensor watch(const Tensor& param);

  // Seeds d(loss)/d(loss) = 1 and accumulates gradients for every node.
  void backward(const Tensor& loss);

  // Gradient of a tensor produced on this tape; zeros if it never
  // influenced the loss.
  std::vector<double> grad(const Tensor& t) const;
  // Gradient buffer of a watched parameter, or nullptr if the parameter was
  // never watched or never reached by backward().
  const std::vector<double>* grad_of(const Tensor& param) const;

  void reset();
  std::size_t size() const { return nodes_.size(); }

  // --- used by op implementations ---
  using BackFn = std::function<void(Tape&, const std::vector<double>&)>;
  int push(int out_size, BackFn fn);
  double* grad_buf(int node, int n);  // lazily-allocated accumulation buffer

 private:
  struct Node {
    int size;
    std::vector<double> grad;
    BackFn back;
  };
  std::vector<Node> nodes_;
  std::unordered_map<const void*, int> watched_;
};

void backward(const Tensor& loss);

// --- differentiable operations ---
// Every op validates shapes, checks the result for NaN/Inf (throwing
// immediately on violation) and records itself when any input is tracked.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);  // elementwise
Tensor scale(const Tensor& a, double c);
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor tanh(const Tensor& t);
Tensor sigmoid(const Tensor& t);
Tensor softmax(const Tensor& v);  // rank-1, max-subtracted
Tensor concat(const std::vector<Tensor>& parts);
Tensor slice(const Tensor& v, int start, int len);
Tensor rowmax(const Tensor& m);  // per-row max; ties break to lowest column
Tensor cross_entropy(const Tensor& logits, int target);
Tensor sum(const Tensor& t);
Tensor dot(const Tensor& a, const Tensor& b);
Tensor smul(const Tensor& s, const Tensor& v);  // scalar tensor times tensor
Tensor take_row(const Tensor& m, int row);
Tensor concat_cols(const std::vector<Tensor>& cols);
Tensor weighted_sum(const Tensor& w, const std::vector<Tensor>& vs);

// Value-only helper (no graph): numerically stable log softmax.
std::vector<double> log_softmax_values(const Tensor& logits);

}  // namespace nmt
