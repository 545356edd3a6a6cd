#include "nmt/tensor.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nmt {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMat>;
using CMatMap = Eigen::Map<const RowMat>;
using VecMap = Eigen::Map<Eigen::VectorXd>;
using CVecMap = Eigen::Map<const Eigen::VectorXd>;

void fail(const std::string& msg) { throw std::runtime_error(msg); }

static int shape_size(const Shape& shape) {
  if (shape.empty() || shape.size() > 2) fail("tensor: rank must be 1 or 2");
  long long n = 1;
  for (int d : shape) {
    if (d < 1) fail("tensor: dimensions must be positive");
    n *= d;
  }
  return static_cast<int>(n);
}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), size_(shape_size(shape_)) {
  if (static_cast<int>(values.size()) != size_)
    fail("tensor: data length does not match shape");
  data_ = std::make_shared<std::vector<double>>(std::move(values));
}

Tensor Tensor::zeros(const Shape& shape) {
  Tensor t;
  t.shape_ = shape;
  t.size_ = shape_size(shape);
  t.data_ = std::make_shared<std::vector<double>>(t.size_, 0.0);
  return t;
}

Tensor Tensor::scalar(double v) { return Tensor({1}, {v}); }

Tensor Tensor::randn(const Shape& shape, Rng& rng, double scale) {
  Tensor t = zeros(shape);
  for (int i = 0; i < t.size(); ++i) t.at(i) = scale * rng.normal();
  return t;
}

Tensor Tensor::randn(const Shape& shape, std::uint64_t seed, double scale) {
  Rng rng(seed);
  return randn(shape, rng, scale);
}

Tensor Tensor::uniform(const Shape& shape, Rng& rng, double lo, double hi) {
  Tensor t = zeros(shape);
  for (int i = 0; i < t.size(); ++i) t.at(i) = rng.uniform(lo, hi);
  return t;
}

int Tensor::rows() const {
  if (rank() != 2) fail("tensor: rows() on rank-1 tensor");
  return shape_[0];
}

int Tensor::cols() const {
  if (rank() != 2) fail("tensor: cols() on rank-1 tensor");
  return shape_[1];
}

double Tensor::value() const {
  if (size_ != 1) fail("tensor: value() requires a scalar");
  return (*data_)[0];
}

Tensor Tensor::clone() const {
  Tensor t;
  t.shape_ = shape_;
  t.size_ = size_;
  t.data_ = std::make_shared<std::vector<double>>(*data_);
  return t;
}

bool Tensor::all_finite() const {
  for (double v : *data_)
    if (!std::isfinite(v)) return false;
  return true;
}

void Tensor::fill(double v) { std::fill(data_->begin(), data_->end(), v); }

// --- tape ---

Tensor Tape::watch(const Tensor& param) {
  if (param.empty()) fail("tape: watch of empty tensor");
  Tensor t = param;
  auto it = watched_.find(param.storage_id());
  if (it != watched_.end()) {
    t.node = it->second;
  } else {
    t.node = push(param.size(), nullptr);
    watched_.emplace(param.storage_id(), t.node);
  }
  t.tape = this;
  return t;
}

int Tape::push(int out_size, BackFn fn) {
  nodes_.push_back(Node{out_size, {}, std::move(fn)});
  return static_cast<int>(nodes_.size()) - 1;
}

double* Tape::grad_buf(int node, int n) {
  Node& nd = nodes_[node];
  if (nd.grad.empty()) nd.grad.assign(nd.size, 0.0);
  if (n != nd.size) fail("tape: gradient size mismatch");
  return nd.grad.data();
}

void Tape::backward(const Tensor& loss) {
  if (loss.size() != 1) fail("backward: loss must be scalar");
  if (loss.tape != this || loss.node < 0) fail("backward: loss is not on this tape");
  grad_buf(loss.node, 1)[0] += 1.0;
  for (int i = static_cast<int>(nodes_.size()) - 1; i >= 0; --i) {
    Node& nd = nodes_[i];
    if (nd.grad.empty() || !nd.back) continue;
    nd.back(*this, nd.grad);
  }
}

std::vector<double> Tape::grad(const Tensor& t) const {
  if (t.tape == this && t.node >= 0 && !nodes_[t.node].grad.empty())
    return nodes_[t.node].grad;
  return std::vector<double>(t.size(), 0.0);
}

const std::vector<double>* Tape::grad_of(const Tensor& param) const {
  auto it = watched_.find(param.storage_id());
  if (it == watched_.end()) return nullptr;
  const Node& nd = nodes_[it->second];
  if (nd.grad.empty()) return nullptr;
  return &nd.grad;
}

void Tape::reset() {
  nodes_.clear();
  watched_.clear();
}

void backward(const Tensor& loss) {
  if (!loss.tape) fail("backward: loss is not attached to a tape");
  loss.tape->backward(loss);
}

// --- op helpers ---

static Tape* tape_of(std::initializer_list<const Tensor*> ins) {
  Tape* tp = nullptr;
  for (const Tensor* t : ins) {
    if (!t->tracked()) continue;
    if (tp && tp != t->tape) fail("op: operands belong to different tapes");
    tp = t->tape;
  }
  return tp;
}

static void check_finite(const Tensor& t, const char* op) {
  if (!t.all_finite()) fail(std::string(op) + ": non-finite value produced");
}

static void attach(Tensor& out, Tape* tp, Tape::BackFn fn) {
  if (!tp) return;
  out.tape = tp;
  out.node = tp->push(out.size(), std::move(fn));
}

static void same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) fail(std::string(op) + ": shape mismatch");
}

// --- elementwise ---

Tensor add(const Tensor& a, const Tensor& b) {
  same_shape(a, b, "add");
  Tensor out = Tensor::zeros(a.shape());
  for (int i = 0; i < a.size(); ++i) out.at(i) = a.at(i) + b.at(i);
  check_finite(out, "add");
  Tape* tp = tape_of({&a, &b});
  int ia = a.node, ib = b.node;
  int n = a.size();
  attach(out, tp, [ia, ib, n](Tape& t, const std::vector<double>& g) {
    if (ia >= 0) {
      double* ga = t.grad_buf(ia, n);
      for (int i = 0; i < n; ++i) ga[i] += g[i];
    }
    if (ib >= 0) {
      double* gb = t.grad_buf(ib, n);
      for (int i = 0; i < n; ++i) gb[i] += g[i];
    }
  });
  return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
  same_shape(a, b, "sub");
  Tensor out = Tensor::zeros(a.shape());
  for (int i = 0; i < a.size(); ++i) out.at(i) = a.at(i) - b.at(i);
  check_finite(out, "sub");
  Tape* tp = tape_of({&a, &b});
  int ia = a.node, ib = b.node;
  int n = a.size();
  attach(out, tp, [ia, ib, n](Tape& t, const std::vector<double>& g) {
    if (ia >= 0) {
      double* ga = t.grad_buf(ia, n);
      for (int i = 0; i < n; ++i) ga[i] += g[i];
    }
    if (ib >= 0) {
      double* gb = t.grad_buf(ib, n);
      for (int i = 0; i < n; ++i) gb[i] -= g[i];
    }
  });
  return out;
}

Tensor mul(const Tensor& a, const Tensor& b) {
  same_shape(a, b, "mul");
  Tensor out = Tensor::zeros(a.shape());
  for (int i = 0; i < a.size(); ++i) out.at(i) = a.at(i) * b.at(i);
  check_finite(out, "mul");
  Tape* tp = tape_of({&a, &b});
  if (tp) {
    int ia = a.node, ib = b.node;
    int n = a.size();
    Tensor av = a, bv = b;  // keep values for the backward pass
    attach(out, tp, [ia, ib, n, av, bv](Tape& t, const std::vector<double>& g) {
      if (ia >= 0) {
        double* ga = t.grad_buf(ia, n);
        for (int i = 0; i < n; ++i) ga[i] += g[i] * bv.at(i);
      }
      if (ib >= 0) {
        double* gb = t.grad_buf(ib, n);
        for (int i = 0; i < n; ++i) gb[i] += g[i] * av.at(i);
      }
    });
  }
  return out;
}

Tensor scale(const Tensor& a, double c) {
  Tensor out = Tensor::zeros(a.shape());
  for (int i = 0; i < a.size(); ++i) out.at(i) = c * a.at(i);
  check_finite(out, "scale");
  Tape* tp = tape_of({&a});
  int ia = a.node;
  int n = a.size();
  attach(out, tp, [ia, n, c](Tape& t, const std::vector<double>& g) {
    double* ga = t.grad_buf(ia, n);
    for (int i = 0; i < n; ++i) ga[i] += c * g[i];
  });
  return out;
}

// --- matmul ---

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2) fail("matmul: left operand must be rank-2");
  const int m = a.rows(), k = a.cols();
  Tensor out;
  if (b.rank() == 2) {
    if (b.rows() != k) fail("matmul: inner dimensions do not match");
    const int n = b.cols();
    out = Tensor::zeros({m, n});
    MatMap(out.data(), m, n).noalias() = CMatMap(a.data(), m, k) * CMatMap(b.data(), k, n);
  } else {
    if (b.size() != k) fail("matmul: inner dimensions do not match");
    out = Tensor::zeros({m});
    VecMap(out.data(), m).noalias() = CMatMap(a.data(), m, k) * CVecMap(b.data(), k);
  }
  check_finite(out, "matmul");
  Tape* tp = tape_of({&a, &b});
  if (tp) {
    int ia = a.node, ib = b.node;
    Tensor av = a, bv = b;
    if (b.rank() == 2) {
      const int n = b.cols();
      attach(out, tp, [ia, ib, m, k, n, av, bv](Tape& t, const std::vector<double>& g) {
        CMatMap G(g.data(), m, n);
        if (ia >= 0)
          MatMap(t.grad_buf(ia, m * k), m, k).noalias() +=
              G * CMatMap(bv.data(), k, n).transpose();
        if (ib >= 0)
          MatMap(t.grad_buf(ib, k * n), k, n).noalias() +=
              CMatMap(av.data(), m, k).transpose() * G;
      });
    } else {
      attach(out, tp, [ia, ib, m, k, av, bv](Tape& t, const std::vector<double>& g) {
        CVecMap G(g.data(), m);
        if (ia >= 0)
          MatMap(t.grad_buf(ia, m * k), m, k).noalias() +=
              G * CVecMap(bv.data(), k).transpose();
        if (ib >= 0)
          VecMap(t.grad_buf(ib, k), k).noalias() +=
              CMatMap(av.data(), m, k).transpose() * G;
      });
    }
  }
  return out;
}

// --- activations ---

Tensor tanh(const Tensor& x) {
  Tensor out = Tensor::zeros(x.shape());
  for (int i = 0; i < x.size(); ++i) out.at(i) = std::tanh(x.at(i));
  check_finite(out, "tanh");
  Tape* tp = tape_of({&x});
  if (tp) {
    int ix = x.node;
    int n = x.size();
    Tensor y = out;
    attach(out, tp, [ix, n, y](Tape& t, const std::vector<double>& g) {
      double* gx = t.grad_buf(ix, n);
      for (int i = 0; i < n; ++i) gx[i] += g[i] * (1.0 - y.at(i) * y.at(i));
    });
  }
  return out;
}

Tensor sigmoid(const Tensor& x) {
  Tensor out = Tensor::zeros(x.shape());
  for (int i = 0; i < x.size(); ++i) {
    double v = x.at(i);
    out.at(i) = v >= 0 ? 1.0 / (1.0 + std::exp(-v))
                       : std::exp(v) / (1.0 + std::exp(v));
  }
  check_finite(out, "sigmoid");
  Tape* tp = tape_of({&x});
  if (tp) {
    int ix = x.node;
    int n = x.size();
    Tensor y = out;
    attach(out, tp, [ix, n, y](Tape& t, const std::vector<double>& g) {
      double* gx = t.grad_buf(ix, n);
      for (int i = 0; i < n; ++i) gx[i] += g[i] * y.at(i) * (1.0 - y.at(i));
    });
  }
  return out;
}

Tensor softmax(const Tensor& v) {
  if (v.rank() != 1) fail("softmax: input must be rank-1");
  const int n = v.size();
  Tensor out = Tensor::zeros(v.shape());
  double mx = v.at(0);
  for (int i = 1; i < n; ++i) mx = std::max(mx, v.at(i));
  double z = 0.0;
  for (int i = 0; i < n; ++i) {
    out.at(i) = std::exp(v.at(i) - mx);
    z += out.at(i);
  }
  for (int i = 0; i < n; ++i) out.at(i) /= z;
  check_finite(out, "softmax");
  Tape* tp = tape_of({&v});
  if (tp) {
    int iv = v.node;
    Tensor y = out;
    attach(out, tp, [iv, n, y](Tape& t, const std::vector<double>& g) {
      double dot_gy = 0.0;
      for (int i = 0; i < n; ++i) dot_gy += g[i] * y.at(i);
      double* gv = t.grad_buf(iv, n);
      for (int i = 0; i < n; ++i) gv[i] += y.at(i) * (g[i] - dot_gy);
    });
  }
  return out;
}

// --- shape ops ---

Tensor concat(const std::vector<Tensor>& parts) {
  if (parts.empty()) fail("concat: empty list");
  int total = 0;
  for (const Tensor& p : parts) {
    if (p.rank() != 1) fail("concat: inputs must be rank-1");
    total += p.size();
  }
  Tensor out = Tensor::zeros({total});
  int off = 0;
  for (const Tensor& p : parts) {
    for (int i = 0; i < p.size(); ++i) out.at(off + i) = p.at(i);
    off += p.size();
  }
  check_finite(out, "concat");
  Tape* tp = nullptr;
  for (const Tensor& p : parts) {
    Tape* q = tape_of({&p});
    if (q && tp && q != tp) fail("concat: operands belong to different tapes");
    if (q) tp = q;
  }
  if (tp) {
    std::vector<std::pair<int, int>> ins;  // node, size
    for (const Tensor& p : parts) ins.emplace_back(p.node, p.size());
    attach(out, tp, [ins](Tape& t, const std::vector<double>& g) {
      int off = 0;
      for (auto [node, sz] : ins) {
        if (node >= 0) {
          double* gp = t.grad_buf(node, sz);
          for (int i = 0; i < sz; ++i) gp[i] += g[off + i];
        }
        off += sz;
      }
    });
  }
  return out;
}

Tensor slice(const Tensor& v, int start, int len) {
  if (v.rank() != 1) fail("slice: input must be rank-1");
  if (start < 0 || len < 1 || start + len > v.size()) fail("slice: range out of bounds");
  Tensor out = Tensor::zeros({len});
  for (int i = 0; i < len; ++i) out.at(i) = v.at(start + i);
  Tape* tp = tape_of({&v});
  int iv = v.node;
  int n = v.size();
  attach(out, tp, [iv, n, start, len](Tape& t, const std::vector<double>& g) {
    double* gv = t.grad_buf(iv, n);
    for (int i = 0; i < len; ++i) gv[start + i] += g[i];
  });
  return out;
}

Tensor rowmax(const Tensor& m) {
  if (m.rank() != 2) fail("rowmax: input must be rank-2");
  const int r = m.rows(), c = m.cols();
  Tensor out = Tensor::zeros({r});
  std::vector<int> arg(r);
  for (int i = 0; i < r; ++i) {
    int best = 0;
    for (int j = 1; j < c; ++j)
      if (m.at(i, j) > m.at(i, best)) best = j;  // strict: ties keep lowest index
    arg[i] = best;
    out.at(i) = m.at(i, best);
  }
  check_finite(out, "rowmax");
  Tape* tp = tape_of({&m});
  int im = m.node;
  attach(out, tp, [im, r, c, arg](Tape& t, const std::vector<double>& g) {
    double* gm = t.grad_buf(im, r * c);
    for (int i = 0; i < r; ++i) gm[i * c + arg[i]] += g[i];
  });
  return out;
}

Tensor cross_entropy(const Tensor& logits, int target) {
  if (logits.rank() != 1) fail("cross_entropy: logits must be rank-1");
  const int n = logits.size();
  if (target < 0 || target >= n) fail("cross_entropy: target out of range");
  double mx = logits.at(0);
  for (int i = 1; i < n; ++i) mx = std::max(mx, logits.at(i));
  double z = 0.0;
  for (int i = 0; i < n; ++i) z += std::exp(logits.at(i) - mx);
  double lse = mx + std::log(z);
  Tensor out = Tensor::scalar(lse - logits.at(target));
  check_finite(out, "cross_entropy");
  Tape* tp = tape_of({&logits});
  if (tp) {
    std::vector<double> probs(n);
    for (int i = 0; i < n; ++i) probs[i] = std::exp(logits.at(i) - lse);
    int il = logits.node;
    attach(out, tp, [il, n, target, probs](Tape& t, const std::vector<double>& g) {
      double* gl = t.grad_buf(il, n);
      for (int i = 0; i < n; ++i)
        gl[i] += g[0] * (probs[i] - (i == target ? 1.0 : 0.0));
    });
  }
  return out;
}

Tensor sum(const Tensor& x) {
  double s = 0.0;
  for (int i = 0; i < x.size(); ++i) s += x.at(i);
  Tensor out = Tensor::scalar(s);
  check_finite(out, "sum");
  Tape* tp = tape_of({&x});
  int ix = x.node;
  int n = x.size();
  attach(out, tp, [ix, n](Tape& t, const std::vector<double>& g) {
    double* gx = t.grad_buf(ix, n);
    for (int i = 0; i < n; ++i) gx[i] += g[0];
  });
  return out;
}

Tensor dot(const Tensor& a, const Tensor& b) {
  if (a.rank() != 1 || b.rank() != 1 || a.size() != b.size())
    fail("dot: operands must be rank-1 of equal length");
  double s = 0.0;
  for (int i = 0; i < a.size(); ++i) s += a.at(i) * b.at(i);
  Tensor out = Tensor::scalar(s);
  check_finite(out, "dot");
  Tape* tp = tape_of({&a, &b});
  if (tp) {
    int ia = a.node, ib = b.node;
    int n = a.size();
    Tensor av = a, bv = b;
    attach(out, tp, [ia, ib, n, av, bv](Tape& t, const std::vector<double>& g) {
      if (ia >= 0) {
        double* ga = t.grad_buf(ia, n);
        for (int i = 0; i < n; ++i) ga[i] += g[0] * bv.at(i);
      }
      if (ib >= 0) {
        double* gb = t.grad_buf(ib, n);
        for (int i = 0; i < n; ++i) gb[i] += g[0] * av.at(i);
      }
    });
  }
  return out;
}

Tensor smul(const Tensor& s, const Tensor& v) {
  if (s.size() != 1) fail("smul: first operand must be scalar");
  double c = s.at(0);
  Tensor out = Tensor::zeros(v.shape());
  for (int i = 0; i < v.size(); ++i) out.at(i) = c * v.at(i);
  check_finite(out, "smul");
  Tape* tp = tape_of({&s, &v});
  if (tp) {
    int is = s.node, iv = v.node;
    int n = v.size();
    Tensor sv = s, vv = v;
    attach(out, tp, [is, iv, n, sv, vv](Tape& t, const std::vector<double>& g) {
      if (is >= 0) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += g[i] * vv.at(i);
        t.grad_buf(is, 1)[0] += acc;
      }
      if (iv >= 0) {
        double* gv = t.grad_buf(iv, n);
        for (int i = 0; i < n; ++i) gv[i] += sv.at(0) * g[i];
      }
    });
  }
  return out;
}

Tensor take_row(const Tensor& m, int row) {
  if (m.rank() != 2) fail("take_row: input must be rank-2");
  if (row < 0 || row >= m.rows()) fail("take_row: row out of range");
  const int c = m.cols();
  Tensor out = Tensor::zeros({c});
  for (int j = 0; j < c; ++j) out.at(j) = m.at(row, j);
  check_finite(out, "take_row");
  Tape* tp = tape_of({&m});
  int im = m.node;
  int total = m.size();
  attach(out, tp, [im, total, row, c](Tape& t, const std::vector<double>& g) {
    double* gm = t.grad_buf(im, total);
    for (int j = 0; j < c; ++j) gm[row * c + j] += g[j];
  });
  return out;
}

Tensor concat_cols(const std::vector<Tensor>& cols) {
  if (cols.empty()) fail("concat_cols: empty list");
  const int r = cols[0].size();
  const int n = static_cast<int>(cols.size());
  Tensor out = Tensor::zeros({r, n});
  for (int j = 0; j < n; ++j) {
    if (cols[j].rank() != 1 || cols[j].size() != r)
      fail("concat_cols: columns must be rank-1 of equal length");
    for (int i = 0; i < r; ++i) out.at(i, j) = cols[j].at(i);
  }
  check_finite(out, "concat_cols");
  Tape* tp = nullptr;
  for (const Tensor& cvec : cols) {
    Tape* q = tape_of({&cvec});
    if (q && tp && q != tp) fail("concat_cols: operands belong to different tapes");
    if (q) tp = q;
  }
  if (tp) {
    std::vector<int> ins;
    for (const Tensor& cvec : cols) ins.push_back(cvec.node);
    attach(out, tp, [ins, r, n](Tape& t, const std::vector<double>& g) {
      for (int j = 0; j < n; ++j) {
        if (ins[j] < 0) continue;
        double* gc = t.grad_buf(ins[j], r);
        for (int i = 0; i < r; ++i) gc[i] += g[i * n + j];
      }
    });
  }
  return out;
}

Tensor weighted_sum(const Tensor& w, const std::vector<Tensor>& vs) {
  if (w.rank() != 1 || static_cast<int>(vs.size()) != w.size())
    fail("weighted_sum: weight length must equal number of vectors");
  const int n = w.size();
  const int d = vs[0].size();
  Tensor out = Tensor::zeros({d});
  for (int t = 0; t < n; ++t) {
    if (vs[t].rank() != 1 || vs[t].size() != d)
      fail("weighted_sum: vectors must be rank-1 of equal length");
    for (int i = 0; i < d; ++i) out.at(i) += w.at(t) * vs[t].at(i);
  }
  check_finite(out, "weighted_sum");
  Tape* tp = tape_of({&w});
  for (const Tensor& v : vs) {
    Tape* q = tape_of({&v});
    if (q && tp && q != tp) fail("weighted_sum: operands belong to different tapes");
    if (q) tp = q;
  }
  if (tp) {
    int iw = w.node;
    std::vector<int> ins;
    for (const Tensor& v : vs) ins.push_back(v.node);
    Tensor wv = w;
    std::vector<Tensor> vv = vs;
    attach(out, tp, [iw, ins, n, d, wv, vv](Tape& t, const std::vector<double>& g) {
      if (iw >= 0) {
        double* gw = t.grad_buf(iw, n);
        for (int k = 0; k < n; ++k) {
          double acc = 0.0;
          for (int i = 0; i < d; ++i) acc += g[i] * vv[k].at(i);
          gw[k] += acc;
        }
      }
      for (int k = 0; k < n; ++k) {
        if (ins[k] < 0) continue;
        double* gv = t.grad_buf(ins[k], d);
        for (int i = 0; i < d; ++i) gv[i] += wv.at(k) * g[i];
      }
    });
  }
  return out;
}

std::vector<double> log_softmax_values(const Tensor& logits) {
  const int n = logits.size();
  double mx = logits.at(0);
  for (int i = 1; i < n; ++i) mx = std::max(mx, logits.at(i));
  double z = 0.0;
  for (int i = 0; i < n; ++i) z += std::exp(logits.at(i) - mx);
  double lse = mx + std::log(z);
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = logits.at(i) - lse;
  return out;
}

}  // namespace nmt
