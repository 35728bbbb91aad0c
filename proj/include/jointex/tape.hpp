#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "jointex/tensor.hpp"

namespace jointex {

// Define-by-run reverse-mode tape. Every op validates shapes, computes the
// forward value, checks it for NaN/Inf, and (when some input requires grad)
// records a closure that propagates the chain rule. One backward pass per
// tape; the tape is invalidated afterward.
//
// A tape constructed with recording=false computes values only (inference).
class Tape {
 public:
  explicit Tape(bool recording = true) : recording_(recording) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // a[m×k] · b[k×n] -> [m×n]
  Tensor matmul(Tensor a, Tensor b);
  // a[m×k] · b[n×k]^T -> [m×n]
  Tensor matmul_nt(Tensor a, Tensor b);
  // w[m×n] · x[n] -> [m]
  Tensor matvec(Tensor w, Tensor x);

  Tensor add(Tensor a, Tensor b);  // same shape
  Tensor sub(Tensor a, Tensor b);
  Tensor mul(Tensor a, Tensor b);  // elementwise
  Tensor scale(Tensor a, double c);

  // m[i][j] + v[j] for every row i
  Tensor add_row_vector(Tensor m, Tensor v);
  // m[i][j] + v[i] for every column j
  Tensor add_col_vector(Tensor m, Tensor v);

  Tensor sigmoid(Tensor x);
  Tensor tanh(Tensor x);

  // 1-D: full reduction to a scalar (axis ignored).
  // 2-D: axis 0 collapses rows (result size = #cols), axis 1 collapses
  // columns (result size = #rows). Max-shifted for stability.
  Tensor logsumexp(Tensor x, std::size_t axis = 0);

  Tensor sum(Tensor x);                        // scalar
  Tensor pick(Tensor x, std::size_t flat_index);  // scalar
  Tensor slice(Tensor x, std::size_t start, std::size_t count);  // 1-D
  Tensor concat(std::vector<Tensor> xs);       // 1-D pieces
  Tensor row(Tensor m, std::size_t i);         // 2-D -> 1-D
  Tensor stack_rows(std::vector<Tensor> rows); // 1-D pieces -> 2-D
  Tensor vstack(std::vector<Tensor> mats);     // 2-D pieces -> 2-D
  Tensor reshape(Tensor x, std::vector<std::size_t> shape);

  // Gathers table rows; gradient scatters additively into the gathered rows
  // when the table requires grad.
  Tensor lookup_rows(Tensor table, const std::vector<std::size_t>& ids);

  // Elementwise multiply / add by a constant tensor (no gradient into it).
  Tensor mul_const(Tensor x, Tensor factor);
  Tensor add_const(Tensor x, Tensor offset);

  // Sum over all elements of the stable binary cross-entropy with logits:
  //   max(s,0) - s*t + log(1 + exp(-|s|)),  t in {0,1}.
  Tensor bce_with_logits_sum(Tensor scores, Tensor targets);

  // Runs the chain rule in reverse from a scalar loss. Leaves (and any
  // intermediate marked requires_grad) accumulate into their grad buffers.
  void backward(const Tensor& loss);

  bool consumed() const { return consumed_; }
  bool recording() const { return recording_; }
  std::size_t num_ops() const { return steps_.size(); }

 private:
  void check_open(const char* op) const;
  Tensor make_output(std::vector<std::size_t> shape, std::vector<double> values,
                     bool needs_grad, const char* op);
  void record(std::function<void()> step);

  std::vector<std::function<void()>> steps_;
  bool recording_ = true;
  bool consumed_ = false;
};

}  // namespace jointex
