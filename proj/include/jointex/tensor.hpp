#pragma once

#include <cstddef>
#include <memory>
#include <vector>

namespace jointex {

// Dense row-major tensor of 64-bit floats with an optional gradient buffer.
// Tensor is a shared handle: copies refer to the same storage, so a tensor
// recorded on a tape and the caller's copy see the same values and grad.
// Values are written only at construction and by the optimizer; gradient
// buffers accumulate additively and are zeroed explicitly by the trainer.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(std::vector<std::size_t> shape);
  static Tensor full(std::vector<std::size_t> shape, double value);
  static Tensor scalar(double value);  // rank-0, size 1
  static Tensor from_values(std::vector<std::size_t> shape,
                            std::vector<double> values);

  bool defined() const { return s_ != nullptr; }

  const std::vector<std::size_t>& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t size() const;
  std::size_t dim(std::size_t axis) const;

  std::vector<double>& values();
  const std::vector<double>& values() const;
  double* data();
  const double* data() const;
  double operator[](std::size_t flat) const;
  double& operator[](std::size_t flat);
  double at(std::size_t i, std::size_t j) const;
  double& at(std::size_t i, std::size_t j);
  double at(std::size_t i, std::size_t j, std::size_t k) const;
  double& at(std::size_t i, std::size_t j, std::size_t k);
  double item() const;  // requires size() == 1

  bool requires_grad() const;
  void set_requires_grad(bool flag);
  bool has_grad() const;
  void ensure_grad();  // allocate a zero buffer if absent
  void zero_grad();    // zero the buffer if allocated
  std::vector<double>& grad();
  const std::vector<double>& grad() const;

  // Deep copy of values only (no grad, no requires_grad).
  Tensor detached_copy() const;

  bool same_storage(const Tensor& other) const { return s_ == other.s_; }

 private:
  struct Storage {
    std::vector<std::size_t> shape;
    std::vector<double> values;
    std::vector<double> grad;  // empty means "no buffer yet"
    bool requires_grad = false;
  };

  explicit Tensor(std::shared_ptr<Storage> s) : s_(std::move(s)) {}
  Storage& st() const;

  std::shared_ptr<Storage> s_;
};

double value_l2_norm(const Tensor& t);
double grad_l2_norm(const Tensor& t);
bool values_bitwise_equal(const Tensor& a, const Tensor& b);
bool all_finite(const Tensor& t);

}  // namespace jointex
