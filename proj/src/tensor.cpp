#include "jointex/tensor.hpp"

#include <cmath>
#include <cstring>
#include <numeric>

#include "jointex/errors.hpp"

namespace jointex {

namespace {

std::size_t shape_size(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

}  // namespace

Tensor Tensor::zeros(std::vector<std::size_t> shape) {
  auto s = std::make_shared<Storage>();
  s->values.assign(shape_size(shape), 0.0);
  s->shape = std::move(shape);
  return Tensor(std::move(s));
}

Tensor Tensor::full(std::vector<std::size_t> shape, double value) {
  auto s = std::make_shared<Storage>();
  s->values.assign(shape_size(shape), value);
  s->shape = std::move(shape);
  return Tensor(std::move(s));
}

Tensor Tensor::scalar(double value) {
  auto s = std::make_shared<Storage>();
  s->values.assign(1, value);
  return Tensor(std::move(s));
}

Tensor Tensor::from_values(std::vector<std::size_t> shape,
                           std::vector<double> values) {
  if (shape_size(shape) != values.size()) {
    throw DimensionError("Tensor::from_values: shape does not match value count");
  }
  auto s = std::make_shared<Storage>();
  s->shape = std::move(shape);
  s->values = std::move(values);
  return Tensor(std::move(s));
}

Tensor::Storage& Tensor::st() const {
  if (!s_) throw Error("use of undefined tensor");
  return *s_;
}

const std::vector<std::size_t>& Tensor::shape() const { return st().shape; }

std::size_t Tensor::size() const { return st().values.size(); }

std::size_t Tensor::dim(std::size_t axis) const {
  const auto& sh = shape();
  if (axis >= sh.size()) throw DimensionError("Tensor::dim: axis out of range");
  return sh[axis];
}

std::vector<double>& Tensor::values() { return st().values; }
const std::vector<double>& Tensor::values() const { return st().values; }
double* Tensor::data() { return st().values.data(); }
const double* Tensor::data() const { return st().values.data(); }

double Tensor::operator[](std::size_t flat) const { return st().values[flat]; }
double& Tensor::operator[](std::size_t flat) { return st().values[flat]; }

double Tensor::at(std::size_t i, std::size_t j) const {
  return st().values[i * dim(1) + j];
}
double& Tensor::at(std::size_t i, std::size_t j) {
  return st().values[i * dim(1) + j];
}
double Tensor::at(std::size_t i, std::size_t j, std::size_t k) const {
  return st().values[(i * dim(1) + j) * dim(2) + k];
}
double& Tensor::at(std::size_t i, std::size_t j, std::size_t k) {
  return st().values[(i * dim(1) + j) * dim(2) + k];
}

double Tensor::item() const {
  if (size() != 1) throw DimensionError("Tensor::item: tensor is not a scalar");
  return st().values[0];
}

bool Tensor::requires_grad() const { return st().requires_grad; }
void Tensor::set_requires_grad(bool flag) { st().requires_grad = flag; }

bool Tensor::has_grad() const { return !st().grad.empty(); }

void Tensor::ensure_grad() {
  auto& s = st();
  if (s.grad.empty()) s.grad.assign(s.values.size(), 0.0);
}

void Tensor::zero_grad() {
  auto& s = st();
  if (!s.grad.empty()) std::fill(s.grad.begin(), s.grad.end(), 0.0);
}

std::vector<double>& Tensor::grad() {
  auto& s = st();
  if (s.grad.empty()) throw Error("Tensor::grad: no gradient buffer allocated");
  return s.grad;
}

const std::vector<double>& Tensor::grad() const {
  auto& s = st();
  if (s.grad.empty()) throw Error("Tensor::grad: no gradient buffer allocated");
  return s.grad;
}

Tensor Tensor::detached_copy() const {
  return Tensor::from_values(shape(), values());
}

double value_l2_norm(const Tensor& t) {
  double acc = 0.0;
  for (double v : t.values()) acc += v * v;
  return std::sqrt(acc);
}

double grad_l2_norm(const Tensor& t) {
  if (!t.has_grad()) return 0.0;
  double acc = 0.0;
  for (double v : t.grad()) acc += v * v;
  return std::sqrt(acc);
}

bool values_bitwise_equal(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) return false;
  return std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

bool all_finite(const Tensor& t) {
  for (double v : t.values()) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace jointex
