#include "jointex/tape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "jointex/errors.hpp"

namespace jointex {

namespace {

double stable_sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  double e = std::exp(x);
  return e / (1.0 + e);
}

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shape mismatch");
  }
}

}  // namespace

void Tape::check_open(const char* op) const {
  if (consumed_) {
    throw Error(std::string(op) + ": tape already consumed by backward");
  }
}

Tensor Tape::make_output(std::vector<std::size_t> shape,
                         std::vector<double> values, bool needs_grad,
                         const char* op) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw NumericError(std::string(op) + ": non-finite value in forward output");
    }
  }
  Tensor out = Tensor::from_values(std::move(shape), std::move(values));
  out.set_requires_grad(recording_ && needs_grad);
  return out;
}

void Tape::record(std::function<void()> step) {
  steps_.push_back(std::move(step));
}

Tensor Tape::matmul(Tensor a, Tensor b) {
  check_open("matmul");
  if (a.rank() != 2 || b.rank() != 2) {
    throw DimensionError("matmul: operands must be rank-2");
  }
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  if (b.dim(0) != k) throw DimensionError("matmul: inner dimensions disagree");

  std::vector<double> c(m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a[i * k + p];
      for (std::size_t j = 0; j < n; ++j) c[i * n + j] += av * b[p * n + j];
    }
  }
  Tensor out = make_output({m, n}, std::move(c),
                           a.requires_grad() || b.requires_grad(), "matmul");
  if (out.requires_grad()) {
    record([a, b, out, m, k, n]() mutable {
      if (!out.has_grad()) return;
      const auto& dc = out.grad();
      if (a.requires_grad()) {
        a.ensure_grad();
        auto& da = a.grad();
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < n; ++j) {
            const double g = dc[i * n + j];
            for (std::size_t p = 0; p < k; ++p) da[i * k + p] += g * b[p * n + j];
          }
      }
      if (b.requires_grad()) {
        b.ensure_grad();
        auto& db = b.grad();
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < n; ++j) {
            const double g = dc[i * n + j];
            for (std::size_t p = 0; p < k; ++p) db[p * n + j] += a[i * k + p] * g;
          }
      }
    });
  }
  return out;
}

Tensor Tape::matmul_nt(Tensor a, Tensor b) {
  check_open("matmul_nt");
  if (a.rank() != 2 || b.rank() != 2) {
    throw DimensionError("matmul_nt: operands must be rank-2");
  }
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(0);
  if (b.dim(1) != k) throw DimensionError("matmul_nt: inner dimensions disagree");

  std::vector<double> c(m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += a[i * k + p] * b[j * k + p];
      c[i * n + j] = acc;
    }
  }
  Tensor out = make_output({m, n}, std::move(c),
                           a.requires_grad() || b.requires_grad(), "matmul_nt");
  if (out.requires_grad()) {
    record([a, b, out, m, k, n]() mutable {
      if (!out.has_grad()) return;
      const auto& dc = out.grad();
      if (a.requires_grad()) {
        a.ensure_grad();
        auto& da = a.grad();
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < n; ++j) {
            const double g = dc[i * n + j];
            for (std::size_t p = 0; p < k; ++p) da[i * k + p] += g * b[j * k + p];
          }
      }
      if (b.requires_grad()) {
        b.ensure_grad();
        auto& db = b.grad();
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < n; ++j) {
            const double g = dc[i * n + j];
            for (std::size_t p = 0; p < k; ++p) db[j * k + p] += a[i * k + p] * g;
          }
      }
    });
  }
  return out;
}

Tensor Tape::matvec(Tensor w, Tensor x) {
  check_open("matvec");
  if (w.rank() != 2 || x.rank() != 1) {
    throw DimensionError("matvec: expected rank-2 matrix and rank-1 vector");
  }
  const std::size_t m = w.dim(0), n = w.dim(1);
  if (x.dim(0) != n) throw DimensionError("matvec: inner dimensions disagree");

  std::vector<double> y(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += w[i * n + j] * x[j];
    y[i] = acc;
  }
  Tensor out = make_output({m}, std::move(y),
                           w.requires_grad() || x.requires_grad(), "matvec");
  if (out.requires_grad()) {
    record([w, x, out, m, n]() mutable {
      if (!out.has_grad()) return;
      const auto& dy = out.grad();
      if (w.requires_grad()) {
        w.ensure_grad();
        auto& dw = w.grad();
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < n; ++j) dw[i * n + j] += dy[i] * x[j];
      }
      if (x.requires_grad()) {
        x.ensure_grad();
        auto& dx = x.grad();
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < n; ++j) dx[j] += w[i * n + j] * dy[i];
      }
    });
  }
  return out;
}

Tensor Tape::add(Tensor a, Tensor b) {
  check_open("add");
  check_same_shape(a, b, "add");
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] + b[i];
  Tensor out = make_output(a.shape(), std::move(v),
                           a.requires_grad() || b.requires_grad(), "add");
  if (out.requires_grad()) {
    record([a, b, out]() mutable {
      if (!out.has_grad()) return;
      const auto& d = out.grad();
      if (a.requires_grad()) {
        a.ensure_grad();
        auto& da = a.grad();
        for (std::size_t i = 0; i < d.size(); ++i) da[i] += d[i];
      }
      if (b.requires_grad()) {
        b.ensure_grad();
        auto& db = b.grad();
        for (std::size_t i = 0; i < d.size(); ++i) db[i] += d[i];
      }
    });
  }
  return out;
}

Tensor Tape::sub(Tensor a, Tensor b) {
  check_open("sub");
  check_same_shape(a, b, "sub");
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] - b[i];
  Tensor out = make_output(a.shape(), std::move(v),
                           a.requires_grad() || b.requires_grad(), "sub");
  if (out.requires_grad()) {
    record([a, b, out]() mutable {
      if (!out.has_grad()) return;
      const auto& d = out.grad();
      if (a.requires_grad()) {
        a.ensure_grad();
        auto& da = a.grad();
        for (std::size_t i = 0; i < d.size(); ++i) da[i] += d[i];
      }
      if (b.requires_grad()) {
        b.ensure_grad();
        auto& db = b.grad();
        for (std::size_t i = 0; i < d.size(); ++i) db[i] -= d[i];
      }
    });
  }
  return out;
}

Tensor Tape::mul(Tensor a, Tensor b) {
  check_open("mul");
  check_same_shape(a, b, "mul");
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] * b[i];
  Tensor out = make_output(a.shape(), std::move(v),
                           a.requires_grad() || b.requires_grad(), "mul");
  if (out.requires_grad()) {
    record([a, b, out]() mutable {
      if (!out.has_grad()) return;
      const auto& d = out.grad();
      if (a.requires_grad()) {
        a.ensure_grad();
        auto& da = a.grad();
        for (std::size_t i = 0; i < d.size(); ++i) da[i] += d[i] * b[i];
      }
      if (b.requires_grad()) {
        b.ensure_grad();
        auto& db = b.grad();
        for (std::size_t i = 0; i < d.size(); ++i) db[i] += d[i] * a[i];
      }
    });
  }
  return out;
}

Tensor Tape::scale(Tensor a, double c) {
  check_open("scale");
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] * c;
  Tensor out = make_output(a.shape(), std::move(v), a.requires_grad(), "scale");
  if (out.requires_grad()) {
    record([a, out, c]() mutable {
      if (!out.has_grad()) return;
      const auto& d = out.grad();
      a.ensure_grad();
      auto& da = a.grad();
      for (std::size_t i = 0; i < d.size(); ++i) da[i] += c * d[i];
    });
  }
  return out;
}

Tensor Tape::add_row_vector(Tensor m, Tensor v) {
  check_open("add_row_vector");
  if (m.rank() != 2 || v.rank() != 1 || v.dim(0) != m.dim(1)) {
    throw DimensionError("add_row_vector: vector length must equal column count");
  }
  const std::size_t rows = m.dim(0), cols = m.dim(1);
  std::vector<double> out_v(rows * cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) out_v[i * cols + j] = m[i * cols + j] + v[j];
  Tensor out = make_output({rows, cols}, std::move(out_v),
                           m.requires_grad() || v.requires_grad(), "add_row_vector");
  if (out.requires_grad()) {
    record([m, v, out, rows, cols]() mutable {
      if (!out.has_grad()) return;
      const auto& d = out.grad();
      if (m.requires_grad()) {
        m.ensure_grad();
        auto& dm = m.grad();
        for (std::size_t i = 0; i < d.size(); ++i) dm[i] += d[i];
      }
      if (v.requires_grad()) {
        v.ensure_grad();
        auto& dv = v.grad();
        for (std::size_t i = 0; i < rows; ++i)
          for (std::size_t j = 0; j < cols; ++j) dv[j] += d[i * cols + j];
      }
    });
  }
  return out;
}

Tensor Tape::add_col_vector(Tensor m, Tensor v) {
  check_open("add_col_vector");
  if (m.rank() != 2 || v.rank() != 1 || v.dim(0) != m.dim(0)) {
    throw DimensionError("add_col_vector: vector length must equal row count");
  }
  const std::size_t rows = m.dim(0), cols = m.dim(1);
  std::vector<double> out_v(rows * cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) out_v[i * cols + j] = m[i * cols + j] + v[i];
  Tensor out = make_output({rows, cols}, std::move(out_v),
                           m.requires_grad() || v.requires_grad(), "add_col_vector");
  if (out.requires_grad()) {
    record([m, v, out, rows, cols]() mutable {
      if (!out.has_grad()) return;
      const auto& d = out.grad();
      if (m.requires_grad()) {
        m.ensure_grad();
        auto& dm = m.grad();
        for (std::size_t i = 0; i < d.size(); ++i) dm[i] += d[i];
      }
      if (v.requires_grad()) {
        v.ensure_grad();
        auto& dv = v.grad();
        for (std::size_t i = 0; i < rows; ++i)
          for (std::size_t j = 0; j < cols; ++j) dv[i] += d[i * cols + j];
      }
    });
  }
  return out;
}

Tensor Tape::sigmoid(Tensor x) {
  check_open("sigmoid");
  std::vector<double> v(x.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = stable_sigmoid(x[i]);
  Tensor out = make_output(x.shape(), std::move(v), x.requires_grad(), "sigmoid");
  if (out.requires_grad()) {
    record([x, out]() mutable {
      if (!out.has_grad()) return;
      const auto& d = out.grad();
      x.ensure_grad();
      auto& dx = x.grad();
      for (std::size_t i = 0; i < d.size(); ++i) {
        const double y = out[i];
        dx[i] += d[i] * y * (1.0 - y);
      }
    });
  }
  return out;
}

Tensor Tape::tanh(Tensor x) {
  check_open("tanh");
  std::vector<double> v(x.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::tanh(x[i]);
  Tensor out = make_output(x.shape(), std::move(v), x.requires_grad(), "tanh");
  if (out.requires_grad()) {
    record([x, out]() mutable {
      if (!out.has_grad()) return;
      const auto& d = out.grad();
      x.ensure_grad();
      auto& dx = x.grad();
      for (std::size_t i = 0; i < d.size(); ++i) {
        const double y = out[i];
        dx[i] += d[i] * (1.0 - y * y);
      }
    });
  }
  return out;
}

Tensor Tape::logsumexp(Tensor x, std::size_t axis) {
  check_open("logsumexp");
  if (x.rank() == 1 || x.rank() == 0) {
    const std::size_t n = x.size();
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) mx = std::max(mx, x[i]);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += std::exp(x[i] - mx);
    Tensor out = make_output({}, {mx + std::log(acc)}, x.requires_grad(),
                             "logsumexp");
    if (out.requires_grad()) {
      record([x, out, n]() mutable {
        if (!out.has_grad()) return;
        const double d = out.grad()[0];
        const double r = out[0];
        x.ensure_grad();
        auto& dx = x.grad();
        for (std::size_t i = 0; i < n; ++i) dx[i] += d * std::exp(x[i] - r);
      });
    }
    return out;
  }
  if (x.rank() != 2 || axis > 1) {
    throw DimensionError("logsumexp: expected rank-1, or rank-2 with axis 0/1");
  }
  const std::size_t rows = x.dim(0), cols = x.dim(1);
  const std::size_t out_n = (axis == 0) ? cols : rows;
  std::vector<double> v(out_n);
  for (std::size_t o = 0; o < out_n; ++o) {
    double mx = -std::numeric_limits<double>::infinity();
    const std::size_t count = (axis == 0) ? rows : cols;
    for (std::size_t q = 0; q < count; ++q) {
      const double xv = (axis == 0) ? x[q * cols + o] : x[o * cols + q];
      mx = std::max(mx, xv);
    }
    double acc = 0.0;
    for (std::size_t q = 0; q < count; ++q) {
      const double xv = (axis == 0) ? x[q * cols + o] : x[o * cols + q];
      acc += std::exp(xv - mx);
    }
    v[o] = mx + std::log(acc);
  }
  Tensor out = make_output({out_n}, std::move(v), x.requires_grad(), "logsumexp");
  if (out.requires_grad()) {
    record([x, out, rows, cols, axis]() mutable {
      if (!out.has_grad()) return;
      const auto& d = out.grad();
      x.ensure_grad();
      auto& dx = x.grad();
      const std::size_t out_n = (axis == 0) ? cols : rows;
      const std::size_t count = (axis == 0) ? rows : cols;
      for (std::size_t o = 0; o < out_n; ++o) {
        const double r = out[o];
        for (std::size_t q = 0; q < count; ++q) {
          const std::size_t idx = (axis == 0) ? q * cols + o : o * cols + q;
          dx[idx] += d[o] * std::exp(x[idx] - r);
        }
      }
    });
  }
  return out;
}

Tensor Tape::sum(Tensor x) {
  check_open("sum");
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i];
  Tensor out = make_output({}, {acc}, x.requires_grad(), "sum");
  if (out.requires_grad()) {
    record([x, out]() mutable {
      if (!out.has_grad()) return;
      const double d = out.grad()[0];
      x.ensure_grad();
      auto& dx = x.grad();
      for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += d;
    });
  }
  return out;
}

Tensor Tape::pick(Tensor x, std::size_t flat_index) {
  check_open("pick");
  if (flat_index >= x.size()) throw DimensionError("pick: index out of range");
  Tensor out = make_output({}, {x[flat_index]}, x.requires_grad(), "pick");
  if (out.requires_grad()) {
    record([x, out, flat_index]() mutable {
      if (!out.has_grad()) return;
      x.ensure_grad();
      x.grad()[flat_index] += out.grad()[0];
    });
  }
  return out;
}

Tensor Tape::slice(Tensor x, std::size_t start, std::size_t count) {
  check_open("slice");
  if (x.rank() != 1 || start + count > x.dim(0)) {
    throw DimensionError("slice: range out of bounds for rank-1 tensor");
  }
  std::vector<double> v(x.data() + start, x.data() + start + count);
  Tensor out = make_output({count}, std::move(v), x.requires_grad(), "slice");
  if (out.requires_grad()) {
    record([x, out, start, count]() mutable {
      if (!out.has_grad()) return;
      const auto& d = out.grad();
      x.ensure_grad();
      auto& dx = x.grad();
      for (std::size_t i = 0; i < count; ++i) dx[start + i] += d[i];
    });
  }
  return out;
}

Tensor Tape::concat(std::vector<Tensor> xs) {
  check_open("concat");
  if (xs.empty()) throw DimensionError("concat: no inputs");
  std::size_t total = 0;
  bool needs_grad = false;
  for (const auto& x : xs) {
    if (x.rank() != 1) throw DimensionError("concat: inputs must be rank-1");
    total += x.dim(0);
    needs_grad = needs_grad || x.requires_grad();
  }
  std::vector<double> v;
  v.reserve(total);
  for (const auto& x : xs) v.insert(v.end(), x.values().begin(), x.values().end());
  Tensor out = make_output({total}, std::move(v), needs_grad, "concat");
  if (out.requires_grad()) {
    record([xs, out]() mutable {
      if (!out.has_grad()) return;
      const auto& d = out.grad();
      std::size_t offset = 0;
      for (auto& x : xs) {
        const std::size_t n = x.dim(0);
        if (x.requires_grad()) {
          x.ensure_grad();
          auto& dx = x.grad();
          for (std::size_t i = 0; i < n; ++i) dx[i] += d[offset + i];
        }
        offset += n;
      }
    });
  }
  return out;
}

Tensor Tape::row(Tensor m, std::size_t i) {
  check_open("row");
  if (m.rank() != 2 || i >= m.dim(0)) throw DimensionError("row: index out of range");
  const std::size_t cols = m.dim(1);
  std::vector<double> v(m.data() + i * cols, m.data() + (i + 1) * cols);
  Tensor out = make_output({cols}, std::move(v), m.requires_grad(), "row");
  if (out.requires_grad()) {
    record([m, out, i, cols]() mutable {
      if (!out.has_grad()) return;
      const auto& d = out.grad();
      m.ensure_grad();
      auto& dm = m.grad();
      for (std::size_t j = 0; j < cols; ++j) dm[i * cols + j] += d[j];
    });
  }
  return out;
}

Tensor Tape::stack_rows(std::vector<Tensor> rows) {
  check_open("stack_rows");
  if (rows.empty()) throw DimensionError("stack_rows: no inputs");
  const std::size_t cols = rows.front().size();
  bool needs_grad = false;
  for (const auto& r : rows) {
    if (r.rank() != 1 || r.dim(0) != cols) {
      throw DimensionError("stack_rows: inputs must be rank-1 of equal length");
    }
    needs_grad = needs_grad || r.requires_grad();
  }
  std::vector<double> v;
  v.reserve(rows.size() * cols);
  for (const auto& r : rows) v.insert(v.end(), r.values().begin(), r.values().end());
  Tensor out = make_output({rows.size(), cols}, std::move(v), needs_grad, "stack_rows");
  if (out.requires_grad()) {
    record([rows, out, cols]() mutable {
      if (!out.has_grad()) return;
      const auto& d = out.grad();
      for (std::size_t t = 0; t < rows.size(); ++t) {
        Tensor& r = rows[t];
        if (!r.requires_grad()) continue;
        r.ensure_grad();
        auto& dr = r.grad();
        for (std::size_t j = 0; j < cols; ++j) dr[j] += d[t * cols + j];
      }
    });
  }
  return out;
}

Tensor Tape::vstack(std::vector<Tensor> mats) {
  check_open("vstack");
  if (mats.empty()) throw DimensionError("vstack: no inputs");
  const std::size_t cols = mats.front().rank() == 2 ? mats.front().dim(1) : 0;
  std::size_t total_rows = 0;
  bool needs_grad = false;
  for (const auto& m : mats) {
    if (m.rank() != 2 || m.dim(1) != cols) {
      throw DimensionError("vstack: inputs must be rank-2 with equal columns");
    }
    total_rows += m.dim(0);
    needs_grad = needs_grad || m.requires_grad();
  }
  std::vector<double> v;
  v.reserve(total_rows * cols);
  for (const auto& m : mats) v.insert(v.end(), m.values().begin(), m.values().end());
  Tensor out = make_output({total_rows, cols}, std::move(v), needs_grad, "vstack");
  if (out.requires_grad()) {
    record([mats, out]() mutable {
      if (!out.has_grad()) return;
      const auto& d = out.grad();
      std::size_t offset = 0;
      for (auto& m : mats) {
        const std::size_t n = m.size();
        if (m.requires_grad()) {
          m.ensure_grad();
          auto& dm = m.grad();
          for (std::size_t i = 0; i < n; ++i) dm[i] += d[offset + i];
        }
        offset += n;
      }
    });
  }
  return out;
}

Tensor Tape::reshape(Tensor x, std::vector<std::size_t> shape) {
  check_open("reshape");
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  if (n != x.size()) throw DimensionError("reshape: element count mismatch");
  Tensor out = make_output(std::move(shape), x.values(), x.requires_grad(),
                           "reshape");
  if (out.requires_grad()) {
    record([x, out]() mutable {
      if (!out.has_grad()) return;
      const auto& d = out.grad();
      x.ensure_grad();
      auto& dx = x.grad();
      for (std::size_t i = 0; i < d.size(); ++i) dx[i] += d[i];
    });
  }
  return out;
}

Tensor Tape::lookup_rows(Tensor table,
                         const std::vector<std::size_t>& ids) {
  check_open("lookup_rows");
  if (table.rank() != 2) throw DimensionError("lookup_rows: table must be rank-2");
  const std::size_t vocab = table.dim(0), dim = table.dim(1);
  std::vector<double> v;
  v.reserve(ids.size() * dim);
  for (std::size_t id : ids) {
    if (id >= vocab) throw DimensionError("lookup_rows: id out of table range");
    v.insert(v.end(), table.data() + id * dim, table.data() + (id + 1) * dim);
  }
  Tensor out = make_output({ids.size(), dim}, std::move(v),
                           table.requires_grad(), "lookup_rows");
  if (out.requires_grad()) {
    record([table, out, ids, dim]() mutable {
      if (!out.has_grad()) return;
      const auto& d = out.grad();
      table.ensure_grad();
      auto& dt = table.grad();
      for (std::size_t t = 0; t < ids.size(); ++t)
        for (std::size_t j = 0; j < dim; ++j)
          dt[ids[t] * dim + j] += d[t * dim + j];
    });
  }
  return out;
}

Tensor Tape::mul_const(Tensor x, Tensor factor) {
  check_open("mul_const");
  check_same_shape(x, factor, "mul_const");
  std::vector<double> v(x.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = x[i] * factor[i];
  Tensor out = make_output(x.shape(), std::move(v), x.requires_grad(), "mul_const");
  if (out.requires_grad()) {
    record([x, factor, out]() mutable {
      if (!out.has_grad()) return;
      const auto& d = out.grad();
      x.ensure_grad();
      auto& dx = x.grad();
      for (std::size_t i = 0; i < d.size(); ++i) dx[i] += d[i] * factor[i];
    });
  }
  return out;
}

Tensor Tape::add_const(Tensor x, Tensor offset) {
  check_open("add_const");
  check_same_shape(x, offset, "add_const");
  std::vector<double> v(x.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = x[i] + offset[i];
  Tensor out = make_output(x.shape(), std::move(v), x.requires_grad(), "add_const");
  if (out.requires_grad()) {
    record([x, out]() mutable {
      if (!out.has_grad()) return;
      const auto& d = out.grad();
      x.ensure_grad();
      auto& dx = x.grad();
      for (std::size_t i = 0; i < d.size(); ++i) dx[i] += d[i];
    });
  }
  return out;
}

Tensor Tape::bce_with_logits_sum(Tensor scores, Tensor targets) {
  check_open("bce_with_logits_sum");
  check_same_shape(scores, targets, "bce_with_logits_sum");
  double acc = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double s = scores[i];
    const double t = targets[i];
    acc += std::max(s, 0.0) - s * t + std::log1p(std::exp(-std::fabs(s)));
  }
  Tensor out = make_output({}, {acc}, scores.requires_grad(), "bce_with_logits_sum");
  if (out.requires_grad()) {
    record([scores, targets, out]() mutable {
      if (!out.has_grad()) return;
      const double d = out.grad()[0];
      scores.ensure_grad();
      auto& ds = scores.grad();
      for (std::size_t i = 0; i < ds.size(); ++i) {
        ds[i] += d * (stable_sigmoid(scores[i]) - targets[i]);
      }
    });
  }
  return out;
}

void Tape::backward(const Tensor& loss) {
  if (!recording_) throw Error("backward: tape is not recording");
  if (consumed_) throw Error("backward: tape already consumed");
  if (!loss.defined() || loss.size() != 1) {
    throw DimensionError("backward: loss must be a scalar");
  }
  if (!loss.requires_grad()) {
    throw Error("backward: loss does not depend on any tracked tensor");
  }
  Tensor seed = loss;
  seed.ensure_grad();
  seed.grad()[0] += 1.0;
  for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) (*it)();
  consumed_ = true;
  steps_.clear();
}

}  // namespace jointex
