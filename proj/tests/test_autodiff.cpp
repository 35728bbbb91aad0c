#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "jointex/errors.hpp"
#include "jointex/gradcheck.hpp"
#include "jointex/tape.hpp"
#include "jointex/tensor.hpp"

using namespace jointex;
using namespace jointex::testing;

TEST_CASE("tensor shape and data invariants") {
  Tensor t = Tensor::from_values({2, 3}, {1, 2, 3, 4, 5, 6});
  CHECK(t.size() == 6);
  CHECK(t.at(1, 2) == 6);
  CHECK_THROWS_AS(Tensor::from_values({2, 2}, {1, 2, 3}), DimensionError);
  CHECK_THROWS_AS(Tensor::scalar(1.0).at(0, 1), DimensionError);

  Tensor s = Tensor::scalar(4.5);
  CHECK(s.rank() == 0);
  CHECK(s.item() == 4.5);

  t.ensure_grad();
  CHECK(t.grad().size() == t.size());
}

TEST_CASE("matmul forward examples") {
  Tape tape;
  Tensor a = Tensor::from_values({2, 2}, {1, 2, 3, 4});
  Tensor b = Tensor::from_values({2, 1}, {1, 1});
  Tensor c = tape.matmul(a, b);
  CHECK(c.shape() == std::vector<std::size_t>{2, 1});
  CHECK(c[0] == 3);
  CHECK(c[1] == 7);

  Tensor eye = Tensor::from_values({2, 2}, {1, 0, 0, 1});
  Tensor ai = tape.matmul(a, eye);
  CHECK(values_bitwise_equal(ai, a));

  Tensor bad = Tensor::zeros({3, 2});
  CHECK_THROWS_AS(tape.matmul(a, bad), DimensionError);
}

TEST_CASE("sigmoid forward and backward examples") {
  Tape tape;
  Tensor x = Tensor::from_values({3}, {0.0, std::log(3.0), 0.0});
  x.set_requires_grad(true);
  Tensor y = tape.sigmoid(x);
  CHECK(y[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(y[1] == doctest::Approx(0.75).epsilon(1e-12));

  tape.backward(tape.sum(y));
  CHECK(x.grad()[0] == doctest::Approx(0.25).epsilon(1e-12));

  // Stays finite far into the tails.
  Tape tape2;
  Tensor wide = Tensor::from_values({2}, {700.0, -700.0});
  Tensor s = tape2.sigmoid(wide);
  CHECK(s[0] == doctest::Approx(1.0));
  CHECK(s[1] == doctest::Approx(0.0));
}

TEST_CASE("logsumexp examples and naive oracle") {
  Tape tape;
  Tensor x = Tensor::from_values({2}, {0.0, 0.0});
  CHECK(tape.logsumexp(x).item() == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  Tensor big = Tensor::from_values({2}, {1000.0, 1000.0});
  CHECK(tape.logsumexp(big).item() ==
        doctest::Approx(1000.0 + std::log(2.0)).epsilon(1e-12));

  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    Tensor v = random_tensor({11}, rng, -3.0, 3.0);
    double naive = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) naive += std::exp(v[i]);
    naive = std::log(naive);
    CHECK(tape.logsumexp(v).item() == doctest::Approx(naive).epsilon(1e-10));
  }
}

TEST_CASE("backward basics: product rule, sum, fan-out accumulation") {
  Tape tape;
  Tensor x = Tensor::from_values({}, {3.0});
  Tensor y = Tensor::from_values({}, {4.0});
  x.set_requires_grad(true);
  y.set_requires_grad(true);
  Tensor loss = tape.mul(x, y);
  tape.backward(loss);
  CHECK(x.grad()[0] == 4.0);
  CHECK(y.grad()[0] == 3.0);

  Tape tape2;
  Rng rng(3);
  Tensor v = random_tensor({5}, rng, -1, 1, /*requires_grad=*/true);
  tape2.backward(tape2.sum(v));
  for (double g : v.grad()) CHECK(g == 1.0);

  // z used twice: gradients add.
  Tape tape3;
  Tensor z = Tensor::from_values({}, {2.0});
  z.set_requires_grad(true);
  tape3.backward(tape3.add(z, z));
  CHECK(z.grad()[0] == 2.0);
}

TEST_CASE("backward linearity across tapes") {
  Rng rng(11);
  Tensor x = random_tensor({4}, rng, -1, 1, true);
  Tensor w = random_tensor({4}, rng, -1, 1);

  // Combined loss on one tape.
  {
    Tape tape;
    Tensor a = tape.sum(tape.mul_const(tape.sigmoid(x), w));
    Tensor b = tape.sum(tape.tanh(x));
    tape.backward(tape.add(a, b));
  }
  std::vector<double> combined = x.grad();
  x.zero_grad();

  // Two separate backward passes accumulate to the same thing.
  {
    Tape tape;
    tape.backward(tape.sum(tape.mul_const(tape.sigmoid(x), w)));
  }
  {
    Tape tape;
    tape.backward(tape.sum(tape.tanh(x)));
  }
  for (std::size_t i = 0; i < combined.size(); ++i) {
    CHECK(x.grad()[i] == doctest::Approx(combined[i]).epsilon(1e-14));
  }
}

TEST_CASE("tape contracts: scalar loss, single backward, NaN detection") {
  Tape tape;
  Rng rng(5);
  Tensor x = random_tensor({3}, rng, -1, 1, true);
  Tensor y = tape.sigmoid(x);
  CHECK_THROWS_AS(tape.backward(y), DimensionError);  // non-scalar

  Tensor loss = tape.sum(y);
  tape.backward(loss);
  CHECK_THROWS_AS(tape.backward(loss), Error);     // consumed
  CHECK_THROWS_AS(tape.sigmoid(x), Error);         // ops after backward

  Tape tape2;
  Tensor inf = Tensor::from_values({1}, {1e308});
  CHECK_THROWS_AS(tape2.add(inf, inf), NumericError);
}

TEST_CASE("forward determinism: identical inputs give identical bits") {
  Rng rng(17);
  Tensor x = random_tensor({6}, rng, -2, 2);
  Tensor w = random_tensor({4, 6}, rng, -2, 2);
  auto run = [&]() {
    Tape tape(false);
    return tape.logsumexp(tape.tanh(tape.matvec(w, x))).item();
  };
  const double first = run();
  for (int i = 0; i < 5; ++i) {
    const double again = run();
    CHECK(std::memcmp(&first, &again, sizeof(double)) == 0);
  }
}

namespace {

// Finite-difference sweep for one op composition: loss = sum(out .* weights).
double fd_check(const std::function<Tensor(Tape&)>& build,
                const std::vector<std::pair<std::string, Tensor>>& leaves) {
  return check_gradients(build, leaves).max_rel_error;
}

}  // namespace

TEST_CASE("finite differences pass for every differentiable op") {
  Rng rng(101);
  double worst = 0.0;
  auto note = [&](double err) { worst = std::max(worst, err); };

  for (int trial = 0; trial < 100; ++trial) {
    // matmul / matmul_nt / matvec
    {
      Tensor a = random_tensor({3, 4}, rng, -2, 2, true);
      Tensor b = random_tensor({4, 2}, rng, -2, 2, true);
      Tensor wsum = random_tensor({3, 2}, rng, -1, 1);
      note(fd_check(
          [&](Tape& t) { return t.sum(t.mul_const(t.matmul(a, b), wsum)); },
          {{"a", a}, {"b", b}}));

      Tensor bt = random_tensor({2, 4}, rng, -2, 2, true);
      note(fd_check(
          [&](Tape& t) { return t.sum(t.mul_const(t.matmul_nt(a, bt), wsum)); },
          {{"a", a}, {"bt", bt}}));

      Tensor w = random_tensor({3, 5}, rng, -2, 2, true);
      Tensor x = random_tensor({5}, rng, -2, 2, true);
      Tensor wv = random_tensor({3}, rng, -1, 1);
      note(fd_check(
          [&](Tape& t) { return t.sum(t.mul_const(t.matvec(w, x), wv)); },
          {{"w", w}, {"x", x}}));
    }
    // elementwise + broadcast adds
    {
      Tensor a = random_tensor({2, 3}, rng, -2, 2, true);
      Tensor b = random_tensor({2, 3}, rng, -2, 2, true);
      Tensor rv = random_tensor({3}, rng, -2, 2, true);
      Tensor cv = random_tensor({2}, rng, -2, 2, true);
      Tensor wsum = random_tensor({2, 3}, rng, -1, 1);
      note(fd_check(
          [&](Tape& t) {
            Tensor m = t.mul(t.add(a, b), t.sub(a, b));
            m = t.add_row_vector(m, rv);
            m = t.add_col_vector(m, cv);
            return t.sum(t.mul_const(t.scale(m, 0.7), wsum));
          },
          {{"a", a}, {"b", b}, {"rv", rv}, {"cv", cv}}));
    }
    // nonlinearities, logsumexp variants, bce
    {
      Tensor x = random_tensor({3, 4}, rng, -2, 2, true);
      Tensor w0 = random_tensor({4}, rng, -1, 1);
      Tensor w1 = random_tensor({3}, rng, -1, 1);
      note(fd_check(
          [&](Tape& t) {
            Tensor s = t.sigmoid(x);
            Tensor u = t.tanh(x);
            Tensor l0 = t.sum(t.mul_const(t.logsumexp(t.mul(s, u), 0), w0));
            Tensor l1 = t.sum(t.mul_const(t.logsumexp(x, 1), w1));
            return t.add(l0, l1);
          },
          {{"x", x}}));

      Tensor targets = Tensor::zeros({3, 4});
      targets[1] = 1.0;
      targets[7] = 1.0;
      note(fd_check(
          [&](Tape& t) { return t.bce_with_logits_sum(x, targets); },
          {{"x", x}}));
    }
    // structural ops: slice/concat/row/stack/vstack/reshape/pick/lookup
    {
      Tensor v = random_tensor({6}, rng, -2, 2, true);
      Tensor table = random_tensor({5, 3}, rng, -2, 2, true);
      Tensor wsum = random_tensor({4, 3}, rng, -1, 1);
      note(fd_check(
          [&](Tape& t) {
            Tensor left = t.slice(v, 0, 3);
            Tensor right = t.slice(v, 3, 3);
            Tensor joined = t.concat({right, left});
            Tensor looked = t.lookup_rows(table, {4, 1, 1});
            Tensor stacked = t.stack_rows({left, right, t.row(looked, 0)});
            Tensor tall = t.vstack({stacked, t.reshape(joined, {2, 3})});
            Tensor base = t.sum(t.mul_const(t.reshape(tall, {4, 3}), wsum));
            Tensor extra = t.pick(looked, 4);
            return t.add(base, t.add_const(extra, Tensor::scalar(0.25)));
          },
          {{"v", v}, {"table", table}}));
    }
  }
  CHECK(worst <= 1e-5);
}

TEST_CASE("check_gradients on f(x) = x^2 at x = 3") {
  Tensor x = Tensor::from_values({}, {3.0});
  x.set_requires_grad(true);
  auto report = check_gradients([&](Tape& t) { return t.mul(x, x); }, {{"x", x}});
  CHECK(report.max_rel_error <= 1e-9);
}

TEST_CASE("frozen lookup table receives no gradient") {
  Rng rng(23);
  Tensor table = random_tensor({4, 3}, rng, -1, 1, /*requires_grad=*/false);
  Tape tape;
  Tensor out = tape.lookup_rows(table, {2, 2});
  CHECK_THROWS_AS(tape.backward(tape.sum(out)), Error);  // constant loss
  CHECK_FALSE(table.has_grad());
}

TEST_CASE("repeated lookup id accumulates gradient additively") {
  Rng rng(29);
  Tensor table = random_tensor({4, 2}, rng, -1, 1, true);
  Tape tape;
  Tensor out = tape.lookup_rows(table, {1, 1, 3});
  tape.backward(tape.sum(out));
  CHECK(table.grad()[1 * 2 + 0] == 2.0);
  CHECK(table.grad()[3 * 2 + 1] == 1.0);
  CHECK(table.grad()[0] == 0.0);
}
