#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "nmt/tensor.hpp"
#include "testutil.hpp"

using namespace nmt;

TEST_CASE("zeros and shape validation") {
  Tensor z = Tensor::zeros({2, 3});
  CHECK(z.size() == 6);
  for (int i = 0; i < 6; ++i) CHECK(z.at(i) == 0.0);
  CHECK(z.shape() == Shape{2, 3});
  CHECK_THROWS(Tensor::zeros({0}));
  CHECK_THROWS(Tensor::zeros({2, -1}));
  CHECK_THROWS(Tensor::zeros({}));
}

TEST_CASE("randn is deterministic per seed") {
  Tensor a = Tensor::randn({4}, 1, 0.1);
  Tensor b = Tensor::randn({4}, 1, 0.1);
  for (int i = 0; i < 4; ++i) CHECK(a.at(i) == b.at(i));
  Tensor c = Tensor::randn({4}, 2, 0.1);
  bool same = true;
  for (int i = 0; i < 4; ++i) same = same && a.at(i) == c.at(i);
  CHECK_FALSE(same);
}

TEST_CASE("randn sample statistics") {
  Tensor x = Tensor::randn({10000}, 7, 1.0);
  double mean = 0.0;
  for (int i = 0; i < x.size(); ++i) mean += x.at(i);
  mean /= x.size();
  CHECK(mean > -0.05);
  CHECK(mean < 0.05);

  Tensor y = Tensor::randn({2000}, 3, 0.1);
  double m = 0.0;
  for (int i = 0; i < y.size(); ++i) m += y.at(i);
  m /= y.size();
  double var = 0.0;
  for (int i = 0; i < y.size(); ++i) var += (y.at(i) - m) * (y.at(i) - m);
  double sd = std::sqrt(var / (y.size() - 1));
  CHECK(sd > 0.08);
  CHECK(sd < 0.12);
}

TEST_CASE("matmul identity and hand-computed product") {
  Tensor eye({2, 2}, {1, 0, 0, 1});
  Tensor b({2, 3}, {1, 2, 3, 4, 5, 6});
  Tensor r = matmul(eye, b);
  for (int i = 0; i < 6; ++i) CHECK(r.at(i) == b.at(i));

  Tensor a({2, 2}, {1, 2, 3, 4});
  Tensor v({2, 1}, {5, 6});
  Tensor p = matmul(a, v);
  CHECK(p.at(0) == 17.0);
  CHECK(p.at(1) == 39.0);

  Tensor vec({2}, {5, 6});
  Tensor pv = matmul(a, vec);
  CHECK(pv.rank() == 1);
  CHECK(pv.at(0) == 17.0);
  CHECK(pv.at(1) == 39.0);

  Tensor bad({3}, {1, 2, 3});
  CHECK_THROWS(matmul(a, bad));
}

TEST_CASE("matmul gradient of sum equals ones times B^T") {
  Rng rng(11);
  Tensor a = Tensor::uniform({3, 4}, rng, -1, 1);
  Tensor b = Tensor::uniform({4, 2}, rng, -1, 1);
  Tape tape;
  Tensor loss = sum(matmul(tape.watch(a), tape.watch(b)));
  tape.backward(loss);
  const auto* ga = tape.grad_of(a);
  REQUIRE(ga != nullptr);
  // d/dA sum(AB) = ones(3,2) B^T, so every row of grad_A holds B's row sums
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 4; ++k) {
      double expect = b.at(k, 0) + b.at(k, 1);
      CHECK((*ga)[i * 4 + k] == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("elementwise ops") {
  Tensor a({2}, {1, 2});
  Tensor zero({2}, {0, 0});
  Tensor r = add(a, zero);
  CHECK(r.at(0) == 1.0);
  CHECK(r.at(1) == 2.0);

  Tensor b({2}, {2, 3});
  Tensor ones({2}, {1, 1});
  Tensor m = mul(b, ones);
  CHECK(m.at(0) == 2.0);
  CHECK(m.at(1) == 3.0);

  Tensor c({2}, {4, 5});
  Tensor mm = mul(b, c);
  CHECK(mm.at(0) == 8.0);
  CHECK(mm.at(1) == 15.0);

  Tensor s = sub(c, b);
  CHECK(s.at(0) == 2.0);
  CHECK(s.at(1) == 2.0);

  Tensor sc = scale(b, 0.5);
  CHECK(sc.at(0) == 1.0);
  CHECK(sc.at(1) == 1.5);

  Tensor wrong({3}, {1, 2, 3});
  CHECK_THROWS(add(a, wrong));
  CHECK_THROWS(mul(a, wrong));
}

TEST_CASE("activations at symmetry points and softmax stability") {
  Tensor z = Tensor::scalar(0.0);
  CHECK(nmt::tanh(z).value() == 0.0);
  CHECK(sigmoid(z).value() == 0.5);

  Tensor u({4}, {3.7, 3.7, 3.7, 3.7});
  Tensor su = softmax(u);
  for (int i = 0; i < 4; ++i) CHECK(su.at(i) == doctest::Approx(0.25).epsilon(1e-12));

  Tensor big({2}, {1000, 0});
  Tensor sb = softmax(big);
  CHECK(sb.all_finite());
  CHECK(sb.at(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sb.at(1) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("softmax sums to one and is shift invariant") {
  Rng rng(5);
  for (int it = 0; it < 50; ++it) {
    int n = 2 + static_cast<int>(rng.bits() % 7);
    Tensor v = Tensor::uniform({n}, rng, -4, 4);
    Tensor s = softmax(v);
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += s.at(i);
    CHECK(std::abs(total - 1.0) < 1e-9);

    Tensor shifted = v.clone();
    for (int i = 0; i < n; ++i) shifted.at(i) += 17.25;
    Tensor s2 = softmax(shifted);
    for (int i = 0; i < n; ++i) CHECK(std::abs(s.at(i) - s2.at(i)) < 1e-9);
  }
}

TEST_CASE("concat and slice") {
  Tensor a({2}, {1, 2});
  Tensor b({1}, {3});
  Tensor single = concat({a});
  CHECK(single.size() == 2);
  CHECK(single.at(1) == 2.0);

  Tensor c = concat({a, b});
  CHECK(c.shape() == Shape{3});
  CHECK(c.at(0) == 1.0);
  CHECK(c.at(1) == 2.0);
  CHECK(c.at(2) == 3.0);

  Tensor word = Tensor::zeros({100});
  Tensor chr = Tensor::zeros({100});
  CHECK(concat({word, chr}).size() == 200);

  CHECK_THROWS(concat({}));

  // slice(concat) round-trips the parts exactly
  Rng rng(9);
  Tensor x = Tensor::uniform({5}, rng, -2, 2);
  Tensor y = Tensor::uniform({3}, rng, -2, 2);
  Tensor joined = concat({x, y});
  Tensor sx = slice(joined, 0, 5);
  Tensor sy = slice(joined, 5, 3);
  for (int i = 0; i < 5; ++i) CHECK(sx.at(i) == x.at(i));
  for (int i = 0; i < 3; ++i) CHECK(sy.at(i) == y.at(i));
  CHECK_THROWS(slice(joined, 6, 3));
}

TEST_CASE("rowmax values and tie gradient") {
  Tensor m({1, 3}, {1, 5, 3});
  Tensor r = rowmax(m);
  CHECK(r.size() == 1);
  CHECK(r.at(0) == 5.0);

  Tensor col({3, 1}, {4, -1, 2});
  Tensor rc = rowmax(col);
  CHECK(rc.at(0) == 4.0);
  CHECK(rc.at(1) == -1.0);
  CHECK(rc.at(2) == 2.0);

  // a tie routes the gradient to the lowest column only
  Tensor tie({1, 2}, {2, 2});
  Tape tape;
  Tensor loss = sum(rowmax(tape.watch(tie)));
  tape.backward(loss);
  const auto* g = tape.grad_of(tie);
  REQUIRE(g != nullptr);
  CHECK((*g)[0] == 1.0);
  CHECK((*g)[1] == 0.0);
}

TEST_CASE("cross entropy fixtures") {
  Tensor uniform({4}, {0.3, 0.3, 0.3, 0.3});
  CHECK(cross_entropy(uniform, 2).value() == doctest::Approx(std::log(4.0)).epsilon(1e-12));

  Tensor logits({3}, {1, 2, 3});
  double expect = std::log(std::exp(1.0) + std::exp(2.0) + std::exp(3.0)) - 3.0;
  CHECK(cross_entropy(logits, 2).value() == doctest::Approx(expect).epsilon(1e-12));
  CHECK(cross_entropy(logits, 2).value() == doctest::Approx(0.4076).epsilon(1e-3));

  // a dominant target logit drives the loss to zero
  Tensor dom({2}, {100, 0});
  CHECK(cross_entropy(dom, 0).value() < 1e-9);

  CHECK_THROWS(cross_entropy(logits, 3));
  CHECK_THROWS(cross_entropy(logits, -1));
}

TEST_CASE("backward basics") {
  // d/dx sum(x*x) = 2x
  Tensor x({1}, {3});
  Tape tape;
  Tensor w = tape.watch(x);
  Tensor loss = sum(mul(w, w));
  tape.backward(loss);
  const auto* g = tape.grad_of(x);
  REQUIRE(g != nullptr);
  CHECK((*g)[0] == doctest::Approx(6.0).epsilon(1e-12));

  // a parameter the loss never uses gets a zero gradient
  Tensor unused({2}, {1, 1});
  Tape t2;
  Tensor w2 = t2.watch(x);
  Tensor wu = t2.watch(unused);
  t2.backward(sum(w2));
  std::vector<double> gu = t2.grad(wu);
  CHECK(gu[0] == 0.0);
  CHECK(gu[1] == 0.0);

  // non-scalar loss rejected
  Tape t3;
  Tensor v({2}, {1, 2});
  Tensor tv = t3.watch(v);
  CHECK_THROWS(t3.backward(tv));
}

TEST_CASE("gradient accumulation is additive across uses") {
  Rng rng(21);
  Tensor x = Tensor::uniform({5}, rng, -1, 1);
  Tensor a = Tensor::uniform({5}, rng, -1, 1);
  Tensor b = Tensor::uniform({5}, rng, -1, 1);

  Tape both;
  Tensor wx = both.watch(x);
  both.backward(add(dot(wx, a), dot(wx, b)));
  const auto* g_both = both.grad_of(x);

  Tape ta;
  ta.backward(dot(ta.watch(x), a));
  const auto* g_a = ta.grad_of(x);
  Tape tb;
  tb.backward(dot(tb.watch(x), b));
  const auto* g_b = tb.grad_of(x);

  REQUIRE(g_both);
  REQUIRE(g_a);
  REQUIRE(g_b);
  for (int i = 0; i < 5; ++i)
    CHECK(std::abs((*g_both)[i] - ((*g_a)[i] + (*g_b)[i])) < 1e-12);
}

TEST_CASE("non-finite results are rejected immediately") {
  Tensor huge({1}, {1e308});
  CHECK_THROWS_WITH_AS(mul(huge, huge), doctest::Contains("non-finite"),
                       std::runtime_error);
  Tensor x({2}, {1, 2});
  CHECK_THROWS(scale(x, std::numeric_limits<double>::infinity()));
}

// Finite-difference property over every differentiable op, 100 random small
// inputs each (dims <= 8). Vector-valued ops are probed with a random fixed
// weighting so the check is non-degenerate.
TEST_CASE("finite differences for all ops") {
  double worst = 0.0;
  for (int iter = 0; iter < 100; ++iter) {
    Rng rng(1000 + iter);
    int n = 2 + static_cast<int>(rng.bits() % 7);  // 2..8
    int m = 1 + static_cast<int>(rng.bits() % 8);  // 1..8
    Tensor a = Tensor::uniform({n}, rng, -1.5, 1.5);
    Tensor b = Tensor::uniform({n}, rng, -1.5, 1.5);
    Tensor M = Tensor::uniform({m, n}, rng, -1.5, 1.5);
    Tensor B2 = Tensor::uniform({n, m}, rng, -1.5, 1.5);
    Tensor probe_n = Tensor::uniform({n}, rng, -1, 1);
    Tensor probe_m = Tensor::uniform({m}, rng, -1, 1);
    Tensor s = Tensor::uniform({1}, rng, 0.3, 1.7);
    int target = static_cast<int>(rng.bits() % n);

    auto run = [&](std::vector<Tensor*> params, auto fn) {
      worst = std::max(worst, testutil::fd_max_rel_err(params, fn));
    };
    auto w = [](Tape* tp, Tensor& t) { return tp ? tp->watch(t) : t; };

    run({&a, &b}, [&](Tape* tp) { return dot(add(w(tp, a), w(tp, b)), probe_n); });
    run({&a, &b}, [&](Tape* tp) { return dot(sub(w(tp, a), w(tp, b)), probe_n); });
    run({&a, &b}, [&](Tape* tp) { return dot(mul(w(tp, a), w(tp, b)), probe_n); });
    run({&a}, [&](Tape* tp) { return dot(scale(w(tp, a), -0.37), probe_n); });
    run({&M, &a}, [&](Tape* tp) { return dot(matmul(w(tp, M), w(tp, a)), probe_m); });
    Tensor P = matmul(M, B2);  // constant probe, snapshot of current values
    run({&M, &B2}, [&](Tape* tp) {
      return sum(mul(matmul(w(tp, M), w(tp, B2)), P));
    });
    run({&a}, [&](Tape* tp) { return dot(nmt::tanh(w(tp, a)), probe_n); });
    run({&a}, [&](Tape* tp) { return dot(sigmoid(w(tp, a)), probe_n); });
    run({&a}, [&](Tape* tp) { return dot(softmax(w(tp, a)), probe_n); });
    run({&a, &b}, [&](Tape* tp) {
      Tensor joined = concat({w(tp, a), w(tp, b)});
      return dot(slice(joined, 1, n), probe_n);
    });
    run({&M}, [&](Tape* tp) { return dot(rowmax(w(tp, M)), probe_m); });
    run({&a}, [&](Tape* tp) { return cross_entropy(w(tp, a), target); });
    run({&a, &b}, [&](Tape* tp) { return dot(w(tp, a), w(tp, b)); });
    run({&s, &a}, [&](Tape* tp) { return dot(smul(w(tp, s), w(tp, a)), probe_n); });
    run({&M}, [&](Tape* tp) { return dot(take_row(w(tp, M), m - 1), probe_n); });
    run({&a, &b}, [&](Tape* tp) {
      Tensor cc = concat_cols({w(tp, a), w(tp, b)});
      return dot(rowmax(cc), probe_n);
    });
    run({&a, &b}, [&](Tape* tp) {
      Tensor weights = softmax(w(tp, a));
      std::vector<Tensor> vs(n, w(tp, b));
      return dot(weighted_sum(weights, vs), probe_n);
    });
    run({&a}, [&](Tape* tp) { return sum(nmt::tanh(w(tp, a))); });
  }
  CHECK(worst < 1e-4);
}
