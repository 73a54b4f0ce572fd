#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "signforge/tensor.hpp"
#include "support.hpp"

using namespace signforge;
using namespace signforge::ad;
using test::code_of;
using T = Tensor<double>;

namespace {

std::vector<double> random_values(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

// Central-difference check of d(loss)/d(param) for every parameter entry.
double max_grad_error(std::vector<T> params, const std::function<T(Tape<double>&)>& loss) {
  Tape<double> tape;
  tape.backward(loss(tape));
  double worst = 0.0;
  const double h = 1e-5;
  for (auto& p : params) {
    const std::vector<double> analytic(tape.grad(p).begin(), tape.grad(p).end());
    REQUIRE(analytic.size() == p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double keep = p.values()[i];
      p.mutable_values()[i] = keep + h;
      Tape<double> up(false);
      const double fu = loss(up).item();
      p.mutable_values()[i] = keep - h;
      Tape<double> down(false);
      const double fd = loss(down).item();
      p.mutable_values()[i] = keep;
      const double numeric = (fu - fd) / (2 * h);
      worst = std::max(worst, std::abs(numeric - analytic[i]) /
                                  std::max({1e-6, std::abs(numeric), std::abs(analytic[i])}));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("matmul values") {
  Tape<double> tape(false);
  const auto a = T::constant({2, 3}, {1, 2, 3, 4, 5, 6});
  const auto b = T::constant({3, 2}, {7, 8, 9, 10, 11, 12});
  const auto c = tape.matmul(a, b);
  CHECK(c.shape() == Shape{2, 2});
  CHECK(std::vector<double>(c.values().begin(), c.values().end()) ==
        std::vector<double>{58, 64, 139, 154});
  const auto bt = T::constant({2, 3}, {7, 9, 11, 8, 10, 12});
  const auto c2 = tape.matmul(a, bt, true);
  CHECK(std::vector<double>(c2.values().begin(), c2.values().end()) ==
        std::vector<double>{58, 64, 139, 154});
  CHECK(code_of([&] { tape.matmul(a, a); }) == ErrorCode::ShapeMismatch);
}

TEST_CASE("softmax rows sum to one and respect the causal mask") {
  std::mt19937_64 rng(1);
  Tape<double> tape(false);
  const auto x = T::constant({3, 5}, random_values(rng, 15));
  const auto s = tape.softmax(x, true);
  for (std::size_t r = 0; r < 3; ++r) {
    double sum = 0;
    for (std::size_t c = 0; c < 5; ++c) {
      const double v = s.values()[r * 5 + c];
      sum += v;
      if (c > r + 2) CHECK(v == 0.0);
    }
    CHECK(sum == doctest::Approx(1.0));
  }
}

TEST_CASE("layer norm output is standardized") {
  std::mt19937_64 rng(2);
  Tape<double> tape(false);
  const auto x = T::constant({2, 8}, random_values(rng, 16));
  const auto y = tape.layer_norm(x, T::constant({8}, std::vector<double>(8, 1.0)),
                                 T::constant({8}, std::vector<double>(8, 0.0)));
  for (std::size_t r = 0; r < 2; ++r) {
    double m = 0, v = 0;
    for (std::size_t c = 0; c < 8; ++c) m += y.values()[r * 8 + c];
    m /= 8;
    for (std::size_t c = 0; c < 8; ++c) v += std::pow(y.values()[r * 8 + c] - m, 2);
    CHECK(m == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(v / 8 == doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("gradients match central differences") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::mt19937_64 rng(seed);
    auto w = T::parameter({4, 3}, random_values(rng, 12));
    auto b = T::parameter({3}, random_values(rng, 3));
    auto g = T::parameter({3}, random_values(rng, 3));
    auto beta = T::parameter({3}, random_values(rng, 3));
    auto emb = T::parameter({5, 4}, random_values(rng, 20));
    const auto target = T::constant({3, 3}, random_values(rng, 9));
    const std::vector<std::size_t> ids{1, 4, 1};
    const std::vector<std::size_t> labels{0, 2, 1};
    const auto loss = [&](Tape<double>& tape) {
      auto x = tape.embedding_lookup(emb, ids);
      auto h = tape.add(tape.matmul(x, w), b);
      h = tape.layer_norm(h, g, beta);
      auto att = tape.softmax(tape.matmul(h, h, true), true);
      auto mixed = tape.matmul(att, tape.relu(h));
      auto joined = tape.concat({tape.slice(mixed, 0, 0, 2), tape.slice(h, 0, 2, 3)}, 0);
      auto l1 = tape.mse(tape.scale(joined, 0.5), target);
      auto l2 = tape.cross_entropy(tape.multiply(joined, h), labels);
      return tape.add(l1, l2);
    };
    CHECK(max_grad_error({w, b, g, beta, emb}, loss) < 1e-5);
  }
}

TEST_CASE("tape errors") {
  Tape<double> tape;
  auto p = T::parameter({2}, {1, 2});
  CHECK(code_of([&] { tape.backward(tape.scale(p, 2.0)); }) == ErrorCode::NonScalarLoss);
  Tape<double> t2;
  auto l = t2.mean(p);
  t2.backward(l);
  CHECK(code_of([&] { t2.backward(l); }) == ErrorCode::DoubleBackward);
  CHECK(code_of([&] { tape.add(p, T::constant({3}, {1, 2, 3})); }) == ErrorCode::ShapeMismatch);
}

TEST_CASE("cross entropy ignores padded rows") {
  Tape<double> tape(false);
  const auto logits = T::constant({2, 2}, {0, 0, 100, -100});
  const std::vector<std::size_t> targets{0, 7};
  CHECK(tape.cross_entropy(logits, targets, 7).item() == doctest::Approx(std::log(2.0)));
}

TEST_CASE("optimizers move against the gradient") {
  ParameterSet<double> ps;
  ps.add("w", {2}, {1.0, -1.0});
  const auto before = ps.checksum();
  {
    Tape<double> tape;
    tape.backward(tape.mean(tape.multiply(ps.at("w"), ps.at("w"))));
    ps.accumulate(tape);
  }
  CHECK(ps.at("w").grad()[0] == doctest::Approx(1.0));
  sgd_step(ps, 0.1);
  CHECK(ps.at("w").values()[0] == doctest::Approx(0.9));
  CHECK(ps.at("w").values()[1] == doctest::Approx(-0.9));
  CHECK(ps.checksum() != before);

  Adam<double> adam;
  {
    Tape<double> tape;
    tape.backward(tape.mean(tape.multiply(ps.at("w"), ps.at("w"))));
    ps.accumulate(tape);
  }
  adam.step(ps, 0.01);
  CHECK(adam.steps() == 1);
  CHECK(ps.at("w").values()[0] == doctest::Approx(0.89).epsilon(1e-6));
  CHECK(ps.at("w").values()[1] == doctest::Approx(-0.89).epsilon(1e-6));
  CHECK(ps.scalar_count() == 2);
}
