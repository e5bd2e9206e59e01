#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sfs/linear.hpp"
#include "support.hpp"

using namespace sfs;

namespace {

GradientQuadratic random_operator(std::mt19937_64& rng, const GridPtr& g) {
  std::uniform_real_distribution<double> u(0.1, 2.0);
  GradientQuadratic op(g);
  for (std::size_t i = 0; i < g->size(); ++i) {
    // Positive-definite 2x2 weights and a strictly positive mass.
    const double a = u(rng), b = u(rng), c = 0.5 * std::sqrt(a * b) * (u(rng) - 1.0);
    op.wxx()[i] = a;
    op.wyy()[i] = b;
    op.wxy()[i] = c;
    op.mass()[i] = u(rng);
  }
  return op;
}

std::vector<double> apply_op(const GradientQuadratic& op, const std::vector<double>& x) {
  std::vector<double> y(x.size());
  op.apply(x, y);
  return y;
}

double dotv(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

TEST(Linear, OperatorIsSymmetric) {
  std::mt19937_64 rng(5);
  auto g = test::random_grid(rng, 11, 9);
  auto op = random_operator(rng, g);
  const auto u = test::random_scalar(rng, g).values;
  const auto v = test::random_scalar(rng, g).values;
  EXPECT_NEAR(dotv(apply_op(op, u), v), dotv(u, apply_op(op, v)), 1e-12);
}

TEST(Linear, OperatorMatchesGradientForm) {
  std::mt19937_64 rng(6);
  auto g = test::random_grid(rng, 8, 8);
  GradientQuadratic op(g);
  op.set_isotropic(2.5);
  const auto z = test::random_scalar(rng, g);
  const auto gz = gradient(z);
  // z^T A z = 2.5 |grad z|^2 with zero mass.
  EXPECT_NEAR(dotv(z.values, apply_op(op, z.values)), 2.5 * dot(gz, gz), 1e-12);
}

TEST(Linear, DiagonalMatchesOperator) {
  std::mt19937_64 rng(7);
  auto g = test::random_grid(rng, 6, 5);
  auto op = random_operator(rng, g);
  const auto diag = op.diagonal();
  for (std::size_t i = 0; i < g->size(); ++i) {
    std::vector<double> e(g->size(), 0.0);
    e[i] = 1.0;
    EXPECT_NEAR(apply_op(op, e)[i], diag[i], 1e-14);
  }
}

TEST(Linear, ConjugateGradientSolves) {
  std::mt19937_64 rng(8);
  auto g = test::random_grid(rng, 20, 20);
  auto op = random_operator(rng, g);
  const auto truth = test::random_scalar(rng, g).values;
  const auto b = apply_op(op, truth);
  std::vector<double> x(g->size(), 0.0);
  const CgResult r = conjugate_gradient(op, b, x, {5000, 1e-12});
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.relative_residual, 1e-12);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(x[i], truth[i], 1e-9);
}

TEST(Linear, ConjugateGradientZeroRhs) {
  std::mt19937_64 rng(9);
  auto g = MaskedGrid::full(5, 5);
  auto op = random_operator(rng, g);
  std::vector<double> b(g->size(), 0.0), x(g->size(), 0.0);
  const CgResult r = conjugate_gradient(op, b, x, {});
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 0);
}
