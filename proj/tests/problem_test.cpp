#include <gtest/gtest.h>

#include "ial/generate.hpp"
#include "ial/io.hpp"
#include "ial/problem.hpp"
#include "test_support.hpp"

using namespace ial;
namespace tt = ial::testing;

namespace {

Vector random_vector(SplitMix64& rng, Index n, double scale = 1.0) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = scale * rng.next_normal();
  return v;
}

SmoothTerm random_quadratic(SplitMix64& rng, Index n) {
  Matrix G(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) G(i, j) = rng.next_normal();
  }
  Matrix Q = (G.transpose() * G) / static_cast<double>(n);
  Q += Matrix::Identity(n, n);
  Q = 0.5 * (Q + Q.transpose());
  return SmoothTerm::quadratic(Q, random_vector(rng, n));
}

}  // namespace

TEST(PowerIteration, IdentityAndDiagonal) {
  double tol = 1e-6;
  Matrix eye = Matrix::Identity(2, 2);
  EXPECT_NEAR(power_iteration_norm(eye, tol, 1000), 1.0 * (1.0 + tol), 1e-9);

  Matrix diag = Matrix::Zero(2, 2);
  diag(0, 0) = 3.0;
  diag(1, 1) = 1.0;
  EXPECT_NEAR(power_iteration_norm(diag, tol, 1000), 9.0 * (1.0 + tol), 1e-6);
}

TEST(PowerIteration, ShearMatrixClosedForm) {
  // largest eigenvalue of A^T A for [[1,1],[0,1]] is (3+sqrt(5))/2
  Matrix a(2, 2);
  a << 1, 1, 0, 1;
  double expect = (3.0 + std::sqrt(5.0)) / 2.0;
  double got = power_iteration_norm(a, 1e-8, 10000);
  EXPECT_NEAR(got, expect, 1e-5 * expect);
  EXPECT_GE(got, expect);  // guaranteed upper bound after inflation
}

TEST(PowerIteration, FrobeniusFallback) {
  Matrix diag = Matrix::Zero(2, 2);
  diag(0, 0) = 3.0;
  diag(1, 1) = 1.0;
  // max_iter too small to settle: falls back to squared Frobenius norm
  EXPECT_DOUBLE_EQ(power_iteration_norm(diag, 1e-6, 1), 10.0);
}

TEST(PowerIteration, Preconditions) {
  Matrix zero = Matrix::Zero(2, 2);
  EXPECT_THROW(power_iteration_norm(zero, 1e-6, 100), std::invalid_argument);
  Matrix eye = Matrix::Identity(2, 2);
  EXPECT_THROW(power_iteration_norm(eye, -1.0, 100), std::invalid_argument);
}

TEST(PowerIteration, UpperBoundsRayleighQuotients) {
  ProblemInstance p = generate_instance(Family::box_qp, 30, 8, 11);
  SplitMix64 rng(5);
  for (int i = 0; i < 100; ++i) {
    Vector v = random_vector(rng, 30);
    double quotient = (p.constraint.A * v).squaredNorm() / v.squaredNorm();
    EXPECT_LE(quotient, p.constraint.op_norm_sq);
  }
}

TEST(SmoothTerm, GradientMatchesFiniteDifferences) {
  SplitMix64 rng(42);
  std::vector<SmoothTerm> terms;
  terms.push_back(SmoothTerm::zero(3));
  terms.push_back(random_quadratic(rng, 4));
  {
    Matrix M(5, 4);
    for (Index i = 0; i < 5; ++i) {
      for (Index j = 0; j < 4; ++j) M(i, j) = rng.next_normal();
    }
    terms.push_back(SmoothTerm::least_squares(M, random_vector(rng, 5)));
  }
  for (const SmoothTerm& f : terms) {
    for (int trial = 0; trial < 100; ++trial) {
      Vector x = random_vector(rng, f.dim(), 2.0);
      Vector grad = f.gradient(x);
      Vector fd = tt::fd_gradient([&](const Vector& u) { return f.value(u); }, x);
      EXPECT_LE((grad - fd).norm(), 1e-5 * (1.0 + grad.norm()));
    }
  }
}

TEST(SmoothTerm, ConvexityAndLipschitz) {
  SplitMix64 rng(7);
  std::vector<SmoothTerm> terms;
  terms.push_back(random_quadratic(rng, 5));
  {
    Matrix M(6, 5);
    for (Index i = 0; i < 6; ++i) {
      for (Index j = 0; j < 5; ++j) M(i, j) = rng.next_normal();
    }
    terms.push_back(SmoothTerm::least_squares(M, random_vector(rng, 6)));
  }
  for (const SmoothTerm& f : terms) {
    for (int trial = 0; trial < 100; ++trial) {
      Vector u = random_vector(rng, f.dim(), 2.0);
      Vector v = random_vector(rng, f.dim(), 2.0);
      double lin = f.value(u) + f.gradient(u).dot(v - u);
      EXPECT_GE(f.value(v), lin - 1e-9 * (1.0 + std::abs(lin)));
      double grad_dist = (f.gradient(u) - f.gradient(v)).norm();
      EXPECT_LE(grad_dist, f.lipschitz() * (u - v).norm() * (1.0 + 1e-9) + 1e-12);
    }
  }
}

TEST(EvalObjective, IndicatorExamples) {
  Matrix A(1, 2);
  A << 1, 1;
  Vector b(1);
  b << 1;
  ProblemInstance p{SmoothTerm::zero(2), CompositeTerm::simplex(2, 1.0),
                    LinearConstraint::make(A, b), "t"};
  Vector inside(2);
  inside << 0.5, 0.5;
  EXPECT_EQ(eval_objective(p, inside), 0.0);
  Vector outside(2);
  outside << 2.0, 0.0;
  EXPECT_TRUE(std::isinf(eval_objective(p, outside)));
}

TEST(EvalObjective, QuadraticPlusL1OnBox) {
  // F(1,-2) = (1/2)(1+4) + (|1|+|-2|) = 5.5
  Matrix A(1, 2);
  A << 1, 0;
  Vector b(1);
  b << 0;
  ProblemInstance p{SmoothTerm::quadratic(Matrix::Identity(2, 2), Vector::Zero(2)),
                    CompositeTerm::l1_box(2, 1.0, 10.0), LinearConstraint::make(A, b), "t"};
  Vector x(2);
  x << 1.0, -2.0;
  EXPECT_DOUBLE_EQ(eval_objective(p, x), 5.5);
  Vector bad(3);
  bad << 1, 2, 3;
  EXPECT_THROW(eval_objective(p, bad), std::invalid_argument);
}

TEST(CompositeTerm, ProxIsExactMinimizerOnGrid) {
  SplitMix64 rng(13);
  for (const ProblemInstance& p : tt::all_2d_instances()) {
    const CompositeTerm& g = p.composite;
    std::vector<Vector> grid = tt::domain_grid_2d(g);
    for (int trial = 0; trial < 20; ++trial) {
      Vector z = random_vector(rng, 2, 0.5);
      double t = 0.05 + rng.next_uniform();
      Vector prox = g.prox(z, t);
      EXPECT_TRUE(g.contains(prox));
      double val = 0.5 * (prox - z).squaredNorm() + t * g.value(prox);
      double grid_best = kInf;
      for (const Vector& u : grid) {
        grid_best = std::min(grid_best, 0.5 * (u - z).squaredNorm() + t * g.value(u));
      }
      EXPECT_LE(val, grid_best + 1e-12);
    }
  }
}

TEST(CompositeTerm, ProxClosedFormIdentities) {
  SplitMix64 rng(17);
  // box: plain clamp
  Vector lo = Vector::Constant(4, -0.5);
  Vector hi = Vector::Constant(4, 1.5);
  CompositeTerm box = CompositeTerm::box(lo, hi);
  for (int trial = 0; trial < 50; ++trial) {
    Vector z = random_vector(rng, 4, 2.0);
    Vector prox = box.prox(z, 0.7);
    for (Index i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(prox[i], std::clamp(z[i], lo[i], hi[i]));
  }
  // l1 box: soft threshold then clip
  CompositeTerm l1 = CompositeTerm::l1_box(4, 0.8, 1.2);
  for (int trial = 0; trial < 50; ++trial) {
    Vector z = random_vector(rng, 4, 2.0);
    double t = 0.3;
    Vector prox = l1.prox(z, t);
    for (Index i = 0; i < 4; ++i) {
      double soft = z[i] > 0 ? std::max(z[i] - t * 0.8, 0.0) : std::min(z[i] + t * 0.8, 0.0);
      EXPECT_DOUBLE_EQ(prox[i], std::clamp(soft, -1.2, 1.2));
    }
  }
  // simplex: projection satisfies the threshold conditions
  CompositeTerm sx = CompositeTerm::simplex(5, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    Vector z = random_vector(rng, 5, 2.0);
    Vector prox = sx.prox(z, 1.0);
    EXPECT_NEAR(prox.sum(), 2.0, 1e-12);
    EXPECT_GE(prox.minCoeff(), 0.0);
    double tau = 0.0;
    int active = 0;
    for (Index i = 0; i < 5; ++i) {
      if (prox[i] > 0) {
        tau += z[i] - prox[i];
        active++;
      }
    }
    ASSERT_GT(active, 0);
    tau /= active;
    for (Index i = 0; i < 5; ++i) {
      if (prox[i] > 0) {
        EXPECT_NEAR(z[i] - prox[i], tau, 1e-10);
      } else {
        EXPECT_LE(z[i], tau + 1e-10);
      }
    }
  }
}

TEST(CompositeTerm, LmoMatchesVertexEnumeration2D) {
  SplitMix64 rng(19);
  for (const ProblemInstance& p : tt::all_2d_instances()) {
    const CompositeTerm& g = p.composite;
    // candidate optima: vertices / stationary points per variant
    std::vector<Vector> candidates;
    switch (g.kind()) {
      case CompositeTerm::Kind::simplex: {
        double r = g.as_simplex().radius;
        candidates = {Vector{{r, 0.0}}, Vector{{0.0, r}}};
        break;
      }
      case CompositeTerm::Kind::box: {
        const auto& b = g.as_box();
        candidates = {Vector{{b.lo[0], b.lo[1]}}, Vector{{b.lo[0], b.hi[1]}},
                      Vector{{b.hi[0], b.lo[1]}}, Vector{{b.hi[0], b.hi[1]}}};
        break;
      }
      case CompositeTerm::Kind::l1_box: {
        double r = g.as_l1_box().radius;
        for (double a : {-r, 0.0, r}) {
          for (double c : {-r, 0.0, r}) candidates.push_back(Vector{{a, c}});
        }
        break;
      }
    }
    for (int trial = 0; trial < 100; ++trial) {
      Vector c = random_vector(rng, 2, 2.0);
      Vector w = g.lmo(c);
      double val = c.dot(w) + g.value(w);
      double best = kInf;
      for (const Vector& u : candidates) best = std::min(best, c.dot(u) + g.value(u));
      EXPECT_LE(val, best + 1e-12);
      EXPECT_GE(val, best - 1e-12);
    }
  }
}

TEST(CompositeTerm, LmoDominatesRandomDomainPoints) {
  SplitMix64 rng(23);
  std::vector<CompositeTerm> variants;
  variants.push_back(CompositeTerm::simplex(5, 1.3));
  variants.push_back(CompositeTerm::box(Vector::Constant(5, -0.4), Vector::Constant(5, 0.9)));
  variants.push_back(CompositeTerm::l1_box(5, 0.6, 1.1));
  for (const CompositeTerm& g : variants) {
    for (int ci = 0; ci < 100; ++ci) {
      Vector c = random_vector(rng, 5, 1.5);
      Vector w = g.lmo(c);
      EXPECT_TRUE(g.contains(w));
      EXPECT_LE(w.norm(), g.domain_radius() * (1.0 + 1e-9) + 1e-9);
      double lmo_val = c.dot(w) + g.value(w);
      for (int xi = 0; xi < 1000; ++xi) {
        Vector x = sample_domain_point(g, rng);
        EXPECT_LE(lmo_val, c.dot(x) + g.value(x) + 1e-9);
      }
    }
  }
}

TEST(CompositeTerm, ValueConvexOnDomain) {
  SplitMix64 rng(29);
  CompositeTerm g = CompositeTerm::l1_box(4, 0.7, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    Vector u = sample_domain_point(g, rng);
    Vector v = sample_domain_point(g, rng);
    double t = rng.next_uniform();
    Vector mid = t * u + (1.0 - t) * v;
    EXPECT_LE(g.value(mid), t * g.value(u) + (1.0 - t) * g.value(v) + 1e-12);
  }
}

TEST(GenerateInstance, DeterministicInSeed) {
  ProblemInstance a = generate_instance(Family::simplex_ls, 2, 1, 7);
  ProblemInstance b = generate_instance(Family::simplex_ls, 2, 1, 7);
  EXPECT_EQ(dump_canonical(instance_to_json(a)), dump_canonical(instance_to_json(b)));
  ProblemInstance c = generate_instance(Family::simplex_ls, 2, 1, 8);
  EXPECT_NE(dump_canonical(instance_to_json(a)), dump_canonical(instance_to_json(c)));
}

TEST(GenerateInstance, PlantedPointIsFeasible) {
  GeneratedInstance gen = generate_instance_detail(Family::box_qp, 50, 10, 1);
  EXPECT_TRUE(gen.instance.composite.contains(gen.planted));
  EXPECT_LE(gen.instance.constraint.residual(gen.planted).norm(),
            1e-14 * (1.0 + gen.instance.constraint.b.norm()));

  GeneratedInstance sx = generate_instance_detail(Family::simplex_ls, 20, 5, 3);
  EXPECT_TRUE(sx.instance.composite.contains(sx.planted));
  EXPECT_NEAR(sx.planted.sum(), 1.0, 1e-12);
}

TEST(GenerateInstance, L1FamilyHasNonnegativeObjective) {
  GeneratedInstance gen = generate_instance_detail(Family::l1_basis_pursuit, 20, 5, 3);
  EXPECT_EQ(gen.instance.smooth.kind(), SmoothTerm::Kind::zero);
  EXPECT_EQ(gen.instance.composite.kind(), CompositeTerm::Kind::l1_box);
  SplitMix64 rng(1);
  for (int i = 0; i < 200; ++i) {
    Vector x = sample_domain_point(gen.instance.composite, rng);
    EXPECT_GE(eval_objective(gen.instance, x), 0.0);
  }
}

TEST(GenerateInstance, RejectsBadDimensions) {
  EXPECT_THROW(generate_instance(Family::box_qp, 5, 6, 1), std::invalid_argument);
  EXPECT_THROW(generate_instance(Family::box_qp, 5, 0, 1), std::invalid_argument);
  EXPECT_THROW(family_from_string("nope"), std::invalid_argument);
}

TEST(Prng, DeterministicAndReasonable) {
  SplitMix64 a(99);
  SplitMix64 b(99);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());

  SplitMix64 rng(123);
  double sum = 0.0;
  double sum_sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    double u = rng.next_uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    double z = rng.next_normal();
    sum += z;
    sum_sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.05);
  EXPECT_NEAR(sum_sq / n, 1.0, 0.1);
}
