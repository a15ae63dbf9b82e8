#include <gtest/gtest.h>

#include "ial/al.hpp"
#include "ial/inner.hpp"
#include "test_support.hpp"

using namespace ial;
namespace tt = ial::testing;

namespace {

ProblemInstance wide_box_instance() {
  // f = 0, g = box [-1,1]^2, A = I, b = 0
  Matrix A = Matrix::Identity(2, 2);
  Vector b = Vector::Zero(2);
  return ProblemInstance{SmoothTerm::zero(2),
                         CompositeTerm::box(Vector::Constant(2, -1.0), Vector::Constant(2, 1.0)),
                         LinearConstraint::make(A, b), "wide_box"};
}

Vector random_vector(SplitMix64& rng, Index n, double scale = 1.0) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = scale * rng.next_normal();
  return v;
}

}  // namespace

TEST(AlValue, PenaltyHandEvaluation) {
  // f = 0, g = 0 on its domain, lambda = 0, beta = 2, Ax - b = (1, 0) -> 1.0
  Matrix A = Matrix::Identity(2, 2);
  Vector b(2);
  b << -0.5, 0.5;
  ProblemInstance p{SmoothTerm::zero(2),
                    CompositeTerm::box(Vector::Zero(2), Vector::Ones(2)),
                    LinearConstraint::make(A, b), "t"};
  Vector x(2);
  x << 0.5, 0.5;  // Ax - b = (1, 0)
  EXPECT_DOUBLE_EQ(al_value(p, x, DualState{Vector::Zero(2), 2.0}), 1.0);
}

TEST(AlValue, FeasiblePointGivesObjective) {
  GeneratedInstance gen = generate_instance_detail(Family::box_qp, 12, 4, 5);
  SplitMix64 rng(3);
  Vector lambda = random_vector(rng, 4);
  double al = al_value(gen.instance, gen.planted, DualState{lambda, 3.0});
  EXPECT_NEAR(al, eval_objective(gen.instance, gen.planted), 1e-11);
}

TEST(AlValue, LinearInBeta) {
  ProblemInstance p = generate_instance(Family::box_qp, 8, 3, 2);
  SplitMix64 rng(4);
  Vector x = sample_domain_point(p.composite, rng);
  Vector lambda = random_vector(rng, 3);
  double r_sq = p.constraint.residual(x).squaredNorm();
  double v1 = al_value(p, x, DualState{lambda, 1.0});
  double v2 = al_value(p, x, DualState{lambda, 2.0});
  EXPECT_NEAR(v2 - v1, 0.5 * r_sq, 1e-12 * (1.0 + std::abs(v1)));

  EXPECT_TRUE(std::isinf(al_value(p, Vector::Constant(8, 5.0), DualState{lambda, 1.0})));
  EXPECT_THROW(al_value(p, Vector::Zero(3), DualState{lambda, 1.0}), std::invalid_argument);
}

TEST(AlSmoothGrad, VanishesAtFeasibleZeroMultiplier) {
  ProblemInstance p = wide_box_instance();
  Vector x = Vector::Zero(2);  // Ax = b
  Vector grad = al_smooth_grad(p, x, DualState{Vector::Zero(2), 1.7});
  EXPECT_DOUBLE_EQ(grad.norm(), 0.0);
}

TEST(AlSmoothGrad, HandEvaluation) {
  // f = 0, beta = 1, A = I, b = 0, lambda = (1,1), x = (2,0) -> (3,1)
  ProblemInstance p = wide_box_instance();
  Vector x(2);
  x << 2.0, 0.0;
  Vector lambda = Vector::Ones(2);
  Vector grad = al_smooth_grad(p, x, DualState{lambda, 1.0});
  EXPECT_DOUBLE_EQ(grad[0], 3.0);
  EXPECT_DOUBLE_EQ(grad[1], 1.0);
}

TEST(AlSmoothGrad, MatchesFiniteDifferences) {
  ProblemInstance p = generate_instance(Family::box_qp, 6, 2, 9);
  SplitMix64 rng(11);
  Vector lambda = random_vector(rng, 2);
  DualState s{lambda, 1.3};
  // smooth AL part only: al_value minus g (zero inside the box)
  auto smooth_part = [&](const Vector& u) {
    Vector r = p.constraint.residual(u);
    return p.smooth.value(u) + s.lambda.dot(r) + 0.5 * s.beta * r.squaredNorm();
  };
  for (int trial = 0; trial < 50; ++trial) {
    Vector x = sample_domain_point(p.composite, rng);
    Vector grad = al_smooth_grad(p, x, s);
    Vector fd = tt::fd_gradient(smooth_part, x);
    EXPECT_LE((grad - fd).norm(), 1e-6 * (1.0 + grad.norm()));
  }
}

TEST(GapCertificate, ZeroAtInnerMinimizer) {
  for (const ProblemInstance& p : tt::all_2d_instances()) {
    DualState s{Vector::Zero(1), tt::kBeta2d};
    InnerResult ref = reference_inner_solve(p, s, 1e-12);
    ASSERT_TRUE(ref.certified());
    EXPECT_LE(gap_certificate(p, ref.x, s).gap, 1e-10);
  }
}

TEST(GapCertificate, BoxVertexHandCase) {
  // grad = (1,-1) at x = (1,0) over [0,1]^2: gap = <c,x> - min over box = 2
  Matrix A = Matrix::Identity(2, 2);
  Vector b = Vector::Zero(2);
  ProblemInstance p{SmoothTerm::zero(2),
                    CompositeTerm::box(Vector::Zero(2), Vector::Ones(2)),
                    LinearConstraint::make(A, b), "t"};
  Vector x(2);
  x << 1.0, 0.0;
  Vector lambda(2);
  lambda << 0.0, -1.0;  // grad = lambda + x = (1, -1)
  Certificate cert = gap_certificate(p, x, DualState{lambda, 1.0});
  EXPECT_DOUBLE_EQ(cert.gap, 2.0);

  // brute force over the 4 vertices
  double best = kInf;
  for (double u0 : {0.0, 1.0}) {
    for (double u1 : {0.0, 1.0}) {
      best = std::min(best, cert.grad_at_x.dot(Vector{{u0, u1}}));
    }
  }
  EXPECT_DOUBLE_EQ(cert.gap, cert.grad_at_x.dot(x) - best);
}

TEST(GapCertificate, MatchesGridBruteForce) {
  SplitMix64 rng(31);
  for (const ProblemInstance& p : tt::all_2d_instances()) {
    std::vector<Vector> grid = tt::domain_grid_2d(p.composite);
    for (int trial = 0; trial < 5; ++trial) {
      Vector x = sample_domain_point(p.composite, rng);
      DualState s{random_vector(rng, 1, 0.3), tt::kBeta2d};
      Certificate cert = gap_certificate(p, x, s);
      EXPECT_NEAR(cert.gap, tt::brute_force_gap(p, x, s, grid), 1e-6);
    }
  }
}

TEST(GapCertificate, NonnegativeAndReproducible) {
  SplitMix64 rng(37);
  ProblemInstance p = generate_instance(Family::l1_basis_pursuit, 6, 2, 13);
  for (int trial = 0; trial < 1000; ++trial) {
    Vector x = sample_domain_point(p.composite, rng);
    DualState s{random_vector(rng, 2), 0.8};
    Certificate cert = gap_certificate(p, x, s);
    EXPECT_GE(cert.gap, -1e-12);
    // stored gap reproduces from the stored witness and gradient
    double recomputed = cert.grad_at_x.dot(x - cert.witness) + p.composite.value(x) -
                        p.composite.value(cert.witness);
    EXPECT_NEAR(cert.gap, recomputed, 1e-12 * (1.0 + std::abs(cert.gap)));
  }
  EXPECT_THROW(gap_certificate(p, Vector::Constant(6, 9.0), DualState{Vector::Zero(2), 1.0}),
               std::invalid_argument);
}

TEST(AlSuboptimality, ReferenceMinimizerAndNonnegativity) {
  ProblemInstance p = tt::simplex_2d();
  DualState s{Vector::Constant(1, 0.2), tt::kBeta2d};
  InnerResult ref = reference_inner_solve(p, s, 1e-12);
  double ref_min = al_value(p, ref.x, s);
  EXPECT_LE(al_suboptimality(p, ref.x, s, ref_min), 1e-12);
  SplitMix64 rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    Vector x = sample_domain_point(p.composite, rng);
    EXPECT_GE(al_suboptimality(p, x, s, ref_min), 0.0);
  }
}

TEST(DualValueAndGrad, OriginFeasibleBox) {
  // d(0) = min (beta/2)||x||^2 over a box containing 0 -> 0, grad -> 0
  ProblemInstance p = wide_box_instance();
  DualEval d = dual_value_and_grad(p, DualState{Vector::Zero(2), 1.0}, 1e-10);
  ASSERT_TRUE(d.certified);
  EXPECT_NEAR(d.value, 0.0, 1e-10);
  EXPECT_LE(d.grad.norm(), 1e-5);
}

TEST(DualValueAndGrad, MatchesSegmentGridMinimum) {
  ProblemInstance p = tt::simplex_2d();
  std::vector<Vector> grid = tt::domain_grid_2d(p.composite);
  SplitMix64 rng(43);
  for (int trial = 0; trial < 5; ++trial) {
    DualState s{random_vector(rng, 1, 0.4), tt::kBeta2d};
    DualEval d = dual_value_and_grad(p, s, 1e-10);
    ASSERT_TRUE(d.certified);
    double grid_min = tt::brute_force_al_min(p, s, grid);
    EXPECT_NEAR(d.value, grid_min, 1e-6);
    EXPECT_LE(d.value, grid_min + 1e-12);  // surrogate cannot exceed the grid minimum
  }
}

TEST(DualValueAndGrad, GradientLipschitzInOneOverBeta) {
  ProblemInstance p = generate_instance(Family::box_qp, 15, 4, 21);
  SplitMix64 rng(47);
  const double tol = 1e-10;
  const double slack = 10.0 * tol + 1e-9;
  for (double beta : {0.5, 1.0}) {
    for (int trial = 0; trial < 5; ++trial) {
      Vector lam = random_vector(rng, 4);
      Vector mu = random_vector(rng, 4);
      DualEval dl = dual_value_and_grad(p, DualState{lam, beta}, tol);
      DualEval dm = dual_value_and_grad(p, DualState{mu, beta}, tol);
      EXPECT_LE((dl.grad - dm.grad).norm(), (lam - mu).norm() / beta + 2.0 * slack);
    }
  }
}

TEST(DualValueAndGrad, CertificateBoundsSuboptimalityAndConcavity) {
  ProblemInstance p = tt::box_2d();
  SplitMix64 rng(53);
  const double tol = 1e-10;
  const double slack = 10.0 * tol + 1e-9;
  for (int trial = 0; trial < 20; ++trial) {
    DualState s{random_vector(rng, 1, 0.4), tt::kBeta2d};
    DualEval d = dual_value_and_grad(p, s, tol);
    Vector x = sample_domain_point(p.composite, rng);
    Certificate cert = gap_certificate(p, x, s);
    EXPECT_LE(al_value(p, x, s) - d.value, cert.gap + slack);

    Vector mu_v = random_vector(rng, 1, 0.4);
    DualEval dm = dual_value_and_grad(p, DualState{mu_v, tt::kBeta2d}, tol);
    double linearization = dm.value + dm.grad.dot(s.lambda - mu_v);
    EXPECT_LE(d.value, linearization + slack);
  }
}
