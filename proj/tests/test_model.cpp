#include "rarn/model.hpp"

#include "oracles.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace rarn;
using rarn::testing::SyntheticEval;

namespace {

Vec unit(int n, int i) {
  Vec v = Vec::Zero(n);
  v[i] = 1.0;
  return v;
}

Tangent tangent_at(const SyntheticEval& s, Vec coords) {
  return make_tangent(s.base(), std::move(coords));
}

constexpr double kGolden = 0.61803398874989484820;  // root of t^2 + t = 1

}  // namespace

TEST(ModelValue, ZeroStepReturnsObjectiveValue) {
  SyntheticEval s(4.2, unit(2, 0), Mat::Identity(2, 2));
  ModelAt m{&s.eval(), ArPower{1.0, 1.0}};
  EXPECT_DOUBLE_EQ(model_value(m, tangent_at(s, Vec::Zero(2))), 4.2);
}

TEST(ModelValue, PowerRegularizerHandComputed) {
  SyntheticEval s(0.0, unit(2, 0), Mat::Identity(2, 2));
  ModelAt m{&s.eval(), ArPower{1.0, 1.0}};
  Tangent eta = tangent_at(s, Vec(-0.5 * unit(2, 0)));
  // -0.5 + 0.125 + (1/3)(0.125)
  EXPECT_NEAR(model_value(m, eta), -0.5 + 0.125 + 0.125 / 3.0, 1e-15);
  EXPECT_EQ(s.counters().hess_vec_products, 1);  // exactly one product per call
}

TEST(ModelValue, TrustRegionRegularizerAndRadiusGuard) {
  SyntheticEval s(0.0, unit(2, 0), Mat::Zero(2, 2));
  ModelAt m{&s.eval(), TrQuad{0.4, 2.0}};
  Tangent eta = tangent_at(s, Vec(-unit(2, 0)));
  EXPECT_NEAR(model_value(m, eta), -0.9, 1e-15);

  Tangent outside = tangent_at(s, Vec(3.0 * unit(2, 0)));
  EXPECT_THROW(model_value(m, outside), ContractViolation);
}

TEST(ModelGrad, ZeroStepGivesGradient) {
  SyntheticEval s(1.0, (Vec(2) << 2, -1).finished(), Mat::Identity(2, 2));
  ModelAt m{&s.eval(), ArPower{0.5, 1.0}};
  Tangent g = model_grad(m, tangent_at(s, Vec::Zero(2)));
  EXPECT_EQ(g.coords, (Vec(2) << 2, -1).finished());
}

TEST(ModelGrad, VanishesAtCauchyStationaryRoot) {
  SyntheticEval s(0.0, unit(2, 0), Mat::Identity(2, 2));
  ModelAt m{&s.eval(), ArPower{1.0, 1.0}};
  Tangent eta = tangent_at(s, Vec(-kGolden * unit(2, 0)));
  EXPECT_NEAR(model_grad(m, eta).norm(), 0.0, 1e-12);
}

TEST(ModelGrad, TrustRegionQuadraticTerm) {
  SyntheticEval s(0.0, Vec(Vec::Zero(2)), Mat::Identity(2, 2));
  ModelAt m{&s.eval(), TrQuad{2.0, 1.0}};
  Tangent eta = tangent_at(s, unit(2, 0));
  EXPECT_NEAR((model_grad(m, eta).coords - 2.0 * unit(2, 0)).norm(), 0.0, 1e-15);
}

TEST(ModelGrad, MatchesFiniteDifferencesOfModelValue) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> gauss;
  Vec spectrum = (Vec(4) << -1, 0.5, 2, 3).finished();
  Mat H = oracles::random_symmetric_with_spectrum(spectrum, 21);
  Vec g(4);
  for (int i = 0; i < 4; ++i) g[i] = gauss(rng);
  SyntheticEval s(0.7, g, H);

  for (const Regularizer& reg :
       {Regularizer(ArPower{0.8, 0.6}), Regularizer(TrQuad{0.3, 50.0})}) {
    ModelAt m{&s.eval(), reg};
    for (int trial = 0; trial < 5; ++trial) {
      Vec eta(4), dir(4);
      for (int i = 0; i < 4; ++i) {
        eta[i] = gauss(rng);
        dir[i] = gauss(rng);
      }
      dir.normalize();
      const double h = 1e-6;
      double fp = model_value(m, tangent_at(s, Vec(eta + h * dir)));
      double fm = model_value(m, tangent_at(s, Vec(eta - h * dir)));
      double fd = (fp - fm) / (2.0 * h);
      double analytic = model_grad(m, tangent_at(s, eta)).coords.dot(dir);
      EXPECT_NEAR(fd, analytic, 1e-6 * std::max(1.0, std::abs(analytic)));
    }
  }
}

TEST(CauchyPoint, GoldenRatioRoots) {
  {
    SyntheticEval s(0.0, unit(2, 0), Mat::Identity(2, 2));
    ModelAt m{&s.eval(), ArPower{1.0, 1.0}};
    Tangent cp = cauchy_point(m);
    EXPECT_NEAR((cp.coords - (-kGolden) * unit(2, 0)).norm(), 0.0, 1e-10);
  }
  {
    SyntheticEval s(0.0, unit(2, 0), Mat(-Mat::Identity(2, 2)));
    ModelAt m{&s.eval(), ArPower{1.0, 1.0}};
    Tangent cp = cauchy_point(m);
    EXPECT_NEAR((cp.coords - (-(kGolden + 1.0)) * unit(2, 0)).norm(), 0.0, 1e-10);
  }
  {
    SyntheticEval s(0.0, Vec(Vec::Zero(2)), Mat::Identity(2, 2));
    ModelAt m{&s.eval(), ArPower{1.0, 1.0}};
    EXPECT_NEAR(cauchy_point(m).norm(), 0.0, 1e-15);
  }
}

TEST(CauchyPoint, MatchesBruteForceOneDimensionalSearch) {
  std::mt19937_64 rng(29);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 30; ++trial) {
    Vec spectrum(3);
    for (int i = 0; i < 3; ++i) spectrum[i] = 4.0 * gauss(rng);
    Mat H = oracles::random_symmetric_with_spectrum(spectrum, 100 + trial);
    Vec g(3);
    for (int i = 0; i < 3; ++i) g[i] = gauss(rng);
    if (g.norm() < 0.1) continue;
    double sigma = 0.3 + std::abs(gauss(rng));
    double omega = (trial % 2 == 0) ? 1.0 : 0.5;
    SyntheticEval s(0.0, g, H);
    ModelAt m{&s.eval(), ArPower{sigma, omega}};

    const double g2 = g.squaredNorm();
    const double gHg = g.dot(H * g);
    auto line = [&](double t) {
      return -t * g2 + 0.5 * t * t * gHg +
             sigma / (2.0 + omega) * std::pow(t * g.norm(), 2.0 + omega);
    };
    double hi = 1.0;
    while (line(2.0 * hi) < line(hi)) hi *= 2.0;  // the restriction is unimodal
    double t_star = oracles::golden_section_min(line, 2.0 * hi);
    Tangent cp = cauchy_point(m);
    EXPECT_NEAR(cp.norm(), t_star * g.norm(), 1e-6 * std::max(1.0, t_star));
  }
}

TEST(CauchyPoint, TrustRegionClipsToRadius) {
  SyntheticEval s(0.0, unit(2, 0), Mat(-Mat::Identity(2, 2)));
  ModelAt m{&s.eval(), TrQuad{0.1, 1.5}};
  Tangent cp = cauchy_point(m);
  EXPECT_NEAR(cp.norm(), 1.5, 1e-14);  // negative curvature runs to the edge
}

TEST(Rho, ExamplesAndDegenerateGuard) {
  EXPECT_DOUBLE_EQ(rho(1.0, 0.5, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(rho(1.0, 1.0, 0.2), 0.0);
  EXPECT_TRUE(std::isinf(rho(1.0, 0.5, 0.0)));
  EXPECT_LT(rho(1.0, 0.5, 0.0), 0.0);
  EXPECT_LT(rho(1.0, 0.5, -1.0), 0.0);
}

TEST(Rho, InvariantUnderObjectiveShift) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int trial = 0; trial < 100; ++trial) {
    double fx = u(rng), fn = u(rng), dec = std::abs(u(rng)) + 0.1, shift = u(rng);
    EXPECT_NEAR(rho(fx, fn, dec), rho(fx + shift, fn + shift, dec), 1e-12);
  }
}

TEST(ResidualCriterion, ThresholdScaling) {
  // residual 0.005 with |eta| = 0.1, theta1 = 1: threshold 0.01 -> pass
  SyntheticEval s(0.0, Vec(0.005 * unit(2, 1)), Mat::Zero(2, 2));
  ModelAt m{&s.eval(), ArPower{1e-12, 1.0}};  // negligible regularizer
  TerminationParams params;
  params.theta1 = 1.0;
  Tangent eta = tangent_at(s, Vec(0.1 * unit(2, 0)));
  EXPECT_TRUE(check_residual_criterion(m, eta, params));

  // residual 0.05 with theta1 = 0.5: threshold 0.1^1.5 ~ 0.0316 -> fail
  SyntheticEval s2(0.0, Vec(0.05 * unit(2, 1)), Mat::Zero(2, 2));
  ModelAt m2{&s2.eval(), ArPower{1e-12, 1.0}};
  params.theta1 = 0.5;
  EXPECT_FALSE(check_residual_criterion(m2, tangent_at(s2, Vec(0.1 * unit(2, 0))), params));

  // zero step can never satisfy the criterion
  EXPECT_FALSE(check_residual_criterion(m2, tangent_at(s2, Vec::Zero(2)), params));
}

TEST(CurvatureCriterion, FloorArithmetic) {
  SyntheticEval s(0.0, unit(2, 0), Mat::Zero(2, 2));
  TerminationParams params;
  params.theta2 = 1.0;

  // sigma |eta|^w = 0.2 against estimate -0.1 and threshold -|eta| = -0.05
  {
    ModelAt m{&s.eval(), ArPower{4.0, 1.0}};  // 4 * 0.05 = 0.2
    Tangent eta = tangent_at(s, Vec(0.05 * unit(2, 0)));
    EXPECT_TRUE(check_curvature_criterion(m, eta, params, -0.1));
    EXPECT_FALSE(check_curvature_criterion(m, eta, params, -1.0));
    EXPECT_TRUE(check_curvature_criterion(m, eta, params, 0.0));
  }
  {
    ModelAt m{&s.eval(), TrQuad{0.5, 10.0}};
    Tangent eta = tangent_at(s, Vec(0.05 * unit(2, 0)));
    // floor = lambda_est + eps_h/2 = -0.1 + 0.25 >= -0.05
    EXPECT_TRUE(check_curvature_criterion(m, eta, params, -0.1));
    EXPECT_FALSE(check_curvature_criterion(m, eta, params, -1.0));
  }
}

TEST(CauchyCriterion, EqualityAndStrictDecrease) {
  SyntheticEval s(0.0, unit(2, 0), Mat::Identity(2, 2));
  ModelAt m{&s.eval(), ArPower{1.0, 1.0}};
  Tangent cp = cauchy_point(m);
  EXPECT_TRUE(check_cauchy_criterion(m, cp));
  // the zero step loses to the Cauchy point whenever g != 0
  EXPECT_FALSE(check_cauchy_criterion(m, tangent_at(s, Vec::Zero(2))));

  SyntheticEval s0(0.0, Vec(Vec::Zero(2)), Mat::Identity(2, 2));
  ModelAt m0{&s0.eval(), ArPower{1.0, 1.0}};
  EXPECT_TRUE(check_cauchy_criterion(m0, tangent_at(s0, Vec::Zero(2))));
}

TEST(DecreaseCriterion, ThresholdFormulaAndContract) {
  EXPECT_NEAR(decrease_threshold(1.0, 0.1, 1.0), 1e-3 / 12.0, 1e-18);

  SyntheticEval s(1.0, unit(2, 0), Mat::Zero(2, 2));
  ModelAt m{&s.eval(), ArPower{1.0, 1.0}};
  TerminationParams params;
  params.tcd_threshold = 0.05;
  // step -0.1 e1 gives unregularized decrease 0.1
  EXPECT_TRUE(check_decrease_criterion(m, tangent_at(s, Vec(-0.1 * unit(2, 0))), params));
  params.tcd_threshold = 0.5;
  EXPECT_FALSE(check_decrease_criterion(m, tangent_at(s, Vec(-0.1 * unit(2, 0))), params));

  ModelAt tr{&s.eval(), TrQuad{0.1, 1.0}};
  EXPECT_THROW(check_decrease_criterion(tr, tangent_at(s, Vec::Zero(2)), params),
               ContractViolation);
}

TEST(CauchyDecreaseIdentity, HoldsAtTheCauchyPoint) {
  // m(0) - m(eta) >= phi(eta) whenever the step beats the Cauchy point
  std::mt19937_64 rng(41);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 50; ++trial) {
    Vec spectrum(4);
    for (int i = 0; i < 4; ++i) spectrum[i] = 3.0 * gauss(rng);
    Mat H = oracles::random_symmetric_with_spectrum(spectrum, 500 + trial);
    Vec g(4);
    for (int i = 0; i < 4; ++i) g[i] = gauss(rng);
    SyntheticEval s(0.0, g, H);
    ArPower reg{0.5 + std::abs(gauss(rng)), 1.0};
    ModelAt m{&s.eval(), reg};
    Tangent cp = cauchy_point(m);
    double decrease = s.eval().value - model_value_unregularized(m, cp);
    EXPECT_GE(decrease, phi_value(reg, cp.norm()) - 1e-10);
  }
}
