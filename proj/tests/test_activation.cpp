#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "stepgnn/activation.hpp"

using namespace stepgnn;

namespace {

// Scan written out from the inequality itself, independent of the library.
int scan_depth(double eta, double eps, int delta) {
  for (int m = 0;; ++m) {
    const double b = eta > 0.0 ? eps * std::pow((1.0 + eta) / 2.0, m)
                               : eps / std::pow(2.0, std::pow(2.0, m) - 1.0);
    if (2.0 * (delta + 2.0) * b < 1.0) return m;
  }
}

Grid basin(const StepLikeParams& p) { return {-p.eps, 1.0 + p.eps, 100000}; }

}  // namespace

TEST(SigmaStar, Branches) {
  EXPECT_EQ(sigma_star(0.4), 0.0);
  EXPECT_EQ(sigma_star(0.5), 0.5);
  EXPECT_EQ(sigma_star(0.7), 1.0);
}

TEST(Classic, Values) {
  EXPECT_EQ(relu()(-2.0), 0.0);
  EXPECT_EQ(relu()(3.5), 3.5);
  EXPECT_EQ(crelu()(3.5), 1.0);
  EXPECT_EQ(crelu()(0.25), 0.25);
  EXPECT_DOUBLE_EQ(sigmoid()(0.0), 0.5);
  EXPECT_DOUBLE_EQ(tanh_activation()(0.3), std::tanh(0.3));
  EXPECT_DOUBLE_EQ(arctan_4pi()(1.0), 1.0);
  for (double x : {-1e6, -50.0, 50.0, 1e6}) {
    EXPECT_TRUE(std::isfinite(sigmoid()(x)));
    EXPECT_TRUE(std::isfinite(make_step_sigmoid().activation(x)));
    EXPECT_TRUE(std::isfinite(make_steplike_tanh_eta0().activation(x)));
  }
}

TEST(StepArctan, FixedPointsAndSlope) {
  const auto s = make_step_arctan();
  EXPECT_NEAR(s.activation(0.0), 0.0, 1e-15);
  EXPECT_NEAR(s.activation(1.0), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(s.activation(0.5), 0.5);
  const double slope = 2.0 / std::numbers::pi;  // (4/pi) / (1 + 1)
  EXPECT_NEAR(s.activation.derivative(0.0), slope, 1e-14);
  EXPECT_NEAR(s.activation.derivative(1.0), slope, 1e-14);
  EXPECT_LE(slope, 0.64);
}

TEST(StepTanh, FixedPoints) {
  const auto s = make_step_tanh();
  EXPECT_NEAR(s.activation(0.0), 0.0, 1e-15);
  EXPECT_NEAR(s.activation(1.0), 1.0, 1e-15);
}

TEST(StepTanhEta0, FlatAtFixedPoints) {
  const auto s = make_steplike_tanh_eta0();
  EXPECT_NEAR(s.activation(0.0), 0.0, 1e-12);
  EXPECT_NEAR(s.activation(1.0), 1.0, 1e-12);
  EXPECT_NEAR(s.activation.derivative(0.0), 0.0, 1e-8);
  EXPECT_NEAR(s.activation.derivative(1.0), 0.0, 1e-8);
  EXPECT_EQ(s.params.eta, 0.0);
  EXPECT_EQ(s.params.H, 2.2);
}

TEST(StepTanhEta0, MinimiserInsideStatedIntervals) {
  const auto k = tanh_eta0_constants();
  EXPECT_GT(k.a, 0.45);
  EXPECT_LT(k.a, 0.46);
  EXPECT_GT(k.alpha, 3.14);
  EXPECT_LT(k.alpha, 3.15);
  // Independent check: the ratio at a is no larger than at nearby points.
  auto ratio = [](double x) {
    auto s2 = [](double y) { return 1.0 / (std::cosh(y) * std::cosh(y)); };
    return (s2(x) + 3.0 * s2(3.0 * x)) / s2(2.0 * x);
  };
  EXPECT_NEAR(ratio(k.a), k.alpha, 1e-12);
  for (double dx : {-1e-3, 1e-3, -0.05, 0.05}) EXPECT_LE(k.alpha, ratio(k.a + dx));
}

TEST(StepSigmoid, AgreesWithTanhVariant) {
  const auto t = make_steplike_tanh_eta0();
  const auto s = make_step_sigmoid();
  const Grid g{-5.0, 6.0, 10000};
  double worst = 0.0;
  for (double x : g.points()) worst = std::max(worst, std::abs(t.activation(x) - s.activation(x)));
  EXPECT_LE(worst, 1e-12);
  EXPECT_NEAR(s.activation(0.0), 0.0, 1e-12);
  EXPECT_NEAR(s.activation(1.0), 1.0, 1e-12);
}

TEST(GoldenSection, Parabola) {
  EXPECT_NEAR(golden_section_minimize([](double x) { return (x - 0.3) * (x - 0.3); }, 0, 1, 1e-10),
              0.3, 1e-8);
}

TEST(Iterate, Examples) {
  const auto arctan = make_step_arctan().activation;
  EXPECT_EQ(iterate(arctan, 0, 0.37), 0.37);
  EXPECT_LE(std::abs(iterate(arctan, 5, -0.5)), 0.1 * std::pow(0.82, 5));
  const auto eta0 = make_steplike_tanh_eta0().activation;
  EXPECT_LE(std::abs(iterate(eta0, 3, 1.2) - 1.0), 0.2 / 128.0);
  EXPECT_THROW(iterate(arctan, -1, 0.0), std::invalid_argument);
}

TEST(Params, Validation) {
  EXPECT_THROW((StepLikeParams{1.0, 0.1, 0, 1.0}.validate()), std::invalid_argument);
  EXPECT_THROW((StepLikeParams{0.5, 0.5, 0, 1.0}.validate()), std::invalid_argument);
  EXPECT_THROW((StepLikeParams{0.5, 0.1, -1, 1.0}.validate()), std::invalid_argument);
  EXPECT_THROW((StepLikeParams{0.5, 0.1, 0, 0.0}.validate()), std::invalid_argument);
  EXPECT_NO_THROW((StepLikeParams{0.0, 0.2, 0, 2.2}.validate()));
}

TEST(ConvergenceBound, Examples) {
  const StepLikeParams arctan{0.64, 0.1, 0, 1.52};
  EXPECT_DOUBLE_EQ(convergence_bound(arctan, 0), 0.1);
  EXPECT_NEAR(convergence_bound(arctan, 14), 0.1 * std::pow(0.82, 14), 1e-15);
  EXPECT_NEAR(convergence_bound(arctan, 14), 6.22e-3, 1e-5);
  const StepLikeParams eta0{0.0, 0.2, 0, 2.2};
  EXPECT_DOUBLE_EQ(convergence_bound(eta0, 3), 0.0015625);
  EXPECT_EQ(convergence_bound(eta0, 12), 0.0);
  EXPECT_THROW(convergence_bound(StepLikeParams{0.5, 0.1, 2, 1.0}, 1), std::invalid_argument);
}

TEST(RequiredDepth, Examples) {
  const StepLikeParams arctan{0.64, 0.1, 0, 1.52};
  const StepLikeParams eta0{0.0, 0.2, 0, 2.2};
  EXPECT_EQ(required_composition_depth(arctan, 64), 14);
  EXPECT_EQ(required_composition_depth(eta0, 64), 3);
  // 4 * 0.2 < 1 already holds at m = 0.
  EXPECT_EQ(required_composition_depth(eta0, 0), 0);
  EXPECT_THROW(required_composition_depth(arctan, -1), std::invalid_argument);
}

TEST(RequiredDepth, MatchesScanAndIsMonotone) {
  for (const auto& name : step_like_names()) {
    const auto p = step_like_by_name(name)->params;
    int prev = 0;
    for (int delta = 0; delta <= 500; delta += 7) {
      const int m = required_composition_depth(p, delta);
      EXPECT_EQ(m, scan_depth(p.eta, p.eps, delta)) << name << " delta " << delta;
      EXPECT_LT(2.0 * (delta + 2.0) * convergence_bound(p, m), 1.0);
      EXPECT_GE(m, prev);
      prev = m;
    }
  }
}

TEST(RequiredDepth, ClosedForms) {
  const auto eta0 = closed_form_composition_depth({0.0, 0.2, 0, 2.2}, 64);
  EXPECT_EQ(eta0.printed, eta0.rate_consistent);
  const auto arctan = closed_form_composition_depth({0.64, 0.1, 0, 1.52}, 64);
  EXPECT_LT(arctan.printed, arctan.rate_consistent);
  const double lg = std::log2(66.0);
  EXPECT_NEAR(arctan.rate_consistent, (2.0 + lg) / (1.0 - std::log2(1.64)), 1e-12);
}

TEST(Contraction, ArctanNearZero) {
  const auto rep = contraction_check(make_step_arctan().activation, 0.0, 0.1, 0.64, 1.52, 10);
  EXPECT_TRUE(rep.pass) << rep.worst_slack;
  EXPECT_EQ(rep.checked, 1000u * 11u);
}

TEST(Contraction, Eta0NearOne) {
  const auto rep =
      contraction_check(make_steplike_tanh_eta0().activation, 1.0, 0.2, 0.0, 2.2, 4);
  EXPECT_TRUE(rep.pass) << rep.worst_slack << " at x=" << rep.worst_x << " n=" << rep.worst_n;
}

TEST(Contraction, ZeroIterationsAlwaysHolds) {
  const auto rep = contraction_check(make_step_tanh().activation, 0.0, 0.16, 0.86, 0.84, 0);
  EXPECT_TRUE(rep.pass);
  EXPECT_LE(rep.worst_slack, 0.0);
}

TEST(Contraction, RejectsBrokenHypothesis) {
  EXPECT_THROW(contraction_check(make_step_arctan().activation, 0.0, 1.0, 0.64, 1.52, 3),
               std::invalid_argument);
}

TEST(VerifyStepLike, WrongEtaFailsAtFixedPoints) {
  const auto s = make_step_arctan();
  StepLikeParams p = s.params;
  p.eta = 0.5;
  const auto rep = verify_step_like(s.activation, p, basin(s.params));
  EXPECT_FALSE(rep.derivative.pass);
  EXPECT_TRUE(rep.derivative.where == 0.0 || rep.derivative.where == 1.0);
  EXPECT_NEAR(rep.derivative.worst, 2.0 / std::numbers::pi, 1e-12);
}

// With N = 0, condition (c) compares the identity with sigma* on the whole
// sampled line, so on [-50, 51] it cannot hold for any certificate.
TEST(VerifyStepLike, IdentityIterateFailsOnWideGrid) {
  for (const auto& name : step_like_names()) {
    const auto s = *step_like_by_name(name);
    const auto rep = verify_step_like(s.activation, s.params, Grid{});
    EXPECT_TRUE(rep.fixed_points.pass) << name;
    EXPECT_TRUE(rep.derivative.pass) << name;
    EXPECT_FALSE(rep.closeness.pass) << name;
    EXPECT_DOUBLE_EQ(rep.closeness.worst, 50.0) << name;
    EXPECT_EQ(rep.closeness.where, -50.0) << name;
  }
}

TEST(VerifyStepLike, ArctanAndTanhPassOnTheirBasin) {
  for (const auto& s : {make_step_arctan(), make_step_tanh()}) {
    const auto rep = verify_step_like(s.activation, s.params, basin(s.params));
    EXPECT_TRUE(rep.pass()) << s.activation.name() << " (c) " << rep.closeness.worst << " (d) "
                            << rep.curvature.worst;
  }
}

// The eta = 0 map bends harder than H = 2.2 near the edge of its basin.
TEST(VerifyStepLike, Eta0CurvatureExceedsCertificate) {
  const auto s = make_steplike_tanh_eta0();
  const auto rep = verify_step_like(s.activation, s.params, basin(s.params));
  EXPECT_TRUE(rep.fixed_points.pass);
  EXPECT_TRUE(rep.derivative.pass);
  EXPECT_TRUE(rep.closeness.pass);
  EXPECT_FALSE(rep.curvature.pass);
  EXPECT_NEAR(rep.curvature.worst, 5.34, 0.05);
  EXPECT_NEAR(std::abs(rep.curvature.where), 0.2, 1e-3);
}

TEST(VerifyStepLike, PerturbedCurvatureFails) {
  const auto s = make_step_arctan();
  StepLikeParams p = s.params;
  p.H = 1.0;
  EXPECT_FALSE(verify_step_like(s.activation, p, basin(s.params)).curvature.pass);
}

TEST(ObservedConvergence, BasinRatesHold) {
  for (const auto& name : step_like_names()) {
    const auto s = *step_like_by_name(name);
    const auto obs = observed_convergence(s.activation, s.params, basin(s.params), 0, 20);
    for (int m = 0; m <= 20; ++m)
      EXPECT_LE(obs[static_cast<std::size_t>(m)], convergence_bound(s.params, m) + 1e-12)
          << name << " m=" << m;
  }
}

TEST(ObservedConvergence, Eta0AtThreeIterationsOnWideGrid) {
  const auto s = make_steplike_tanh_eta0();
  const auto obs = observed_convergence(s.activation, s.params, Grid{}, 3, 3);
  EXPECT_LE(obs[0], 0.2 / 128.0);
}

TEST(Grid, Points) {
  const auto xs = Grid{0.0, 1.0, 5}.points();
  ASSERT_EQ(xs.size(), 5u);
  EXPECT_EQ(xs.front(), 0.0);
  EXPECT_EQ(xs.back(), 1.0);
  EXPECT_DOUBLE_EQ(xs[2], 0.5);
  EXPECT_TRUE((Grid{0.0, 1.0, 0}.points().empty()));
}

TEST(ActivationSpec, ShiftedComposite) {
  const auto a = activation_by_name("arctan-4pi", 3);
  const auto base = arctan_4pi();
  const double z = 0.9;
  EXPECT_DOUBLE_EQ(a(z), 0.5 + 0.5 * base(base(base(z - 0.5))));
  EXPECT_DOUBLE_EQ(a(0.5), 0.5);
  EXPECT_NEAR(a(-0.5), 0.0, 1e-15);
  EXPECT_NEAR(a(1.5), 1.0, 1e-15);
}

TEST(ActivationSpec, Names) {
  for (const auto& name : activation_names()) EXPECT_EQ(activation_by_name(name).name(), name);
  EXPECT_THROW(activation_by_name("softplus"), std::invalid_argument);
  EXPECT_FALSE(step_like_by_name("relu").has_value());
  EXPECT_TRUE(activation_by_name("step-arctan").step_params().has_value());
}
