#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "wbcomp/comparison.hpp"
#include "wbcomp/instance.hpp"

using namespace wbcomp;

namespace {

constexpr double kPi = 3.14159265358979323846;

WarpedManifold profile_instance(int n, const std::string& w, const std::string& phi, double T,
                                Topology top, Fiber fiber = Fiber::torus()) {
  return WarpedManifold(n, fiber, RadialProfile::from_expressions(w, phi, T), top);
}

CheckOptions keep() {
  CheckOptions o;
  o.keep_samples = true;
  return o;
}

double max_abs_margin(const PartReport& p) {
  double m = 0.0;
  for (const auto& s : p.samples) m = std::max(m, std::abs(s.margin));
  return m;
}

}  // namespace

// ---------------------------------------------------------------- certificate

TEST(Certificate, ModelBallRecoversItsPair) {
  const auto M = build_model_ball(3, 1.0, 0.5);
  const auto P = CurvatureParams::make(3, 3.0, 1.0);
  const auto cert = certify_hypotheses(M, P);
  EXPECT_NEAR(cert.kappa_radial, 1.0, 1e-10);
  ASSERT_TRUE(cert.kappa_fiber);
  EXPECT_NEAR(*cert.kappa_fiber, 1.0, 1e-7);
  EXPECT_NEAR(cert.lambda(), 0.5, 1e-12);
  EXPECT_NEAR(cert.delta_eff, 0.0, 1e-15);
}

TEST(Certificate, CylinderIsFlat) {
  const auto M = profile_instance(4, "1", "0", 2.0, Topology::Collar);
  const auto cert = certify_hypotheses(M, CurvatureParams::make(4, ExtendedReal::infinity(), 0.3));
  EXPECT_EQ(cert.kappa_eff, 0.0);
  EXPECT_EQ(cert.lambda(), 0.0);
  EXPECT_EQ(cert.delta_eff, 0.0);
  for (double m : cert.kappa_margins) EXPECT_GE(m, 0.0);
}

TEST(Certificate, GridRefinementAgrees) {
  for (std::uint64_t k = 0; k < 20; ++k) {
    const auto spec = random_profile_instance(Topology::Collar, instance_seed(11, k), "r");
    const auto M = spec.build();
    const auto P = spec.params();
    const auto coarse = certify_hypotheses(M, P, 512);
    const auto fine = certify_hypotheses(M, P, 5120);
    EXPECT_NEAR(coarse.kappa_eff, fine.kappa_eff, 1e-5) << spec.w << " | " << spec.phi;
    EXPECT_NEAR(coarse.delta_eff, fine.delta_eff, 1e-5);
    EXPECT_DOUBLE_EQ(coarse.lambda(), fine.lambda());
  }
}

TEST(Certificate, RejectsNonConstantDensityForNEqualsN) {
  const auto M = profile_instance(3, "1", "t", 1.0, Topology::Collar);
  EXPECT_THROW(certify_hypotheses(M, CurvatureParams::make(3, 3.0, 0.0)), InvalidParams);
}

TEST(Certificate, WeakeningOnlyWeakens) {
  const auto M = profile_instance(3, "1", "0", 1.0, Topology::Collar);
  const auto cert = certify_hypotheses(M, CurvatureParams::make(3, 1.0, 0.0));
  EXPECT_THROW((void)cert.weakened(0.1, 0.0, 0.0), InvalidParams);
  EXPECT_THROW((void)cert.weakened(0.0, 0.1, 0.0), InvalidParams);
  EXPECT_THROW((void)cert.weakened(0.0, 0.0, -0.1), InvalidParams);
  const auto w = cert.weakened(-1.0, -0.5, 0.2);
  EXPECT_EQ(w.kappa_radial, -1.0);
  EXPECT_EQ(w.params.lambda, -0.5);
}

// ------------------------------------------------------------ point Laplacian

TEST(PointLaplacian, EuclideanSpaceIsEquality) {
  const auto M = profile_instance(3, "t", "0", 2.0, Topology::PointSymmetric, Fiber::sphere(3));
  const auto cert = certify_hypotheses(M, CurvatureParams::make(3, 1.0, 0.0));
  EXPECT_NEAR(cert.kappa_eff, 0.0, 1e-6);
  const auto rep = check_point_laplacian(M, cert.weakened(std::min(0.0, cert.kappa_eff), std::nullopt, 0.0));
  EXPECT_EQ(rep.verdict, Verdict::Equality);
}

TEST(PointLaplacian, RoundSphereIsEquality) {
  const auto M = profile_instance(3, "sin(t)", "0", 2.5, Topology::PointSymmetric, Fiber::sphere(3));
  const auto cert = certify_hypotheses(M, CurvatureParams::make(3, 3.0, 0.0));
  EXPECT_NEAR(cert.kappa_radial, 1.0, 1e-12);
  const auto rep = check_point_laplacian(M, cert.weakened(std::min(1.0, cert.kappa_eff), std::nullopt, 0.0));
  EXPECT_EQ(rep.verdict, Verdict::Equality) << rep.worst_margin();
}

TEST(PointLaplacian, HyperbolicAgainstWeakerBoundIsStrict) {
  const auto M = profile_instance(3, "sinh(t)", "0", 2.0, Topology::PointSymmetric, Fiber::sphere(3));
  const auto cert = certify_hypotheses(M, CurvatureParams::make(3, 3.0, 0.0));
  const auto rep = check_point_laplacian(M, cert.weakened(-1.1, std::nullopt, 0.0), keep());
  EXPECT_EQ(rep.verdict, Verdict::Holds);
  // Independent margin at t = 1: -2 coth(1) + 2 sqrt(1.1) coth(sqrt(1.1)).
  const auto* part = rep.part("reparametrized");
  ASSERT_NE(part, nullptr);
  const double k = std::sqrt(1.1);
  for (const auto& s : part->samples) {
    const double expect = -2.0 / std::tanh(s.x) + 2.0 * k / std::tanh(k * s.x);
    EXPECT_NEAR(s.margin, expect, 1e-9 * std::max(1.0, 1.0 / s.x));
    EXPECT_GT(s.margin, 0.0);
  }
}

TEST(PointLaplacian, RequiresPointSymmetricInstance) {
  const auto M = profile_instance(3, "1", "0", 1.0, Topology::Collar);
  const auto cert = certify_hypotheses(M, CurvatureParams::make(3, 1.0, 0.0));
  EXPECT_THROW(check_point_laplacian(M, cert), InvalidParams);
}

// ------------------------------------------------------------------- Riccati

TEST(Riccati, CylinderAndModelBallAreEqualities) {
  const auto cyl = profile_instance(3, "1", "0", 1.0, Topology::Collar);
  const auto P = CurvatureParams::make(3, 3.0, 0.0);
  EXPECT_EQ(check_riccati(cyl, certify_hypotheses(cyl, P)).verdict, Verdict::Equality);
  const auto ball = build_model_ball(3, 0.0, 1.0);
  EXPECT_EQ(check_riccati(ball, certify_hypotheses(ball, P)).verdict, Verdict::Equality);
}

TEST(Riccati, RandomProfilesSatisfyTheInequality) {
  for (std::uint64_t k = 0; k < 30; ++k) {
    const auto spec = random_profile_instance(Topology::TwoEnded, instance_seed(5, k), "r");
    const auto M = spec.build();
    const auto rep = check_riccati(M, certify_hypotheses(M, spec.params()));
    EXPECT_GE(rep.worst_margin(), -1e-7) << spec.w << " | " << spec.phi;
    EXPECT_NE(rep.verdict, Verdict::Violated);
  }
}

// --------------------------------------------------------- boundary Laplacian

TEST(BoundaryLaplacian, DensityEqualityModelIsEquality) {
  const auto P = CurvatureParams::make(3, 1.0, 0.0, -1.0, 2.0);
  DensityFn phi = [](double t) { return 0.3 * sin(Jet::variable(t)); };
  const auto M = build_equality_model(EqualityCase::NOne, P, Fiber::torus(), 0.0,
                                      Extent::radius(0.4), phi);
  const auto cert = certify_hypotheses(M, P);
  EXPECT_NEAR(cert.kappa_radial, -1.0, 1e-7);
  EXPECT_NEAR(cert.lambda(), 2.0, 1e-9);
  const auto rep = check_boundary_laplacian(M, cert, keep());
  const auto* lap = rep.part("laplacian");
  ASSERT_NE(lap, nullptr);
  EXPECT_LE(max_abs_margin(*lap), 1e-6);
  EXPECT_EQ(lap->verdict, Verdict::Equality);
  EXPECT_EQ(rep.part("equality_propagation")->verdict, Verdict::Equality);
}

TEST(BoundaryLaplacian, CylinderAgainstZeroPairIsEquality) {
  const auto M = profile_instance(3, "1", "0", 1.0, Topology::Collar);
  const auto cert = certify_hypotheses(M, CurvatureParams::make(3, 1.0, 0.0));
  EXPECT_EQ(check_boundary_laplacian(M, cert).verdict, Verdict::Equality);
}

TEST(BoundaryLaplacian, CylinderAgainstNegativeLambdaIsStrict) {
  const int n = 3;
  const auto M = profile_instance(n, "1", "0", 1.0, Topology::Collar);
  const auto cert = certify_hypotheses(M, CurvatureParams::make(n, 1.0, 0.0)).weakened(0.0, -0.5, 0.0);
  const auto rep = check_boundary_laplacian(M, cert, keep());
  EXPECT_EQ(rep.verdict, Verdict::Holds);
  // sn_{0,-1/2}(s) = 1 + s/2, so the margin is (n-1) (1/2) / (1 + s/2) with s = t.
  const auto* lap = rep.part("laplacian");
  ASSERT_FALSE(lap->samples.empty());
  EXPECT_NEAR(lap->samples.front().margin, 0.5 * (n - 1), 1e-14);
  for (const auto& s : lap->samples) EXPECT_NEAR(s.margin, 0.5 * (n - 1) / (1.0 + 0.5 * s.x), 1e-13);
}

TEST(BoundaryLaplacian, MonotoneQuantityIsNonDecreasing) {
  for (std::uint64_t k = 0; k < 30; ++k) {
    const auto spec = random_profile_instance(Topology::Collar, instance_seed(9, k), "r");
    const auto M = spec.build();
    const auto rep = check_boundary_laplacian(M, certify_hypotheses(M, spec.params()));
    const auto* g = rep.part("monotone_G");
    ASSERT_NE(g, nullptr);
    EXPECT_GE(g->worst_margin, -1e-7);
    EXPECT_NE(rep.verdict, Verdict::Violated);
  }
}

TEST(BoundaryLaplacian, TwoEndedChecksBothEnds) {
  const auto M = profile_instance(2, "exp(0.1*t^2)", "0.2*t", 1.0, Topology::TwoEnded);
  const auto rep = check_boundary_laplacian(M, certify_hypotheses(M, CurvatureParams::make(2, 1.0, 0.0)));
  EXPECT_NE(rep.part("laplacian"), nullptr);
  EXPECT_NE(rep.part("laplacian:outer"), nullptr);
  EXPECT_NE(rep.verdict, Verdict::Violated);
}

TEST(BoundaryLaplacian, ShiftingTheDensityRescalesTheConstants) {
  for (std::uint64_t k = 0; k < 10; ++k) {
    auto spec = random_profile_instance(Topology::Collar, instance_seed(21, k), "r");
    if (spec.N == ExtendedReal(double(spec.n))) continue;
    const auto M = spec.build();
    const double shift = 0.37;
    spec.phi = "(" + spec.phi + ") + " + format_real(shift);
    const auto Ms = spec.build();
    const auto P = spec.params();
    const auto c1 = certify_hypotheses(M, P);
    const auto c2 = certify_hypotheses(Ms, P);
    const double a = P.conformal_rate();
    EXPECT_NEAR(c2.kappa_eff, c1.kappa_eff * std::exp(2.0 * a * shift), 1e-9 * std::max(1.0, std::abs(c2.kappa_eff)));
    EXPECT_NEAR(c2.lambda(), c1.lambda() * std::exp(a * shift), 1e-12 * std::max(1.0, std::abs(c2.lambda())));
    const auto r1 = check_boundary_laplacian(M, c1, keep());
    const auto r2 = check_boundary_laplacian(Ms, c2, keep());
    EXPECT_EQ(r1.verdict, r2.verdict);
    const auto& s1 = r1.part("laplacian")->samples;
    const auto& s2 = r2.part("laplacian")->samples;
    ASSERT_EQ(s1.size(), s2.size());
    for (std::size_t i = 0; i < s1.size(); ++i) EXPECT_NEAR(s1[i].margin, s2[i].margin, 1e-9);
  }
}

// ---------------------------------------------------------------- cut bounds

TEST(CutBounds, ModelBallAttainsTheBarrier) {
  const auto M = build_model_ball(4, 1.0, 0.3);
  const auto cert = certify_hypotheses(M, CurvatureParams::make(4, 4.0, 1.0));
  const auto rep = check_cut_bounds(M, cert);
  EXPECT_EQ(rep.verdict, Verdict::Equality);
  EXPECT_LE(std::abs(rep.part("tau_f")->worst_margin), 1e-12);
}

TEST(CutBounds, HalfBallIsStrict) {
  const auto P = CurvatureParams::make(3, 3.0, 1.0, 0.0, 1.0);
  const auto M = build_equality_model(EqualityCase::DimensionN, P, Fiber::torus(), 0.0, Extent::radius(0.5));
  const auto rep = check_cut_bounds(M, certify_hypotheses(M, P));
  EXPECT_EQ(rep.verdict, Verdict::Holds);
  EXPECT_NEAR(rep.part("tau_f")->worst_margin, 0.5, 1e-12);
}

TEST(CutBounds, GenericEqualityModelReachesTheBarrier) {
  const auto P = CurvatureParams::make(3, 5.0, 0.5, 1.0, -1.0);
  const auto M = build_equality_model(EqualityCase::Generic, P, Fiber::torus(), 0.1, Extent::full());
  const auto cert = certify_hypotheses(M, P);
  const auto rep = check_cut_bounds(M, cert);
  const double C = barrier_C(1.0, -1.0).value();
  EXPECT_NEAR(M.tau_f(0.5)[0], C, 1.01e-6 * C);
  EXPECT_NE(rep.verdict, Verdict::Violated);
  EXPECT_LE(rep.part("tau_f")->worst_margin, 1.01e-6 * C);
}

TEST(CutBounds, SkippedWithoutBallCondition) {
  const auto M = profile_instance(3, "1", "0", 1.0, Topology::Collar);
  const auto rep = check_cut_bounds(M, certify_hypotheses(M, CurvatureParams::make(3, 1.0, 0.0)));
  EXPECT_EQ(rep.verdict, Verdict::Skipped);
}

// ----------------------------------------------------------- bounded density

TEST(BoundedDensity, ConstantDensityCollapsesTheBound) {
  const auto P = CurvatureParams::make(3, 3.0, 0.5, 1.0, 0.5);
  const auto M = build_equality_model(EqualityCase::DimensionN, P, Fiber::torus(), 0.4, Extent::radius(1.0));
  const auto cert = certify_hypotheses(M, P);
  EXPECT_NEAR(cert.delta_eff, 0.5 * 0.4 / 2.0, 1e-15);
  const auto rep = check_bounded_density(M, cert);
  EXPECT_EQ(rep.part("weighted_factor")->verdict, Verdict::Equality);
  EXPECT_EQ(rep.part("constant_factor")->verdict, Verdict::Equality);
}

TEST(BoundedDensity, CylinderIsEquality) {
  const auto M = profile_instance(2, "1", "0", 1.5, Topology::Collar);
  const auto rep = check_bounded_density(M, certify_hypotheses(M, CurvatureParams::make(2, 1.0, 0.0)));
  EXPECT_EQ(rep.verdict, Verdict::Equality);
}

TEST(BoundedDensity, ExponentialPairFamilyHolds) {
  int used = 0;
  for (std::uint64_t k = 0; k < 80 && used < 15; ++k) {
    const auto spec = random_profile_instance(Topology::Collar, instance_seed(33, k), "r");
    const auto M = spec.build();
    const auto cert = certify_hypotheses(M, spec.params());
    if (cert.lambda() < 0.0 || cert.kappa_eff < -cert.lambda() * cert.lambda()) continue;
    const double kap = std::min(cert.kappa_radial, 0.0);
    const auto weak = cert.weakened(std::min(kap, cert.kappa_eff), std::sqrt(-std::min(kap, cert.kappa_eff)),
                                    cert.delta_eff);
    ASSERT_TRUE(weak.radial_pair().monotone);
    const auto rep = check_bounded_density(M, weak);
    EXPECT_GE(rep.worst_margin(), -1e-7);
    ++used;
  }
  EXPECT_GT(used, 0);
}

// --------------------------------------------------------------- p-Laplacian

TEST(PLaplacian, IdentityOnCylinderIsEquality) {
  const auto M = profile_instance(3, "1", "0", 1.0, Topology::Collar);
  const auto cert = certify_hypotheses(M, CurvatureParams::make(3, 1.0, 0.0));
  const auto rep = check_p_laplacian(M, cert, 2.0, [](const Jet& u) { return u; });
  EXPECT_EQ(rep.verdict, Verdict::Equality);
}

TEST(PLaplacian, LinearCaseMatchesBoundedDensity) {
  const auto M = profile_instance(3, "1", "0.2*t^2", 1.0, Topology::Collar);
  const auto cert = certify_hypotheses(M, CurvatureParams::make(3, 1.0, 0.0));
  ASSERT_TRUE(cert.radial_pair().monotone);
  const auto pl = check_p_laplacian(M, cert, 2.0, [](const Jet& u) { return u; }, keep());
  const auto pair = cert.radial_pair();
  const double shrink = std::exp(-2.0 * cert.delta_eff);
  const auto* part = pl.part("bounded");
  ASSERT_NE(part, nullptr);
  ASSERT_FALSE(part->samples.empty());
  for (const auto& smp : part->samples) {
    // Delta_f psi(e^{-2 delta} rho) carries one extra factor e^{-2 delta}.
    const double expect = shrink * (M.raw_laplacian(smp.x) -
                                    shrink * H_boundary(cert.params.c, pair.kappa, pair.lambda, shrink * smp.x));
    EXPECT_NEAR(smp.margin, expect, 1e-10);
  }
}

TEST(PLaplacian, CubicCaseOnEqualityModel) {
  const auto P = CurvatureParams::make(3, 5.0, 0.5, 0.0, 1.0);
  const auto M = build_equality_model(EqualityCase::Generic, P, Fiber::torus(), 0.0, Extent::s_target(0.8));
  const auto cert = certify_hypotheses(M, P);
  const auto rep = check_p_laplacian(M, cert, 3.0, [](const Jet& u) { return u + u * u * u; });
  EXPECT_GE(rep.worst_margin(), -1e-6);
}

TEST(PLaplacian, RejectsDecreasingPsi) {
  const auto M = profile_instance(3, "1", "0", 1.0, Topology::Collar);
  const auto cert = certify_hypotheses(M, CurvatureParams::make(3, 1.0, 0.0));
  EXPECT_THROW(check_p_laplacian(M, cert, 2.0, [](const Jet& u) { return -u; }), InvalidParams);
}

// ------------------------------------------------------------------ inradius

TEST(Inradius, ModelBallIsRigid) {
  const auto M = build_model_ball(3, 1.0, 0.5);
  const auto rep = check_inradius(M, certify_hypotheses(M, CurvatureParams::make(3, 3.0, 1.0)));
  EXPECT_EQ(rep.verdict, Verdict::Equality);
  ASSERT_NE(rep.part("conformal_rigidity"), nullptr);
  EXPECT_EQ(rep.part("conformal_rigidity")->verdict, Verdict::Equality);
}

TEST(Inradius, ConstantDensityBallIsRigidInTheBoundedForm) {
  const auto P = CurvatureParams::make(3, 3.0, 0.5, 0.0, 1.0);
  const auto M = build_equality_model(EqualityCase::DimensionN, P, Fiber::torus(), 0.4, Extent::full());
  const auto cert = certify_hypotheses(M, P);
  EXPECT_NEAR((1.0 - 0.5) * 0.4, 2.0 * cert.delta_eff, 1e-15);
  const auto rep = check_inradius(M, cert);
  EXPECT_EQ(rep.part("distance")->verdict, Verdict::Equality);
  EXPECT_EQ(rep.part("distance_rigidity")->verdict, Verdict::Equality);
}

TEST(Inradius, UnitDimensionBallMatchesTheCenteredForm) {
  const auto P = CurvatureParams::make(3, 1.0, 0.0, 1.0, 0.0);
  DensityFn phi = [](double) { return Jet::constant(0.2); };
  const auto M = build_equality_model(EqualityCase::NOne, P, Fiber::torus(), 0.0, Extent::full(), phi);
  const auto cert = certify_hypotheses(M, P);
  const auto rep = check_inradius(M, cert.weakened(std::min(cert.kappa_eff, 1.0), std::min(cert.lambda(), 0.0), cert.delta_eff));
  EXPECT_EQ(rep.part("conformal")->verdict, Verdict::Equality);
  ASSERT_NE(rep.part("conformal_rigidity"), nullptr);
  EXPECT_EQ(rep.part("conformal_rigidity")->verdict, Verdict::Equality);
}

TEST(Inradius, WeakerLambdaIsStrict) {
  const auto M = build_model_ball(3, 1.0, 0.5);
  const auto base = certify_hypotheses(M, CurvatureParams::make(3, 3.0, 1.0));
  const auto cert = base.weakened(base.kappa_eff, 0.2, 0.0);
  const auto rep = check_inradius(M, cert);
  EXPECT_EQ(rep.verdict, Verdict::Holds);
  EXPECT_NEAR(rep.part("conformal")->worst_margin, std::atan(5.0) - std::atan(2.0), 1e-7);
  EXPECT_EQ(rep.part("conformal_rigidity"), nullptr);
}

// ------------------------------------------------------------ volume elements

TEST(VolumeElements, CylinderRatiosAreOne) {
  const auto M = profile_instance(3, "1", "0", 1.0, Topology::Collar);
  const auto rep = check_volume_elements(M, certify_hypotheses(M, CurvatureParams::make(3, 1.0, 0.0)));
  EXPECT_EQ(rep.verdict, Verdict::Equality);
}

TEST(VolumeElements, ModelBallIsEqualityThroughout) {
  const auto M = build_model_ball(4, 0.0, 1.0);
  const auto rep = check_volume_elements(M, certify_hypotheses(M, CurvatureParams::make(4, 4.0, 1.0)));
  EXPECT_EQ(rep.verdict, Verdict::Equality) << rep.worst_margin();
}

TEST(VolumeElements, RandomProfilesAreMonotone) {
  for (std::uint64_t k = 0; k < 30; ++k) {
    const auto spec = random_profile_instance(Topology::Collar, instance_seed(44, k), "r");
    const auto M = spec.build();
    const auto rep = check_volume_elements(M, certify_hypotheses(M, spec.params()));
    EXPECT_GE(rep.worst_margin(), -1e-7) << spec.w << " | " << spec.phi;
  }
}

// --------------------------------------------------------- volume comparisons

TEST(VolumeComparisons, CylinderIsEquality) {
  const auto M = profile_instance(3, "1", "0", 2.0, Topology::Collar, Fiber::torus(2.5));
  const auto rep = check_volume_comparisons(M, certify_hypotheses(M, CurvatureParams::make(3, 1.0, 0.0)), 0.5, 1.5);
  EXPECT_EQ(rep.verdict, Verdict::Equality);
}

TEST(VolumeComparisons, ModelBallBeyondTheBarrier) {
  const auto M = build_model_ball(3, 1.0, 0.0);
  const auto cert = certify_hypotheses(M, CurvatureParams::make(3, 3.0, 1.0));
  const auto rep = check_volume_comparisons(M, cert, 2.0, 3.0);
  EXPECT_EQ(rep.part("absolute_reparametrized")->verdict, Verdict::Equality);
  // Hemisphere of S^3: 4 pi int_0^{pi/2} cos^2 = pi^2.
  EXPECT_NEAR(M.tube_volume(1.0, 1.0, 2.0, WarpedManifold::Ball::Distance), kPi * kPi, 1e-8);
}

// ----------------------------------------------------- two-boundary distance

TEST(TwoBoundaryDistance, MirroredModelAttainsTheBound) {
  const auto M = profile_instance(3, "cos(t) + sin(t)", "0", kPi / 2, Topology::TwoEnded,
                                  Fiber::sphere(3, 1.0 / std::sqrt(2.0)));
  const auto cert = certify_hypotheses(M, CurvatureParams::make(3, 3.0, 1.0));
  EXPECT_NEAR(cert.kappa_eff, 1.0, 1e-9);
  EXPECT_NEAR(cert.lambda(), -1.0, 1e-12);
  const auto rep = check_two_boundary_distance(M, cert.weakened(std::min(1.0, cert.kappa_eff), -1.0, 0.0));
  EXPECT_EQ(rep.verdict, Verdict::Equality);
  EXPECT_EQ(rep.part("rigidity")->verdict, Verdict::Equality);
}

TEST(TwoBoundaryDistance, ShorterSegmentIsStrict) {
  const auto M = profile_instance(3, "cos(t) + sin(t)", "0", 1.2, Topology::TwoEnded,
                                  Fiber::sphere(3, 1.0 / std::sqrt(2.0)));
  const auto cert = certify_hypotheses(M, CurvatureParams::make(3, 3.0, 1.0));
  const auto rep = check_two_boundary_distance(M, cert);
  EXPECT_EQ(rep.verdict, Verdict::Holds);
}

TEST(TwoBoundaryDistance, DensityRescalesTheBarrier) {
  const double f = 0.3, eps = 0.5, delta = (1.0 - eps) * f / 2.0;
  const double k2 = std::exp(-4.0 * delta), l2 = -std::exp(-2.0 * delta);
  const double D2 = oracle::first_root([&](double t) { return oracle::jacobi_series(k2, 1.0, -l2, t).second; }, 3.0);
  const std::string sq = format_real(std::sqrt(k2));
  const std::string w = "cos(" + sq + "*t) + " + format_real(-l2 / std::sqrt(k2)) + "*sin(" + sq + "*t)";
  const auto M = profile_instance(3, w, format_real(f), 2.0 * D2, Topology::TwoEnded,
                                  Fiber::sphere(3, 1.0 / std::sqrt(l2 * l2 + k2)));
  const auto cert = certify_hypotheses(M, CurvatureParams::make(3, 3.0, eps));
  EXPECT_NEAR(cert.delta_eff, delta, 1e-15);
  EXPECT_NEAR(2.0 * D2, kPi / 2.0 * std::exp(2.0 * delta), 1e-9);
  const auto rep = check_two_boundary_distance(M, cert.weakened(std::min(1.0, cert.kappa_eff), std::min(-1.0, cert.lambda()), delta));
  EXPECT_NE(rep.verdict, Verdict::Violated);
  EXPECT_LE(std::abs(rep.part("distance")->worst_margin), 1e-6);
}

TEST(TwoBoundaryDistance, SkippedForNonPositiveKappa) {
  const auto M = profile_instance(3, "1", "0", 1.0, Topology::TwoEnded);
  const auto rep = check_two_boundary_distance(M, certify_hypotheses(M, CurvatureParams::make(3, 1.0, 0.0)));
  EXPECT_EQ(rep.verdict, Verdict::Skipped);
}

// ---------------------------------------------------------------- splitting

TEST(Splitting, FlatHalfCylinder) {
  const auto rep = check_splitting_model(CurvatureParams::make(3, 3.0, 0.0, 0.0, 0.0), EqualityCase::DimensionN);
  EXPECT_EQ(rep.verdict, Verdict::Equality);
}

TEST(Splitting, DensityCaseIsEquality) {
  const auto rep = check_splitting_model(CurvatureParams::make(3, 1.0, 0.0, -1.0, 1.0), EqualityCase::NOne);
  EXPECT_EQ(rep.verdict, Verdict::Equality) << rep.worst_margin();
}

TEST(Splitting, GenericCaseFollowsTheLogLaw) {
  const auto rep = check_splitting_model(CurvatureParams::make(3, 5.0, 0.5, -1.0, 1.0), EqualityCase::Generic);
  EXPECT_NE(rep.verdict, Verdict::Violated);
  for (const auto& p : rep.parts)
    if (p.id.rfind("density_law", 0) == 0) EXPECT_GE(p.worst_margin, -1e-8);
}

TEST(Splitting, RejectsMismatchedCase) {
  EXPECT_THROW(check_splitting_model(CurvatureParams::make(3, 5.0, 0.5, -1.0, 1.0), EqualityCase::NOne),
               InvalidParams);
  EXPECT_THROW(check_splitting_model(CurvatureParams::make(3, 1.0, 0.0, -1.0, 0.5), EqualityCase::NOne),
               InvalidParams);
}
