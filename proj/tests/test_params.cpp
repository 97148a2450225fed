#include <gtest/gtest.h>

#include "wbcomp/params.hpp"

using wbcomp::ExtendedReal;
using wbcomp::validate_params;

TEST(ValidateParams, SurfaceWithNOneHasUnitConstant) {
  const auto v = validate_params(2, 1.0, 0.0);
  ASSERT_TRUE(v.accepted);
  EXPECT_DOUBLE_EQ(v.c, 1.0);
}

TEST(ValidateParams, EpsilonOneAboveDimension) {
  // c = (1/(n-1))(1 - (N-n)/(N-1)) = 1/(N-1)
  const auto v = validate_params(3, 5.0, 1.0);
  ASSERT_TRUE(v.accepted);
  EXPECT_NEAR(v.c, 0.25, 1e-15);
  EXPECT_NEAR(v.eps0.value(), 2.0, 1e-15);
}

TEST(ValidateParams, NegativeNWithThirdEpsilon) {
  // N = 0, n = 3: eps0 = 1/3, eps = 1/3 gives c = (1/2)(1 - (1/9)*3) = 1/3 = 1/(n-N)
  const auto v = validate_params(3, 0.0, 1.0 / 3.0);
  ASSERT_TRUE(v.accepted);
  EXPECT_NEAR(v.c, 1.0 / 3.0, 1e-15);
}

TEST(ValidateParams, NOneRequiresZeroEpsilon) {
  const auto v = validate_params(3, 1.0, 0.1);
  EXPECT_FALSE(v.accepted);
  EXPECT_NE(v.reason.find("N = 1"), std::string::npos);
}

TEST(ValidateParams, ForbiddenBandBetweenOneAndN) {
  const auto v = validate_params(3, 2.0, 0.0);
  EXPECT_FALSE(v.accepted);
  EXPECT_EQ(v.reason, "N in ]1,n[ forbidden");
}

TEST(ValidateParams, EndpointsOfRangeAreExcluded) {
  // N = 5, n = 3: eps0 = 2, so |eps| < sqrt 2
  EXPECT_TRUE(validate_params(3, 5.0, 1.414).accepted);
  EXPECT_FALSE(validate_params(3, 5.0, std::sqrt(2.0) + 1e-12).accepted);
  EXPECT_FALSE(validate_params(3, ExtendedReal::infinity(), 1.0).accepted);
  EXPECT_TRUE(validate_params(3, ExtendedReal::infinity(), 0.999).accepted);
}

TEST(ValidateParams, NEqualsDimensionAcceptsAnyEpsilon) {
  const auto v = validate_params(4, 4.0, 17.0);
  ASSERT_TRUE(v.accepted);
  EXPECT_TRUE(v.eps0.is_infinite());
  EXPECT_NEAR(v.c, 1.0 / 3.0, 1e-15);
}

TEST(ValidateParams, RejectsNonFiniteEpsilonAndSmallDimension) {
  EXPECT_FALSE(validate_params(3, 5.0, std::nan("")).accepted);
  EXPECT_FALSE(validate_params(3, 5.0, INFINITY).accepted);
  EXPECT_FALSE(validate_params(1, 5.0, 0.0).accepted);
}

TEST(ValidateParams, ConstantStaysInUnitInterval) {
  for (int n = 2; n <= 6; ++n)
    for (double N : {-3.0, 0.0, 0.5, 1.0, double(n), n + 0.5, n + 4.0})
      for (double e : {-0.9, -0.3, 0.0, 0.4, 0.95}) {
        const auto v = validate_params(n, N, N == 1.0 ? 0.0 : e);
        if (!v.accepted) continue;
        EXPECT_GT(v.c, 0.0);
        EXPECT_LE(v.c, 1.0);
      }
}

TEST(CurvatureParams, MakeThrowsWithReason) {
  EXPECT_THROW(wbcomp::CurvatureParams::make(3, 2.0, 0.0), wbcomp::InvalidParams);
  const auto p = wbcomp::CurvatureParams::make(3, ExtendedReal::infinity(), 0.5, -1.0, 1.0);
  EXPECT_DOUBLE_EQ(p.ratio_N(), 1.0);
  EXPECT_DOUBLE_EQ(p.inv_N_minus_n(), 0.0);
  EXPECT_NEAR(p.c, 0.75 / 2.0, 1e-15);
  EXPECT_NEAR(p.conformal_rate(), 0.5, 1e-15);
}
