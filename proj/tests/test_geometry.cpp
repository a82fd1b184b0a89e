#include "catarray/geometry.hpp"
#include "test_support.hpp"

#include <Eigen/Geometry>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace catarray;

TEST(Catenary, VertexIsZero) { EXPECT_EQ(catenary_z(0.0, 1000.0), 0.0); }

TEST(Catenary, Even) {
  for (double x : {0.1, 3.0, 47.5, 250.0}) {
    EXPECT_EQ(catenary_z(x, 800.0), catenary_z(-x, 800.0));
  }
}

TEST(Catenary, MatchesHighPrecisionSeries) {
  // 1000 (cosh 0.1 - 1) to 40 digits
  EXPECT_NEAR(catenary_z(100.0, 1000.0), 5.004168055803598988, 1e-13);
}

TEST(Catenary, NonNegativeWithEqualityOnlyAtVertex) {
  for (double x = -300.0; x <= 300.0; x += 7.3) {
    const double z = catenary_z(x, 500.0);
    EXPECT_GE(z, 0.0);
    if (x != 0.0) {
      EXPECT_GT(z, 0.0);
    }
  }
}

TEST(Catenary, RejectsOverflowRatio) {
  EXPECT_THROW(catenary_z(701.0, 1.0), DomainError);
  EXPECT_THROW(catenary_z(-7010.0, 10.0), DomainError);
  EXPECT_NO_THROW(catenary_z(699.0, 1.0));
}

TEST(OffsetMatrix, Config32Pattern) {
  const Eigen::Matrix3Xd m = offset_matrix(config_32(), Eigen::Vector3d(5, 4, 3));
  Eigen::Matrix<double, 3, 5> expected;
  expected << 0, 0, 0, 0, 0,  //
      -5, 0, 5, -3, 3,        //
      0, 0, 0, 4, 4;
  EXPECT_TRUE(m.isApprox(expected)) << m;
}

TEST(OffsetMatrix, ZeroDeltasGiveZeroMatrix) {
  EXPECT_TRUE(offset_matrix(config_32(), Eigen::Vector3d::Zero()).isZero(0.0));
}

TEST(OffsetMatrix, Config222Pattern) {
  const Eigen::Matrix3Xd m = offset_matrix(config_222(), Eigen::Vector2d(4, 3));
  Eigen::Matrix<double, 3, 6> expected;
  expected << 0, 0, 0, 0, 0, 0,  //
      -4, -4, -4, 4, 4, 4,       //
      0, 3, 6, 0, 3, 6;
  EXPECT_TRUE(m.isApprox(expected)) << m;
}

TEST(OffsetMatrix, LinearInDeltasForEveryCatalogConfig) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 3.0);
  for (const auto& name : catalog_names()) {
    const ConductorConfig cfg = config_by_name(name);
    const int l = cfg.offset_count();
    Eigen::VectorXd d1(l), d2(l);
    for (int i = 0; i < l; ++i) {
      d1[i] = n(rng);
      d2[i] = n(rng);
    }
    Eigen::Matrix3Xd from_jacobians = Eigen::Matrix3Xd::Zero(3, cfg.conductor_count());
    for (int i = 0; i < l; ++i) from_jacobians += d1[i] * cfg.offset_jacobian(i);
    EXPECT_TRUE(offset_matrix(cfg, d1).isApprox(from_jacobians)) << name;
    const double alpha = 1.7, beta = -0.4;
    EXPECT_TRUE(offset_matrix(cfg, alpha * d1 + beta * d2)
                    .isApprox(alpha * offset_matrix(cfg, d1) + beta * offset_matrix(cfg, d2),
                              1e-12))
        << name;
  }
}

TEST(OffsetMatrix, WrongDeltaCountThrows) {
  EXPECT_THROW(offset_matrix(config_32(), Eigen::Vector2d(1, 1)), ArgumentError);
}

TEST(Catalog, UnknownNameThrows) { EXPECT_THROW(config_by_name("33"), ArgumentError); }

TEST(Catalog, Counts) {
  EXPECT_EQ(config_by_name("1").conductor_count(), 1);
  EXPECT_EQ(config_by_name("1").offset_count(), 0);
  EXPECT_EQ(config_by_name("32").conductor_count(), 5);
  EXPECT_EQ(config_by_name("32").offset_count(), 3);
  EXPECT_EQ(config_by_name("222").conductor_count(), 6);
  EXPECT_EQ(config_by_name("222").parameter_count(), 7);
}

TEST(ForwardPoint, IdentityPose) {
  const ParamVector p(0, 0, 0, 0, 1000, {});
  EXPECT_TRUE(forward_point(p, single_conductor_config(), 0, 0.0).isZero(0.0));
}

TEST(ForwardPoint, TranslatedConfig32) {
  const ParamVector p(10, 20, 30, 0, 1000, {5, 4, 3});
  EXPECT_TRUE(forward_point(p, config_32(), 0, 0.0).isApprox(Point3(10, 15, 30)));
}

TEST(ForwardPoint, TranslationIsAdditive) {
  const ParamVector p0(0, 0, 0, 0.7, 900, {5, 4, 3});
  const ParamVector p1(3, -8, 12, 0.7, 900, {5, 4, 3});
  for (int k = 0; k < 5; ++k) {
    const Point3 diff = forward_point(p1, config_32(), k, 42.0) - forward_point(p0, config_32(), k, 42.0);
    EXPECT_TRUE(diff.isApprox(Point3(3, -8, 12), 1e-12));
  }
}

TEST(ForwardPoint, BadConductorIndexThrows) {
  const ParamVector p(0, 0, 0, 0, 1000, {5, 4, 3});
  EXPECT_THROW(forward_point(p, config_32(), 5, 0.0), ArgumentError);
  EXPECT_THROW(forward_point(p, config_32(), -1, 0.0), ArgumentError);
}

TEST(Associate, DirectSubstitution) {
  const ParamVector p(0, 0, 0, 0, 1000, {});
  EXPECT_DOUBLE_EQ(associate_x(p, single_conductor_config(), 0, Point3(7, 3, -2)), 7.0);
}

TEST(Associate, QuarterTurn) {
  const ParamVector p(0, 0, 0, std::numbers::pi / 2, 1000, {});
  EXPECT_NEAR(associate_x(p, single_conductor_config(), 0, Point3(0, 7, 1)), 7.0, 1e-12);
}

TEST(Associate, SubtractsOriginAndConductorOffset) {
  // single conductor with x_k = 2 through a hand-built configuration
  Eigen::Matrix3Xd shift = Eigen::Matrix3Xd::Zero(3, 1);
  shift(0, 0) = 1.0;
  const ConductorConfig cfg("shifted", 1, {shift});
  const ParamVector p(1, 0, 0, 0, 1000, {2});
  EXPECT_DOUBLE_EQ(associate_x(p, cfg, 0, Point3(7, 0, 0)), 4.0);
}

TEST(ErrorVector, ModelPointsHaveZeroResidual) {
  const ParamVector p(4, -3, 21, 0.3, 750, {4, 3.5});
  for (int k = 0; k < 6; ++k) {
    for (double x : {-120.0, -3.0, 0.0, 55.5}) {
      EXPECT_LT(error_vector(p, config_222(), k, forward_point(p, config_222(), k, x)).norm(),
                1e-10);
    }
  }
}

TEST(ErrorVector, VerticalOffsetPassesThrough) {
  const ParamVector p(4, -3, 21, 0.0, 750, {4, 3.5});
  const Point3 pt = forward_point(p, config_222(), 2, 30.0) + Point3(0, 0, 0.25);
  EXPECT_TRUE(error_vector(p, config_222(), 2, pt).isApprox(Eigen::Vector3d(0, 0, 0.25), 1e-10));
}

TEST(ErrorVector, LateralOffsetIsolated) {
  const double psi = 0.6;
  const ParamVector p(4, -3, 21, psi, 750, {4, 3.5});
  const Point3 c2(-std::sin(psi), std::cos(psi), 0.0);
  const Point3 pt = forward_point(p, config_222(), 4, -10.0) + 0.8 * c2;
  EXPECT_TRUE(error_vector(p, config_222(), 4, pt).isApprox(Eigen::Vector3d(0, 0.8, 0), 1e-10));
}

TEST(Distance, PointOnConductorTwo) {
  const ParamVector p(0, 0, 20, 0.1, 1000, {4, 3});
  const auto r = distance_to_model(p, config_222(), forward_point(p, config_222(), 2, 17.0));
  EXPECT_NEAR(r.d, 0.0, 1e-10);
  EXPECT_EQ(r.k_star, 2);
}

TEST(Distance, TieGoesToLowestIndex) {
  // conductors 0 and 3 sit at y = -4 and y = +4 (bottom row); a point at y = 0 is equidistant
  const ParamVector p(0, 0, 20, 0.0, 1000, {4, 3});
  const auto r = distance_to_model(p, config_222(), Point3(0, 0, 20));
  EXPECT_DOUBLE_EQ(r.d, 4.0);
  EXPECT_EQ(r.k_star, 0);
}

TEST(Distance, MatchesSampledOracleForPerpendicularOffsets) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const ParamVector p(10 * u(rng), 10 * u(rng), 25 + 5 * u(rng), u(rng), 2000 + 1000 * u(rng),
                        {4 + u(rng), 3 + u(rng)});
    const Point3 pt = test::near_model_point(p, config_222(), 40.0, 2.5, rng);
    const double oracle = test::sampled_distance(p, config_222(), pt);
    // the closed form ignores the slope of the curve: second-order error in sinh(x/a)
    const double tol = 1e-4 + oracle * std::pow(std::sinh(40.0 / p.a()), 2);
    EXPECT_NEAR(distance_to_model(p, config_222(), pt).d, oracle, tol) << "instance " << i;
  }
}

TEST(Distance, InvariantUnderPlanarRigidTransform) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const ParamVector p(2, 1, 25, 0.4, 1200, {4, 3});
  for (int i = 0; i < 50; ++i) {
    const double yaw = 3 * u(rng);
    const Eigen::Vector3d t(30 * u(rng), 30 * u(rng), 5 * u(rng));
    const Eigen::Matrix3d r = Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()).toRotationMatrix();
    const Point3 pt(40 * u(rng), 40 * u(rng), 25 + 10 * u(rng));
    Eigen::VectorXd moved = p.values();
    moved.head<3>() = r * p.values().head<3>() + t;
    moved[kPsi] += yaw;
    EXPECT_NEAR(distance_to_model(ParamVector(moved), config_222(), r * pt + t).d,
                distance_to_model(p, config_222(), pt).d, 1e-9);
  }
}

TEST(SampleCurves, EndpointsOnly) {
  const ParamVector p(0, 0, 0, 0, 1000, {5, 4, 3});
  const auto c = sample_curves(p, config_32(), -50, 50, 2);
  ASSERT_EQ(c.size(), 5u);
  for (const auto& line : c) ASSERT_EQ(line.size(), 2u);
  EXPECT_NEAR(c[0][0].x(), -50.0, 1e-12);
  EXPECT_NEAR(c[0][1].x(), 50.0, 1e-12);
}

TEST(SampleCurves, MiddleSampleAtVertexHeight) {
  const ParamVector p(0, 0, 0, 0, 1000, {});
  const auto c = sample_curves(p, single_conductor_config(), -100, 100, 3);
  EXPECT_NEAR(c[0][1].z(), 0.0, 1e-12);
  EXPECT_NEAR(c[0][0].z(), 5.004168055803598988, 1e-12);
}

TEST(SampleCurves, SamplesLieOnModel) {
  const ParamVector p(3, 4, 20, 0.5, 700, {4, 3});
  for (const auto& line : sample_curves(p, config_222(), -80, 60, 25)) {
    for (const auto& pt : line) EXPECT_LT(distance_to_model(p, config_222(), pt).d, 1e-9);
  }
}

TEST(SampleCurves, RejectsBadRanges) {
  const ParamVector p(0, 0, 0, 0, 1000, {});
  EXPECT_THROW(sample_curves(p, single_conductor_config(), 0, 0, 5), ArgumentError);
  EXPECT_THROW(sample_curves(p, single_conductor_config(), 0, 1, 1), ArgumentError);
}
