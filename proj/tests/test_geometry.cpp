#include "oracles.hpp"
#include "textmountain/geometry.hpp"
#include "textmountain/polygon.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <random>

using namespace textmountain;
using oracle::rect;

namespace {

constexpr double kPi = std::numbers::pi;

TEST(PerpVectorsQuad, AxisAlignedRectangleDistances) {
  const auto poly = TextPolygon::make(rect(0, 0, 100, 20));
  const auto a = perp_vectors_quad(poly, Point(50, 10));
  EXPECT_NEAR(a[0].norm(), 10, 1e-12);
  EXPECT_NEAR(a[1].norm(), 50, 1e-12);
  EXPECT_NEAR(a[2].norm(), 10, 1e-12);
  EXPECT_NEAR(a[3].norm(), 50, 1e-12);
}

TEST(PerpVectorsQuad, BoundaryPointHasZeroDistance) {
  const auto poly = TextPolygon::make(rect(0, 0, 100, 20));
  EXPECT_NEAR(perp_vectors_quad(poly, Point(50, 0))[0].norm(), 0, 1e-12);
}

TEST(PerpVectorsQuad, RotatedSquareCenterIsEquidistant) {
  const auto poly = TextPolygon::make(oracle::rotated_rect(Point(10, 10), 4, 4, kPi / 4));
  const Point c(10, 10);
  const auto a = perp_vectors_quad(poly, c);
  for (int i = 0; i < 4; ++i) {
    const auto& v = poly.vertices;
    EXPECT_NEAR(a[i].norm(), oracle::line_distance(v[i], v[(i + 1) % 4], c), 1e-12);
    EXPECT_NEAR(a[i].norm(), a[0].norm(), 1e-12);
  }
}

TEST(PerpVectorsQuad, MatchesTriangleAreaDistanceOnRandomQuads) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 200; ++t) {
    const auto poly = TextPolygon::make(oracle::rotated_rect(Point(0, 0), 30 + 20 * u(rng), 10 + 5 * u(rng), kPi * u(rng)));
    const Point p(2 * u(rng), 2 * u(rng));
    const auto a = perp_vectors_quad(poly, p);
    double h13 = a[0].norm() + a[2].norm(), h24 = a[1].norm() + a[3].norm();
    EXPECT_GT(std::min(h13, h24), 0);
    for (int i = 0; i < 4; ++i) {
      EXPECT_NEAR(a[i].norm(), oracle::line_distance(poly.vertices[i], poly.vertices[(i + 1) % 4], p), 1e-9);
    }
  }
}

TEST(PerpVectorsQuad, ZeroLengthSideThrows) {
  EXPECT_THROW(perp_from_line(Point(1, 1), Point(1, 1), Point(0, 0)), GeometryError);
}

TEST(ClosestOnSide, FootInsideSegment) {
  const std::vector<Point> seg{Point(0, 0), Point(10, 0)};
  const auto r = closest_on_side<double>(seg, Point(5, 3));
  EXPECT_TRUE(r.point.isApprox(Point(5, 0)));
  EXPECT_DOUBLE_EQ(r.distance, 3);
}

TEST(ClosestOnSide, ClampedToEndpoint) {
  const std::vector<Point> seg{Point(0, 0), Point(10, 0)};
  const auto r = closest_on_side<double>(seg, Point(-4, 3));
  EXPECT_TRUE(r.point.isApprox(Point(0, 0)));
  EXPECT_DOUBLE_EQ(r.distance, 5);
}

TEST(ClosestOnSide, QuarterArcFromCenterMatchesSampling) {
  std::vector<Point> arc;
  for (int i = 0; i < 7; ++i) {
    const double t = kPi / 2 * i / 6;
    arc.emplace_back(10 * std::cos(t), 10 * std::sin(t));
  }
  const auto r = closest_on_side<double>(arc, Point(0, 0));
  EXPECT_NEAR(r.distance, 10 * std::cos(kPi / 24), 1e-6);
  EXPECT_NEAR(r.distance, oracle::sampled_distance(arc, Point(0, 0), 10000), 1e-6);
}

TEST(ClosestOnSide, RandomPolylinesMatchDenseSampling) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-20, 20);
  for (int t = 0; t < 50; ++t) {
    std::vector<Point> line;
    for (int i = 0; i < 7; ++i) line.emplace_back(u(rng), u(rng));
    const Point p(u(rng), u(rng));
    const double c = closest_on_side<double>(line, p).distance;
    // The sampled oracle only approaches from above; its grid spacing bounds the gap.
    const double sampled = oracle::sampled_distance(line, p, 100000);
    EXPECT_LE(c, sampled + 1e-12);
    EXPECT_NEAR(c, sampled, 1e-6);
  }
}

TEST(SmoothSide, CollinearPointsShareDirection) {
  const std::vector<Point> line{Point(0, 0), Point(2, 0), Point(5, 0), Point(9, 0)};
  const auto s = smooth_side<double>(line);
  for (const auto& f : s.point_units) EXPECT_TRUE(f.isApprox(Vec2(1, 0), 1e-15));
}

TEST(SmoothSide, RightAngleCornerAveragesNeighbors) {
  const std::vector<Point> line{Point(0, 0), Point(1, 0), Point(1, 1)};
  const auto s = smooth_side<double>(line);
  EXPECT_NEAR(s.point_units[1].x(), std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(s.point_units[1].y(), std::sqrt(0.5), 1e-15);
  EXPECT_TRUE(s.point_units[0].isApprox(Vec2(1, 0)));
  EXPECT_TRUE(s.point_units[2].isApprox(Vec2(0, 1)));
}

TEST(SmoothSide, ArcInteriorUnitsBisectChords) {
  std::vector<Point> arc;
  std::vector<double> t;
  for (int i = 0; i < 7; ++i) {
    t.push_back(kPi * i / 6);
    arc.emplace_back(25 * std::cos(t.back()), 25 * std::sin(t.back()));
  }
  const auto s = smooth_side<double>(arc);
  for (int i = 1; i < 6; ++i) {
    // Chord k of a circle points along angle (t_k + t_{k+1})/2 + pi/2.
    const double before = (t[i - 1] + t[i]) / 2 + kPi / 2;
    const double after = (t[i] + t[i + 1]) / 2 + kPi / 2;
    const Vec2 mean = Vec2(std::cos(before) + std::cos(after), std::sin(before) + std::sin(after)).normalized();
    EXPECT_NEAR((s.point_units[i] - mean).norm(), 0, 1e-6);
  }
  for (const auto& f : s.segment_units) EXPECT_NEAR(f.norm(), 1, 1e-9);
  for (const auto& f : s.point_units) EXPECT_NEAR(f.norm(), 1, 1e-9);
}

TEST(SmoothSide, MalformedSidesThrow) {
  const std::vector<Point> repeated{Point(0, 0), Point(0, 0), Point(1, 0)};
  EXPECT_THROW(smooth_side<double>(repeated), GeometryError);
  const std::vector<Point> back{Point(0, 0), Point(1, 0), Point(0, 0)};
  EXPECT_THROW(smooth_side<double>(back), GeometryError);
}

TEST(InterpUnit, AtStoredPointReturnsItsUnit) {
  const std::vector<Point> line{Point(0, 0), Point(1, 0), Point(1, 1)};
  const auto s = smooth_side<double>(line);
  EXPECT_TRUE(interp_unit(s, Point(1, 0)).isApprox(s.point_units[1]));
}

TEST(InterpUnit, ThirtyPercentAlongSegment) {
  SmoothedSide<double> s;
  s.points = {Point(0, 0), Point(10, 0)};
  s.segment_units = {Vec2(1, 0)};
  s.point_units = {Vec2(1, 0), Vec2(0, 1)};
  const Vec2 f = interp_unit(s, 0, Point(3, 0));
  EXPECT_NEAR(f.x(), 0.7 / std::sqrt(0.58), 1e-12);
  EXPECT_NEAR(f.y(), 0.3 / std::sqrt(0.58), 1e-12);
  EXPECT_NEAR(f.x(), 0.9191, 1e-4);
  EXPECT_NEAR(f.y(), 0.3939, 1e-4);
}

TEST(InterpUnit, StraightSideIsConstant) {
  const Vec2 dir = Vec2(3, 4).normalized();
  std::vector<Point> line;
  for (int i = 0; i < 7; ++i) line.push_back(Point(1, 2) + dir * (i * i + 1.0));
  const auto s = smooth_side<double>(line);
  double worst = 0;
  for (double t = 1; t < 37; t += 0.173) worst = std::max(worst, (interp_unit(s, Point(Point(1, 2) + dir * t)) - dir).norm());
  EXPECT_LT(worst, 1e-9);
}

TEST(InterpUnit, VanishingBlendThrows) {
  SmoothedSide<double> s;
  s.points = {Point(0, 0), Point(2, 0)};
  s.segment_units = {Vec2(1, 0)};
  s.point_units = {Vec2(1, 0), Vec2(-1, 0)};
  EXPECT_THROW(interp_unit(s, 0, Point(1, 0)), GeometryError);
}

TEST(CenterDirFromSide, QuarterTurns) {
  EXPECT_TRUE(center_dir_from_side(Vec2(1, 0)).isApprox(Vec2(0, 1)));
  EXPECT_TRUE(center_dir_from_side(Vec2(0, 1)).isApprox(Vec2(-1, 0)));
  const double r = std::sqrt(0.5);
  EXPECT_TRUE(center_dir_from_side(Vec2(r, r)).isApprox(Vec2(-r, r)));
}

TEST(CenterDirFromSide, MatchesAngleFormulaAndIsOrthogonal) {
  for (double a = -3; a < 3; a += 0.01) {
    const Vec2 f(std::cos(a), std::sin(a));
    const Vec2 d = center_dir_from_side(f);
    EXPECT_NEAR(d.x(), std::cos(a + kPi / 2), 1e-12);
    EXPECT_NEAR(d.y(), std::sin(a + kPi / 2), 1e-12);
    EXPECT_NEAR(d.dot(f), 0, 1e-12);
    EXPECT_NEAR(d.norm(), 1, 1e-12);
  }
}

TEST(CenterDirFromSide, PointsInsideClockwisePolygon) {
  const auto poly = TextPolygon::make(rect(0, 0, 10, 10));
  const auto& v = poly.vertices;
  for (int i = 0; i < 4; ++i) {
    const Point mid = (v[i] + v[(i + 1) % 4]) / 2;
    const Vec2 f = (v[(i + 1) % 4] - v[i]).normalized();
    EXPECT_TRUE(point_in_polygon<double>(poly.vertices, Point(mid + center_dir_from_side(f))));
  }
}

TEST(PointInPolygon, UnitSquare) {
  const auto sq = rect(0, 0, 1, 1);
  EXPECT_TRUE(point_in_polygon<double>(sq, Point(0.5, 0.5)));
  EXPECT_FALSE(point_in_polygon<double>(sq, Point(2, 2)));
  EXPECT_TRUE(point_in_polygon<double>(sq, Point(1.0, 0.5)));
}

TEST(PointInPolygon, AgreesWithWindingNumberOnCurvedShapes) {
  const auto ring = oracle::ring14(Point(0, 0), 30, 50, 0, kPi);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-60, 60);
  for (int t = 0; t < 2000; ++t) {
    const Point p(u(rng), u(rng));
    if (boundary_distance<double>(ring, p) < 1e-6) continue;
    EXPECT_EQ(point_in_polygon<double>(ring, p), oracle::winding_inside(ring, p));
  }
}

TEST(TextPolygon, CanonicalizesToClockwise) {
  auto ccw = rect(0, 0, 10, 5);
  std::reverse(ccw.begin(), ccw.end());
  const auto poly = TextPolygon::make(ccw);
  EXPECT_GT(signed_area<double>(poly.vertices), 0);
  EXPECT_DOUBLE_EQ(poly.area(), 50);
}

TEST(TextPolygon, AcceptsRotatedCollinearSubdivision) {
  std::mt19937 rng(12);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 500; ++t) {
    const auto q = oracle::rotated_rect(Point(50 * u(rng), 50 * u(rng)), 10 + 40 * u(rng), 10 + 20 * u(rng),
                                        3.2 * u(rng));
    std::vector<Point> v;
    for (int i = 0; i < 7; ++i) v.push_back(q[0] + (q[1] - q[0]) * (i / 6.0));
    for (int i = 0; i < 7; ++i) v.push_back(q[2] + (q[3] - q[2]) * (i / 6.0));
    EXPECT_NO_THROW(TextPolygon::make(v)) << t;
  }
}

TEST(TextPolygon, RejectsMalformedInput) {
  EXPECT_THROW(TextPolygon::make({Point(0, 0), Point(1, 0), Point(1, 1)}), GeometryError);
  EXPECT_THROW(TextPolygon::make({Point(0, 0), Point(1, 0), Point(2, 0), Point(3, 0)}), GeometryError);
  EXPECT_THROW(TextPolygon::make({Point(0, 0), Point(1, 1), Point(1, 0), Point(0, 1)}), GeometryError);
  EXPECT_THROW(TextPolygon::make({Point(0, 0), Point(NAN, 0), Point(1, 1), Point(0, 1)}), GeometryError);
}

TEST(SidesOf, Curved14Layout) {
  const auto poly = TextPolygon::make(oracle::rect14(0, 0, 60, 10));
  EXPECT_EQ(poly.kind, PolygonKind::Curved14);
  const auto s = sides_of(poly);
  EXPECT_EQ(s.sides[0].size(), 7u);
  EXPECT_EQ(s.sides[1].size(), 2u);
  EXPECT_EQ(s.sides[2].size(), 7u);
  EXPECT_EQ(s.sides[3].size(), 2u);
  EXPECT_TRUE(s.sides[1][0].isApprox(s.sides[0].back()));
  EXPECT_TRUE(s.sides[3][1].isApprox(s.sides[0].front()));
}

TEST(SidesOf, DegenerateCurvedMatchesQuadDistances) {
  const auto quad = TextPolygon::make(rect(0, 0, 60, 12));
  const auto curved = TextPolygon::make(oracle::rect14(0, 0, 60, 12));
  const auto sides = sides_of(curved);
  for (double y = 0.5; y < 12; y += 1) {
    for (double x = 0.5; x < 60; x += 1) {
      const Point p(x, y);
      const auto a = perp_vectors_quad(quad, p);
      for (int i = 0; i < 4; ++i) {
        EXPECT_NEAR(closest_on_side<double>(sides.sides[i], p).distance, a[i].norm(), 1e-6);
      }
    }
  }
}

TEST(Geometry, FloatInstantiation) {
  const std::vector<Point2<float>> seg{Point2<float>(0, 0), Point2<float>(10, 0)};
  EXPECT_FLOAT_EQ(closest_on_side<float>(seg, Point2<float>(5, 3)).distance, 3.0f);
  EXPECT_FLOAT_EQ(signed_area<float>(std::vector<Point2<float>>{{0, 0}, {2, 0}, {2, 2}, {0, 2}}), 4.0f);
}

}  // namespace
