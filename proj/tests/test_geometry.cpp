#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "aonav/geometry.hpp"

using namespace aonav;
using Catch::Approx;

TEST_CASE("grow adds the robot radius") {
  const Disk g1 = grow({{5.0, 0.0}, 2.0}, 1.0);
  CHECK(g1.center == Vec2{5.0, 0.0});
  CHECK(g1.radius == 3.0);

  const Disk g2 = grow({{0.0, 0.0}, 0.0}, 0.0);
  CHECK(g2.center == Vec2{0.0, 0.0});
  CHECK(g2.radius == 0.0);

  const Disk g3 = grow({{-3.0, 4.0}, 1.5}, 0.5);
  CHECK(g3.center == Vec2{-3.0, 4.0});
  CHECK(g3.radius == 2.0);
}

TEST_CASE("grow rejects bad arguments") {
  CHECK_THROWS_AS(grow({{0.0, 0.0}, 1.0}, -0.1), std::invalid_argument);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(grow({{nan, 0.0}, 1.0}, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(grow({{0.0, 0.0}, 1.0}, nan), std::invalid_argument);
}

TEST_CASE("homothety on points") {
  CHECK(homothety({0.0, 0.0}, 0.5, {10.0, 0.0}) == Vec2{5.0, 0.0});
  CHECK(homothety({0.0, 0.0}, 1.0, {3.25, -7.5}) == Vec2{3.25, -7.5});
  CHECK(homothety({1.0, 1.0}, 2.0, {2.0, 3.0}) == Vec2{3.0, 5.0});
}

TEST_CASE("homothety on disks") {
  CHECK(homothety_disk({0.0, 0.0}, 0.5, {{10.0, 0.0}, 2.0}) == Disk{{5.0, 0.0}, 1.0});
  CHECK(homothety_disk({0.0, 0.0}, 1.0, {{-4.0, 9.0}, 3.0}) == Disk{{-4.0, 9.0}, 3.0});

  const Disk apex = homothety_disk({0.0, 0.0}, 0.001, {{10.0, 0.0}, 2.0});
  CHECK(apex.center.x == Approx(0.01).margin(1e-15));
  CHECK(apex.center.y == 0.0);
  CHECK(apex.radius == Approx(0.002).margin(1e-15));

  CHECK_THROWS_AS(homothety_disk({0.0, 0.0}, 0.0, {{1.0, 0.0}, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(homothety_disk({0.0, 0.0}, -2.0, {{1.0, 0.0}, 1.0}), std::invalid_argument);
}

TEST_CASE("homothety composition law") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> coord(-50.0, 50.0);
  std::uniform_real_distribution<double> ratio(0.05, 5.0);
  for (int i = 0; i < 200; ++i) {
    const Vec2 c{coord(rng), coord(rng)};
    const Vec2 p{coord(rng), coord(rng)};
    const double k1 = ratio(rng), k2 = ratio(rng);
    const Vec2 chained = homothety(c, k1, homothety(c, k2, p));
    const Vec2 direct = homothety(c, k1 * k2, p);
    CHECK((chained - direct).norm() < 1e-12 * std::max(1.0, direct.norm()));
  }
}

TEST_CASE("homothety_disk preserves tangency from its center") {
  // Rays from the homothety center tangent to the disk stay tangent to the
  // image: radius / center-distance is invariant.
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> coord(-30.0, 30.0);
  std::uniform_real_distribution<double> rad(0.1, 5.0);
  std::uniform_real_distribution<double> ratio(0.01, 20.0);
  for (int i = 0; i < 200; ++i) {
    Disk d{{coord(rng), coord(rng)}, rad(rng)};
    if (d.center.norm() <= d.radius + 0.5) continue;  // keep the origin outside
    const double k = ratio(rng);
    const Disk img = homothety_disk({0.0, 0.0}, k, d);
    CHECK(img.radius / img.center.norm() ==
          Approx(d.radius / d.center.norm()).epsilon(1e-12));
  }
}

TEST_CASE("grow is monotone in the robot radius") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> rad(0.0, 4.0);
  for (int i = 0; i < 200; ++i) {
    const Disk d{{1.0, 2.0}, rad(rng)};
    const double r1 = rad(rng), r2 = rad(rng);
    const Disk g1 = grow(d, std::min(r1, r2));
    const Disk g2 = grow(d, std::max(r1, r2));
    CHECK(g2.radius >= g1.radius);
  }
}

TEST_CASE("point disks are valid") {
  const Disk point{{2.0, 2.0}, 0.0};
  CHECK(point.contains({2.0, 2.0}));
  CHECK_FALSE(point.contains({2.0 + 1e-6, 2.0}));
  const Disk g = grow(point, 0.0);
  CHECK(g.radius == 0.0);
}
