#include <doctest.h>

#include <cmath>
#include <random>

#include "mincurv/errors.hpp"
#include "mincurv/game_engine.hpp"

using namespace mincurv;

namespace {

GridSpec box2(double half, double h) { return GridSpec::from_bounds(VecN{-half, -half}, VecN{half, half}, h); }

// Nodes at least `margin` away from the grid boundary.
bool interior(const GridSpec& g, std::size_t f, double margin) {
  const VecN x = g.node(f);
  const VecN top = g.upper();
  for (int a = 0; a < g.dim; ++a) {
    if (x[a] - g.origin[a] < margin || top[a] - x[a] < margin) return false;
  }
  return true;
}

GameParams params2(double eps, bool polish) {
  GameParams p;
  p.dim = 2;
  p.eps = eps;
  p.direction_count = 32;
  p.polish = polish;
  return p;
}

}  // namespace

TEST_CASE("round count and time step") {
  CHECK(GameParams::rounds_for_time(0.1, 0.5) == 100);
  CHECK(GameParams::rounds_for_time(0.02, 0.4) == 2000);
  const GameParams p = GameParams::for_time(2, 0.1, 0.5, 16);
  CHECK(p.n_rounds == 100);
  CHECK(p.dt() == doctest::Approx(0.005));
  CHECK(p.time_of_round(100) == doctest::Approx(0.5));
}

TEST_CASE("parameter validation") {
  const GridSpec g = box2(1.0, 0.1);
  GameParams p = params2(0.1, false);
  CHECK_NOTHROW(p.validate(g));
  p.eps = 0.8;
  CHECK_THROWS_AS(p.validate(g), PreconditionError);
  p = params2(0.1, false);
  p.direction_count = 4;
  CHECK_THROWS_AS(p.validate(g), PreconditionError);
  p = params2(0.1, false);
  p.dim = 3;
  CHECK_THROWS_AS(p.validate(g), PreconditionError);
}

TEST_CASE("direction sets") {
  const DirectionSet d2 = DirectionSet::hemisphere(2, 32);
  CHECK(d2.size() == 32);
  CHECK(d2.angular_gap() == doctest::Approx(M_PI / 64.0));
  for (std::size_t i = 0; i < d2.size(); ++i) {
    for (std::size_t j = i + 1; j < d2.size(); ++j) CHECK(dot(d2[i], d2[j]) > -1.0 + 1e-9);
  }
  const DirectionSet d3 = DirectionSet::hemisphere(3, 256);
  CHECK(d3.size() == 256);
  CHECK(d3.angular_gap() > 0.0);
  CHECK(d3.angular_gap() < 0.2);
  // Probe the gap independently.
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int t = 0; t < 2000; ++t) {
    const VecN u = normalized(VecN{n(rng), n(rng), n(rng)});
    double best = 0.0;
    for (const auto& v : d3.vectors()) best = std::max(best, std::abs(dot(u, v)));
    CHECK(std::acos(std::min(1.0, best)) <= d3.angular_gap() + 1e-9);
  }
}

TEST_CASE("dpp_step keeps affine data fixed") {
  const GridSpec g = box2(1.0, 0.05);
  const GridField aff = GridField::sample(g, -1.0, [](const VecN& x) { return 0.8 * x[0] + 0.6 * x[1] + 0.1; });
  const GridField none = GridField::constant(g, -1e30, -1e30);
  for (bool polish : {false, true}) {
    const GameParams p = params2(0.1, polish);
    const DirectionSet dirs = DirectionSet::hemisphere(2, p.direction_count);
    const GridField next = dpp_step(aff, none, p, dirs);
    const double tol = 1.0 * p.eps * dirs.angular_gap() + 1e-12;
    for (std::size_t f = 0; f < g.size(); ++f) {
      if (!interior(g, f, p.eps + g.spacing)) continue;
      CHECK(next.at(f) <= aff.at(f) + 1e-12);
      CHECK(next.at(f) >= aff.at(f) - tol);
    }
  }
}

TEST_CASE("dpp_step lowers -|x|^2 by eps^2") {
  const GridSpec g = box2(1.0, 0.02);
  const GridField q = GridField::sample(g, -1e3, [](const VecN& x) { return -norm2(x); });
  const GridField none = GridField::constant(g, -1e30, -1e30);
  for (bool polish : {false, true}) {
    const GameParams p = params2(0.1, polish);
    const DirectionSet dirs = DirectionSet::hemisphere(2, p.direction_count);
    const GridField next = dpp_step(q, none, p, dirs);
    for (std::size_t f = 0; f < g.size(); ++f) {
      if (!interior(g, f, p.eps + g.spacing)) continue;
      const VecN x = g.node(f);
      const double tol = g.spacing * g.spacing + 2.0 * p.eps * norm(x) * std::sin(dirs.angular_gap()) + 1e-12;
      CHECK(std::abs(next.at(f) - (-norm2(x) - p.eps * p.eps)) <= tol);
    }
  }
}

TEST_CASE("dpp_step obstacle branch") {
  const GridSpec g = box2(1.0, 0.05);
  const GridField prev = GridField::sample(g, -1.0, [](const VecN& x) { return -norm(x); });
  const GridField five = GridField::constant(g, 5.0, 5.0);
  const GameParams p = params2(0.1, true);
  const GridField next = dpp_step(prev, five, p, DirectionSet::hemisphere(2, 32));
  CHECK(next.min() == 5.0);
  CHECK(next.max() == 5.0);
}

TEST_CASE("alt_dpp_step affine and quadratic examples") {
  const GridSpec g = box2(1.0, 0.02);
  const GridField none = GridField::constant(g, -1e30, -1e30);
  const GameParams p = params2(0.1, false);
  const DirectionSet normals = DirectionSet::hemisphere(2, 32);
  const GridField aff = GridField::sample(g, -1.0, [](const VecN& x) { return 0.6 * x[0] - 0.8 * x[1]; });
  const GridField na = alt_dpp_step(aff, none, p, normals);
  const GridField q = GridField::sample(g, -1e3, [](const VecN& x) { return -norm2(x); });
  const GridField nq = alt_dpp_step(q, none, p, normals);
  for (std::size_t f = 0; f < g.size(); ++f) {
    if (!interior(g, f, p.eps + g.spacing)) continue;
    const VecN x = g.node(f);
    CHECK(std::abs(na.at(f) - aff.at(f)) <= p.eps * normals.angular_gap() + 1e-12);
    const double tol = g.spacing * g.spacing + 2.0 * p.eps * norm(x) * std::sin(normals.angular_gap()) + 1e-12;
    CHECK(std::abs(nq.at(f) - (-norm2(x) - p.eps * p.eps)) <= tol);
  }
}

TEST_CASE("run_game edge cases") {
  const GridSpec g = box2(1.0, 0.05);
  const GridField u0 = GridField::sample(g, -0.5, [](const VecN& x) { return 0.5 - norm(x); });
  const GridField none = GridField::constant(g, -1e30, -1e30);
  GameParams p = params2(0.1, false);
  p.n_rounds = 0;
  const DirectionSet dirs = DirectionSet::hemisphere(2, 32);
  const auto only = run_game(u0, none, p, dirs, 1);
  REQUIRE(only.size() == 1);
  CHECK(only.front().round == 0);
  CHECK(only.front().field.values()[7] == u0.values()[7]);

  p.n_rounds = 5;
  const GridField c = GridField::constant(g, 2.0, 2.0);
  const GridField psi = GridField::constant(g, 1.0, 1.0);
  for (const auto& s : run_game(c, psi, p, dirs, 2)) {
    CHECK(s.field.min() == 2.0);
    CHECK(s.field.max() == 2.0);
  }
  const auto snaps = run_game(u0, none, p, dirs, 2);
  REQUIRE(snaps.size() == 4);  // rounds 0, 2, 4, 5
  CHECK(snaps.back().round == 5);
  CHECK(snaps.back().time == doctest::Approx(p.time_of_round(5)));
}

TEST_CASE("shrinking disc follows sqrt(1 - 2t)") {
  // Coarse version of the acceptance run; the full-resolution one lives in the acceptance binary.
  const GridSpec g = box2(1.2, 0.02);
  const GridField u0 = GridField::sample(g, -0.5, [](const VecN& x) { return std::max(-0.5, 1.0 - norm(x)); });
  const GridField none = GridField::constant(g, -1e30, -1e30);
  GameParams p = params2(0.04, true);
  p.n_rounds = GameParams::rounds_for_time(p.eps, 0.3);
  const DirectionSet dirs = DirectionSet::hemisphere(2, 32);
  const auto snaps = run_game(u0, none, p, dirs, 25);
  for (const auto& s : snaps) {
    const double t = s.time;
    if (t < 0.05) continue;
    const double area = static_cast<double>(positivity_set(s.field).count()) * g.spacing * g.spacing;
    const double r = std::sqrt(area / M_PI);
    CHECK(std::abs(r - std::sqrt(1.0 - 2.0 * t)) <= 0.05 * std::sqrt(1.0 - 2.0 * t));
  }
}

TEST_CASE("concentric Paul equality") {
  GameParams p = params2(0.1, false);
  p.n_rounds = 7;
  const std::vector<int> signs{1, -1, -1, 1, 1, 1, -1};
  const Trajectory tr = play_concentric_paul(VecN{1.0, 0.0}, VecN{0.0, 0.0}, p, signs);
  REQUIRE(tr.positions.size() == 8);
  CHECK(std::abs(norm2(tr.positions.back()) - 1.07) <= 1e-12);

  p.n_rounds = 0;
  CHECK(norm2(play_concentric_paul(VecN{1.0, 0.0}, VecN{0.0, 0.0}, p, {}).positions.back()) == 1.0);
  CHECK_THROWS_AS(play_concentric_paul(VecN{1.0, 0.0}, VecN{1.0, 0.0}, p, {}), PreconditionError);

  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> coin(0, 1);
  GameParams p3 = p;
  p3.dim = 3;
  p3.n_rounds = 40;
  for (int t = 0; t < 200; ++t) {
    std::vector<int> s(40);
    for (auto& v : s) v = coin(rng) ? 1 : -1;
    const VecN z{0.3, -0.2, 0.5};
    const VecN x0{1.0, 0.4, -0.7};
    const Trajectory r = play_concentric_paul(x0, z, p3, s);
    CHECK(std::abs(norm2(r.positions.back() - z) - (norm2(x0 - z) + 40 * 0.01)) <= 1e-12);
  }
}

TEST_CASE("concentric Carol inequality") {
  GameParams p = params2(0.1, false);
  p.n_rounds = 10;
  std::vector<VecN> radial(10, VecN{1.0, 0.0});
  const Trajectory out = play_concentric_carol(VecN{1.0, 0.0}, VecN{0.0, 0.0}, p, radial);
  CHECK(norm(out.positions.back()) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(norm2(out.positions.back()) > 1.0 + 10 * 0.01);

  std::vector<VecN> tangent(10, VecN{0.0, 1.0});
  GameParams p1 = p;
  p1.n_rounds = 1;
  const Trajectory one = play_concentric_carol(VecN{1.0, 0.0}, VecN{0.0, 0.0}, p1, tangent);
  CHECK(norm2(one.positions.back()) == doctest::Approx(1.01).epsilon(1e-12));

  std::mt19937_64 rng(13);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    std::vector<VecN> dirs(10);
    for (auto& d : dirs) d = normalized(VecN{n(rng), n(rng)});
    const Trajectory r = play_concentric_carol(VecN{0.2, 0.9}, VecN{0.0, 0.0}, p, dirs);
    for (std::size_t k = 0; k < r.positions.size(); ++k) {
      CHECK(norm2(r.positions[k]) >= norm2(VecN{0.2, 0.9}) + k * 0.01 - 1e-12);
    }
  }
}

TEST_CASE("segment strategy on the two-ball axis") {
  const ObstacleSpec k(2, {Primitive::ball(VecN{-2.0, 0.0}, 1.0), Primitive::ball(VecN{2.0, 0.0}, 1.0)});
  const EnlargedObstacle e(k, 0.1);
  GameParams p = params2(0.1, false);
  const VecN a{-2.0, 0.0}, b{2.0, 0.0};
  const int bound = static_cast<int>(std::ceil(4.0 / 0.1 - 1e-9));
  p.n_rounds = bound;
  for (int sgn : {1, -1}) {
    for (int i = -20; i <= 20; ++i) {
      const std::vector<int> signs(static_cast<std::size_t>(bound), sgn);
      const Trajectory tr = play_segment_paul(VecN{0.1 * i, 0.0}, a, b, e, p, signs);
      REQUIRE_FALSE(tr.choices.empty());
      CHECK(tr.choices.back().stopped);
      CHECK(e.psi_eps(tr.positions.back()) > 0.0);
      CHECK(tr.positions.size() - 1 <= static_cast<std::size_t>(bound));
    }
  }
  const Trajectory home = play_segment_paul(VecN{1.9, 0.0}, a, b, e, p, {});
  CHECK(home.positions.size() == 1);
  CHECK(home.choices.front().stopped);

  std::vector<int> alternating(static_cast<std::size_t>(bound));
  for (std::size_t i = 0; i < alternating.size(); ++i) alternating[i] = i % 2 == 0 ? 1 : -1;
  const Trajectory osc = play_segment_paul(VecN{0.0, 0.0}, a, b, e, p, alternating);
  for (const auto& x : osc.positions) {
    CHECK(point_segment_distance(x, a, b) < 1e-12);
    CHECK(std::abs(x[0]) <= 0.1 + 1e-12);
  }
  CHECK_THROWS_AS(play_segment_paul(VecN{0.0, 0.5}, a, b, e, p, alternating), PreconditionError);
}
