#include <doctest.h>

#include <cmath>
#include <random>

#include "mincurv/errors.hpp"
#include "mincurv/pde_solver.hpp"

using namespace mincurv;

namespace {

GridSpec box2(double half, double h) { return GridSpec::from_bounds(VecN{-half, -half}, VecN{half, half}, h); }

double radius_of(const GridField& u) {
  const double h = u.spec().spacing;
  return std::sqrt(static_cast<double>(positivity_set(u).count()) * h * h / M_PI);
}

}  // namespace

TEST_CASE("stable time step") {
  const GridSpec g2 = box2(1.0, 0.01);
  PdeParams p;
  CHECK(p.max_stable_dt(g2) == doctest::Approx(0.9 * 1e-4 / 2.0));
  const GridSpec g3 = GridSpec::from_bounds(VecN{0.0, 0.0, 0.0}, VecN{1.0, 1.0, 1.0}, 0.02);
  CHECK(p.max_stable_dt(g3) == doctest::Approx(0.9 * 4e-4 / 4.0));
  p.dt = 1e-6;
  CHECK(p.effective_dt(g2) == 1e-6);
  p.dt = 1.0;
  const GridField u = GridField::constant(g2, 1.0, -1.0);
  CHECK_THROWS_AS(pde_step(u, GridField::constant(g2, -1e30, -1e30), p), StabilityError);
}

TEST_CASE("pde_step keeps affine data and respects a dominating obstacle") {
  const GridSpec g = box2(1.0, 0.05);
  const GridField aff = GridField::sample(g, -5.0, [](const VecN& x) { return 0.3 * x[0] - 0.4 * x[1] + 0.2; });
  const GridField none = GridField::constant(g, -1e30, -1e30);
  const GridField next = pde_step(aff, none, PdeParams{});
  for (int i = 1; i + 1 < g.dims[0]; ++i) {
    for (int j = 1; j + 1 < g.dims[1]; ++j) CHECK(next.at(i, j) == doctest::Approx(aff.at(i, j)).epsilon(1e-14));
  }
  const GridField five = GridField::constant(g, 5.0, 5.0);
  const GridField top = pde_step(aff, five, PdeParams{});
  CHECK(top.min() == 5.0);
}

TEST_CASE("boundary ring holds max(psi, far)") {
  const GridSpec g = box2(1.0, 0.1);
  const GridField u = GridField::sample(g, -0.5, [](const VecN& x) { return 1.0 - norm2(x); });
  const GridField psi = GridField::sample(g, -1e30, [](const VecN& x) { return x[0] > 0.95 ? 0.0 : -1.0; });
  const GridField next = pde_step(u, psi, PdeParams{});
  CHECK(next.at(0, 5) == -0.5);
  CHECK(next.at(g.dims[0] - 1, 5) == 0.0);
}

TEST_CASE("one step moves a circle inward at speed 1/R") {
  const GridSpec g = box2(1.2, 0.01);
  const GridField u = GridField::sample(g, -0.5, [](const VecN& x) { return std::max(-0.5, 1.0 - norm(x)); });
  PdeParams p;
  p.t_end = 0.02;
  const auto snaps = run_pde(u, GridField::constant(g, -1e30, -1e30), p, 0.0);
  REQUIRE(snaps.size() >= 2);
  CHECK(snaps.back().time == doctest::Approx(0.02).epsilon(1e-12));
  const double r0 = radius_of(snaps.front().field);
  const double r1 = radius_of(snaps.back().field);
  // R' = -1/R at R = 1.
  CHECK(std::abs((r0 - r1) - 0.02) <= 10.0 * g.spacing);
  CHECK(r1 < r0);
}

TEST_CASE("monotone step map") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const GridSpec g = box2(1.0, 0.05);
  const GridField none = GridField::constant(g, -1e30, -1e30);
  for (int t = 0; t < 10; ++t) {
    const double a = u(rng), b = u(rng), c = u(rng);
    auto f = [&](const VecN& x) { return a * x[0] * x[0] + b * x[0] * x[1] + c * std::sin(3.0 * x[1]); };
    const GridField lo = GridField::sample(g, -1.0, f);
    const GridField hi = GridField::sample(g, -1.0, [&](const VecN& x) { return f(x) + 0.1 + 0.05 * x[0] * x[0]; });
    for (CurvatureKind kind : {CurvatureKind::Minimal, CurvatureKind::Mean}) {
      PdeParams p;
      p.kind = kind;
      const GridField nlo = pde_step(lo, none, p);
      const GridField nhi = pde_step(hi, none, p);
      for (std::size_t k = 0; k < g.size(); ++k) CHECK(nlo.at(k) <= nhi.at(k) + 1e-12);
    }
  }
}

TEST_CASE("solver lands on snapshot times and t_end") {
  const GridSpec g = box2(1.0, 0.05);
  const GridField u = GridField::sample(g, -0.5, [](const VecN& x) { return 0.8 - norm(x); });
  PdeParams p;
  p.t_end = 0.01;
  const auto snaps = run_pde(u, GridField::constant(g, -1e30, -1e30), p, 0.003);
  REQUIRE(snaps.size() == 5);
  CHECK(snaps[0].time == 0.0);
  CHECK(snaps[1].time == doctest::Approx(0.003).epsilon(1e-12));
  CHECK(snaps[3].time == doctest::Approx(0.009).epsilon(1e-12));
  CHECK(snaps[4].time == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("3D cylinder does not move under the minimal operator") {
  // A cylinder of radius 0.5 around the x3 axis has smallest principal curvature 0.
  const GridSpec g = GridSpec::from_bounds(VecN{-1.0, -1.0, -1.0}, VecN{1.0, 1.0, 1.0}, 0.05);
  const GridField u = GridField::sample(g, -0.5, [](const VecN& x) { return 0.5 - std::hypot(x[0], x[1]); });
  const GridField none = GridField::constant(g, -1e30, -1e30);
  PdeParams pmin;
  PdeParams pmean;
  pmean.kind = CurvatureKind::Mean;
  const GridField a = pde_step(u, none, pmin);
  const GridField b = pde_step(u, none, pmean);
  const int c = g.dims[0] / 2;
  const int i = c + 10;  // x1 = 0.5
  CHECK(std::abs(a.at(i, c, c) - u.at(i, c, c)) < 1e-12);
  const double dt = pmean.effective_dt(g);
  CHECK(b.at(i, c, c) - u.at(i, c, c) == doctest::Approx(-dt / 0.5).epsilon(0.02));
}
