#include "mincurv/properties.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "mincurv/curvature_operator.hpp"
#include "mincurv/game_engine.hpp"
#include "mincurv/pde_solver.hpp"

namespace mincurv {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

VecN random_vec(Rng& rng, int dim, double lo, double hi) {
  VecN v = VecN::zeros(dim);
  for (int a = 0; a < dim; ++a) v[a] = uniform(rng, lo, hi);
  return v;
}

// Gradient with a random magnitude in [1e-3, 10] and random direction.
VecN random_gradient(Rng& rng, int dim) {
  VecN v = VecN::zeros(dim);
  std::normal_distribution<double> g;
  do {
    for (int a = 0; a < dim; ++a) v[a] = g(rng);
  } while (norm(v) < 1e-6);
  return normalized(v) * std::pow(10.0, uniform(rng, -3.0, 1.0));
}

SymMatrixN random_sym(Rng& rng, int dim, double scale = 2.0) {
  SymMatrixN m = SymMatrixN::zeros(dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j) m.set(i, j, uniform(rng, -scale, scale));
  }
  return m;
}

SymMatrixN random_psd(Rng& rng, int dim) {
  SymMatrixN m = SymMatrixN::zeros(dim);
  for (int k = 0; k < dim; ++k) m += SymMatrixN::outer(random_vec(rng, dim, -1.0, 1.0));
  return m;
}

// Orthonormal basis of p-perp by Gram-Schmidt against the coordinate axes.
std::vector<VecN> perp_basis(const VecN& p) {
  const int n = p.dim();
  std::vector<VecN> basis{normalized(p)};
  for (int a = 0; a < n && static_cast<int>(basis.size()) < n; ++a) {
    VecN e = VecN::unit(n, a);
    for (const auto& b : basis) e -= b * dot(e, b);
    if (norm(e) > 1e-6) basis.push_back(normalized(e));
  }
  basis.erase(basis.begin());
  return basis;
}

double brute_force_L(const VecN& p, const SymMatrixN& X, int samples) {
  const auto basis = perp_basis(p);
  if (basis.size() == 1) return -X.quad(basis[0]);
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < samples; ++k) {
    const double t = std::numbers::pi * k / samples;
    best = std::min(best, -X.quad(basis[0] * std::cos(t) + basis[1] * std::sin(t)));
  }
  return best;
}

template <class Fn>
PropertyResult sweep(const std::string& name, int trials, Rng& rng, Fn&& trial) {
  PropertyResult r;
  r.name = name;
  r.trials = trials;
  for (int t = 0; t < trials; ++t) {
    std::string detail;
    if (!trial(rng, t, detail)) {
      if (r.failures == 0) r.detail = "trial " + std::to_string(t) + ": " + detail;
      ++r.failures;
    }
  }
  return r;
}

std::string describe(const VecN& p, const SymMatrixN& X) {
  std::ostringstream os;
  os.precision(17);
  os << "p = " << p << ", X diag = (";
  for (int i = 0; i < X.dim(); ++i) os << (i ? ", " : "") << X(i, i);
  os << ")";
  return os.str();
}

GridSpec small_grid(int dim) {
  return dim == 2 ? GridSpec::from_bounds(VecN{-1.2, -1.2}, VecN{1.2, 1.2}, 0.1)
                  : GridSpec::from_bounds(VecN{-0.6, -0.6, -0.6}, VecN{0.6, 0.6, 0.6}, 0.1);
}

GridField random_field(Rng& rng, const GridSpec& g, double lo, double hi, double far) {
  std::vector<double> v(g.size());
  for (double& x : v) x = uniform(rng, lo, hi);
  return GridField(g, std::move(v), far);
}

GridField random_obstacle(Rng& rng, const GridSpec& g, bool sentinel) {
  std::vector<double> v(g.size());
  for (double& x : v) x = sentinel && uniform(rng, 0.0, 1.0) < 0.7 ? kNoObstacle : uniform(rng, -2.0, 0.5);
  return GridField(g, std::move(v), kNoObstacle);
}

// Smooth field: a few random plane waves plus a radial bump.
GridField smooth_field(Rng& rng, const GridSpec& g, double far) {
  const int n = g.dim;
  std::vector<VecN> k;
  std::vector<double> amp, phase;
  for (int i = 0; i < 3; ++i) {
    k.push_back(random_vec(rng, n, -3.0, 3.0));
    amp.push_back(uniform(rng, -0.5, 0.5));
    phase.push_back(uniform(rng, 0.0, 2.0 * std::numbers::pi));
  }
  const VecN c = random_vec(rng, n, -0.3, 0.3);
  return GridField::sample(g, far, [&](const VecN& x) {
    double s = 1.0 - norm(x - c);
    for (std::size_t i = 0; i < k.size(); ++i) s += amp[i] * std::sin(dot(k[i], x) + phase[i]);
    return s;
  });
}

int dim_of_trial(int t) { return t % 2 == 0 ? 2 : 3; }

}  // namespace

std::vector<PropertyResult> run_property_suites(int trials, std::uint64_t seed) {
  const int t_op = std::max(1, trials);
  const int t_brute = std::max(1, trials / 5);
  const int t_step = std::max(1, trials / 10);
  std::vector<PropertyResult> out;
  Rng rng(seed);

  out.push_back(sweep("operator.bounds", t_op, rng, [](Rng& r, int t, std::string& d) {
    const int n = dim_of_trial(t);
    const VecN p = random_gradient(r, n);
    const SymMatrixN X = random_sym(r, n);
    d = describe(p, X);
    return check_bounds(p, X);
  }));
  out.push_back(sweep("operator.ellipticity", t_op, rng, [](Rng& r, int t, std::string& d) {
    const int n = dim_of_trial(t);
    const VecN p = random_gradient(r, n);
    const SymMatrixN X = random_sym(r, n);
    const SymMatrixN Y = X + random_psd(r, n);
    d = describe(p, X);
    return check_elliptic(p, X, Y);
  }));
  out.push_back(sweep("operator.geometric", t_op, rng, [](Rng& r, int t, std::string& d) {
    const int n = dim_of_trial(t);
    const VecN p = random_gradient(r, n);
    const SymMatrixN X = random_sym(r, n);
    const double alpha = std::pow(10.0, uniform(r, -2.0, 2.0));
    const double sigma = uniform(r, -5.0, 5.0);
    d = describe(p, X);
    return check_geometric(p, X, alpha, sigma);
  }));
  out.push_back(sweep("operator.brute_force", t_brute, rng, [](Rng& r, int t, std::string& d) {
    const int n = dim_of_trial(t);
    const VecN p = random_gradient(r, n);
    const SymMatrixN X = random_sym(r, n);
    const double a = eval_L(p, X).value;
    const double b = brute_force_L(p, X, 100000);
    d = describe(p, X) + " L = " + std::to_string(a) + " brute = " + std::to_string(b);
    return std::abs(a - b) <= 1e-3;
  }));
  out.push_back(sweep("operator.planar_mean_equality", t_op, rng, [](Rng& r, int, std::string& d) {
    const VecN p = random_gradient(r, 2);
    const SymMatrixN X = random_sym(r, 2);
    const double thr = default_grad_threshold(X);
    const double a = eval_L(p, X, thr).value;
    const double b = mean_curvature_op(p, X, thr);
    d = describe(p, X);
    return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a));
  }));

  out.push_back(sweep("dpp.obstacle_dominance", t_step, rng, [](Rng& r, int t, std::string& d) {
    const GridSpec g = small_grid(dim_of_trial(t));
    GameParams gp;
    gp.dim = g.dim;
    gp.eps = uniform(r, 0.05, 0.3);
    gp.direction_count = g.dim == 2 ? 16 : 64;
    const GridField u = random_field(r, g, -1.0, 1.0, -1.0);
    const GridField psi = random_obstacle(r, g, true);
    const GridField next = dpp_step(u, psi, gp, DirectionSet::hemisphere(g.dim, gp.direction_count));
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (next.at(i) < psi.at(i)) {
        d = "node " + std::to_string(i);
        return false;
      }
    }
    return true;
  }));
  out.push_back(sweep("dpp.monotonicity", t_step, rng, [](Rng& r, int t, std::string& d) {
    const GridSpec g = small_grid(dim_of_trial(t));
    GameParams gp;
    gp.dim = g.dim;
    gp.eps = uniform(r, 0.05, 0.3);
    gp.direction_count = g.dim == 2 ? 16 : 64;
    const DirectionSet dirs = DirectionSet::hemisphere(g.dim, gp.direction_count);
    const GridField u = random_field(r, g, -1.0, 1.0, -1.0);
    std::vector<double> w(u.values().begin(), u.values().end());
    for (double& x : w) x += uniform(r, 0.0, 1.0) < 0.3 ? 0.0 : uniform(r, 0.0, 1.0);
    const GridField v(g, std::move(w), -1.0);
    const GridField psi = random_obstacle(r, g, true);
    const GridField nu = dpp_step(u, psi, gp, dirs);
    const GridField nv = dpp_step(v, psi, gp, dirs);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (nu.at(i) > nv.at(i)) {
        d = "node " + std::to_string(i);
        return false;
      }
    }
    return true;
  }));
  out.push_back(sweep("dpp.uniform_bound", t_step, rng, [](Rng& r, int t, std::string& d) {
    const GridSpec g = small_grid(dim_of_trial(t));
    GameParams gp;
    gp.dim = g.dim;
    gp.eps = uniform(r, 0.05, 0.3);
    gp.direction_count = g.dim == 2 ? 16 : 64;
    const DirectionSet dirs = DirectionSet::hemisphere(g.dim, gp.direction_count);
    GridField u = random_field(r, g, -1.0, 1.0, -1.0);
    const GridField psi = random_obstacle(r, g, false);
    const double bound = std::max(u.sup_abs(), psi.sup_abs());
    for (int k = 0; k < 3; ++k) {
      u = dpp_step(u, psi, gp, dirs);
      if (u.sup_abs() > bound) {
        d = "round " + std::to_string(k + 1);
        return false;
      }
    }
    return true;
  }));
  out.push_back(sweep("pde.monotonicity", t_step, rng, [](Rng& r, int t, std::string& d) {
    const GridSpec g = small_grid(dim_of_trial(t));
    const GridField u = smooth_field(r, g, -0.5);
    const GridField bump = smooth_field(r, g, 0.0);
    const double lift = std::max(0.0, -bump.min()) + uniform(r, 0.0, 0.2);
    std::vector<double> w(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) w[i] = u.at(i) + bump.at(i) + lift;
    const GridField v(g, std::move(w), -0.5);
    PdeParams pp;
    const GridField psi = no_obstacle_field(g);
    const GridField nu = pde_step(u, psi, pp);
    const GridField nv = pde_step(v, psi, pp);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (nu.at(i) > nv.at(i) + 1e-12) {
        d = "node " + std::to_string(i) + " excess " + std::to_string(nu.at(i) - nv.at(i));
        return false;
      }
    }
    return true;
  }));

  out.push_back(sweep("strategy.concentric_paul", t_op, rng, [](Rng& r, int t, std::string& d) {
    const int n = dim_of_trial(t);
    GameParams gp;
    gp.dim = n;
    gp.eps = uniform(r, 0.01, 0.3);
    const int rounds = static_cast<int>(uniform(r, 1.0, 50.0));
    gp.n_rounds = rounds;
    const VecN z = random_vec(r, n, -1.0, 1.0);
    VecN x0 = random_vec(r, n, -2.0, 2.0);
    if (distance(x0, z) < 1e-3) x0[0] += 0.5;
    std::vector<int> signs(static_cast<std::size_t>(rounds));
    for (int& s : signs) s = uniform(r, 0.0, 1.0) < 0.5 ? -1 : 1;
    const Trajectory tr = play_concentric_paul(x0, z, gp, signs);
    const double lhs = norm2(tr.positions.back() - z);
    const double rhs = norm2(x0 - z) + rounds * gp.eps * gp.eps;
    d = "|x_n - z|^2 = " + std::to_string(lhs) + " expected " + std::to_string(rhs);
    return std::abs(lhs - rhs) <= 1e-12;
  }));
  out.push_back(sweep("strategy.concentric_carol", t_op, rng, [](Rng& r, int t, std::string& d) {
    const int n = dim_of_trial(t);
    GameParams gp;
    gp.dim = n;
    gp.eps = uniform(r, 0.01, 0.3);
    const int rounds = static_cast<int>(uniform(r, 1.0, 50.0));
    gp.n_rounds = rounds;
    const VecN z = random_vec(r, n, -1.0, 1.0);
    VecN x0 = random_vec(r, n, -2.0, 2.0);
    if (distance(x0, z) < 1e-3) x0[0] += 0.5;
    std::vector<VecN> dirs;
    for (int k = 0; k < rounds; ++k) dirs.push_back(normalized(random_gradient(r, n)));
    const Trajectory tr = play_concentric_carol(x0, z, gp, dirs);
    const double lhs = norm2(tr.positions.back() - z);
    const double rhs = norm2(x0 - z) + rounds * gp.eps * gp.eps;
    d = "|x_n - z|^2 = " + std::to_string(lhs) + " bound " + std::to_string(rhs);
    return lhs >= rhs - 1e-12;
  }));
  return out;
}

}  // namespace mincurv
