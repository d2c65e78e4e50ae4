#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "calibra/calibrate.hpp"
#include "calibra/holonomy.hpp"
#include "calibra/planes.hpp"
#include "test_util.hpp"

using namespace calibra;
using namespace testutil;

namespace {

double spherical_distance(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  double d = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
  return std::acos(std::min(1.0, std::max(-1.0, d)));
}

std::vector<double> random_polygon_angles(std::mt19937_64& g, int n) {
  // characterising-angle ranges plus the polygon inequality
  std::uniform_real_distribution<double> u(0.15, M_PI / 2 - 0.1);
  for (;;) {
    std::vector<double> th(static_cast<std::size_t>(n - 1));
    for (double& t : th) t = u(g);
    std::sort(th.begin(), th.end());
    double lo = th.back();
    double sum_others = 0.0;
    for (double t : th) sum_others += t;
    double hi = std::min(M_PI - th.back(), sum_others);
    if (hi <= lo + 0.05) continue;
    std::uniform_real_distribution<double> last(lo + 0.01, hi - 0.01);
    th.push_back(last(g));
    return th;
  }
}

}  // namespace

TEST_CASE("comass: decomposable unit form") {
  Form dx12 = Form::make(4, 2, {{{1, 2}, 1.0}});
  ComassReport rep = comass(dx12, 60, 1);
  CHECK(rep.value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rep.converged_fraction > 0.9);
  // the argmax plane is span{e1,e2} with positive orientation
  OrientedPlane e12 = OrientedPlane::from_orthonormal(4, {unit(4, 1), unit(4, 2)});
  std::vector<double> angles = principal_angles(rep.argmax, e12);
  CHECK(angles.back() <= 1e-5);
  CHECK(eval(dx12, rep.argmax.basis) == doctest::Approx(1.0).epsilon(1e-9));

  // report value matches a direct re-evaluation
  CHECK(std::abs(rep.value - eval(dx12, rep.argmax.basis)) <= 1e-10);
}

TEST_CASE("comass: random decomposable forms have comass 1") {
  auto g = rng(300);
  for (int trial = 0; trial < 5; ++trial) {
    int n = 4 + static_cast<int>(g() % 3);
    int k = 2 + static_cast<int>(g() % 2);
    OrientedPlane p = random_plane(g, n, k);
    // build the unit decomposable form dual to p by wedging its basis covectors
    Form acc = Form::make(n, 0, {{{}, 1.0}});
    for (const Vec& b : p.basis) {
      std::vector<std::pair<MultiIndex, double>> terms;
      for (int i = 1; i <= n; ++i) terms.push_back({{i}, b[static_cast<std::size_t>(i - 1)]});
      acc = wedge(acc, Form::make(n, 1, terms));
    }
    ComassReport rep = comass(acc, 60, 17 + static_cast<std::uint64_t>(trial));
    CHECK(rep.value == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("comass: structure forms have comass 1") {
  // moderate start counts here; the acceptance suite runs the full 1000
  ComassReport phi = comass(g2_phi(), 150, 2);
  CHECK(phi.value == doctest::Approx(1.0).epsilon(1e-6));

  Form omega3 = kahler_form(3);
  ComassReport w2 = comass(0.5 * wedge(omega3, omega3), 150, 3);
  CHECK(w2.value == doctest::Approx(1.0).epsilon(1e-6));
  // the argmax is a complex plane: kahler angles all zero
  std::vector<double> ka = kahler_angles(w2.argmax);
  for (double t : ka) CHECK(t <= 1e-4);

  CHECK_THROWS_AS(comass(Form::make(3, 0, {{{}, 1.0}}), 10, 0), DegreeZero);
}

TEST_CASE("comass: determinism across thread counts") {
  Form sphi = g2_star_phi();
  ComassReport a = comass(sphi, 40, 9, 1);
  ComassReport b = comass(sphi, 40, 9, 4);
  CHECK(a.value == b.value);
  CHECK(a.converged_fraction == b.converged_fraction);
  for (int i = 0; i < a.argmax.k; ++i)
    for (int j = 0; j < a.argmax.n; ++j)
      CHECK(a.argmax.basis[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] ==
            b.argmax.basis[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
}

TEST_CASE("torus_form_max: spec examples") {
  // all u_j = i reproduces Re Upsilon, comass 1
  for (int n = 1; n <= 4; ++n) {
    std::vector<std::array<double, 3>> u(static_cast<std::size_t>(n),
                                         std::array<double, 3>{1.0, 0.0, 0.0});
    CHECK(torus_form_max(u) == doctest::Approx(1.0).epsilon(1e-9));
  }

  // n = 1: any unit u gives max 1
  auto g = rng(301);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 10; ++trial) {
    std::array<double, 3> u{gauss(g), gauss(g), gauss(g)};
    double len = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
    for (double& x : u) x /= len;
    CHECK(torus_form_max({u}) == doctest::Approx(1.0).epsilon(1e-9));
  }

  CHECK_THROWS_AS(torus_form_max(std::vector<std::array<double, 3>>(
                      5, std::array<double, 3>{1, 0, 0})),
                  UnsupportedDim);
}

TEST_CASE("spherical polygon: spec examples") {
  // octant triangle: pairwise orthogonal unit vectors
  auto w = spherical_polygon({M_PI / 2, M_PI / 2, M_PI / 2});
  for (int j = 0; j < 3; ++j) {
    double d = spherical_distance(w[static_cast<std::size_t>(j)],
                                  w[static_cast<std::size_t>((j + 1) % 3)]);
    CHECK(d == doctest::Approx(M_PI / 2).epsilon(1e-10));
  }
  // w_1 is rotated to the pole
  CHECK(w[0][2] == doctest::Approx(1.0).epsilon(1e-12));

  // digon: two points at distance t
  auto d2 = spherical_polygon({0.8, 0.8});
  CHECK(spherical_distance(d2[0], d2[1]) == doctest::Approx(0.8).epsilon(1e-9));

  // degenerate boundary case: great-circle fallback
  auto d3 = spherical_polygon({M_PI / 3, M_PI / 3, 2 * M_PI / 3});
  CHECK(spherical_distance(d3[0], d3[1]) == doctest::Approx(M_PI / 3).epsilon(1e-10));
  CHECK(spherical_distance(d3[1], d3[2]) == doctest::Approx(M_PI / 3).epsilon(1e-10));
  CHECK(spherical_distance(d3[2], d3[0]) == doctest::Approx(2 * M_PI / 3).epsilon(1e-10));

  CHECK_THROWS_AS(spherical_polygon({0.2, 0.2, 1.9}), PolygonInfeasible);
  CHECK_THROWS_AS(spherical_polygon({0.5}), PolygonInfeasible);
  CHECK_THROWS_AS(spherical_polygon({0.5, 0.5, -0.1}), PolygonInfeasible);

  // random admissible side lists reproduce their distances
  auto g = rng(302);
  for (int n = 3; n <= 4; ++n) {
    for (int trial = 0; trial < 60; ++trial) {
      std::vector<double> th = random_polygon_angles(g, n);
      auto pts = spherical_polygon(th);
      for (int j = 0; j < n; ++j) {
        double d = spherical_distance(pts[static_cast<std::size_t>(j)],
                                      pts[static_cast<std::size_t>((j + 1) % n)]);
        CHECK(d == doctest::Approx(th[static_cast<std::size_t>(j)]).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("nance witness: construction and calibration") {
  auto g = rng(303);
  for (int n = 3; n <= 4; ++n) {
    for (int trial = 0; trial < 40; ++trial) {
      std::vector<double> th = random_polygon_angles(g, n);
      NanceWitness wit = nance_witness(th);

      // telescoping product has real part 1
      Quaternion prod{1.0, {}};
      for (int j = 0; j < n; ++j) {
        double c = std::cos(th[static_cast<std::size_t>(j)]);
        double s = std::sin(th[static_cast<std::size_t>(j)]);
        const auto& u = wit.u[static_cast<std::size_t>(j)];
        prod = quat_mul(prod, Quaternion{c, {s * u[0], s * u[1], s * u[2]}});
      }
      CHECK(prod.re == doctest::Approx(1.0).epsilon(1e-9));

      // eta calibrates both planes
      OrientedPlane rn = slag_plane(std::vector<double>(static_cast<std::size_t>(n), 0.0));
      OrientedPlane pt = slag_plane(th);
      CHECK(eval(wit.eta, rn.basis) == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(eval(wit.eta, pt.basis) == doctest::Approx(1.0).epsilon(1e-9));

      // the torus form built on the witness u is a calibration
      CHECK(torus_form_max(wit.u) <= 1.0 + 1e-6);

      // polygon distances match the angles
      for (int j = 0; j < n; ++j) {
        double d = spherical_distance(wit.polygon[static_cast<std::size_t>(j)],
                                      wit.polygon[static_cast<std::size_t>((j + 1) % n)]);
        CHECK(d == doctest::Approx(th[static_cast<std::size_t>(j)]).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("nance witness: all-u = i reproduces Re Upsilon") {
  // th = (pi/2, pi/2, pi/2): the octant triangle construction does not give
  // u_j = i, so build the great-circle configuration directly: points on the
  // circle through the poles of the i-axis traversed so that
  // -(w_j x w_{j+1}) = i; then eta must equal Re Upsilon on C^3.
  // The witness construction fixes w_1 = pole = (0,0,1); walking along the
  // great circle in the y-z plane gives w_j x w_{j+1} = -(1,0,0) sin(step).
  // nance_witness reproduces this for the equal-angle triangle whose polygon
  // happens to be planar: th = (2pi/3, 2pi/3, 2pi/3).
  std::vector<double> th(3, 2 * M_PI / 3);
  NanceWitness wit = nance_witness(th);
  // verify eta is Re(e^{-i phase} Upsilon) for SOME rotation of the u-axis:
  // the telescoping and calibration identities pin eta on both planes
  OrientedPlane rn = slag_plane({0, 0, 0});
  OrientedPlane pt = slag_plane(th);
  CHECK(eval(wit.eta, rn.basis) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(eval(wit.eta, pt.basis) == doctest::Approx(1.0).epsilon(1e-9));
  // all u_j agree (single great circle) => the form is Re Upsilon in rotated
  // quaternion coordinates; rotating u_j -> i maps eta -> Re Upsilon exactly
  for (int j = 1; j < 3; ++j) {
    CHECK(wit.u[0][0] == doctest::Approx(wit.u[static_cast<std::size_t>(j)][0]).epsilon(1e-9));
    CHECK(wit.u[0][1] == doctest::Approx(wit.u[static_cast<std::size_t>(j)][1]).epsilon(1e-9));
    CHECK(wit.u[0][2] == doctest::Approx(wit.u[static_cast<std::size_t>(j)][2]).epsilon(1e-9));
  }
  // construct eta with u_j = i directly and compare to Re Upsilon
  NanceWitness manual;
  // build from the same angles but force u = i: Re prod (cos + sin i) over
  // the subsets is exactly the Re Upsilon expansion
  std::vector<std::pair<MultiIndex, double>> terms;
  for (int mask = 0; mask < 8; ++mask) {
    Quaternion q{1.0, {}};
    MultiIndex idx(3);
    for (int j = 0; j < 3; ++j) {
      if ((mask >> j) & 1) {
        q = quat_mul(q, Quaternion{0.0, {1.0, 0.0, 0.0}});
        idx[static_cast<std::size_t>(j)] = 2 * j + 2;
      } else {
        idx[static_cast<std::size_t>(j)] = 2 * j + 1;
      }
    }
    if (q.re != 0.0) terms.emplace_back(idx, q.re);
  }
  Form eta_i = Form::make(6, 3, terms);
  CHECK(eta_i.max_abs_diff(upsilon_real(3)) <= 1e-14);
}

TEST_CASE("angle theorem: lines in the plane are never minimizing") {
  auto g = rng(304);
  std::uniform_real_distribution<double> u(0.05, M_PI - 0.05);
  for (int trial = 0; trial < 50; ++trial) {
    double alpha = u(g);
    OrientedPlane p = OrientedPlane::from_orthonormal(2, {Vec{1.0, 0.0}});
    OrientedPlane q = OrientedPlane::from_orthonormal(
        2, {Vec{std::cos(alpha), std::sin(alpha)}});
    AngleReport rep = angle_theorem(p, q, false);
    CHECK_FALSE(rep.minimizing);
    CHECK(rep.psi_sum == doctest::Approx(M_PI - rep.theta[0]).epsilon(1e-9));
    CHECK(rep.psi_sum < M_PI);
  }
}

TEST_CASE("angle theorem: slag boundary pairs") {
  auto g = rng(305);
  Form re3 = upsilon_real(3);
  for (int trial = 0; trial < 25; ++trial) {
    // angles in (0,pi) summing to pi
    std::uniform_real_distribution<double> u(0.25, 1.25);
    double t1 = u(g), t2 = u(g), t3 = M_PI - t1 - t2;
    if (t3 <= 0.25 || t3 >= M_PI - 0.05) continue;
    std::vector<double> th{t1, t2, t3};
    OrientedPlane p = slag_plane({0, 0, 0});
    OrientedPlane q = slag_plane(th);
    // orient Q so that the union is calibrated by Re Upsilon
    if (eval(re3, q.basis) < 0.0) q = reverse_orientation(q);
    AngleReport rep = angle_theorem(p, q, true);
    CHECK(rep.minimizing);
    CHECK(rep.boundary);
    CHECK(std::abs(rep.psi_sum - M_PI) <= 1e-9);
    if (rep.witness) {
      CHECK(torus_form_max(rep.witness->u) <= 1.0 + 1e-6);
    }
  }

  // orthogonal pair (R^2, J R^2) in R^4: psi = (pi/2, pi/2), minimizing
  OrientedPlane p2 = OrientedPlane::from_orthonormal(4, {unit(4, 1), unit(4, 3)});
  OrientedPlane q2 = OrientedPlane::from_orthonormal(4, {unit(4, 2), unit(4, 4)});
  AngleReport rep2 = angle_theorem(p2, q2, true);
  CHECK(rep2.psi[0] == doctest::Approx(M_PI / 2).epsilon(1e-12));
  CHECK(rep2.psi[1] == doctest::Approx(M_PI / 2).epsilon(1e-12));
  CHECK(rep2.minimizing);
  CHECK(rep2.boundary);
  REQUIRE(rep2.witness.has_value());
  CHECK(eval(rep2.witness->eta, slag_plane({0, 0}).basis) ==
        doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("angle theorem: witness certifies minimizing pairs") {
  auto g = rng(306);
  for (int n = 2; n <= 4; ++n) {
    for (int trial = 0; trial < 25; ++trial) {
      std::vector<double> th = random_polygon_angles(g, n);
      OrientedPlane p = slag_plane(std::vector<double>(static_cast<std::size_t>(n), 0.0));
      // minimizing pair: sum psi = sum_j<n th_j + pi - th_n >= pi by the
      // polygon inequality; the block construction realizes th directly
      std::vector<Vec> qb;
      for (int j = 0; j < n; ++j) {
        Vec v(static_cast<std::size_t>(2 * n), 0.0);
        v[static_cast<std::size_t>(2 * j)] = std::cos(th[static_cast<std::size_t>(j)]);
        v[static_cast<std::size_t>(2 * j + 1)] = std::sin(th[static_cast<std::size_t>(j)]);
        qb.push_back(std::move(v));
      }
      OrientedPlane q = OrientedPlane::from_orthonormal(2 * n, qb);
      AngleReport rep = angle_theorem(p, q, true);
      CHECK(rep.minimizing);
      REQUIRE(rep.witness.has_value());
      CHECK(torus_form_max(rep.witness->u) <= 1.0 + 1e-6);
      CHECK(eval(rep.witness->eta, p.basis) == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(eval(rep.witness->eta, q.basis) == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("angle theorem: rotation invariance and transversality") {
  auto g = rng(307);
  // common rotation leaves the psi values unchanged
  for (int trial = 0; trial < 20; ++trial) {
    OrientedPlane p = random_plane(g, 6, 3), q = random_plane(g, 6, 3);
    AngleReport before = angle_theorem(p, q, false);
    // random rotation from orthonormalizing a gaussian matrix
    OrientedPlane rot = random_plane(g, 6, 6);
    auto apply = [&](const OrientedPlane& pl) {
      std::vector<Vec> basis;
      for (const Vec& b : pl.basis) {
        Vec v(6, 0.0);
        for (int i = 0; i < 6; ++i)
          for (int j = 0; j < 6; ++j)
            v[static_cast<std::size_t>(i)] += rot.basis[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * b[static_cast<std::size_t>(j)];
        basis.push_back(std::move(v));
      }
      return OrientedPlane::from_orthonormal(6, basis);
    };
    AngleReport after = angle_theorem(apply(p), apply(q), false);
    CHECK(before.minimizing == after.minimizing);
    for (int j = 0; j < 3; ++j)
      CHECK(before.psi[static_cast<std::size_t>(j)] ==
            doctest::Approx(after.psi[static_cast<std::size_t>(j)]).epsilon(1e-10));
  }

  // non-transverse pair rejected
  OrientedPlane p = OrientedPlane::from_orthonormal(4, {unit(4, 1), unit(4, 3)});
  Vec tilted(4, 0.0);
  tilted[1] = std::cos(0.4);
  tilted[3] = std::sin(0.4);
  OrientedPlane q = OrientedPlane::from_orthonormal(4, {unit(4, 1), tilted});
  CHECK_THROWS_AS(angle_theorem(p, q, false), NotTransverse);
}
