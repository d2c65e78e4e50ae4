#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "calibra/holonomy.hpp"
#include "calibra/octonion.hpp"
#include "test_util.hpp"

using namespace calibra;
using namespace testutil;

namespace {

Octonion random_oct(std::mt19937_64& g) {
  std::normal_distribution<double> gauss;
  Octonion o;
  o.re = gauss(g);
  for (double& x : o.im) x = gauss(g);
  return o;
}

// Orthonormal m-tuple of octonions via Gram-Schmidt in R^8.
std::vector<Octonion> random_oct_frame(std::mt19937_64& g, int m) {
  OrientedPlane p = random_plane(g, 8, m);
  std::vector<Octonion> out;
  for (const Vec& v : p.basis) out.push_back(oct_from_r8(v));
  return out;
}

}  // namespace

TEST_CASE("cross7 spec examples") {
  CHECK(cross7(unit(7, 1), unit(7, 2)) == unit(7, 3));

  auto g = rng(100);
  for (int trial = 0; trial < 200; ++trial) {
    Vec u = random_vec(g, 7), v = random_vec(g, 7);
    CHECK(norm(cross7(u, u)) == 0.0);
    CHECK(std::abs(dot(cross7(u, v), u)) <= 1e-12 * (1 + norm(u) * norm(u) * norm(v)));
    CHECK(std::abs(dot(cross7(u, v), v)) <= 1e-12 * (1 + norm(v) * norm(v) * norm(u)));
  }
}

TEST_CASE("phi(u,v,w) = <u x v, w> = eval agreement") {
  Form phi = g2_phi();
  auto g = rng(101);
  for (int trial = 0; trial < 300; ++trial) {
    Vec u = random_vec(g, 7), v = random_vec(g, 7), w = random_vec(g, 7);
    double via_cross = dot(cross7(u, v), w);
    double via_eval = eval(phi, {u, v, w});
    CHECK(via_cross == doctest::Approx(via_eval).epsilon(1e-14));
  }
}

TEST_CASE("octonion product: identity, units, norm") {
  Octonion one = Octonion::one();
  auto g = rng(102);
  for (int trial = 0; trial < 100; ++trial) {
    Octonion a = random_oct(g);
    Octonion left = oct_mul(one, a), right = oct_mul(a, one);
    CHECK(oct_norm(left - a) <= 1e-15 * oct_norm(a));
    CHECK(oct_norm(right - a) <= 1e-15 * oct_norm(a));
  }

  // e1 e1 = -1; e1 e2 = e3
  Octonion e1 = Octonion::unit_im(1), e2 = Octonion::unit_im(2);
  Octonion sq = oct_mul(e1, e1);
  CHECK(sq.re == -1.0);
  CHECK(oct_norm(sq - Octonion{-1.0, {}}) == 0.0);
  CHECK(oct_norm(oct_mul(e1, e2) - Octonion::unit_im(3)) == 0.0);

  // normed algebra: |ab| = |a||b|
  for (int trial = 0; trial < 300; ++trial) {
    Octonion a = random_oct(g), b = random_oct(g);
    CHECK(std::abs(oct_norm(oct_mul(a, b)) - oct_norm(a) * oct_norm(b)) <=
          1e-12 * (1 + oct_norm(a) * oct_norm(b)));
  }
}

TEST_CASE("quaternion subalgebra span{1,e1,e2,e3} is associative") {
  // all triples from the subalgebra associate exactly
  std::vector<Octonion> basis{Octonion::one(), Octonion::unit_im(1),
                              Octonion::unit_im(2), Octonion::unit_im(3)};
  for (const Octonion& a : basis)
    for (const Octonion& b : basis)
      for (const Octonion& c : basis) {
        Octonion lhs = oct_mul(a, oct_mul(b, c));
        Octonion rhs = oct_mul(oct_mul(a, b), c);
        CHECK(oct_norm(lhs - rhs) == 0.0);
      }

  // and the quaternion type reproduces the embedded product
  auto g = rng(103);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 50; ++trial) {
    Quaternion qa{gauss(g), {gauss(g), gauss(g), gauss(g)}};
    Quaternion qb{gauss(g), {gauss(g), gauss(g), gauss(g)}};
    Octonion oa{qa.re, {qa.im[0], qa.im[1], qa.im[2], 0, 0, 0, 0}};
    Octonion ob{qb.re, {qb.im[0], qb.im[1], qb.im[2], 0, 0, 0, 0}};
    Quaternion qc = quat_mul(qa, qb);
    Octonion oc = oct_mul(oa, ob);
    CHECK(std::abs(qc.re - oc.re) <= 1e-14);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(qc.im[i] - oc.im[i]) <= 1e-14);
    for (int i = 3; i < 7; ++i) CHECK(oc.im[i] == 0.0);
  }
}

TEST_CASE("associator: spec examples") {
  Vec zero = associator(unit(7, 1), unit(7, 2), unit(7, 3));
  CHECK(norm(zero) == 0.0);
  CHECK(norm(associator(unit(7, 1), unit(7, 2), unit(7, 4))) > 0.5);

  auto g = rng(104);
  for (int trial = 0; trial < 100; ++trial) {
    Vec u = random_vec(g, 7), v = random_vec(g, 7);
    CHECK(norm(associator(u, u, v)) <= 1e-12);
    // alternating: swapping two arguments flips the sign
    Vec w = random_vec(g, 7);
    Vec x1 = associator(u, v, w);
    Vec x2 = associator(v, u, w);
    CHECK(norm(x1 + x2) <= 1e-12 * (1 + norm(x1)));
  }
}

TEST_CASE("associative 3-frames: calibrated iff associator vanishes") {
  Form phi = g2_phi();
  auto g = rng(105);
  int calibrated_seen = 0, generic_seen = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<Vec> frame;
    if (trial % 2 == 0) {
      // calibrated by construction: {u, v, u x v}
      OrientedPlane uv = random_plane(g, 7, 2);
      frame = {uv.basis[0], uv.basis[1], cross7(uv.basis[0], uv.basis[1])};
    } else {
      frame = random_plane(g, 7, 3).basis;
    }
    double chi = norm(associator(frame[0], frame[1], frame[2]));
    double value = std::abs(eval(phi, frame));
    bool chi_zero = chi < 1e-10;
    bool calibrated = value > 1.0 - 1e-10;
    CHECK(chi_zero == calibrated);
    (chi_zero ? calibrated_seen : generic_seen)++;
  }
  CHECK(calibrated_seen >= 4900);  // the constructed half, minus any freak draws
  CHECK(generic_seen >= 4900);
}

TEST_CASE("triple cross: unit norm and alternation on orthonormal frames") {
  auto g = rng(106);
  for (int trial = 0; trial < 1000; ++trial) {
    auto f = random_oct_frame(g, 3);
    Octonion t = triple_cross(f[0], f[1], f[2]);
    CHECK(std::abs(oct_norm(t) - 1.0) <= 1e-12);
  }
  // x repeated kills it
  for (int trial = 0; trial < 50; ++trial) {
    Octonion x = random_oct(g), z = random_oct(g);
    CHECK(oct_norm(triple_cross(x, x, z)) <= 1e-13 * (1 + oct_norm(x) * oct_norm(z)));
    CHECK(oct_norm(triple_cross(x, z, x)) <= 1e-13 * (1 + oct_norm(x) * oct_norm(z)));
  }
  // consistency with Phi on the frame {1, e1, e2} paired with e3:
  // <triple_cross(1,e1,e2), e3> = Phi(1,e1,e2,e3) = 1
  Octonion t = triple_cross(Octonion::one(), Octonion::unit_im(1), Octonion::unit_im(2));
  CHECK(oct_inner(t, Octonion::unit_im(3)) == doctest::Approx(1.0).epsilon(1e-15));
  Octonion f4 = fourfold(Octonion::one(), Octonion::unit_im(1), Octonion::unit_im(2),
                         Octonion::unit_im(3));
  CHECK(f4.re == doctest::Approx(1.0).epsilon(1e-14));

  // <triple_cross(x,y,z), w> equals the Spin(7) form on random orthonormal frames
  Form big = spin7_phi();
  auto g2 = rng(1060);
  for (int trial = 0; trial < 300; ++trial) {
    OrientedPlane p = random_plane(g2, 8, 4);
    Octonion tc = triple_cross(oct_from_r8(p.basis[0]), oct_from_r8(p.basis[1]),
                               oct_from_r8(p.basis[2]));
    CHECK(oct_inner(tc, oct_from_r8(p.basis[3])) ==
          doctest::Approx(eval(big, p.basis)).epsilon(1e-12));
  }
}

TEST_CASE("fourfold: convention search and contract") {
  const FourfoldConvention& conv = fourfold_convention();
  CHECK(conv.matched_candidates >= 1);
  CHECK(conv.survivors >= 1);
  CHECK(!conv.description.empty());

  // frame {1, e1, e2, e3}: re = 1, im = 0
  Octonion v = fourfold(Octonion::one(), Octonion::unit_im(1), Octonion::unit_im(2),
                        Octonion::unit_im(3));
  CHECK(v.re == doctest::Approx(1.0).epsilon(1e-15));
  for (int i = 0; i < 7; ++i) CHECK(v.im[i] == doctest::Approx(0.0).epsilon(1e-15));

  // re equals the Spin(7) form on random orthonormal frames
  Form big = spin7_phi();
  auto g = rng(107);
  for (int trial = 0; trial < 500; ++trial) {
    OrientedPlane p = random_plane(g, 8, 4);
    Octonion f = fourfold(oct_from_r8(p.basis[0]), oct_from_r8(p.basis[1]),
                          oct_from_r8(p.basis[2]), oct_from_r8(p.basis[3]));
    CHECK(f.re == doctest::Approx(eval(big, p.basis)).epsilon(1e-12));
    double unit_gap = std::abs(f.re * f.re + f.im[0] * f.im[0] + f.im[1] * f.im[1] +
                               f.im[2] * f.im[2] + f.im[3] * f.im[3] +
                               f.im[4] * f.im[4] + f.im[5] * f.im[5] +
                               f.im[6] * f.im[6] - 1.0);
    CHECK(unit_gap <= 1e-12);
  }

  // repeated argument -> 0 when drawn from an orthonormal frame
  for (int trial = 0; trial < 100; ++trial) {
    auto f = random_oct_frame(g, 3);
    CHECK(oct_norm(fourfold(f[0], f[0], f[1], f[2])) <= 1e-12);
    CHECK(oct_norm(fourfold(f[0], f[1], f[0], f[2])) <= 1e-12);
    CHECK(oct_norm(fourfold(f[0], f[1], f[2], f[0])) <= 1e-12);
    CHECK(oct_norm(fourfold(f[0], f[1], f[1], f[2])) <= 1e-12);
    CHECK(oct_norm(fourfold(f[0], f[1], f[2], f[1])) <= 1e-12);
    CHECK(oct_norm(fourfold(f[0], f[1], f[2], f[2])) <= 1e-12);
  }
}

TEST_CASE("tau vanishes iff |Phi| = 1 on mixed 4-frames") {
  Form big = spin7_phi();
  auto g = rng(108);
  int cayley_seen = 0, generic_seen = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<Octonion> frame;
    if (trial % 2 == 0) {
      // Cayley by construction: {x, y, z, triple_cross(x,y,z)}
      frame = random_oct_frame(g, 3);
      frame.push_back(triple_cross(frame[0], frame[1], frame[2]));
    } else {
      frame = random_oct_frame(g, 4);
    }
    std::vector<Vec> basis;
    for (const Octonion& o : frame) basis.push_back(oct_to_r8(o));
    double tau = tau_norm(frame[0], frame[1], frame[2], frame[3]);
    double value = std::abs(eval(big, basis));
    bool tau_zero = tau < 1e-10;
    bool calibrated = value > 1.0 - 1e-10;
    CHECK(tau_zero == calibrated);
    (tau_zero ? cayley_seen : generic_seen)++;
  }
  CHECK(cayley_seen >= 4900);
  CHECK(generic_seen >= 4900);
}
