#include "calibra/calibrate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <random>
#include <thread>

#include "calibra/holonomy.hpp"
#include "calibra/planes.hpp"

namespace calibra {

namespace {

// ---------------------------------------------------------------------------
// comass: projected gradient ascent on orthonormal k-frames
// ---------------------------------------------------------------------------

using Frame = std::vector<Vec>;

double eval_frame(const Form& f, const Frame& frame) { return eval(f, frame); }

// d eval / d frame[c][i]: accumulate form-coefficient times det cofactors.
void eval_gradient(const Form& f, const Frame& frame, Frame& grad) {
  const int k = f.degree();
  for (auto& g : grad) std::fill(g.begin(), g.end(), 0.0);
  std::array<int, 8> idx{};
  std::array<double, 64> m{}, cof{};
  for (std::size_t r = 0; r < f.term_count(); ++r) {
    double c = f.coeff_at(r);
    if (c == 0.0) continue;
    MultiIndex mi = f.index_at(r);
    std::copy(mi.begin(), mi.end(), idx.begin());
    for (int row = 0; row < k; ++row)
      for (int col = 0; col < k; ++col)
        m[static_cast<std::size_t>(row * k + col)] =
            frame[static_cast<std::size_t>(col)][static_cast<std::size_t>(idx[static_cast<std::size_t>(row)] - 1)];
    detail::cofactor_small(m.data(), k, cof.data());
    for (int row = 0; row < k; ++row)
      for (int col = 0; col < k; ++col)
        grad[static_cast<std::size_t>(col)][static_cast<std::size_t>(idx[static_cast<std::size_t>(row)] - 1)] +=
            c * cof[static_cast<std::size_t>(row * k + col)];
  }
}

struct StartResult {
  double value = -1e300;
  Frame frame;
  bool converged = false;
};

StartResult run_start(const Form& f, std::uint64_t stream) {
  const int n = f.ambient_dim();
  const int k = f.degree();
  std::mt19937_64 rng(stream);
  std::normal_distribution<double> gauss;

  Frame frame;
  for (int attempt = 0; attempt < 16; ++attempt) {
    std::vector<Vec> raw(static_cast<std::size_t>(k), Vec(static_cast<std::size_t>(n)));
    for (auto& v : raw)
      for (auto& x : v) x = gauss(rng);
    try {
      frame = orthonormalize(raw).basis;
      break;
    } catch (const RankDeficient&) {
      continue;  // essentially impossible for Gaussian draws; retry
    }
  }
  if (frame.empty()) return {};

  StartResult res;
  res.frame = frame;
  res.value = eval_frame(f, frame);
  Frame grad(static_cast<std::size_t>(k), Vec(static_cast<std::size_t>(n)));
  double step = 0.1;
  for (int iter = 0; iter < 3000; ++iter) {
    if (step < 1e-12) {
      res.converged = true;
      break;
    }
    eval_gradient(f, res.frame, grad);
    Frame trial(static_cast<std::size_t>(k), Vec(static_cast<std::size_t>(n)));
    for (int c = 0; c < k; ++c)
      for (int i = 0; i < n; ++i)
        trial[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)] =
            res.frame[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)] +
            step * grad[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)];
    bool improved = false;
    try {
      Frame next = orthonormalize(trial).basis;
      double v = eval_frame(f, next);
      if (v > res.value) {
        res.value = v;
        res.frame = std::move(next);
        improved = true;
      }
    } catch (const RankDeficient&) {
      improved = false;
    }
    step *= improved ? 1.5 : 0.5;
  }
  return res;
}

bool frame_less(const Frame& a, const Frame& b) {
  for (std::size_t c = 0; c < a.size(); ++c)
    for (std::size_t i = 0; i < a[c].size(); ++i) {
      if (a[c][i] != b[c][i]) return a[c][i] < b[c][i];
    }
  return false;
}

}  // namespace

ComassReport comass(const Form& form, int starts, std::uint64_t seed, int threads) {
  if (form.degree() < 1)
    throw DegreeZero("comass: requires degree >= 1");
  if (starts < 1) throw IndexOutOfRange("comass: starts must be >= 1");
  if (form.degree() > form.ambient_dim())
    throw DegreeMismatch("comass: degree exceeds ambient dimension");

  std::vector<StartResult> results(static_cast<std::size_t>(starts));
  auto stream_of = [seed](int s) {
    // splitmix-style stream separation keeps starts independent of threading
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(s + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  };

  int nthreads = std::max(1, std::min(threads, starts));
  if (nthreads == 1) {
    for (int s = 0; s < starts; ++s)
      results[static_cast<std::size_t>(s)] = run_start(form, stream_of(s));
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int t = 0; t < nthreads; ++t) {
      pool.emplace_back([&] {
        for (;;) {
          int s = next.fetch_add(1);
          if (s >= starts) return;
          results[static_cast<std::size_t>(s)] = run_start(form, stream_of(s));
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  ComassReport report;
  report.starts = starts;
  int converged = 0;
  int best = -1;
  for (int s = 0; s < starts; ++s) {
    const StartResult& r = results[static_cast<std::size_t>(s)];
    if (r.converged) ++converged;
    if (r.frame.empty()) continue;
    if (best < 0 || r.value > results[static_cast<std::size_t>(best)].value ||
        (r.value == results[static_cast<std::size_t>(best)].value &&
         frame_less(r.frame, results[static_cast<std::size_t>(best)].frame))) {
      best = s;
    }
  }
  report.converged_fraction =
      static_cast<double>(converged) / static_cast<double>(starts);
  if (best >= 0) {
    const StartResult& r = results[static_cast<std::size_t>(best)];
    report.value = r.value;
    report.argmax = OrientedPlane{form.ambient_dim(), form.degree(), r.frame};
  }
  return report;
}

// ---------------------------------------------------------------------------
// torus forms
// ---------------------------------------------------------------------------

namespace {

Quaternion torus_factor(double theta, const std::array<double, 3>& u) {
  double c = std::cos(theta), s = std::sin(theta);
  return Quaternion{c, {s * u[0], s * u[1], s * u[2]}};
}

double torus_value(const std::vector<double>& theta,
                   const std::vector<std::array<double, 3>>& u) {
  Quaternion p{1.0, {}};
  for (std::size_t j = 0; j < u.size(); ++j)
    p = quat_mul(p, torus_factor(theta[j], u[j]));
  return p.re;
}

void torus_gradient(const std::vector<double>& theta,
                    const std::vector<std::array<double, 3>>& u,
                    std::vector<double>& grad) {
  const std::size_t n = u.size();
  std::vector<Quaternion> prefix(n + 1), suffix(n + 1);
  prefix[0] = Quaternion{1.0, {}};
  suffix[n] = Quaternion{1.0, {}};
  for (std::size_t j = 0; j < n; ++j)
    prefix[j + 1] = quat_mul(prefix[j], torus_factor(theta[j], u[j]));
  for (std::size_t j = n; j-- > 0;)
    suffix[j] = quat_mul(torus_factor(theta[j], u[j]), suffix[j + 1]);
  for (std::size_t j = 0; j < n; ++j) {
    double c = std::cos(theta[j]), s = std::sin(theta[j]);
    Quaternion d{-s, {c * u[j][0], c * u[j][1], c * u[j][2]}};
    grad[j] = quat_mul(prefix[j], quat_mul(d, suffix[j + 1])).re;
  }
}

}  // namespace

double torus_form_max(const std::vector<std::array<double, 3>>& u) {
  const int n = static_cast<int>(u.size());
  if (n < 1 || n > 4) throw UnsupportedDim("torus_form_max: n must be in [1,4]");
  for (const auto& v : u) {
    double len = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (std::abs(len - 1.0) > 1e-9)
      throw IndexOutOfRange("torus_form_max: u_j must be unit vectors");
  }

  const int pts = (n <= 3) ? 64 : 32;
  const double spacing = 2.0 * M_PI / pts;

  // Precompute the factor quaternions along each axis.
  std::vector<std::vector<Quaternion>> fac(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    fac[static_cast<std::size_t>(j)].resize(static_cast<std::size_t>(pts));
    for (int g = 0; g < pts; ++g)
      fac[static_cast<std::size_t>(j)][static_cast<std::size_t>(g)] =
          torus_factor(g * spacing, u[static_cast<std::size_t>(j)]);
  }

  struct Cell {
    double value;
    std::array<int, 4> g;
  };
  std::vector<Cell> top;  // best 10 grid cells
  auto offer = [&top](double value, int g0, int g1, int g2, int g3) {
    if (top.size() >= 10 && value <= top.back().value) return;
    Cell cell{value, {g0, g1, g2, g3}};
    if (top.size() < 10) {
      top.push_back(cell);
    } else {
      top.back() = cell;
    }
    std::sort(top.begin(), top.end(),
              [](const Cell& a, const Cell& b) { return a.value > b.value; });
  };

  // Explicit nested loops with running partial products; inner levels beyond
  // n collapse to a single pass.
  for (int i0 = 0; i0 < pts; ++i0) {
    Quaternion p0 = fac[0][static_cast<std::size_t>(i0)];
    if (n == 1) {
      offer(p0.re, i0, 0, 0, 0);
      continue;
    }
    for (int i1 = 0; i1 < pts; ++i1) {
      Quaternion p1 = quat_mul(p0, fac[1][static_cast<std::size_t>(i1)]);
      if (n == 2) {
        offer(p1.re, i0, i1, 0, 0);
        continue;
      }
      for (int i2 = 0; i2 < pts; ++i2) {
        Quaternion p2 = quat_mul(p1, fac[2][static_cast<std::size_t>(i2)]);
        if (n == 3) {
          offer(p2.re, i0, i1, i2, 0);
          continue;
        }
        for (int i3 = 0; i3 < pts; ++i3) {
          const Quaternion& f = fac[3][static_cast<std::size_t>(i3)];
          double re = p2.re * f.re - p2.im[0] * f.im[0] - p2.im[1] * f.im[1] -
                      p2.im[2] * f.im[2];
          offer(re, i0, i1, i2, i3);
        }
      }
    }
  }

  double best = -2.0;
  std::vector<double> theta(static_cast<std::size_t>(n)), grad(static_cast<std::size_t>(n));
  for (const Cell& cell : top) {
    for (int j = 0; j < n; ++j)
      theta[static_cast<std::size_t>(j)] = cell.g[static_cast<std::size_t>(j)] * spacing;
    double value = torus_value(theta, u);
    double step = spacing;
    for (int iter = 0; iter < 500 && step >= 1e-12; ++iter) {
      torus_gradient(theta, u, grad);
      std::vector<double> trial(theta);
      for (int j = 0; j < n; ++j) trial[static_cast<std::size_t>(j)] += step * grad[static_cast<std::size_t>(j)];
      double tv = torus_value(trial, u);
      if (tv > value) {
        value = tv;
        theta = trial;
        step *= 1.5;
      } else {
        step *= 0.5;
      }
    }
    best = std::max(best, value);
  }
  return best;
}

// ---------------------------------------------------------------------------
// spherical polygons and Nance witnesses
// ---------------------------------------------------------------------------

namespace {

using Point3 = std::array<double, 3>;

double clamp1(double x) { return std::min(1.0, std::max(-1.0, x)); }

double geodesic(const Point3& a, const Point3& b) {
  return std::acos(clamp1(a[0] * b[0] + a[1] * b[1] + a[2] * b[2]));
}

// Azimuthal increment for a side of geodesic length theta on the colatitude
// circle rho: cos(theta) = cos^2(rho) + sin^2(rho) cos(delta).
double side_increment(double theta, double rho) {
  double s2 = std::sin(rho) * std::sin(rho);
  double c2 = 1.0 - s2;
  return std::acos(clamp1((std::cos(theta) - c2) / s2));
}

// Rotate all points so the first becomes (0,0,1); deterministic rotation in
// the plane spanned by w_1 and the pole.
void rotate_first_to_pole(std::vector<Point3>& w) {
  const Point3& a = w.front();
  Point3 z{0.0, 0.0, 1.0};
  double c = clamp1(a[2]);
  if (c > 1.0 - 1e-15) return;
  Point3 axis;
  if (c < -1.0 + 1e-15) {
    axis = {1.0, 0.0, 0.0};  // antipodal: any half-turn; fix the x-axis
  } else {
    axis = {a[1] * z[2] - a[2] * z[1], a[2] * z[0] - a[0] * z[2],
            a[0] * z[1] - a[1] * z[0]};
    double len = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
    for (double& x : axis) x /= len;
  }
  double angle = std::acos(c);
  double ca = std::cos(angle), sa = std::sin(angle);
  for (Point3& p : w) {
    // Rodrigues rotation
    Point3 cross{axis[1] * p[2] - axis[2] * p[1], axis[2] * p[0] - axis[0] * p[2],
                 axis[0] * p[1] - axis[1] * p[0]};
    double ad = axis[0] * p[0] + axis[1] * p[1] + axis[2] * p[2];
    for (int i = 0; i < 3; ++i)
      p[static_cast<std::size_t>(i)] = p[static_cast<std::size_t>(i)] * ca +
                                       cross[static_cast<std::size_t>(i)] * sa +
                                       axis[static_cast<std::size_t>(i)] * ad * (1.0 - ca);
  }
}

}  // namespace

std::vector<Point3> spherical_polygon(const std::vector<double>& theta) {
  const int n = static_cast<int>(theta.size());
  if (n < 2) throw PolygonInfeasible("spherical_polygon: need at least 2 sides");
  double sum = 0.0, max_side = 0.0;
  std::size_t max_at = 0;
  for (std::size_t j = 0; j < theta.size(); ++j) {
    if (!(theta[j] > 0.0) || !(theta[j] < M_PI))
      throw PolygonInfeasible("spherical_polygon: sides must lie in (0, pi)");
    sum += theta[j];
    if (theta[j] > max_side) {
      max_side = theta[j];
      max_at = j;
    }
  }
  double rest = sum - max_side;
  if (max_side > rest + 1e-12)
    throw PolygonInfeasible("spherical_polygon: longest side exceeds the others");
  if (sum > 2.0 * M_PI + 1e-12)
    throw PolygonInfeasible("spherical_polygon: side sum exceeds 2 pi");

  std::vector<Point3> w(static_cast<std::size_t>(n));

  if (std::abs(max_side - rest) <= 1e-12) {
    // Degenerate polygon: path lies on a great circle and retraces the
    // longest side.  Walk in the x-z plane starting at the pole.
    double t = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
      w[j] = {std::sin(t), 0.0, std::cos(t)};
      t += (j == max_at) ? -theta[j] : theta[j];
    }
    return w;
  }

  // Circumscribed circle at colatitude rho.  Each side advances the azimuth
  // by its increment delta_j(rho); when the circle center falls outside the
  // polygon the longest side advances by 2 pi - delta instead.  Closure is
  // always: increments sum to 2 pi.
  const double rho_min = max_side / 2.0;
  auto closure = [&](double rho, bool reflex) {
    double acc = 0.0;
    for (std::size_t j = 0; j < theta.size(); ++j) {
      double d = side_increment(theta[j], rho);
      acc += (reflex && j == max_at) ? (2.0 * M_PI - d) : d;
    }
    return acc - 2.0 * M_PI;
  };

  double at_min = 0.0;  // convex closure at rho_min (longest side has delta = pi)
  for (std::size_t j = 0; j < theta.size(); ++j)
    at_min += (j == max_at) ? M_PI : side_increment(theta[j], rho_min);
  at_min -= 2.0 * M_PI;

  bool reflex = at_min < 0.0;
  double lo = rho_min, hi = M_PI / 2.0;
  double flo = closure(lo, reflex), fhi = closure(hi, reflex);
  if (!(flo <= 0.0) == !(fhi <= 0.0))
    throw ClosureFailed("spherical_polygon: bisection bracket invalid");
  for (int iter = 0; iter < 200; ++iter) {
    double mid = 0.5 * (lo + hi);
    double fm = closure(mid, reflex);
    if ((fm <= 0.0) == (flo <= 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  double rho = 0.5 * (lo + hi);

  double alpha = 0.0;
  double sr = std::sin(rho), cr = std::cos(rho);
  for (std::size_t j = 0; j < w.size(); ++j) {
    w[j] = {sr * std::cos(alpha), sr * std::sin(alpha), cr};
    double d = side_increment(theta[j], rho);
    alpha += (reflex && j == max_at) ? (2.0 * M_PI - d) : d;
  }

  rotate_first_to_pole(w);

  for (std::size_t j = 0; j < w.size(); ++j) {
    double d = geodesic(w[j], w[(j + 1) % w.size()]);
    if (std::abs(d - theta[j]) > 1e-10)
      throw ClosureFailed("spherical_polygon: side lengths failed verification");
  }
  return w;
}

NanceWitness nance_witness(const std::vector<double>& theta) {
  const int n = static_cast<int>(theta.size());
  NanceWitness witness;
  witness.polygon = spherical_polygon(theta);
  witness.u.resize(static_cast<std::size_t>(n));

  bool any_regular = false;
  for (double t : theta)
    if (std::sin(t) >= 1e-12) any_regular = true;
  if (!any_regular)
    throw DegenerateAngle("nance_witness: every side has vanishing sine");

  // u_j from w_j conj(w_{j+1}) = <w_j,w_{j+1}> - w_j x w_{j+1}; sides with
  // sin(theta_j) ~ 0 leave u_j unconstrained and inherit their neighbour
  // (or the quaternion i for j = 1).
  for (int j = 0; j < n; ++j) {
    double s = std::sin(theta[static_cast<std::size_t>(j)]);
    if (s < 1e-12) continue;
    const Point3& a = witness.polygon[static_cast<std::size_t>(j)];
    const Point3& b = witness.polygon[static_cast<std::size_t>((j + 1) % n)];
    Point3 cross{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
                 a[0] * b[1] - a[1] * b[0]};
    double len = std::sqrt(cross[0] * cross[0] + cross[1] * cross[1] +
                           cross[2] * cross[2]);
    if (len < 1e-13)
      throw DegenerateAngle("nance_witness: degenerate side direction");
    witness.u[static_cast<std::size_t>(j)] = {-cross[0] / len, -cross[1] / len,
                                              -cross[2] / len};
  }
  for (int j = 0; j < n; ++j) {
    if (std::sin(theta[static_cast<std::size_t>(j)]) >= 1e-12) continue;
    if (j > 0) {
      witness.u[static_cast<std::size_t>(j)] = witness.u[static_cast<std::size_t>(j - 1)];
    } else {
      witness.u[0] = {1.0, 0.0, 0.0};
    }
  }

  // eta = Re prod_j (dx_j + u_j dy_j): subset S picks the dy side, the
  // coefficient is Re of the ordered quaternion product of the u_j, j in S.
  std::vector<std::pair<MultiIndex, double>> terms;
  for (int mask = 0; mask < (1 << n); ++mask) {
    Quaternion q{1.0, {}};
    MultiIndex idx(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      if ((mask >> j) & 1) {
        const auto& uj = witness.u[static_cast<std::size_t>(j)];
        q = quat_mul(q, Quaternion{0.0, {uj[0], uj[1], uj[2]}});
        idx[static_cast<std::size_t>(j)] = 2 * j + 2;
      } else {
        idx[static_cast<std::size_t>(j)] = 2 * j + 1;
      }
    }
    if (q.re != 0.0) terms.emplace_back(idx, q.re);
  }
  witness.eta = Form::make(2 * n, n, terms);

  // Construction guarantees: telescoping product and calibration of both
  // planes.
  Quaternion prod{1.0, {}};
  for (int j = 0; j < n; ++j)
    prod = quat_mul(prod, torus_factor(theta[static_cast<std::size_t>(j)],
                                       witness.u[static_cast<std::size_t>(j)]));
  if (std::abs(prod.re - 1.0) > 1e-9)
    throw ClosureFailed("nance_witness: telescoping product is not 1");
  OrientedPlane rn = slag_plane(std::vector<double>(static_cast<std::size_t>(n), 0.0));
  OrientedPlane pt = slag_plane(theta);
  if (std::abs(eval(witness.eta, rn.basis) - 1.0) > 1e-9 ||
      std::abs(eval(witness.eta, pt.basis) - 1.0) > 1e-9)
    throw ClosureFailed("nance_witness: eta fails to calibrate the plane pair");
  return witness;
}

AngleReport angle_theorem(const OrientedPlane& p, const OrientedPlane& q,
                          bool want_witness) {
  AngleReport report;
  report.theta = characterising_angles(p, q);
  if (report.theta.front() <= 1e-8)
    throw NotTransverse("angle_theorem: planes share a direction");
  report.psi = characterising_angles(p, reverse_orientation(q));
  report.psi_sum = 0.0;
  for (double v : report.psi) report.psi_sum += v;
  report.minimizing = report.psi_sum >= M_PI - kAngleTol;
  report.boundary = std::abs(report.psi_sum - M_PI) <= kAngleTol;
  if (want_witness && report.minimizing) {
    try {
      report.witness = nance_witness(report.theta);
    } catch (const Error&) {
      report.witness.reset();  // reported without a witness
    }
  }
  return report;
}

}  // namespace calibra
