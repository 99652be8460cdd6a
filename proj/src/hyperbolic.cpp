#include "roundwalk/hyperbolic.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace roundwalk {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::complex<double> Isometry::apply(std::complex<double> z) const {
  return (a * z + b) / (c * z + d);
}

double Isometry::apply_boundary(double x) const {
  if (std::isinf(x)) return c == 0 ? kInf : a / c;
  const double denom = c * x + d;
  if (denom == 0) return kInf;
  return (a * x + b) / denom;
}

Isometry Isometry::translation(double length) {
  const double e = std::exp(length / 2.0);
  return {e, 0, 0, 1.0 / e};
}

bool is_hyperbolic(const Isometry& g) {
  return std::abs(g.trace()) > 2.0 + kHyperbolicTol;
}

double translation_length(const Isometry& g) {
  const double t = std::abs(g.trace());
  if (t <= 2.0 + kHyperbolicTol) throw std::invalid_argument("not hyperbolic");
  return 2.0 * std::acosh(t / 2.0);
}

GeodesicAxis axis(const Isometry& g) {
  if (!is_hyperbolic(g)) throw std::invalid_argument("not hyperbolic");
  // fixed points of (az+b)/(cz+d): c x^2 + (d-a) x - b = 0
  double x1, x2;
  if (std::abs(g.c) < 1e-300) {
    x1 = kInf;
    x2 = g.b / (g.d - g.a);
  } else {
    const double disc = (g.d - g.a) * (g.d - g.a) + 4.0 * g.b * g.c;
    const double sq = std::sqrt(std::max(disc, 0.0));
    // numerically stable quadratic roots
    const double q = -0.5 * ((g.d - g.a) + std::copysign(sq, g.d - g.a));
    x1 = q / g.c;
    x2 = (q != 0.0) ? -g.b / q : (-(g.d - g.a) / g.c - x1);
  }
  // attracting iff |Moebius derivative| = 1/(cx+d)^2 < 1 there
  auto attracting = [&](double x) {
    if (std::isinf(x)) return std::abs(g.a) > std::abs(g.d);
    const double denom = g.c * x + g.d;
    return denom * denom > 1.0;
  };
  if (attracting(x1)) return {x1, x2};
  return {x2, x1};
}

namespace {

// Angle coordinate on the boundary circle: 2*atan(x) in (-pi, pi), with
// infinity at pi.  Monotone on R, so interleaving can be read off angles.
double boundary_angle(double x) {
  if (std::isinf(x)) return M_PI;
  return 2.0 * std::atan(x);
}

}  // namespace

bool axes_cross(const GeodesicAxis& x, const GeodesicAxis& y) {
  const double a = boundary_angle(x.attracting);
  const double b = boundary_angle(x.repelling);
  const double tol = 1e-11;
  auto inside = [&](double t) {
    // strictly inside the arc from min(a,b) to max(a,b)
    const double lo = std::min(a, b), hi = std::max(a, b);
    return t > lo + tol && t < hi - tol;
  };
  const double p = boundary_angle(y.attracting);
  const double q = boundary_angle(y.repelling);
  if (std::abs(p - a) < tol || std::abs(p - b) < tol || std::abs(q - a) < tol ||
      std::abs(q - b) < tol)
    return false;  // shared endpoint
  return inside(p) != inside(q);
}

std::pair<Isometry, Isometry> pants_generators(double l1, double l2, double l3) {
  if (!(l1 > 0) || !(l2 > 0) || !(l3 > 0))
    throw std::invalid_argument("pants boundary lengths must be positive");
  // Trace-normalized pants representation: trace X = 2cosh(l1/2),
  // trace Y = 2cosh(l2/2), trace XY = xi + 1/xi = -2cosh(l3/2) with
  // xi = -e^{l3/2}.  For x, y >= 2 and trace XY <= -2 this group is
  // discrete, free and purely hyperbolic, with the three boundary axes
  // pairwise disjoint.
  const double x = 2.0 * std::cosh(l1 / 2.0);
  const double y = 2.0 * std::cosh(l2 / 2.0);
  const double xi = -std::exp(l3 / 2.0);
  const Isometry gx{x, -1, 1, 0};
  const Isometry gy{0, xi, -1.0 / xi, y};
  return {gx, gy};
}

std::string word_to_string(const Word& w) {
  static const char* names[8] = {"a", "A", "b", "B", "c", "C", "d", "D"};
  std::string s;
  for (auto l : w) s += names[l];
  return s;
}

Isometry FuchsianGroup::evaluate(const Word& w) const {
  Isometry m = Isometry::identity();
  for (auto l : w) m = m * letter(l);
  return m;
}

const std::array<Word, 3>& cuff_words() {
  // c1 = a1, c2 ~ a2, c3 = a1^-1 b2 a2 b2^-1 (conjugacy class reps)
  static const std::array<Word, 3> words = {Word{0}, Word{4}, Word{1, 6, 4, 7}};
  return words;
}

namespace {

// Frame of a hyperbolic isometry: C maps the imaginary axis onto the axis
// of M with 0 -> repelling, inf -> attracting, so C^-1 M C = +-D(l).
Isometry axis_frame(const Isometry& m) {
  const GeodesicAxis ax = axis(m);
  const double p = ax.attracting, q = ax.repelling;
  if (std::isinf(p)) return {1, q, 0, 1};
  if (std::isinf(q)) return {p, -1, 1, 0};
  if (p > q) {
    const double s = std::sqrt(p - q);
    return {p / s, q / s, 1 / s, 1 / s};
  }
  const double s = std::sqrt(q - p);
  return {p / s, -q / s, 1 / s, -1 / s};
}

// Half-turn about i: maps the imaginary axis to itself reversing
// orientation, swapping the two sides.
const Isometry kHalfTurn{0, -1, 1, 0};

// Letter sequence of the surface relation [a1,b1][a2,b2].
constexpr int kRelSeq[8] = {0, 1, 0, 1, 2, 3, 2, 3};
constexpr bool kRelInv[8] = {false, false, true, true, false, false, true, true};

// Sum of cosh displacement of z under the given isometries; strictly
// convex on H^2, so gradient descent finds the global minimizer.
double displacement_energy(const std::vector<Isometry>& els, double x, double y) {
  double f = 0;
  for (const auto& g : els) {
    const std::complex<double> z(x, y);
    const std::complex<double> w = g.apply(z);
    f += 1.0 + std::norm(w - z) / (2.0 * y * w.imag());
  }
  return f;
}

// Conjugate the group so the generators -- and the partial products of the
// relation word -- displace the base point i as little as possible.  This
// keeps matrix entries small, which controls cancellation in the relation
// check: the commutator product collapses to the identity, and its
// floating-point error scales with the intermediate entry sizes.
void center_generators(std::array<Isometry, 4>& gens) {
  std::vector<Isometry> els(gens.begin(), gens.end());
  Isometry partial;
  for (int k = 0; k < 7; ++k) {
    Isometry m = gens[kRelSeq[k]];
    if (kRelInv[k]) m = m.inverse();
    partial = partial * m;
    els.push_back(partial);
  }
  double x = 0, y = 1;
  double step = 0.25;
  double f = displacement_energy(els, x, y);
  for (int it = 0; it < 600 && step > 1e-13; ++it) {
    // descend in (x, log y); numerical gradient
    const double h = 1e-6 * y;
    const double gx =
        (displacement_energy(els, x + h, y) - displacement_energy(els, x - h, y)) /
        (2 * h);
    const double gy = (displacement_energy(els, x, y * (1 + 1e-6)) -
                       displacement_energy(els, x, y * (1 - 1e-6))) /
                      (2e-6);
    const double gn = std::hypot(gx, gy);
    if (gn < 1e-13 * f) break;
    const double nx = x - step * y * gx / gn;
    const double ny = y * std::exp(-step * gy / gn);
    const double nf = displacement_energy(els, nx, ny);
    if (nf < f) {
      x = nx;
      y = ny;
      f = nf;
      step *= 1.3;
    } else {
      step *= 0.5;
    }
  }
  const double s = std::sqrt(y);
  const Isometry w{s, x / s, 0, 1 / s};  // i -> x + iy
  const Isometry wi = w.inverse();
  for (auto& g : gens) g = wi * g * w;
}

// Extended-precision 2x2 helpers for the relation check.  Double
// evaluation of the commutator product carries cancellation noise well
// above the true residual of the stored matrices, so the residual and the
// final correction step run in long double.
struct Mat2L {
  long double a, b, c, d;
};
Mat2L to_l(const Isometry& g) { return {g.a, g.b, g.c, g.d}; }
Mat2L mul(const Mat2L& x, const Mat2L& y) {
  return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c,
          x.c * y.b + x.d * y.d};
}
Mat2L inv(const Mat2L& x) {
  const long double det = x.a * x.d - x.b * x.c;
  return {x.d / det, -x.b / det, -x.c / det, x.a / det};
}
Mat2L relation_product(const std::array<Isometry, 4>& gens) {
  Mat2L p{1, 0, 0, 1};
  for (int k = 0; k < 8; ++k) {
    Mat2L m = to_l(gens[kRelSeq[k]]);
    if (kRelInv[k]) m = inv(m);
    p = mul(p, m);
  }
  return p;
}
long double residual_of(const Mat2L& p) {
  auto f = [&](long double s) {
    const long double a = p.a - s, d = p.d - s;
    return sqrtl(a * a + p.b * p.b + p.c * p.c + d * d);
  };
  return std::min(f(1.0L), f(-1.0L));
}

// Newton correction of b2: the construction satisfies the relation up to
// rounding of the stored doubles, amplified by the commutator's
// conditioning; a couple of least-squares steps push the true residual to
// the attainable floor.  The extra constraint row pins trace(a1^-1 b2 a2
// b2^-1) to 2 cosh(l3/2): the perturbation b2 -> a2^t b2 leaves the
// relation invariant but would drift the third cuff length.
void polish_relation(std::array<Isometry, 4>& gens, double l3) {
  for (int iter = 0; iter < 4; ++iter) {
    const Mat2L p = relation_product(gens);
    const long double s = (p.a + p.d > 0) ? 1.0L : -1.0L;
    const Mat2L g0 = to_l(gens[0]), g1 = to_l(gens[1]);
    const Mat2L a2 = to_l(gens[2]), b2 = to_l(gens[3]);
    const Mat2L c1 = mul(mul(g0, g1), mul(inv(g0), inv(g1)));
    const Mat2L lhs1 = mul(c1, mul(a2, b2));
    const Mat2L lhs2 = mul(c1, mul(mul(a2, b2), inv(a2)));
    const Mat2L rhs1 = mul(inv(a2), inv(b2)), rhs2 = inv(b2);
    const Mat2L a1i = inv(g0);
    const Mat2L c3 = mul(mul(a1i, b2), mul(a2, inv(b2)));
    const long double trc3 = c3.a + c3.d;
    const long double s3 = (trc3 > 0) ? 1.0L : -1.0L;

    long double m[5][3], r[5];
    r[0] = s - p.a;
    r[1] = -p.b;
    r[2] = -p.c;
    r[3] = s - p.d;
    r[4] = s3 * 2.0L * coshl(static_cast<long double>(l3) / 2.0L) - trc3;
    for (int k = 0; k < 3; ++k) {
      Mat2L e{0, 0, 0, 0};
      if (k == 0) {
        e.a = 1;
        e.d = -1;
      } else if (k == 1) {
        e.b = 1;
      } else {
        e.c = 1;
      }
      const Mat2L d1 = mul(mul(lhs1, e), rhs1);
      const Mat2L d2 = mul(mul(lhs2, e), rhs2);
      m[0][k] = d1.a - d2.a;
      m[1][k] = d1.b - d2.b;
      m[2][k] = d1.c - d2.c;
      m[3][k] = d1.d - d2.d;
      const Mat2L t1 = mul(mul(mul(a1i, b2), e), mul(a2, inv(b2)));
      const Mat2L t2 = mul(mul(mul(mul(a1i, b2), a2), e), inv(b2));
      m[4][k] = (t1.a + t1.d) - (t2.a + t2.d);
    }
    long double nrm[3][4];
    for (int i = 0; i < 3; ++i) {
      nrm[i][3] = 0;
      for (int j = 0; j < 3; ++j) nrm[i][j] = 0;
      for (int k = 0; k < 5; ++k) {
        for (int j = 0; j < 3; ++j) nrm[i][j] += m[k][i] * m[k][j];
        nrm[i][3] += m[k][i] * r[k];
      }
    }
    const long double reg = 1e-22L * (nrm[0][0] + nrm[1][1] + nrm[2][2]);
    for (int i = 0; i < 3; ++i) nrm[i][i] += reg;
    for (int col = 0; col < 3; ++col) {
      int piv = col;
      for (int i = col + 1; i < 3; ++i)
        if (fabsl(nrm[i][col]) > fabsl(nrm[piv][col])) piv = i;
      for (int j = 0; j < 4; ++j) std::swap(nrm[col][j], nrm[piv][j]);
      for (int i = 0; i < 3; ++i) {
        if (i == col) continue;
        const long double f = nrm[i][col] / nrm[col][col];
        for (int j = col; j < 4; ++j) nrm[i][j] -= f * nrm[col][j];
      }
    }
    const long double e0 = nrm[0][3] / nrm[0][0];
    const long double e1 = nrm[1][3] / nrm[1][1];
    const long double e2 = nrm[2][3] / nrm[2][2];
    const long double esize = sqrtl(2 * e0 * e0 + e1 * e1 + e2 * e2);
    if (!(esize < 1e-5)) break;  // singular or runaway solve: keep current b2
    Mat2L nb2 = mul(b2, Mat2L{1 + e0, e1, e2, 1 - e0});
    const long double sc = sqrtl(nb2.a * nb2.d - nb2.b * nb2.c);
    gens[3] = Isometry{static_cast<double>(nb2.a / sc), static_cast<double>(nb2.b / sc),
                       static_cast<double>(nb2.c / sc), static_cast<double>(nb2.d / sc)};
  }
}

}  // namespace

FuchsianGroup fn_to_group(const FNPoint& p) {
  for (double l : p.lengths)
    if (!(l > 0)) throw std::invalid_argument("FN lengths must be positive");

  const auto [gx, gy] = pants_generators(p.lengths[0], p.lengths[1], p.lengths[2]);
  // Pants P: boundaries A1, A2, A3 with A1 A2 A3 = I; the second pair of
  // pants Q is an identical copy, so its pre-gluing boundary frames
  // coincide with those of P.
  const Isometry a1g = gx;
  const Isometry a2g = gy;
  const Isometry a3g = (a1g * a2g).inverse();
  const std::array<Isometry, 3> cuff = {a1g, a2g, a3g};

  if (axes_cross(axis(a1g), axis(a2g)) || axes_cross(axis(a1g), axis(a3g)) ||
      axes_cross(axis(a2g), axis(a3g)))
    throw std::runtime_error("gluing failed");

  // Cuff frames with the twist origin at the foot of the common
  // perpendicular to the next cuff axis (the seam).  In frame coordinates
  // the other axis is a half circle over (alpha, beta) with alpha beta > 0,
  // and the perpendicular foot sits at height sqrt(alpha beta); anchoring
  // there keeps the zero-twist gluing geometrically tight, which the
  // relation check needs (matrix entries grow with the generators'
  // translation lengths).
  std::array<Isometry, 3> frame;
  for (int i = 0; i < 3; ++i) {
    Isometry c = axis_frame(cuff[i]);
    const Isometry ci = c.inverse();
    const GeodesicAxis other = axis(cuff[(i + 1) % 3]);
    const double alpha = ci.apply_boundary(other.attracting);
    const double beta = ci.apply_boundary(other.repelling);
    if (!(alpha * beta > 0)) throw std::runtime_error("gluing failed");
    frame[i] = c * Isometry::translation(0.5 * std::log(alpha * beta));
  }

  // Attaching map for cuff i: twist along the axis by tau_i, then a
  // half-turn so that the copy Q lands on the opposite side of the axis.
  // J_i(tau) = C_i T(tau) Rot C_i^-1 with C_i the axis frame of cuff i;
  // this makes J_i (cuff_i) J_i^-1 = cuff_i^-1 exact by construction.
  // The twist is reduced modulo a full twist (tau -> tau - k l_i): this
  // multiplies the stable letters by group elements, so it produces the
  // same Fuchsian group with much shorter generators, which keeps the
  // relation check well conditioned when a short cuff carries many turns.
  auto attach = [&](int i, double tau) {
    const double l = translation_length(cuff[i]);
    tau -= std::round(tau / l) * l;
    return frame[i] * Isometry::translation(tau) * kHalfTurn * frame[i].inverse();
  };
  const Isometry g1 = attach(0, p.twists[0]);
  // Stable letters carrying the Q-side cuff axes back onto the P-side:
  // U_i = J_i(tau_i) g1^-1, i = 2, 3, giving U_i B_i U_i^-1 = A_i^-1 with
  // B_i = g1 A_i g1^-1.
  const Isometry u2 = attach(1, p.twists[1]) * g1.inverse();
  const Isometry u3 = attach(2, p.twists[2]) * g1.inverse();

  // Standard generators: with R: U3 U2^-1 A2 U2 A1 U3^-1 = A1 A2, the set
  //   a1 = A1, b1 = U3, a2 = U3 U2^-1 A2^-1 U2 U3^-1, b2 = A1 U2 U3^-1
  // satisfies [a1,b1][a2,b2] = I.
  FuchsianGroup grp;
  grp.generators[0] = a1g;
  grp.generators[1] = u3;
  grp.generators[2] = u3 * u2.inverse() * a2g.inverse() * u2 * u3.inverse();
  grp.generators[3] = a1g * u2 * u3.inverse();
  center_generators(grp.generators);
  polish_relation(grp.generators, p.lengths[2]);

  grp.relation_residual =
      static_cast<double>(residual_of(relation_product(grp.generators)));
  if (grp.relation_residual > kRelationTol) throw std::runtime_error("gluing failed");
  for (const auto& g : grp.generators)
    if (!is_hyperbolic(g)) throw std::runtime_error("gluing failed");
  return grp;
}

}  // namespace roundwalk
