// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failures.  Every check uses an oracle independent of the code path under
// test (brute-force enumeration, closed forms, widened searches, or
// fundamental-domain sampling).

#include <Eigen/Dense>

#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "roundwalk/lattice_retract.hpp"
#include "roundwalk/serialize.hpp"
#include "roundwalk/surface.hpp"

using namespace roundwalk;

namespace {

int g_failures = 0;

struct Criterion {
  std::string label;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;

  explicit Criterion(std::string l) : label(std::move(l)) {}
  void require(bool cond, const std::string& why) {
    if (!cond && ok) {
      ok = false;
      detail = why;
    }
  }
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  void report() {
    std::printf("%s %s (%.1fs)%s%s\n", ok ? "PASS" : "FAIL", label.c_str(), seconds(),
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
  }
};

Lattice random_unimodular(std::mt19937& rng, int n) {
  std::normal_distribution<double> nd;
  for (;;) {
    Eigen::MatrixXd b(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) b(i, j) = nd(rng);
    const double det = b.determinant();
    if (std::abs(det) < 1e-3) continue;
    b /= std::pow(std::abs(det), 1.0 / n);
    return Lattice::from_basis(b);
  }
}

// Independent check: exhaustive integer enumeration over an LLL-reduced
// basis, then a rank count of the minimal vectors via SVD.
bool oracle_well_rounded(const Lattice& lat) {
  const Lattice red = reduce_basis(lat);
  const int n = red.dim();
  const int R = 4;
  std::vector<Eigen::VectorXd> mins;
  double best = HUGE_VAL;
  Eigen::VectorXi v = Eigen::VectorXi::Constant(n, -R);
  for (;;) {
    if (!v.isZero()) {
      Eigen::VectorXd x = red.basis * v.cast<double>();
      const double q = x.squaredNorm();
      if (q < best * (1 - 1e-9)) {
        best = q;
        mins.clear();
      }
      if (q <= best * (1 + 1e-9)) mins.push_back(x);
    }
    int i = 0;
    while (i < n && v(i) == R) v(i++) = -R;
    if (i == n) break;
    ++v(i);
  }
  Eigen::MatrixXd m(n, static_cast<int>(mins.size()));
  for (int j = 0; j < static_cast<int>(mins.size()); ++j) m.col(j) = mins[j];
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > 1e-9 * svd.singularValues()(0)) ++rank;
  return rank == n;
}

void criterion_1() {
  Criterion c("1. lattice retraction: 500 random lattices, oracle-verified well-rounded output");
  std::mt19937 rng(101);
  for (int trial = 0; trial < 500 && c.ok; ++trial) {
    const int n = 2 + trial % 4;
    const Lattice lat = random_unimodular(rng, n);
    const LatticeTrajectory tr = retract(lat);
    c.require(static_cast<int>(tr.events.size()) <= n - 1, "too many events");
    int prev_rank = 0;
    for (const auto& e : tr.events) {
      c.require(e.rank_after > e.rank_before, "rank not increasing at event");
      c.require(e.rank_before >= prev_rank, "ranks not monotone across events");
      prev_rank = e.rank_after;
    }
    for (const auto& s : tr.states)
      c.require(std::abs(std::abs(s.basis.determinant()) - 1) <= 1e-8, "unimodularity drift");
    c.require(oracle_well_rounded(tr.states.back()), "output not well-rounded per oracle");
  }
  c.require(c.seconds() <= 60, "over the 60s budget");
  c.report();
}

void criterion_2() {
  Criterion c("2. closed-form H^2 retraction matches the generic n=2 pipeline");
  std::mt19937 rng(202);
  std::uniform_real_distribution<double> ux(-0.5, 0.5), uy(0.0, 1.5);
  for (int trial = 0; trial < 200 && c.ok; ++trial) {
    const double x = ux(rng);
    const double y = std::sqrt(1 - x * x) + uy(rng);
    const std::complex<double> z(x, y);
    const std::complex<double> w = retract_h2(z);
    const std::complex<double> closed(x, std::sqrt(1 - x * x));
    c.require(std::abs(w - closed) <= 1e-9, "closed form mismatch");
    const LatticeTrajectory tr = retract(h2_point_to_lattice(z));
    const std::complex<double> w2 = retract_h2(lattice_to_h2_point(tr.states.back()));
    c.require(std::abs(w - w2) <= 1e-9, "generic pipeline mismatch");
  }
  for (int trial = 0; trial < 200 && c.ok; ++trial) {
    const double x = -0.5 + trial / 199.0;
    const std::complex<double> z(x, std::sqrt(1 - x * x));
    c.require(std::abs(retract_h2(z) - z) <= 1e-12, "boundary arc not fixed");
  }
  c.report();
}

void criterion_3() {
  Criterion c("3. diagonal lattices hit their closed-form catch times");
  for (double a : {0.3, 0.5, 0.9}) {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(2, 2);
    b(0, 0) = a;
    b(1, 1) = 1 / a;
    const LatticeTrajectory tr = retract(Lattice::from_basis(b));
    c.require(tr.events.size() == 1, "expected one event");
    if (!tr.events.empty())
      c.require(std::abs(tr.events[0].t_star - 1 / (a * a)) <= 1e-9, "2d catch time mismatch");
    c.require(lattice_distance(tr.states.back(),
                               Lattice::from_basis(Eigen::MatrixXd::Identity(2, 2))) <= 1e-9,
              "2d output is not Z^2");
  }
  for (double a : {0.5, 0.8}) {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(3, 3);
    b(0, 0) = a;
    b(1, 1) = a;
    b(2, 2) = 1 / (a * a);
    const LatticeTrajectory tr = retract(Lattice::from_basis(b));
    c.require(tr.events.size() == 1, "expected one event");
    if (!tr.events.empty())
      c.require(std::abs(tr.events[0].t_star - 1 / (a * a)) <= 1e-9, "3d catch time mismatch");
    c.require(lattice_distance(tr.states.back(),
                               Lattice::from_basis(Eigen::MatrixXd::Identity(3, 3))) <= 1e-9,
              "3d output is not Z^3");
  }
  c.report();
}

void criterion_4() {
  Criterion c("4. lattice retraction continuity under shrinking perturbations");
  std::mt19937 rng(404);
  std::normal_distribution<double> nd;
  const double deltas[3] = {1e-2, 1e-4, 1e-6};
  double mean[3] = {0, 0, 0};
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 2;
    const Lattice lat = random_unimodular(rng, n);
    const Lattice out = retract(lat).states.back();
    Eigen::MatrixXd e(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) e(i, j) = nd(rng);
    e /= Eigen::JacobiSVD<Eigen::MatrixXd>(e).singularValues()(0);
    for (int k = 0; k < 3; ++k) {
      Eigen::MatrixXd pb = (Eigen::MatrixXd::Identity(n, n) + deltas[k] * e) * lat.basis;
      pb /= std::pow(std::abs(pb.determinant()), 1.0 / n);
      mean[k] += lattice_distance(retract(Lattice::from_basis(pb)).states.back(), out);
    }
  }
  for (int k = 0; k < 3; ++k) mean[k] /= 100;
  c.require(mean[0] > mean[1] && mean[1] > mean[2], "mean distances not decreasing");
  c.require(mean[2] <= 1e-3, "distance at delta=1e-6 not near zero");
  c.report();
}

void criterion_5() {
  Criterion c("5. length spectrum agrees with the widened slow-oracle search");
  std::mt19937 rng(505);
  std::uniform_real_distribution<double> ul(0.6, 3.0), ut(-1.0, 1.0);
  SpectrumParams oracle;
  oracle.extra_words = 3;
  oracle.extra_pad = 1.0;
  for (int trial = 0; trial < 50 && c.ok; ++trial) {
    const FNPoint p{{ul(rng), ul(rng), ul(rng)}, {ut(rng), ut(rng), ut(rng)}};
    const FuchsianGroup g = fn_to_group(p);
    const auto fast = length_spectrum(g, 4.0);
    const auto slow = length_spectrum(g, 4.0, oracle);
    c.require(fast.size() == slow.size(), "class count differs from oracle");
    for (std::size_t i = 0; c.ok && i < fast.size(); ++i) {
      c.require(fast[i].word == slow[i].word, "class set differs from oracle");
      c.require(std::abs(fast[i].length - slow[i].length) <= 1e-9, "length differs from oracle");
    }
  }
  c.require(c.seconds() <= 300, "over the 5 min budget");
  c.report();
}

void criterion_6() {
  Criterion c("6. cuff lengths and the genus-2 relation hold at random points");
  std::mt19937 rng(606);
  std::uniform_real_distribution<double> ul(0.3, 4.0), ut(-2.0, 2.0);
  for (int trial = 0; trial < 100 && c.ok; ++trial) {
    const FNPoint p{{ul(rng), ul(rng), ul(rng)}, {ut(rng), ut(rng), ut(rng)}};
    const FuchsianGroup g = fn_to_group(p);
    c.require(g.relation_residual <= 1e-8, "relation residual too large");
    for (int i = 0; i < 3; ++i)
      c.require(std::abs(translation_length(g.evaluate(cuff_words()[i])) - p.lengths[i]) <= 1e-8,
                "cuff length mismatch");
  }
  c.report();
}

void criterion_7() {
  Criterion c("7. collar invariant: short geodesic pairs never intersect");
  std::mt19937 rng(707);
  std::uniform_real_distribution<double> us(0.3, 0.7), ub(1.8, 2.5), ut(-1.0, 1.0);
  int pairs = 0;
  for (int trial = 0; trial < 10 && c.ok; ++trial) {
    const FNPoint p{{us(rng), us(rng), ub(rng)}, {ut(rng), ut(rng), ut(rng)}};
    const FuchsianGroup g = fn_to_group(p);
    const auto classes = length_spectrum(g, kEpsilon0);
    for (std::size_t i = 0; c.ok && i < classes.size(); ++i)
      for (std::size_t j = i + 1; c.ok && j < classes.size(); ++j) {
        ++pairs;
        c.require(!intersects(g, classes[i], classes[j]), "short pair intersects");
      }
  }
  c.require(pairs > 0, "no short pairs enumerated");
  c.report();
}

FNPoint thin_start(std::mt19937& rng, int which_short) {
  std::uniform_real_distribution<double> us(0.2, 0.6), ub(1.2, 2.5), ut(-0.5, 0.5);
  FNPoint p{{ub(rng), ub(rng), ub(rng)}, {ut(rng), ut(rng), ut(rng)}};
  p.lengths[which_short % 3] = us(rng);
  return p;
}

void criterion_8() {
  Criterion c("8. thick-part flow: 20 thin starts reach systole in [1, 1.05]");
  std::mt19937 rng(808);
  FlowParams fp;
  fp.eps = 1.0;
  for (int trial = 0; trial < 20 && c.ok; ++trial) {
    const SurfaceTrajectory tr = flow(thin_start(rng, trial), StopRule::kThick, fp);
    c.require(tr.systoles.back() >= fp.eps - fp.tol_sys && tr.systoles.back() <= fp.eps + 0.05,
              "terminal systole outside [eps, eps+0.05]");
    for (double s : tr.spreads) c.require(s <= 10 * fp.tol_sys, "equal-rate spread violated");
    int growth = 0;
    for (const auto& e : tr.events)
      if (e.kind == FlowEvent::Kind::kStratumGrowth) ++growth;
    // systoles stay below eps+0.05 < epsilon0, hence pairwise disjoint (collar)
    c.require(growth <= 3, "more than 3 stratum-growth events while disjoint");
  }
  c.require(c.seconds() <= 600, "over the 10 min budget");
  c.report();
}

// --- fundamental-domain sampling intersection oracle -----------------------

double hyp_dist(std::complex<double> z, std::complex<double> w) {
  return std::acosh(1 + std::norm(z - w) / (2 * z.imag() * w.imag()));
}

std::complex<double> axis_point(const GeodesicAxis& ax, double s) {
  if (std::isinf(ax.attracting) || std::isinf(ax.repelling)) {
    const double x = std::isinf(ax.attracting) ? ax.repelling : ax.attracting;
    return {x, std::exp(s)};
  }
  const double ctr = 0.5 * (ax.attracting + ax.repelling);
  const double rad = 0.5 * std::abs(ax.attracting - ax.repelling);
  return {ctr + rad * std::tanh(s), rad / std::cosh(s)};
}

GeodesicAxis map_axis(const Isometry& h, const GeodesicAxis& ax) {
  return {h.apply_boundary(ax.attracting), h.apply_boundary(ax.repelling)};
}

// Greedy reduction of z toward the base point i; returns the group element
// h with h(z) in (or near) the Dirichlet domain.
Isometry reduce_to_domain(const FuchsianGroup& g, std::complex<double> z) {
  const std::complex<double> base(0, 1);
  Isometry h = Isometry::identity();
  for (int iter = 0; iter < 200; ++iter) {
    double best = hyp_dist(z, base);
    int best_l = -1;
    for (int l = 0; l < 8; ++l) {
      const double d = hyp_dist(g.letter(static_cast<std::uint8_t>(l)).apply(z), base);
      if (d < best - 1e-12) {
        best = d;
        best_l = l;
      }
    }
    if (best_l < 0) break;
    const Isometry w = g.letter(static_cast<std::uint8_t>(best_l));
    z = w.apply(z);
    h = w * h;
  }
  return h;
}

// Samples one period of each closed geodesic, reduces the samples into the
// fundamental domain, and tests axis crossings among the recorded translates
// (padded by one-letter extensions -- the greedy reduction can stop one
// domain short of the crossing).
using TranslateKey = std::array<long long, 4>;
TranslateKey translate_key(const Isometry& m) {
  const double s = (m.a + 1e-3 * m.b + 1e-6 * m.c + 1e-9 * m.d) >= 0 ? 1.0 : -1.0;
  auto q = [&](double x) { return std::llround(s * x * 1e7); };
  return {q(m.a), q(m.b), q(m.c), q(m.d)};
}

bool oracle_intersects(const FuchsianGroup& g, const GeodesicClass& c1, const GeodesicClass& c2) {
  const int samples = 200;
  auto translates = [&](const GeodesicClass& cl) {
    std::map<TranslateKey, Isometry> set;
    auto add = [&](const Isometry& h) { set.emplace(translate_key(h), h); };
    add(Isometry::identity());
    for (int i = 0; i < samples; ++i) {
      const double s = cl.length * (i / static_cast<double>(samples) - 0.5);
      const Isometry h = reduce_to_domain(g, axis_point(cl.axis, s));
      add(h);
      for (int l = 0; l < 8; ++l) add(g.letter(static_cast<std::uint8_t>(l)) * h);
    }
    std::vector<Isometry> out;
    for (const auto& [k, h] : set) out.push_back(h);
    return out;
  };
  const auto h1s = translates(c1);
  const auto h2s = translates(c2);
  for (const auto& h1 : h1s)
    for (const auto& h2 : h2s)
      if (axes_cross(map_axis(h1, c1.axis), map_axis(h2, c2.axis))) return true;
  return false;
}

void criterion_9() {
  Criterion c("9. spine flow: 10 starts reach intersecting systoles (sampling oracle)");
  std::mt19937 rng(909);
  std::uniform_real_distribution<double> us(0.4, 0.7), ub(1.5, 2.2), ut(-0.3, 0.3);
  for (int trial = 0; trial < 10 && c.ok; ++trial) {
    const FNPoint p{{us(rng), us(rng), ub(rng)}, {ut(rng), ut(rng), ut(rng)}};
    const SurfaceTrajectory tr = flow(p, StopRule::kSpine);
    const Classification cls = classify(tr.states.back(), 1.0);
    c.require(cls.in_S, "terminal state not in S per classify");
    c.require(!cls.systoles.intersection_pairs.empty(), "no intersecting pair at terminal");
    if (!cls.systoles.intersection_pairs.empty()) {
      const auto [i, j] = cls.systoles.intersection_pairs.front();
      const FuchsianGroup g = fn_to_group(tr.states.back());
      c.require(oracle_intersects(g, cls.systoles.classes[i], cls.systoles.classes[j]),
                "sampling oracle does not confirm the intersection");
    }
  }
  c.report();
}

void criterion_10() {
  Criterion c("10. determinism and Dehn-twist invariance of the terminal systole");
  std::mt19937 rng(1010);
  FlowParams fp;
  fp.eps = 1.0;
  for (int trial = 0; trial < 3 && c.ok; ++trial) {
    const FNPoint p = thin_start(rng, trial);
    const SurfaceTrajectory a = flow(p, StopRule::kThick, fp);
    const SurfaceTrajectory b = flow(p, StopRule::kThick, fp);
    c.require(trajectory_to_json(a).dump() == trajectory_to_json(b).dump(),
              "rerun not byte-identical");
    FNPoint q = p;
    q.twists[0] += p.lengths[0];  // full Dehn twist along cuff 1
    const SurfaceTrajectory d = flow(q, StopRule::kThick, fp);
    c.require(std::abs(d.systoles.back() - a.systoles.back()) <= 1e-6,
              "terminal systole not twist-invariant");
  }
  c.report();
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  std::printf("%s: %d/10 criteria passed\n", g_failures == 0 ? "SUCCESS" : "FAILURE",
              10 - g_failures);
  return g_failures;
}
