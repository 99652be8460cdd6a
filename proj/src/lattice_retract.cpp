#include "roundwalk/lattice_retract.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace roundwalk {

namespace {

// Orthogonal projector onto the real span of the minimal vectors.
Eigen::MatrixXd minimal_span_projector(const Lattice& lat, const MinimalVectorSet& min_set) {
  const Eigen::MatrixXd s = min_set.real_span(lat);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(s, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double cutoff = kRankTol * sv(0);
  int d = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++d;
  const Eigen::MatrixXd u = svd.matrixU().leftCols(d);
  return u * u.transpose();
}

}  // namespace

double scaled_norm(const Lattice& lat, const MinimalVectorSet& min_set,
                   const Eigen::VectorXi& v, double t) {
  const int n = lat.dim();
  const int d = min_set.rank;
  if (d >= n) throw std::invalid_argument("already well-rounded");
  const Eigen::MatrixXd p = minimal_span_projector(lat, min_set);
  const Eigen::VectorXd x = lat.basis * v.cast<double>();
  const double psq = (p * x).squaredNorm();
  const double qsq = (x - p * x).squaredNorm();
  const double expo = -static_cast<double>(d) / static_cast<double>(n - d);
  return t * psq + std::pow(t, expo) * qsq;
}

CatchEvent catch_time(const Lattice& lat, const MinimalVectorSet& min_set) {
  const int n = lat.dim();
  const int d = min_set.rank;
  if (d >= n) throw std::invalid_argument("already well-rounded");
  const double m = min_set.m;
  const Eigen::MatrixXd p = minimal_span_projector(lat, min_set);
  const double pow_exp = static_cast<double>(n) / static_cast<double>(n - d);

  CatchEvent ev;
  ev.rank_before = d;

  // A candidate v is caught at t*(v) = (||Qv||^2/(m - ||Pv||^2))^((n-d)/n).
  // Candidates with t*(v) <= T satisfy ||v||^2 <= m + T^{n/(n-d)} m, so the
  // enumeration is exhaustive for the found minimum t* once the norm bound
  // covers m (1 + t*^{n/(n-d)}).  The bound is doubled directly (doubling T
  // would square-law overshoot when d = n-1).
  for (double norm_bound = 2.0 * m;; norm_bound *= 2.0) {
    const auto cands = enumerate_short_vectors(lat, norm_bound * (1.0 + kNormTol));

    double best = std::numeric_limits<double>::infinity();
    std::vector<std::pair<double, Eigen::VectorXi>> scored;
    for (const auto& v : cands) {
      const Eigen::VectorXd x = lat.basis * v.cast<double>();
      const double psq = (p * x).squaredNorm();
      const double qsq = (x - p * x).squaredNorm();
      if (qsq <= m * 1e-12) continue;             // inside the minimal span
      const double denom = m - psq;
      if (denom <= m * 1e-12) continue;           // not catchable by scaling
      const double t_star = std::pow(qsq / denom, 1.0 / pow_exp);
      scored.emplace_back(t_star, v);
      best = std::min(best, t_star);
    }

    if (std::isfinite(best) && m * (1.0 + std::pow(best, pow_exp)) <= norm_bound) {
      ev.t_star = best;
      for (auto& [t, v] : scored)
        if (t <= best * (1.0 + kNormTol)) ev.new_vectors.push_back(std::move(v));
      Eigen::MatrixXd joint(n, static_cast<Eigen::Index>(min_set.vectors.size() +
                                                         ev.new_vectors.size()));
      Eigen::Index col = 0;
      for (const auto& v : min_set.vectors)
        joint.col(col++) = lat.basis * v.cast<double>();
      for (const auto& v : ev.new_vectors)
        joint.col(col++) = lat.basis * v.cast<double>();
      ev.rank_after = numeric_rank(joint);
      return ev;
    }
    if (norm_bound > 1e100) throw std::runtime_error("catch-time search diverged");
  }
}

std::pair<Lattice, CatchEvent> deform_step(const Lattice& lat) {
  const MinimalVectorSet mv = minimal_vectors(lat);
  const int n = lat.dim();
  const int d = mv.rank;
  if (d >= n) throw std::invalid_argument("already well-rounded");

  CatchEvent ev = catch_time(lat, mv);
  const Eigen::MatrixXd p = minimal_span_projector(lat, mv);
  const Eigen::MatrixXd q = Eigen::MatrixXd::Identity(n, n) - p;
  const double t = ev.t_star;
  const Eigen::MatrixXd a =
      std::sqrt(t) * p + std::pow(t, -static_cast<double>(d) / (2.0 * (n - d))) * q;
  Lattice out{a * lat.basis};
  return {std::move(out), std::move(ev)};
}

LatticeTrajectory retract(const Lattice& lat) {
  LatticeTrajectory traj;
  traj.states.push_back(lat);
  const int n = lat.dim();
  while (true) {
    const MinimalVectorSet mv = minimal_vectors(traj.states.back());
    if (mv.rank == n) break;
    if (static_cast<int>(traj.events.size()) >= n - 1)
      throw std::runtime_error("retraction exceeded n-1 events");
    auto [next, ev] = deform_step(traj.states.back());
    traj.states.push_back(std::move(next));
    traj.events.push_back(std::move(ev));
  }
  return traj;
}

Lattice h2_point_to_lattice(std::complex<double> z) {
  if (!(z.imag() > 0)) throw std::invalid_argument("point must be in the upper half-plane");
  const double x = z.real(), y = z.imag();
  const double s = 1.0 / std::sqrt(y);
  Eigen::MatrixXd b(2, 2);
  b << s, x * s, 0, y * s;
  return Lattice{std::move(b)};
}

std::complex<double> lattice_to_h2_point(const Lattice& lat) {
  if (lat.dim() != 2) throw std::invalid_argument("H^2 identification needs n = 2");
  const Eigen::Vector2d v1 = lat.basis.col(0);
  Eigen::Vector2d v2 = lat.basis.col(1);
  const double s = v1.norm();
  // rotate v1 onto the positive x-axis
  const double c = v1(0) / s, sn = v1(1) / s;
  Eigen::Vector2d w(c * v2(0) + sn * v2(1), -sn * v2(0) + c * v2(1));
  if (w(1) < 0) w = -w;  // sign normalization: upper half-plane
  return {w(0) / s, w(1) / s};
}

std::complex<double> retract_h2(std::complex<double> z) {
  constexpr double tol = 1e-12;
  if (!(z.imag() > 0) || std::abs(z.real()) > 0.5 + tol || std::abs(z) < 1.0 - tol)
    throw std::invalid_argument("reduce first");
  const double x = z.real();
  return {x, std::sqrt(1.0 - x * x)};
}

double lattice_distance(const Lattice& a, const Lattice& b) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(b.basis * a.basis.transpose(),
                                        Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::MatrixXd rot = svd.matrixU() * svd.matrixV().transpose();
  if (rot.determinant() < 0) {
    Eigen::MatrixXd u = svd.matrixU();
    u.col(u.cols() - 1) *= -1;
    rot = u * svd.matrixV().transpose();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> dsvd(rot * a.basis - b.basis);
  return dsvd.singularValues()(0);
}

}  // namespace roundwalk
