#include "roundwalk/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace roundwalk {

Lattice Lattice::from_basis(Eigen::MatrixXd b, double det_tol) {
  if (b.rows() != b.cols() || b.rows() < 2)
    throw std::invalid_argument("basis must be square with n >= 2");
  const double det = b.determinant();
  if (!std::isfinite(det) || std::abs(det) < 1e-12)
    throw std::invalid_argument("degenerate basis");
  if (std::abs(std::abs(det) - 1.0) > det_tol)
    throw std::invalid_argument("basis is not unimodular");
  return Lattice{std::move(b)};
}

Eigen::MatrixXd MinimalVectorSet::real_span(const Lattice& lat) const {
  Eigen::MatrixXd s(lat.dim(), static_cast<Eigen::Index>(vectors.size()));
  for (size_t i = 0; i < vectors.size(); ++i)
    s.col(static_cast<Eigen::Index>(i)) = lat.basis * vectors[i].cast<double>();
  return s;
}

int numeric_rank(const Eigen::MatrixXd& cols, double tol) {
  if (cols.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(cols);
  const auto& sv = svd.singularValues();
  const double cutoff = tol * sv(0);
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++r;
  return r;
}

namespace {

// Textbook LLL on the columns of B, delta = 0.99, tracking the integer
// transform.  Doubles are plenty at the dimensions this library targets.
void lll_reduce(Eigen::MatrixXd& b, Eigen::MatrixXi& u, double delta) {
  const int n = static_cast<int>(b.cols());
  u = Eigen::MatrixXi::Identity(n, n);

  Eigen::MatrixXd gs = b;            // Gram-Schmidt vectors
  Eigen::MatrixXd mu = Eigen::MatrixXd::Identity(n, n);

  auto update_gs = [&]() {
    gs = b;
    mu.setIdentity();
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < i; ++j) {
        const double denom = gs.col(j).squaredNorm();
        mu(i, j) = b.col(i).dot(gs.col(j)) / denom;
        gs.col(i) -= mu(i, j) * gs.col(j);
      }
    }
  };

  update_gs();
  int k = 1;
  int guard = 0;
  const int guard_max = 10000 * n * n;
  while (k < n) {
    if (++guard > guard_max) throw std::runtime_error("LLL failed to converge");
    // size reduction
    for (int j = k - 1; j >= 0; --j) {
      const double r = std::round(mu(k, j));
      if (r != 0.0) {
        b.col(k) -= r * b.col(j);
        u.col(k) -= static_cast<int>(r) * u.col(j);
        update_gs();
      }
    }
    const double lhs = gs.col(k).squaredNorm();
    const double rhs = (delta - mu(k, k - 1) * mu(k, k - 1)) * gs.col(k - 1).squaredNorm();
    if (lhs >= rhs) {
      ++k;
    } else {
      b.col(k).swap(b.col(k - 1));
      u.col(k).swap(u.col(k - 1));
      update_gs();
      k = std::max(k - 1, 1);
    }
  }
}

}  // namespace

Lattice reduce_basis_with_transform(const Lattice& lat, Eigen::MatrixXi& transform) {
  const double det = lat.basis.determinant();
  if (!std::isfinite(det) || std::abs(det) < 1e-12)
    throw std::invalid_argument("degenerate basis");
  Eigen::MatrixXd b = lat.basis;
  lll_reduce(b, transform, 0.99);
  return Lattice{std::move(b)};
}

Lattice reduce_basis(const Lattice& lat) {
  Eigen::MatrixXi u;
  return reduce_basis_with_transform(lat, u);
}

std::vector<Eigen::VectorXi> enumerate_short_vectors(const Lattice& lat, double bound_sq) {
  // Fincke-Pohst on the R factor of the basis: with B = QR, ||B c||^2 =
  // ||R c||^2, and R upper triangular gives nested coefficient intervals.
  const int n = lat.dim();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(lat.basis);
  Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  // make diagonal positive for stable interval logic
  for (int i = 0; i < n; ++i)
    if (r(i, i) < 0) r.row(i) = -r.row(i);

  std::vector<Eigen::VectorXi> out;
  Eigen::VectorXi c = Eigen::VectorXi::Zero(n);
  // partial[i] = squared norm contribution of coordinates > i
  std::vector<double> partial(static_cast<size_t>(n) + 1, 0.0);
  // center[i] = value that coordinate i must offset, given coords > i
  Eigen::VectorXd center = Eigen::VectorXd::Zero(n);

  // recursive descent from coordinate n-1 down to 0
  struct Frame {
    int lo, hi, cur;
  };
  std::vector<Frame> stack(static_cast<size_t>(n));

  int level = n - 1;
  auto enter = [&](int i) {
    double s = 0;
    for (int j = i + 1; j < n; ++j) s += r(i, j) * c(j);
    center(i) = s;
    const double rem = bound_sq - partial[static_cast<size_t>(i) + 1];
    const double halfwidth = rem > 0 ? std::sqrt(rem) * (1.0 + 1e-12) : 0.0;
    const double lo = (-halfwidth - s) / r(i, i);
    const double hi = (halfwidth - s) / r(i, i);
    stack[static_cast<size_t>(i)].lo = static_cast<int>(std::ceil(lo - 1e-12));
    stack[static_cast<size_t>(i)].hi = static_cast<int>(std::floor(hi + 1e-12));
    stack[static_cast<size_t>(i)].cur = stack[static_cast<size_t>(i)].lo;
  };

  enter(level);
  while (true) {
    Frame& f = stack[static_cast<size_t>(level)];
    if (f.cur > f.hi) {
      ++level;
      if (level >= n) break;
      ++stack[static_cast<size_t>(level)].cur;
      continue;
    }
    c(level) = f.cur;
    const double term = r(level, level) * c(level) + center(level);
    const double acc = partial[static_cast<size_t>(level) + 1] + term * term;
    if (acc > bound_sq * (1.0 + 1e-12)) {
      ++f.cur;
      continue;
    }
    if (level == 0) {
      if (!c.isZero()) {
        // one representative per +/- pair: first nonzero coordinate positive
        int firstnz = 0;
        while (firstnz < n && c(firstnz) == 0) ++firstnz;
        if (firstnz < n && c(firstnz) > 0) out.push_back(c);
      }
      ++f.cur;
    } else {
      partial[static_cast<size_t>(level)] = acc;
      --level;
      enter(level);
    }
  }
  return out;
}

MinimalVectorSet minimal_vectors(const Lattice& lat) {
  Eigen::MatrixXi u;
  const Lattice red = reduce_basis_with_transform(lat, u);

  // After LLL the shortest basis column is a sharp starting radius.
  double bound = red.basis.col(0).squaredNorm();
  for (int i = 1; i < red.dim(); ++i)
    bound = std::min(bound, red.basis.col(i).squaredNorm());

  auto cands = enumerate_short_vectors(red, bound * (1.0 + kNormTol));
  double m = bound;
  for (const auto& v : cands)
    m = std::min(m, (red.basis * v.cast<double>()).squaredNorm());

  MinimalVectorSet out;
  out.m = m;
  for (const auto& v : cands) {
    const double nsq = (red.basis * v.cast<double>()).squaredNorm();
    if (nsq <= m * (1.0 + kNormTol)) {
      Eigen::VectorXi w = u * v;  // back to coordinates of the input basis
      int firstnz = 0;
      while (firstnz < w.size() && w(firstnz) == 0) ++firstnz;
      if (firstnz < w.size() && w(firstnz) < 0) w = -w;
      out.vectors.push_back(std::move(w));
    }
  }
  std::sort(out.vectors.begin(), out.vectors.end(),
            [](const Eigen::VectorXi& a, const Eigen::VectorXi& b) {
              return std::lexicographical_compare(a.data(), a.data() + a.size(),
                                                  b.data(), b.data() + b.size());
            });
  out.rank = numeric_rank(out.real_span(lat));
  return out;
}

bool well_rounded(const Lattice& lat) {
  return minimal_vectors(lat).rank == lat.dim();
}

}  // namespace roundwalk
