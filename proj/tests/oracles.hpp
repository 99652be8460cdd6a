// Test-only oracles, independent of the library's enumeration and
// retraction paths.
#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "roundwalk/lattice.hpp"

namespace roundwalk::testing {

// Brute-force minimal vectors over the coefficient box |c_i| <= box.
// Returns (m, vectors) with one representative per +/- pair.
inline std::pair<double, std::vector<Eigen::VectorXi>> brute_force_minimal(
    const Eigen::MatrixXd& basis, int box) {
  const int n = static_cast<int>(basis.cols());
  Eigen::VectorXi c = Eigen::VectorXi::Constant(n, -box);
  double m = std::numeric_limits<double>::infinity();
  std::vector<Eigen::VectorXi> vecs;
  while (true) {
    if (!c.isZero()) {
      const double nsq = (basis * c.cast<double>()).squaredNorm();
      if (nsq < m * (1.0 - 1e-9)) {
        m = nsq;
        vecs.clear();
      }
      if (nsq <= m * (1.0 + 1e-9)) {
        int fz = 0;
        while (fz < n && c(fz) == 0) ++fz;
        if (c(fz) > 0) vecs.push_back(c);
      }
    }
    int i = 0;
    while (i < n && c(i) == box) c(i++) = -box;
    if (i == n) break;
    ++c(i);
  }
  return {m, vecs};
}

inline int brute_force_rank(const Eigen::MatrixXd& basis,
                            const std::vector<Eigen::VectorXi>& vecs) {
  if (vecs.empty()) return 0;
  Eigen::MatrixXd s(basis.rows(), static_cast<Eigen::Index>(vecs.size()));
  for (size_t i = 0; i < vecs.size(); ++i)
    s.col(static_cast<Eigen::Index>(i)) = basis * vecs[i].cast<double>();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(s);
  const auto& sv = svd.singularValues();
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-9 * sv(0)) ++r;
  return r;
}

// Random unimodular lattice: gaussian matrix, determinant normalized to +1.
// Entries are rejected while badly conditioned so the tests stay stable.
inline Eigen::MatrixXd random_unimodular_basis(std::mt19937& rng, int n) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  while (true) {
    Eigen::MatrixXd b(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) b(i, j) = gauss(rng);
    double det = b.determinant();
    if (std::abs(det) < 0.05) continue;
    if (det < 0) b.col(0) = -b.col(0);
    b /= std::pow(std::abs(det), 1.0 / n);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(b);
    if (svd.singularValues()(n - 1) < 1e-3) continue;
    return b;
  }
}

}  // namespace roundwalk::testing
