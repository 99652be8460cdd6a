#pragma once

#include <Eigen/Dense>
#include <vector>

namespace roundwalk {

// Shared tolerances for the lattice side of the library.  A single tie
// tolerance for norm equality keeps the catch-time logic consistent with
// minimal-vector detection.
inline constexpr double kNormTol = 1e-9;        // relative, for norm ties
inline constexpr double kRankTol = 1e-9;        // singular value cutoff
inline constexpr double kUnimodularTol = 1e-9;  // |det| - 1 on construction

// A unimodular lattice in R^n, represented by an n x n basis matrix whose
// columns are the (ordered, marked) basis vectors.  Lattice points are
// integer combinations of the columns, so membership is exact.
struct Lattice {
  Eigen::MatrixXd basis;

  int dim() const { return static_cast<int>(basis.cols()); }

  // Validates dimension >= 2, nonsingularity and |det| = 1 within tol.
  static Lattice from_basis(Eigen::MatrixXd b, double det_tol = kUnimodularTol);
};

// The set of shortest nonzero lattice vectors, one representative per
// +/- pair, in integer coordinates w.r.t. the lattice basis.
struct MinimalVectorSet {
  double m = 0.0;                        // squared minimal norm
  std::vector<Eigen::VectorXi> vectors;  // one per +/- pair
  int rank = 0;                          // dim of the real span

  // Real-coordinate images basis * v, as columns.
  Eigen::MatrixXd real_span(const Lattice& lat) const;
};

// LLL with delta = 0.99.  Returns a lattice with the same point set; the
// change of basis is integer unimodular.  Throws std::invalid_argument
// "degenerate basis" on a singular input.
Lattice reduce_basis(const Lattice& lat);

// As reduce_basis, but also exposes the integer transform U with
// out.basis = lat.basis * U.
Lattice reduce_basis_with_transform(const Lattice& lat, Eigen::MatrixXi& transform);

// All shortest vectors by exhaustive Fincke-Pohst enumeration after LLL
// preconditioning.  Rank via SVD with cutoff kRankTol.
MinimalVectorSet minimal_vectors(const Lattice& lat);

// True iff the minimal vectors span R^n.
bool well_rounded(const Lattice& lat);

// All +/- pair representatives v with ||basis*v||^2 <= bound_sq, excluding 0.
std::vector<Eigen::VectorXi> enumerate_short_vectors(const Lattice& lat, double bound_sq);

// Rank of a set of real column vectors with the shared singular value cutoff.
int numeric_rank(const Eigen::MatrixXd& cols, double tol = kRankTol);

}  // namespace roundwalk
