#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "roundwalk/lattice.hpp"

namespace roundwalk {

// One catch event of the well-rounded retraction: the smallest scaling
// parameter t* > 1 at which a lattice vector outside the current minimal
// span becomes minimal.
struct CatchEvent {
  double t_star = 1.0;
  std::vector<Eigen::VectorXi> new_vectors;  // integer coords, one per +/- pair
  int rank_before = 0;
  int rank_after = 0;
};

struct LatticeTrajectory {
  std::vector<Lattice> states;  // first = input, last = well-rounded
  std::vector<CatchEvent> events;
};

// Squared norm of the lattice vector with integer coordinates v under the
// rescaled inner product <,>_t:  t on the minimal span V_M, t^{-d/(n-d)} on
// its orthogonal complement.  The exponent is the unique choice preserving
// unimodularity.  Requires 1 <= rank(M) < n.
double scaled_norm(const Lattice& lat, const MinimalVectorSet& min_set,
                   const Eigen::VectorXi& v, double t);

// The closed-form catch time.  For a candidate v with ||Pv||^2 < m,
//   t*(v) = (||Qv||^2 / (m - ||Pv||^2))^((n-d)/n),
// and the event time is the minimum over candidates, which are enumerated
// inside a doubling norm bound.  Throws std::invalid_argument
// "already well-rounded" when rank(M) = n.
CatchEvent catch_time(const Lattice& lat, const MinimalVectorSet& min_set);

// Applies the isometric identification A_t = t^{1/2} P + t^{-d/(2(n-d))} Q
// at t = t*, returning the deformed (still unimodular) lattice.
std::pair<Lattice, CatchEvent> deform_step(const Lattice& lat);

// Iterates deform_step until the lattice is well-rounded.  At most n-1
// events; the minimal-span rank strictly increases across events.
LatticeTrajectory retract(const Lattice& lat);

// T_1 = H^2 identification: z = x + iy with y > 0 maps to the unimodular
// lattice with basis {(1,0), (x,y)} / sqrt(y).
Lattice h2_point_to_lattice(std::complex<double> z);
std::complex<double> lattice_to_h2_point(const Lattice& lat);

// Closed-form retraction on the standard fundamental domain
// |Re z| <= 1/2, |z| >= 1:  z goes to Re z + i sqrt(1 - (Re z)^2).
// Throws std::invalid_argument "reduce first" outside the domain.
std::complex<double> retract_h2(std::complex<double> z);

// Operator-norm distance between basis matrices after the optimal
// orthogonal alignment (our choice of metric on the space of lattices).
double lattice_distance(const Lattice& a, const Lattice& b);

}  // namespace roundwalk
