#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace roundwalk {

inline constexpr double kDetTol = 1e-12;
inline constexpr double kHyperbolicTol = 1e-10;   // |trace| > 2 + tol
inline constexpr double kRelationTol = 1e-8;      // genus-2 relation residual
// Collar-theorem constant: two closed geodesics both shorter than this are
// disjoint.  2*arcsinh(1).
inline const double kEpsilon0 = 2.0 * std::asinh(1.0);

// Orientation-preserving isometry of H^2 as a real 2x2 matrix with det 1,
// projectively identified with its negative.
struct Isometry {
  double a = 1, b = 0, c = 0, d = 1;

  double trace() const { return a + d; }
  double det() const { return a * d - b * c; }
  Isometry inverse() const { return {d, -b, -c, a}; }
  Isometry operator*(const Isometry& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  // Moebius action on the closed upper half-plane / boundary.
  std::complex<double> apply(std::complex<double> z) const;
  double apply_boundary(double x) const;  // x may be +-inf, result may be inf

  static Isometry identity() { return {}; }
  static Isometry translation(double length);  // diag(e^{l/2}, e^{-l/2})
};

bool is_hyperbolic(const Isometry& g);
double translation_length(const Isometry& g);  // throws "not hyperbolic"

// Oriented axis of a hyperbolic isometry; endpoints on R union {inf},
// attracting endpoint first.  Infinity is encoded as +-HUGE_VAL (the sign
// carries no meaning on the boundary circle).
struct GeodesicAxis {
  double attracting = 0;
  double repelling = 0;
};

GeodesicAxis axis(const Isometry& g);  // throws "not hyperbolic"

// True iff the two complete geodesics cross transversally (endpoints
// interleave on the boundary circle).  Shared endpoints count as no cross.
bool axes_cross(const GeodesicAxis& x, const GeodesicAxis& y);

// Hyperbolic X, Y generating a pair of pants with boundary lengths
// (l1, l2, l3): trace X = 2cosh(l1/2), trace Y = 2cosh(l2/2),
// trace XY = -2cosh(l3/2).
std::pair<Isometry, Isometry> pants_generators(double l1, double l2, double l3);

// Fenchel-Nielsen coordinates for the fixed genus-2 pants decomposition:
// two pants with boundary lengths (l1, l2, l3) glued along all three cuffs.
struct FNPoint {
  std::array<double, 3> lengths{};
  std::array<double, 3> twists{};
};

// Words over the generator alphabet of the genus-2 group.  Letters:
// 0:a1 1:a1^-1 2:b1 3:b1^-1 4:a2 5:a2^-1 6:b2 7:b2^-1.
using Word = std::vector<std::uint8_t>;
inline std::uint8_t inverse_letter(std::uint8_t l) { return l ^ 1u; }
std::string word_to_string(const Word& w);

struct FuchsianGroup {
  std::array<Isometry, 4> generators;  // a1, b1, a2, b2
  double relation_residual = 0;        // || [a1,b1][a2,b2] -+ I ||_F

  Isometry letter(std::uint8_t l) const {
    const Isometry& g = generators[l >> 1];
    return (l & 1u) ? g.inverse() : g;
  }
  Isometry evaluate(const Word& w) const;
};

// The three pants curves as fixed words in the generators.
const std::array<Word, 3>& cuff_words();

// Builds the Fuchsian group of the marked genus-2 surface with the given
// Fenchel-Nielsen coordinates.  Throws std::invalid_argument for
// nonpositive lengths and std::runtime_error "gluing failed" if the
// construction does not close up.
FuchsianGroup fn_to_group(const FNPoint& p);

}  // namespace roundwalk
