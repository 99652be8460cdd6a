#pragma once

#include <string>
#include <utility>
#include <vector>

#include "roundwalk/hyperbolic.hpp"

namespace roundwalk {

inline constexpr double kTolSys = 1e-8;  // "equal length" for systole grouping

// Closed geodesic on the surface: conjugacy class of a hyperbolic element.
// The word is cyclically reduced and canonical (lexicographically minimal
// over cyclic rotations, inversion, and relator rewrites); proper powers are
// discarded during canonicalization.
struct GeodesicClass {
  Word word;
  double length = 0;
  GeodesicAxis axis;
  Isometry matrix;
};

// One canonical representative per conjugacy class among cyclically reduced
// words of length <= max_word_length (inverses identified), sorted by length.
std::vector<GeodesicClass> enumerate_classes(const FuchsianGroup& group, int max_word_length);

// Tuning knobs for the spectrum search.  extra_words / extra_pad widen the
// word-length cap and the displacement ball; the defaults are the production
// values and the widened search is the slow cross-check oracle.
struct SpectrumParams {
  int extra_words = 0;
  double extra_pad = 0;
  int hard_cap = 16;     // word-length bound above this -> "cutoff too deep"
  double axis_pad = 4.0; // allowance for axes passing away from the base point
};

// All classes of length <= cutoff reachable within the word-length bound
// W(cutoff) = ceil(cutoff / lambda_min) + 4, sorted by (length, word).
// Throws std::runtime_error("cutoff too deep") when W exceeds the hard cap.
std::vector<GeodesicClass> length_spectrum(const FuchsianGroup& group, double cutoff,
                                           const SpectrumParams& params = {});

struct SystoleSet {
  std::vector<GeodesicClass> classes;  // all lengths within tol_sys of minimum
  double systole = 0;
  double next_length = 0;  // shortest length not in the set; inf if not seen
  std::vector<std::pair<int, int>> intersection_pairs;
  bool degenerate = false;  // next_length - systole < 10 * tol_sys
};

SystoleSet systole_set(const FuchsianGroup& group, double tol_sys = kTolSys,
                       const SpectrumParams& params = {});

// True iff the two closed geodesics intersect on the surface.  Checks axis
// crossings over group translates; short geodesics (both below the collar
// constant) short-circuit to false.  Throws std::invalid_argument("same
// class") when the classes coincide.
bool intersects(const FuchsianGroup& group, const GeodesicClass& g1, const GeodesicClass& g2,
                const SpectrumParams& params = {});

// CSV export: header "word,length,trace" then one row per class.
std::string spectrum_to_csv(const std::vector<GeodesicClass>& classes);

}  // namespace roundwalk
