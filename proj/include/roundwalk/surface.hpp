#pragma once

#include <array>
#include <string>
#include <vector>

#include "roundwalk/hyperbolic.hpp"
#include "roundwalk/spectrum.hpp"

namespace roundwalk {

using Vec6 = std::array<double, 6>;  // (l1,l2,l3,t1,t2,t3) tangent components

struct Classification {
  bool in_thick = false;          // systole >= eps - tol_sys
  bool in_S = false;              // >= 2 systoles with an intersecting pair
  bool in_S_prime = false;        // exactly two systoles and they intersect
  bool in_S_doubleprime = false;  // in_S with >= 3 systoles
  SystoleSet systoles;
};

// Throws std::invalid_argument when eps is outside (0, epsilon0].
Classification classify(const FNPoint& p, double eps, double tol_sys = kTolSys);

// Central finite-difference gradient of the geodesic length of c in the six
// Fenchel-Nielsen coordinates (relative step 1e-5, floored at 1e-6).
Vec6 length_gradient(const FNPoint& p, const GeodesicClass& c);

// Unit minimum-norm direction along which all systole lengths increase at the
// same rate.  Throws std::runtime_error("degenerate stratum") when the
// gradient Gram matrix is singular.
Vec6 stratum_direction(const FNPoint& p, const SystoleSet& s);

enum class StopRule { kThick, kSpine, kS2 };

struct FlowEvent {
  enum class Kind { kStratumGrowth, kThickArrival, kSpineArrival, kS2Arrival };
  Kind kind{};
  double time = 0;  // arc length along the trajectory
  double systole_before = 0, systole_after = 0;
  int k_before = 0, k_after = 0;
};

struct SurfaceTrajectory {
  std::vector<FNPoint> states;
  std::vector<double> times;     // arc length at each state
  std::vector<double> systoles;  // common systole length per state
  std::vector<int> ks;           // systole multiplicity per state
  std::vector<double> spreads;   // max-min stratum length gap per state
  std::vector<FlowEvent> events;
  std::string terminal_class;  // "thick" | "spine-S" | "spine-S2"
};

struct FlowParams {
  double eps = 1.0;  // thick-part threshold, used by StopRule::kThick
  double tol_sys = kTolSys;
  double step0 = 1e-2;       // initial step, halved on overshoot
  double min_step = 1e-10;   // below this -> "stalled"
  int max_steps = 20000;
  SpectrumParams spectrum;
};

// Equal-rate systole flow with stratum-growth event detection.  Stops when
// the requested classification predicate holds.  Throws
// std::runtime_error("stalled") if the step underflows.
SurfaceTrajectory flow(const FNPoint& p, StopRule stop, const FlowParams& params = {});

}  // namespace roundwalk
