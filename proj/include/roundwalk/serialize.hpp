#pragma once

#include <json.hpp>

#include <string>

#include "roundwalk/lattice.hpp"
#include "roundwalk/lattice_retract.hpp"
#include "roundwalk/spectrum.hpp"
#include "roundwalk/surface.hpp"

namespace roundwalk {

// JSON schemas:
//   lattice            {"n": int, "basis": [[row-major floats]]}
//   lattice trajectory {"states": [...], "events": [{"t_star", "rank_before",
//                       "rank_after", "new_vectors": [[int]]}]}
//   FN point           {"lengths": [f,f,f], "twists": [f,f,f]}
//   systole set        {"systole", "next_length", "degenerate",
//                       "classes": [{"word","length","trace"}],
//                       "intersection_pairs": [[i,j]]}
//   surface trajectory {"states", "times", "systoles", "ks", "spreads",
//                       "events", "terminal_class"}
nlohmann::json lattice_to_json(const Lattice& lat);
Lattice lattice_from_json(const nlohmann::json& j);
nlohmann::json trajectory_to_json(const LatticeTrajectory& t);

nlohmann::json fn_to_json(const FNPoint& p);
FNPoint fn_from_json(const nlohmann::json& j);

nlohmann::json systoles_to_json(const SystoleSet& s);
nlohmann::json trajectory_to_json(const SurfaceTrajectory& t);

// CSV rows (time, systole, k) per trajectory state.
std::string trajectory_to_csv(const SurfaceTrajectory& t);

}  // namespace roundwalk
