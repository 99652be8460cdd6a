#include "roundwalk/serialize.hpp"

#include <cstdio>
#include <stdexcept>

namespace roundwalk {

namespace {

nlohmann::json matrix_rows(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json int_vector(const Eigen::VectorXi& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

}  // namespace

nlohmann::json lattice_to_json(const Lattice& lat) {
  return {{"n", lat.dim()}, {"basis", matrix_rows(lat.basis)}};
}

Lattice lattice_from_json(const nlohmann::json& j) {
  const int n = j.at("n").get<int>();
  const auto& rows = j.at("basis");
  if (!rows.is_array() || static_cast<int>(rows.size()) != n)
    throw std::invalid_argument("basis shape mismatch");
  Eigen::MatrixXd b(n, n);
  for (int i = 0; i < n; ++i) {
    const auto& row = rows.at(i);
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      throw std::invalid_argument("basis shape mismatch");
    for (int k = 0; k < n; ++k) b(i, k) = row.at(k).get<double>();
  }
  return Lattice::from_basis(std::move(b));
}

nlohmann::json trajectory_to_json(const LatticeTrajectory& t) {
  nlohmann::json states = nlohmann::json::array();
  for (const auto& s : t.states) states.push_back(lattice_to_json(s));
  nlohmann::json events = nlohmann::json::array();
  for (const auto& e : t.events) {
    nlohmann::json vecs = nlohmann::json::array();
    for (const auto& v : e.new_vectors) vecs.push_back(int_vector(v));
    events.push_back({{"t_star", e.t_star},
                      {"rank_before", e.rank_before},
                      {"rank_after", e.rank_after},
                      {"new_vectors", std::move(vecs)}});
  }
  return {{"states", std::move(states)}, {"events", std::move(events)}};
}

nlohmann::json fn_to_json(const FNPoint& p) {
  return {{"lengths", {p.lengths[0], p.lengths[1], p.lengths[2]}},
          {"twists", {p.twists[0], p.twists[1], p.twists[2]}}};
}

FNPoint fn_from_json(const nlohmann::json& j) {
  const auto& l = j.at("lengths");
  const auto& t = j.at("twists");
  if (l.size() != 3 || t.size() != 3) throw std::invalid_argument("need 3 lengths and 3 twists");
  FNPoint p;
  for (int i = 0; i < 3; ++i) {
    p.lengths[i] = l.at(i).get<double>();
    p.twists[i] = t.at(i).get<double>();
  }
  return p;
}

nlohmann::json systoles_to_json(const SystoleSet& s) {
  nlohmann::json classes = nlohmann::json::array();
  for (const auto& c : s.classes)
    classes.push_back(
        {{"word", word_to_string(c.word)}, {"length", c.length}, {"trace", c.matrix.trace()}});
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& [i, j] : s.intersection_pairs) pairs.push_back({i, j});
  return {{"systole", s.systole},
          {"next_length", s.next_length},
          {"degenerate", s.degenerate},
          {"classes", std::move(classes)},
          {"intersection_pairs", std::move(pairs)}};
}

nlohmann::json trajectory_to_json(const SurfaceTrajectory& t) {
  nlohmann::json states = nlohmann::json::array();
  for (const auto& s : t.states) states.push_back(fn_to_json(s));
  nlohmann::json events = nlohmann::json::array();
  for (const auto& e : t.events) {
    const char* kind = "";
    switch (e.kind) {
      case FlowEvent::Kind::kStratumGrowth:
        kind = "stratum-growth";
        break;
      case FlowEvent::Kind::kThickArrival:
        kind = "thick-arrival";
        break;
      case FlowEvent::Kind::kSpineArrival:
        kind = "spine-arrival";
        break;
      case FlowEvent::Kind::kS2Arrival:
        kind = "s2-arrival";
        break;
    }
    events.push_back({{"kind", kind},
                      {"time", e.time},
                      {"systole_before", e.systole_before},
                      {"systole_after", e.systole_after},
                      {"k_before", e.k_before},
                      {"k_after", e.k_after}});
  }
  return {{"states", std::move(states)},
          {"times", t.times},
          {"systoles", t.systoles},
          {"ks", t.ks},
          {"spreads", t.spreads},
          {"events", std::move(events)},
          {"terminal_class", t.terminal_class}};
}

std::string trajectory_to_csv(const SurfaceTrajectory& t) {
  std::string out = "time,systole,k\n";
  char buf[96];
  for (std::size_t i = 0; i < t.states.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%d\n", t.times[i], t.systoles[i], t.ks[i]);
    out += buf;
  }
  return out;
}

}  // namespace roundwalk
