#include "roundwalk/surface.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace roundwalk {

namespace {

double class_length(const FNPoint& p, const Word& w) {
  return translation_length(fn_to_group(p).evaluate(w));
}

double& coord(FNPoint& p, int i) { return i < 3 ? p.lengths[i] : p.twists[i - 3]; }

Vec6 word_gradient(const FNPoint& p, const Word& w) {
  Vec6 g{};
  for (int i = 0; i < 6; ++i) {
    FNPoint lo = p, hi = p;
    const double base = i < 3 ? p.lengths[i] : p.twists[i - 3];
    const double h = std::max(1e-6, 1e-5 * std::abs(base));
    coord(lo, i) -= h;
    coord(hi, i) += h;
    g[i] = (class_length(hi, w) - class_length(lo, w)) / (2.0 * h);
  }
  return g;
}

std::set<Word> word_set(const SystoleSet& s) {
  std::set<Word> out;
  for (const auto& c : s.classes) out.insert(c.word);
  return out;
}

bool stop_satisfied(StopRule stop, double eps, double tol_sys, const SystoleSet& s) {
  const bool in_s = s.classes.size() >= 2 && !s.intersection_pairs.empty();
  switch (stop) {
    case StopRule::kThick:
      return s.systole >= eps - tol_sys;
    case StopRule::kSpine:
      return in_s;
    case StopRule::kS2:
      return in_s && s.classes.size() >= 3;
  }
  return false;
}

const char* terminal_name(StopRule stop) {
  switch (stop) {
    case StopRule::kThick:
      return "thick";
    case StopRule::kSpine:
      return "spine-S";
    case StopRule::kS2:
      return "spine-S2";
  }
  return "";
}

FlowEvent::Kind arrival_kind(StopRule stop) {
  switch (stop) {
    case StopRule::kThick:
      return FlowEvent::Kind::kThickArrival;
    case StopRule::kSpine:
      return FlowEvent::Kind::kSpineArrival;
    case StopRule::kS2:
      return FlowEvent::Kind::kS2Arrival;
  }
  return FlowEvent::Kind::kThickArrival;
}

// strict systole set plus a 10*tol widened grouping; the widened set feeds
// the stratum (so near-ties merge instead of oscillating), the strict one
// feeds stopping rules and records
struct SystolePair {
  SystoleSet strict, wide;
};

SystolePair stratum_systoles(const FNPoint& p, const FlowParams& params) {
  const FuchsianGroup g = fn_to_group(p);
  SystolePair s;
  s.strict = systole_set(g, params.tol_sys, params.spectrum);
  s.wide = s.strict.degenerate ? systole_set(g, 10.0 * params.tol_sys, params.spectrum)
                               : s.strict;
  return s;
}

// Direction solver for the flow itself: min-norm least squares on G directly
// (better conditioned than the Gram matrix, and tolerant of duplicated
// gradients, which just share a rate).  Throws only when the equal-rate
// system G v = 1 is genuinely inconsistent.
Vec6 flow_direction(const FNPoint& p, const std::vector<GeodesicClass>& classes) {
  const int k = static_cast<int>(classes.size());
  if (k < 1) throw std::runtime_error("degenerate stratum");
  Eigen::MatrixXd G(k, 6);
  for (int i = 0; i < k; ++i) {
    const Vec6 g = word_gradient(p, classes[i].word);
    for (int j = 0; j < 6; ++j) G(i, j) = g[j];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(G, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-10);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(k);
  Eigen::VectorXd v = svd.solve(ones);
  if ((G * v - ones).norm() > 1e-6 * std::sqrt(static_cast<double>(k)))
    throw std::runtime_error("degenerate stratum");
  const double n = v.norm();
  if (!(n > 0)) throw std::runtime_error("degenerate stratum");
  v /= n;
  Vec6 out;
  for (int j = 0; j < 6; ++j) out[j] = v(j);
  return out;
}

// Gauss-Newton projection back onto l(c_i) = l(c_1) for the stratum words.
// Returns false when the iteration fails to converge.
bool project_equal_lengths(FNPoint& p, const std::vector<Word>& words, double tol) {
  const int k = static_cast<int>(words.size());
  if (k <= 1) return true;
  for (int iter = 0; iter < 12; ++iter) {
    std::vector<double> len(k);
    for (int i = 0; i < k; ++i) len[i] = class_length(p, words[i]);
    double worst = 0;
    for (int i = 1; i < k; ++i) worst = std::max(worst, std::abs(len[i] - len[0]));
    if (worst <= tol) return true;

    Eigen::MatrixXd J(k - 1, 6);
    Eigen::VectorXd r(k - 1);
    const Vec6 g0 = word_gradient(p, words[0]);
    for (int i = 1; i < k; ++i) {
      const Vec6 gi = word_gradient(p, words[i]);
      for (int j = 0; j < 6; ++j) J(i - 1, j) = gi[j] - g0[j];
      r(i - 1) = len[i] - len[0];
    }
    const Eigen::MatrixXd JJt = J * J.transpose();
    const Eigen::VectorXd y = JJt.ldlt().solve(r);
    const Eigen::VectorXd dx = J.transpose() * y;
    for (int j = 0; j < 6; ++j) coord(p, j) -= dx(j);
    if (p.lengths[0] <= 0 || p.lengths[1] <= 0 || p.lengths[2] <= 0) return false;
  }
  return false;
}

}  // namespace

Classification classify(const FNPoint& p, double eps, double tol_sys) {
  if (!(eps > 0) || eps > kEpsilon0) throw std::invalid_argument("eps out of range");
  Classification c;
  c.systoles = systole_set(fn_to_group(p), tol_sys);
  const std::size_t k = c.systoles.classes.size();
  c.in_thick = c.systoles.systole >= eps - tol_sys;
  c.in_S = k >= 2 && !c.systoles.intersection_pairs.empty();
  c.in_S_prime = k == 2 && !c.systoles.intersection_pairs.empty();
  c.in_S_doubleprime = c.in_S && k >= 3;
  return c;
}

Vec6 length_gradient(const FNPoint& p, const GeodesicClass& c) {
  return word_gradient(p, c.word);
}

Vec6 stratum_direction(const FNPoint& p, const SystoleSet& s) {
  const int k = static_cast<int>(s.classes.size());
  if (k < 1 || k > 6) throw std::invalid_argument("bad stratum size");
  Eigen::MatrixXd G(k, 6);
  for (int i = 0; i < k; ++i) {
    const Vec6 g = word_gradient(p, s.classes[i].word);
    for (int j = 0; j < 6; ++j) G(i, j) = g[j];
  }
  const Eigen::MatrixXd GGt = G * G.transpose();
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(GGt, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.singularValues()(k - 1) < 1e-10 * svd.singularValues()(0))
    throw std::runtime_error("degenerate stratum");
  const Eigen::VectorXd y = svd.solve(Eigen::VectorXd::Ones(k));
  Eigen::VectorXd v = G.transpose() * y;
  const double n = v.norm();
  if (!(n > 0)) throw std::runtime_error("degenerate stratum");
  v /= n;
  Vec6 out;
  for (int j = 0; j < 6; ++j) out[j] = v(j);
  return out;
}

SurfaceTrajectory flow(const FNPoint& p, StopRule stop, const FlowParams& params) {
  SurfaceTrajectory traj;
  traj.terminal_class = terminal_name(stop);
  if (stop == StopRule::kThick && (!(params.eps > 0) || params.eps > kEpsilon0))
    throw std::invalid_argument("eps out of range");

  FNPoint state = p;
  SystolePair sys = stratum_systoles(state, params);
  double time = 0;
  auto record = [&](const FNPoint& q, const SystoleSet& s) {
    traj.states.push_back(q);
    traj.times.push_back(time);
    traj.systoles.push_back(s.systole);
    traj.ks.push_back(static_cast<int>(s.classes.size()));
    double lo = s.classes.front().length, hi = lo;
    for (const auto& c : s.classes) {
      lo = std::min(lo, c.length);
      hi = std::max(hi, c.length);
    }
    traj.spreads.push_back(hi - lo);
  };
  record(state, sys.strict);

  if (stop_satisfied(stop, params.eps, params.tol_sys, sys.strict)) {
    traj.events.push_back({arrival_kind(stop), 0, sys.strict.systole, sys.strict.systole,
                           static_cast<int>(sys.strict.classes.size()),
                           static_cast<int>(sys.strict.classes.size())});
    return traj;
  }

  std::vector<Word> stratum;
  for (const auto& c : sys.wide.classes) stratum.push_back(c.word);

  double step = params.step0;
  for (int n = 0; n < params.max_steps; ++n) {
    Vec6 v;
    try {
      v = flow_direction(state, sys.wide.classes);
    } catch (const std::runtime_error&) {
      // The equal-rate system is infeasible: the near-tied stratum is a
      // local maximum of the systole.  Equalize the lengths in place and
      // stop there if the stopping rule holds at strict tolerance.
      FNPoint eq = state;
      if (!project_equal_lengths(eq, stratum, params.tol_sys))
        throw std::runtime_error("stalled");
      double moved = 0;
      for (int j = 0; j < 6; ++j) {
        const double d = coord(eq, j) - coord(state, j);
        moved += d * d;
      }
      time += std::sqrt(moved);
      state = eq;
      sys = stratum_systoles(state, params);
      record(state, sys.strict);
      if (stop_satisfied(stop, params.eps, params.tol_sys, sys.strict)) {
        traj.events.push_back({arrival_kind(stop), time, sys.strict.systole, sys.strict.systole,
                               static_cast<int>(sys.strict.classes.size()),
                               static_cast<int>(sys.strict.classes.size())});
        return traj;
      }
      throw std::runtime_error("stalled");
    }
    FNPoint trial = state;
    for (int j = 0; j < 6; ++j) coord(trial, j) += step * v[j];
    if (!project_equal_lengths(trial, stratum, params.tol_sys) ||
        trial.lengths[0] <= 0 || trial.lengths[1] <= 0 || trial.lengths[2] <= 0) {
      step *= 0.5;
      if (step < params.min_step) throw std::runtime_error("stalled");
      continue;
    }
    const SystolePair trial_sys = stratum_systoles(trial, params);
    const std::set<Word> old_words(stratum.begin(), stratum.end());
    const std::set<Word> new_words = word_set(trial_sys.wide);
    const bool keeps_old =
        std::includes(new_words.begin(), new_words.end(), old_words.begin(), old_words.end());
    if (!keeps_old || trial_sys.strict.systole <= sys.strict.systole) {
      // overshot a stratum crossing (or the flow direction failed to
      // increase the systole): bisect the step
      step *= 0.5;
      if (step < params.min_step) throw std::runtime_error("stalled");
      continue;
    }
    if (new_words.size() > old_words.size()) {
      traj.events.push_back({FlowEvent::Kind::kStratumGrowth, time + step, sys.strict.systole,
                             trial_sys.strict.systole, static_cast<int>(old_words.size()),
                             static_cast<int>(new_words.size())});
      stratum.assign(new_words.begin(), new_words.end());
    }
    time += step;
    state = trial;
    sys = trial_sys;
    record(state, sys.strict);
    step = params.step0;
    if (stop_satisfied(stop, params.eps, params.tol_sys, sys.strict)) {
      traj.events.push_back({arrival_kind(stop), time, sys.strict.systole, sys.strict.systole,
                             static_cast<int>(sys.strict.classes.size()),
                             static_cast<int>(sys.strict.classes.size())});
      return traj;
    }
  }
  throw std::runtime_error("stalled");
}

}  // namespace roundwalk
