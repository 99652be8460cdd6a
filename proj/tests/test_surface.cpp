#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "roundwalk/surface.hpp"

using namespace roundwalk;

namespace {

GeodesicClass class_of(const FuchsianGroup& g, const Word& w) {
  GeodesicClass c;
  c.word = w;
  c.matrix = g.evaluate(w);
  c.length = translation_length(c.matrix);
  c.axis = axis(c.matrix);
  return c;
}

double fn_distance(const FNPoint& x, const FNPoint& y) {
  double s = 0;
  for (int i = 0; i < 3; ++i) {
    s += (x.lengths[i] - y.lengths[i]) * (x.lengths[i] - y.lengths[i]);
    s += (x.twists[i] - y.twists[i]) * (x.twists[i] - y.twists[i]);
  }
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("classify reference points") {
  {
    auto c = classify(FNPoint{{0.5, 2, 2}, {0, 0, 0}}, 1.0);
    CHECK_FALSE(c.in_thick);
    CHECK(c.systoles.classes.size() == 1);
    CHECK_FALSE(c.in_S);
    CHECK_FALSE(c.in_S_prime);
    CHECK_FALSE(c.in_S_doubleprime);
  }
  {
    auto c = classify(FNPoint{{1.5, 1.5, 1.5}, {0, 0, 0}}, 1.0);
    CHECK(c.in_thick);
    CHECK(c.systoles.systole == doctest::Approx(1.5).epsilon(1e-8));
  }
  CHECK_THROWS_AS(classify(FNPoint{{1, 1, 1}, {0, 0, 0}}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(classify(FNPoint{{1, 1, 1}, {0, 0, 0}}, kEpsilon0 + 0.1), std::invalid_argument);
}

TEST_CASE("cuff length gradient is a coordinate direction") {
  const FNPoint p{{1.3, 1.7, 2.1}, {0.4, -0.7, 0.9}};
  auto g = fn_to_group(p);
  const Vec6 gr = length_gradient(p, class_of(g, Word{0}));
  CHECK(gr[0] == doctest::Approx(1.0).epsilon(1e-4));
  for (int i = 1; i < 6; ++i) CHECK(std::abs(gr[i]) < 1e-4);
}

TEST_CASE("gradient matches a fourth-order stencil") {
  const FNPoint p{{1.3, 1.7, 2.1}, {0.4, -0.7, 0.9}};
  auto g = fn_to_group(p);
  for (const Word w : {Word{2}, Word{0, 2}, cuff_words()[2]}) {
    const Vec6 gr = length_gradient(p, class_of(g, w));
    double scale = 0;
    for (double v : gr) scale = std::max(scale, std::abs(v));
    for (int i = 0; i < 6; ++i) {
      const double h = 1e-4;
      auto len_at = [&](double off) {
        FNPoint q = p;
        (i < 3 ? q.lengths[i] : q.twists[i - 3]) += off;
        return translation_length(fn_to_group(q).evaluate(w));
      };
      const double o4 =
          (-len_at(2 * h) + 8 * len_at(h) - 8 * len_at(-h) + len_at(-2 * h)) / (12 * h);
      CHECK(std::abs(gr[i] - o4) < 1e-3 * std::max(1.0, scale));
    }
  }
}

TEST_CASE("stratum direction") {
  const FNPoint p{{1.3, 1.7, 2.1}, {0.4, -0.7, 0.9}};
  auto g = fn_to_group(p);
  {
    SystoleSet s;
    s.classes = {class_of(g, Word{0})};
    s.systole = s.classes[0].length;
    const Vec6 v = stratum_direction(p, s);
    CHECK(v[0] == doctest::Approx(1.0).epsilon(1e-6));
    for (int i = 1; i < 6; ++i) CHECK(std::abs(v[i]) < 1e-3);
  }
  {
    const FNPoint q{{1.5, 1.5, 1.5}, {0, 0, 0}};
    auto s = systole_set(fn_to_group(q));
    REQUIRE(s.classes.size() == 3);
    const Vec6 v = stratum_direction(q, s);
    const double r = 1.0 / std::sqrt(3.0);
    for (int i = 0; i < 3; ++i) CHECK(v[i] == doctest::Approx(r).epsilon(1e-3));
    for (int i = 3; i < 6; ++i) CHECK(std::abs(v[i]) < 1e-3);
    // all stratum lengths grow at the same rate along v
    double rate0 = 0;
    for (std::size_t c = 0; c < s.classes.size(); ++c) {
      const Vec6 gr = length_gradient(q, s.classes[c]);
      double rate = 0;
      for (int i = 0; i < 6; ++i) rate += gr[i] * v[i];
      if (c == 0)
        rate0 = rate;
      else
        CHECK(rate == doctest::Approx(rate0).epsilon(1e-9));
      CHECK(rate > 0);
    }
  }
  {
    SystoleSet s;  // repeated gradient makes the Gram matrix singular
    s.classes = {class_of(g, Word{0}), class_of(g, Word{0})};
    CHECK_THROWS_WITH_AS(stratum_direction(p, s), "degenerate stratum", std::runtime_error);
  }
}

TEST_CASE("thick-part flow from a thin start") {
  const FNPoint p{{0.5, 2, 2}, {0, 0, 0}};
  FlowParams fp;
  fp.eps = 1.0;
  const auto tr = flow(p, StopRule::kThick, fp);
  CHECK(tr.terminal_class == "thick");
  CHECK(tr.systoles.back() >= 1.0 - kTolSys);
  CHECK(tr.systoles.back() <= 1.05);
  int growth = 0;
  for (auto& e : tr.events)
    if (e.kind == FlowEvent::Kind::kStratumGrowth) ++growth;
  CHECK(growth <= 3);
  for (std::size_t i = 1; i < tr.systoles.size(); ++i) {
    CHECK(tr.systoles[i] > tr.systoles[i - 1]);
    CHECK(tr.ks[i] >= tr.ks[i - 1]);
  }
  for (double s : tr.spreads) CHECK(s <= 10 * kTolSys);
  CHECK(classify(tr.states.back(), fp.eps).in_thick);

  // idempotence: flowing the terminal state takes zero steps
  const auto again = flow(tr.states.back(), StopRule::kThick, fp);
  CHECK(again.states.size() == 1);

  // determinism: identical reruns
  const auto rerun = flow(p, StopRule::kThick, fp);
  REQUIRE(rerun.states.size() == tr.states.size());
  for (std::size_t i = 0; i < tr.states.size(); ++i)
    CHECK(fn_distance(rerun.states[i], tr.states[i]) == 0.0);
}

TEST_CASE("already-thick start takes zero steps") {
  FlowParams fp;
  fp.eps = 1.0;
  const auto tr = flow(FNPoint{{1.5, 1.5, 1.5}, {0, 0, 0}}, StopRule::kThick, fp);
  CHECK(tr.states.size() == 1);
  REQUIRE(tr.events.size() == 1);
  CHECK(tr.events[0].kind == FlowEvent::Kind::kThickArrival);
}

TEST_CASE("spine flow reaches intersecting systoles") {
  const auto tr = flow(FNPoint{{0.5, 0.6, 2}, {0, 0, 0}}, StopRule::kSpine);
  CHECK(tr.terminal_class == "spine-S");
  const auto c = classify(tr.states.back(), 1.0);
  CHECK(c.in_S);
  CHECK(c.systoles.classes.size() >= 2);
  CHECK_FALSE(c.systoles.intersection_pairs.empty());
  for (double s : tr.spreads) CHECK(s <= 10 * kTolSys);
  bool grew = false;
  for (auto& e : tr.events)
    if (e.kind == FlowEvent::Kind::kStratumGrowth) grew = true;
  CHECK(grew);
}

TEST_CASE("nearby starts end nearby") {
  FlowParams fp;
  fp.eps = 1.0;
  const FNPoint p{{0.5, 2, 2}, {0.3, -0.2, 0.1}};
  const auto base = flow(p, StopRule::kThick, fp);
  double prev = 1e9;
  for (double delta : {1e-2, 1e-3, 1e-4}) {
    FNPoint q = p;
    q.lengths[1] += delta;
    q.twists[0] += delta;
    const auto tr = flow(q, StopRule::kThick, fp);
    const double dist = fn_distance(tr.states.back(), base.states.back());
    CHECK(dist < prev);
    prev = dist;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("flow rejects a bad thick threshold") {
  CHECK_THROWS_AS(flow(FNPoint{{1, 1, 1}, {0, 0, 0}}, StopRule::kThick,
                       FlowParams{.eps = kEpsilon0 + 1}),
                  std::invalid_argument);
}
