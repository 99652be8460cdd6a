#include "roundwalk/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_set>

namespace roundwalk {

namespace {

Word inverse_word(const Word& w) {
  Word r(w.rbegin(), w.rend());
  for (auto& l : r) l = inverse_letter(l);
  return r;
}

Word free_reduce(const Word& w) {
  Word out;
  for (std::uint8_t l : w) {
    if (!out.empty() && out.back() == inverse_letter(l))
      out.pop_back();
    else
      out.push_back(l);
  }
  return out;
}

Word cyclic_reduce(const Word& w0) {
  Word w = free_reduce(w0);
  std::size_t i = 0, j = w.size();
  while (j - i >= 2 && w[i] == inverse_letter(w[j - 1])) ++i, --j;
  return Word(w.begin() + i, w.begin() + j);
}

// a1 b1 a1^-1 b1^-1 a2 b2 a2^-1 b2^-1 and its inverse, all rotations
const std::vector<Word>& relator_rotations() {
  static const std::vector<Word> rots = [] {
    const Word r = {0, 2, 1, 3, 4, 6, 5, 7};
    std::vector<Word> v;
    for (const Word& base : {r, inverse_word(r)})
      for (int s = 0; s < 8; ++s) {
        Word w(8);
        for (int k = 0; k < 8; ++k) w[k] = base[(s + k) % 8];
        v.push_back(w);
      }
    return v;
  }();
  return rots;
}

// longest match of the cyclic word w, read from position i, against a prefix
// of the relator rotation s (never more than one full turn of w)
int match_len(const Word& w, std::size_t i, const Word& s) {
  const std::size_t cap = std::min<std::size_t>(8, w.size());
  std::size_t p = 0;
  while (p < cap && w[(i + p) % w.size()] == s[p]) ++p;
  return static_cast<int>(p);
}

// s = u v with |u| = p and u v = 1 in the group, so u = v^-1; replace the
// matched u inside the cyclic word by v^-1
Word relator_rewrite(const Word& w, std::size_t i, const Word& s, int p) {
  Word out = inverse_word(Word(s.begin() + p, s.end()));
  for (std::size_t k = p; k < w.size(); ++k) out.push_back(w[(i + k) % w.size()]);
  return cyclic_reduce(out);
}

Word min_rotation(const Word& w) {
  Word best = w, r = w;
  for (std::size_t s = 1; s < w.size(); ++s) {
    std::rotate(r.begin(), r.begin() + 1, r.end());
    if (r < best) best = r;
  }
  return best;
}

bool periodic(const Word& w) {
  const std::size_t n = w.size();
  for (std::size_t d = 1; 2 * d <= n; ++d) {
    if (n % d) continue;
    bool ok = true;
    for (std::size_t i = d; i < n && ok; ++i) ok = w[i] == w[i % d];
    if (ok) return true;
  }
  return false;
}

struct Canon {
  Word word;   // empty iff the input is trivial in the group
  bool power;  // proper power of a shorter class
};

// Conjugacy normal form via Dehn's algorithm: the relator has length 8 and
// all pieces have length 1, so cyclically-shortest words are unique up to
// rotation, inversion and exactly-half relator swaps.  Canonical = lex-min
// over that (finite) closure.
Canon canonicalize(Word w) {
  w = cyclic_reduce(w);
  // shrink any more-than-half relator occurrence
  for (bool changed = true; changed && !w.empty();) {
    changed = false;
    for (std::size_t i = 0; i < w.size() && !changed; ++i)
      for (const Word& s : relator_rotations()) {
        if (match_len(w, i, s) < 5) continue;
        w = relator_rewrite(w, i, s, match_len(w, i, s));
        changed = true;
        break;
      }
  }
  if (w.empty()) return {w, false};
  std::set<Word> seen{min_rotation(w), min_rotation(cyclic_reduce(inverse_word(w)))};
  std::vector<Word> todo(seen.begin(), seen.end());
  bool power = false;
  while (!todo.empty()) {
    const Word cur = todo.back();
    todo.pop_back();
    if (periodic(cur)) power = true;
    for (std::size_t i = 0; i < cur.size(); ++i)
      for (const Word& s : relator_rotations()) {
        const int p = match_len(cur, i, s);
        if (p >= 5) return canonicalize(relator_rewrite(cur, i, s, p));
        if (p != 4 || cur.size() < 4) continue;
        const Word nw = relator_rewrite(cur, i, s, 4);
        if (nw.size() < cur.size()) return canonicalize(nw);
        const Word key = min_rotation(nw);
        if (seen.insert(key).second && seen.size() < 20000) todo.push_back(key);
      }
  }
  return {*seen.begin(), power};
}

// --- displacement-ball search over group elements ---

// quantized sign-normalized matrix, for exact-element deduplication
struct MatKey {
  std::int64_t v[4];
  bool operator==(const MatKey&) const = default;
};
struct MatKeyHash {
  std::size_t operator()(const MatKey& k) const {
    std::uint64_t h = 1469598103934665603ull;
    for (std::int64_t x : k.v) {
      h ^= static_cast<std::uint64_t>(x);
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

constexpr double kQuantum = 1e-6;

Isometry sign_normalized(const Isometry& m) {
  double lead = m.a;
  if (std::abs(lead) < 1e-12) lead = std::abs(m.b) > 1e-12 ? m.b : m.c;
  if (lead < 0) return {-m.a, -m.b, -m.c, -m.d};
  return m;
}

MatKey quantize(const Isometry& m) {
  const Isometry n = sign_normalized(m);
  return {{std::llround(n.a / kQuantum), std::llround(n.b / kQuantum),
           std::llround(n.c / kQuantum), std::llround(n.d / kQuantum)}};
}

// membership test tolerant to rounding near bucket boundaries
bool ball_contains(const std::unordered_set<MatKey, MatKeyHash>& set, const Isometry& m) {
  const Isometry n = sign_normalized(m);
  const double q[4] = {n.a / kQuantum, n.b / kQuantum, n.c / kQuantum, n.d / kQuantum};
  std::int64_t base[4];
  int alt[4];
  for (int i = 0; i < 4; ++i) {
    base[i] = std::llround(q[i]);
    const double frac = q[i] - static_cast<double>(base[i]);
    alt[i] = std::abs(frac) > 0.5 - 2e-3 ? (frac > 0 ? 1 : -1) : 0;
  }
  for (int mask = 0; mask < 16; ++mask) {
    MatKey k;
    bool valid = true;
    for (int i = 0; i < 4; ++i) {
      const int off = (mask >> i) & 1;
      if (off && !alt[i]) {
        valid = false;
        break;
      }
      k.v[i] = base[i] + off * alt[i];
    }
    if (valid && set.count(k)) return true;
  }
  return false;
}

double displacement_sumsq(const Isometry& m) {
  return m.a * m.a + m.b * m.b + m.c * m.c + m.d * m.d;
}

struct BallEntry {
  Isometry m;
  std::uint64_t word;  // 3 bits per letter
  int len;
};

Word unpack(std::uint64_t word, int len) {
  Word w(len);
  for (int i = 0; i < len; ++i) w[i] = static_cast<std::uint8_t>((word >> (3 * i)) & 7u);
  return w;
}

// all distinct group elements reachable by words of length <= max_len whose
// base-point displacement stays within radius
template <typename Visit>
void ball_search(const FuchsianGroup& group, int max_len, double radius, Visit&& visit) {
  const double cap = 2.0 * std::cosh(radius);
  std::unordered_set<MatKey, MatKeyHash> visited;
  visited.insert(quantize(Isometry::identity()));
  std::vector<BallEntry> frontier{{Isometry::identity(), 0, 0}}, next;
  for (int level = 1; level <= max_len && !frontier.empty(); ++level) {
    next.clear();
    for (const BallEntry& e : frontier)
      for (std::uint8_t l = 0; l < 8; ++l) {
        if (e.len > 0 && l == inverse_letter(static_cast<std::uint8_t>((e.word >> (3 * (e.len - 1))) & 7u)))
          continue;
        const Isometry m = e.m * group.letter(l);
        if (displacement_sumsq(m) > cap) continue;
        if (ball_contains(visited, m)) continue;
        visited.insert(quantize(m));
        const std::uint64_t word = e.word | (static_cast<std::uint64_t>(l) << (3 * e.len));
        visit(m, word, level);
        next.push_back({m, word, level});
      }
    std::swap(frontier, next);
  }
}

bool class_less(const GeodesicClass& x, const GeodesicClass& y) {
  if (x.length != y.length) return x.length < y.length;
  if (x.word.size() != y.word.size()) return x.word.size() < y.word.size();
  return x.word < y.word;
}

GeodesicClass make_class(const FuchsianGroup& group, const Word& canon) {
  GeodesicClass c;
  c.word = canon;
  c.matrix = group.evaluate(canon);
  c.length = translation_length(c.matrix);
  c.axis = axis(c.matrix);
  return c;
}

// minimum length-per-letter over generators and cyclically reduced two-letter
// products; drives the heuristic word-length bound
double lambda_min(const FuchsianGroup& group) {
  double lm = std::numeric_limits<double>::infinity();
  for (std::uint8_t l = 0; l < 8; l += 2) lm = std::min(lm, translation_length(group.letter(l)));
  for (std::uint8_t l1 = 0; l1 < 8; ++l1)
    for (std::uint8_t l2 = 0; l2 < 8; ++l2) {
      if (l2 == inverse_letter(l1)) continue;
      const Isometry m = group.letter(l1) * group.letter(l2);
      if (is_hyperbolic(m)) lm = std::min(lm, translation_length(m) / 2.0);
    }
  return lm;
}

}  // namespace

std::vector<GeodesicClass> enumerate_classes(const FuchsianGroup& group, int max_word_length) {
  if (max_word_length < 1) throw std::invalid_argument("max_word_length must be positive");
  std::map<Word, GeodesicClass> classes;
  Word w;
  auto consider = [&] {
    if (w.size() >= 2 && w.front() == inverse_letter(w.back())) return;  // not cyclically reduced
    const Canon c = canonicalize(w);
    if (c.word.empty() || c.power || classes.count(c.word)) return;
    classes.emplace(c.word, make_class(group, c.word));
  };
  auto rec = [&](auto&& self) -> void {
    for (std::uint8_t l = 0; l < 8; ++l) {
      if (!w.empty() && l == inverse_letter(w.back())) continue;
      w.push_back(l);
      consider();
      if (static_cast<int>(w.size()) < max_word_length) self(self);
      w.pop_back();
    }
  };
  rec(rec);
  std::vector<GeodesicClass> out;
  out.reserve(classes.size());
  for (auto& [_, c] : classes) out.push_back(std::move(c));
  std::sort(out.begin(), out.end(), class_less);
  return out;
}

std::vector<GeodesicClass> length_spectrum(const FuchsianGroup& group, double cutoff,
                                           const SpectrumParams& params) {
  if (cutoff <= 0) throw std::invalid_argument("cutoff must be positive");
  const int bound = static_cast<int>(std::ceil(cutoff / lambda_min(group))) + 4;
  if (bound > params.hard_cap) throw std::runtime_error("cutoff too deep");
  const int max_len = bound + params.extra_words;
  const double radius = cutoff + 2.0 * (params.axis_pad + params.extra_pad);

  std::map<Word, GeodesicClass> classes;
  ball_search(group, max_len, radius, [&](const Isometry& m, std::uint64_t word, int len) {
    if (!is_hyperbolic(m) || translation_length(m) > cutoff + 1e-12) return;
    const Canon c = canonicalize(unpack(word, len));
    if (c.word.empty() || c.power || classes.count(c.word)) return;
    GeodesicClass g = make_class(group, c.word);
    if (g.length <= cutoff + 1e-12) classes.emplace(c.word, std::move(g));
  });
  std::vector<GeodesicClass> out;
  out.reserve(classes.size());
  for (auto& [_, c] : classes) out.push_back(std::move(c));
  std::sort(out.begin(), out.end(), class_less);
  return out;
}

bool intersects(const FuchsianGroup& group, const GeodesicClass& g1, const GeodesicClass& g2,
                const SpectrumParams& params) {
  if (canonicalize(g1.word).word == canonicalize(g2.word).word)
    throw std::invalid_argument("same class");
  // collar theorem: two sufficiently short closed geodesics are disjoint
  if (g1.length <= kEpsilon0 && g2.length <= kEpsilon0) return false;
  const GeodesicAxis a1 = g1.axis, a2 = g2.axis;
  if (axes_cross(a1, a2)) return true;
  const double radius =
      0.5 * (g1.length + g2.length) + 2.0 * (params.axis_pad + params.extra_pad);
  bool crossing = false;
  ball_search(group, 10 + params.extra_words, radius,
              [&](const Isometry& h, std::uint64_t, int) {
                if (crossing) return;
                const GeodesicAxis t2{h.apply_boundary(a2.attracting),
                                      h.apply_boundary(a2.repelling)};
                if (axes_cross(a1, t2)) crossing = true;
                const GeodesicAxis t1{h.apply_boundary(a1.attracting),
                                      h.apply_boundary(a1.repelling)};
                if (axes_cross(a2, t1)) crossing = true;
              });
  return crossing;
}

SystoleSet systole_set(const FuchsianGroup& group, double tol_sys, const SpectrumParams& params) {
  // Explicit seed classes (generators and the third cuff word): in
  // degenerate regions the displacement-ball search can prune the word path
  // to a short class even though the class itself is short, so the known
  // words are merged into every searched spectrum.
  std::vector<GeodesicClass> seeds;
  for (std::uint8_t l = 0; l < 8; l += 2) seeds.push_back(make_class(group, canonicalize(Word{l}).word));
  seeds.push_back(make_class(group, canonicalize(cuff_words()[2]).word));

  // the shortest seed is an upper bound for the systole
  double ub = std::numeric_limits<double>::infinity();
  for (const auto& seed : seeds) ub = std::min(ub, seed.length);
  const auto merge_seeds = [&](std::vector<GeodesicClass> spec, double cutoff) {
    for (const auto& seed : seeds) {
      if (seed.length > cutoff) continue;
      bool present = false;
      for (const auto& c : spec) present = present || c.word == seed.word;
      if (!present) spec.push_back(seed);
    }
    std::sort(spec.begin(), spec.end(), class_less);
    return spec;
  };

  const auto head =
      merge_seeds(length_spectrum(group, ub * (1.0 + 1e-12), params), ub * (1.0 + 1e-12));
  if (head.empty()) throw std::runtime_error("spectrum search failed");
  const double first = head.front().length;

  SystoleSet s;
  s.next_length = std::numeric_limits<double>::infinity();
  s.systole = first;
  for (const auto& c : head) {
    if (c.length <= first + tol_sys)
      s.classes.push_back(c);
    else {
      s.next_length = c.length;
      break;
    }
  }
  double cutoff = first * 1.5;
  for (int attempt = 0; attempt < 3; ++attempt) {
    std::vector<GeodesicClass> spec;
    try {
      spec = merge_seeds(length_spectrum(group, cutoff, params), cutoff);
    } catch (const std::runtime_error&) {
      break;  // widening ran past the word-length cap; keep what we have
    }
    s.classes.clear();
    s.systole = spec.front().length;
    for (auto& c : spec) {
      if (c.length <= s.systole + tol_sys)
        s.classes.push_back(std::move(c));
      else {
        s.next_length = c.length;
        break;
      }
    }
    if (std::isfinite(s.next_length)) break;
    cutoff *= 1.5;
  }
  s.degenerate = s.next_length - s.systole < 10.0 * tol_sys;
  for (std::size_t i = 0; i < s.classes.size(); ++i)
    for (std::size_t j = i + 1; j < s.classes.size(); ++j)
      if (intersects(group, s.classes[i], s.classes[j], params))
        s.intersection_pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
  return s;
}

std::string spectrum_to_csv(const std::vector<GeodesicClass>& classes) {
  std::string out = "word,length,trace\n";
  char buf[96];
  for (const auto& c : classes) {
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g\n", c.length, c.matrix.trace());
    out += word_to_string(c.word);
    out += buf;
  }
  return out;
}

}  // namespace roundwalk
