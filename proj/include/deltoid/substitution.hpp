// Substitution rules derived from the arrangement.
//
// For a prototile with canonical triangle t, the scaled copy iota_{d,p} t is
// congruent to a triangle T' of some pattern (d, kappa'), obtained by shifting
// all three segment labels by n.  The elementary triangles of that pattern
// inside T' give the dissection; they are pulled back onto iota t and
// identified with prototiles by their decoration.
#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "deltoid/prototiles.hpp"

namespace deltoid {

using EdgeWord = std::vector<EdgeLetter>;

inline EdgeWord mir(const EdgeWord& w) { return EdgeWord(w.rbegin(), w.rend()); }
inline EdgeWord rho(const EdgeWord& w) {
  EdgeWord r;
  for (const auto& l : w) r.push_back(l.negated());
  return r;
}
/// Projection to length classes.
inline std::vector<int> proj(const EdgeWord& w) {
  std::vector<int> r;
  for (const auto& l : w) r.push_back(l.nu);
  return r;
}
inline std::string to_string(const EdgeWord& w) {
  std::string s;
  for (const auto& l : w) s += l.to_string();
  return s;
}
inline bool palindromic(const std::vector<int>& v) { return std::equal(v.begin(), v.end(), v.rbegin()); }

/// S-indices subdividing iota_{d,l} S_j.
inline std::vector<int> edge_subdivision(int d, int l, int j) {
  const int q = d % 2 ? (d - 1) / 2 : d / 2;
  if (j < 1 || j > q || l < 2 || l > q) throw DomainError("edge_subdivision: index out of range");
  std::vector<int> r;
  if (j <= l)
    for (int n = l - j + 1; n <= l + j - 1; n += 2) r.push_back(n);
  else
    for (int n = j - l + 1; n <= j + l - 1; n += 2) r.push_back(n);
  return r;
}

struct Located {
  TriangleId target;
  int shift = 0;
  int sign = 0;        // target excess = sign * p
  Isometry to_parent;  // maps target onto iota * t
};

/// Every triangle T' = Delta^(kappa')(lambda+n, mu+n, nu+n) directly congruent
/// to iota_{d,p} t with segment lambda+n matched to lambda.  Ordered by
/// preference: same kappa first, then target excess -e*p, then smallest n.
inline std::vector<Located> locate_candidates(int d, int p, const TriangleId& t) {
  if (!t.elementary()) throw DomainError("locate_inflated: source is not elementary");
  if (p < 2 || p > d / 2) throw DomainError("locate_inflated: p out of range");
  const int e = t.excess();
  const ExactScalar iota = inflation_factor(d, p);
  const TriangleGeometry tg = triangle_geometry(t);
  std::array<Point2, 3> scaled;
  for (int k = 0; k < 3; ++k) scaled[static_cast<std::size_t>(k)] = Point2(tg.v[static_cast<std::size_t>(k)].z * iota);
  std::vector<SymmetryIndex> fam{t.sym};
  for (const auto& s : pattern_family(d))
    if (!(s == t.sym)) fam.push_back(s);
  std::vector<Located> out;
  for (const auto& s2 : fam)
    for (int sign : {-e, e}) {
      if (sign == e && 2 * p == d) continue;  // +p and -p coincide
      for (int n = 0; n < d; ++n) {
        std::array<int, 3> lab{};
        for (int k = 0; k < 3; ++k) lab[static_cast<std::size_t>(k)] = t.sym.label(t.idx[static_cast<std::size_t>(k)]) + n;
        TriangleId cand = TriangleId::make(s2, lab[0], lab[1], lab[2]);
        if (detail::mod(cand.sigma() - s2.kappa - sign * p, d) != 0) continue;
        TriangleGeometry cg = triangle_geometry(cand);
        const int want = s2.index(t.sym.label(tg.line[0]) + n);
        const int k0 = static_cast<int>(std::find(cg.line.begin(), cg.line.end(), want) - cg.line.begin());
        if (k0 == 3) continue;
        std::array<Point2, 3> from{cg.v[static_cast<std::size_t>(k0)], cg.v[static_cast<std::size_t>((k0 + 1) % 3)],
                                   cg.v[static_cast<std::size_t>((k0 + 2) % 3)]};
        auto g = isometry_between(d, from, scaled, false);
        if (g) out.push_back(Located{cand, n, sign, *g});
      }
    }
  return out;
}

/// Preferred triangle congruent to iota_{d,p} t.
inline Located locate_inflated(int d, int p, const TriangleId& t) {
  auto c = locate_candidates(d, p, t);
  if (c.empty()) throw DomainError("locate_inflated: no congruent triangle for " + t.to_string());
  return c.front();
}

struct RuleChild {
  int tile = -1;
  Isometry iso;  // maps the child's canonical placement into the parent's inflated frame
};

struct SubstitutionRule {
  int source = -1;
  std::array<EdgeWord, 3> edge_words;
  std::vector<RuleChild> children;
  std::optional<Located> located;  // set for rules read off the arrangement directly
  int borrowed_from = -1;          // prototile whose dissection was transported
};

namespace detail {

inline Point2 centroid3(const std::array<Point2, 3>& v) { return Point2(v[0].z + v[1].z + v[2].z); }

inline std::array<Point2, 3> placed_vertices(const Prototile& P, const Isometry& g) {
  return {g(P.vertices()[0]), g(P.vertices()[1]), g(P.vertices()[2])};
}

/// Sort children by centroid, x then y, exactly.
inline void sort_children(const PrototileSet& set, std::vector<RuleChild>& ch) {
  std::vector<std::pair<Point2, RuleChild>> keyed;
  for (auto& c : ch) keyed.emplace_back(centroid3(placed_vertices(set[c.tile], c.iso)), c);
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    const int cx = compare(a.first.x(), b.first.x());
    if (cx != 0) return cx < 0;
    return compare(a.first.y(), b.first.y()) < 0;
  });
  ch.clear();
  for (auto& kv : keyed) ch.push_back(kv.second);
}

/// Boundary words of a dissection of the triangle `outer` (anticlockwise).
inline std::array<EdgeWord, 3> boundary_words(const PrototileSet& set, const std::array<Point2, 3>& outer,
                                              const std::vector<RuleChild>& ch) {
  std::array<EdgeWord, 3> out;
  for (int k = 0; k < 3; ++k) {
    const Point2& a = outer[static_cast<std::size_t>(k)];
    const Point2& b = outer[static_cast<std::size_t>((k + 1) % 3)];
    std::vector<std::pair<ExactScalar, EdgeLetter>> found;
    for (const auto& c : ch) {
      const Prototile& P = set[c.tile];
      auto v = placed_vertices(P, c.iso);
      for (int j = 0; j < 3; ++j) {
        const Point2& u = v[static_cast<std::size_t>(j)];
        const Point2& w = v[static_cast<std::size_t>((j + 1) % 3)];
        if (on_segment(a, b, u) && on_segment(a, b, w)) found.emplace_back(dist2(a, u), P.edges()[static_cast<std::size_t>(j)]);
      }
    }
    std::sort(found.begin(), found.end(), [](const auto& x, const auto& y) { return compare(x.first, y.first) < 0; });
    for (auto& f : found) out[static_cast<std::size_t>(k)].push_back(f.second);
  }
  return out;
}

}  // namespace detail

/// Rule read off the arrangement for prototile V (the "+" rule).
inline SubstitutionRule derive_plus_rule(const PrototileSet& set, int p, int V) {
  const int d = set.d();
  const Prototile& P = set[V];
  Located loc = locate_inflated(d, p, P.canon.base);
  const Arrangement& arr = arrangement(loc.target.sym);
  TriangleGeometry tg = triangle_geometry(loc.target);
  SubstitutionRule rule;
  rule.source = V;
  ExactScalar covered(set[0].area2().field(), 0);
  for (const auto& c : arr.elementary_triangles()) {
    TriangleGeometry cg = triangle_geometry(c);
    if (!in_triangle(tg.v, cg.v[0]) || !in_triangle(tg.v, cg.v[1]) || !in_triangle(tg.v, cg.v[2])) continue;
    auto [W, k] = set.canonicalize(c);
    rule.children.push_back(RuleChild{W, loc.to_parent.compose(k)});
    covered = covered + area2(cg.v);
  }
  if (covered != area2(tg.v)) throw DomainError("derive_rule: children do not cover " + loc.target.to_string());
  rule.located = loc;
  detail::sort_children(set, rule.children);
  return rule;
}

/// Moves the dissection of prototile S onto prototile T by a direct congruence.
/// Edge correspondences that negate T's letters are preferred.
inline SubstitutionRule transport_rule(const PrototileSet& set, const ExactScalar& iota, const SubstitutionRule& src, int T) {
  const Prototile& S = set[src.source];
  const Prototile& P = set[T];
  const int d = set.d();
  std::optional<Isometry> best;
  int best_score = -1;
  for (int r = 0; r < 3; ++r) {
    std::array<Point2, 3> to{P.vertices()[static_cast<std::size_t>(r)], P.vertices()[static_cast<std::size_t>((r + 1) % 3)],
                             P.vertices()[static_cast<std::size_t>((r + 2) % 3)]};
    auto g = isometry_between(d, S.vertices(), to, false);
    if (!g) continue;
    int score = 0;
    for (int k = 0; k < 3; ++k)
      if (P.edges()[static_cast<std::size_t>((k + r) % 3)] == S.edges()[static_cast<std::size_t>(k)].negated()) ++score;
    if (score > best_score) {
      best_score = score;
      best = g;
    }
  }
  if (!best) throw DomainError("transport_rule: prototiles are not directly congruent");
  const Isometry m = best->scaled_translation(iota);
  SubstitutionRule rule;
  rule.source = T;
  rule.borrowed_from = src.source;
  for (const auto& c : src.children) rule.children.push_back(RuleChild{c.tile, m.compose(c.iso)});
  detail::sort_children(set, rule.children);
  return rule;
}

/// Partner whose "+" dissection defines the "-" rule of T.
inline int minus_partner(const PrototileSet& set, int T) {
  const Prototile& P = set[T];
  if (!P.isosceles()) {
    // same shape as T with all letters negated
    Signature neg{P.edges()[0].negated(), P.edges()[1].negated(), P.edges()[2].negated()};
    auto id = set.find_signature(neg);
    if (id) return *id;
  }
  return P.tilde;
}

class RuleSet {
 public:
  RuleSet(int d, int p, int sign) : d_(d), p_(p), sign_(sign), iota_(inflation_factor(d, p)) {
    if (sign != 1 && sign != -1) throw DomainError("rule sign must be + or -");
    const PrototileSet& set = prototile_set(d);
    std::vector<SubstitutionRule> plus;
    for (const auto& P : set.tiles()) plus.push_back(derive_plus_rule(set, p, P.id));
    if (sign > 0) {
      rules_ = std::move(plus);
    } else {
      for (const auto& P : set.tiles()) {
        const int src = minus_partner(set, P.id);
        rules_.push_back(transport_rule(set, iota_, plus[static_cast<std::size_t>(src)], P.id));
      }
    }
    for (auto& r : rules_) {
      const Prototile& P = set[r.source];
      std::array<Point2, 3> outer{Point2(P.vertices()[0].z * iota_), Point2(P.vertices()[1].z * iota_),
                                  Point2(P.vertices()[2].z * iota_)};
      r.edge_words = detail::boundary_words(set, outer, r.children);
    }
    build_edge_map();
  }

  int d() const { return d_; }
  int p() const { return p_; }
  int sign() const { return sign_; }
  const ExactScalar& iota() const { return iota_; }
  const std::vector<SubstitutionRule>& rules() const { return rules_; }
  const SubstitutionRule& rule(int tile) const { return rules_.at(static_cast<std::size_t>(tile)); }
  std::string label() const { return "Phi(" + std::to_string(d_) + "," + std::to_string(p_) + "," + (sign_ > 0 ? "+" : "-") + ")"; }

  /// Edge inflation phi(letter); empty when the letter does not occur.
  const EdgeWord& edge_word(const EdgeLetter& l) const {
    static const EdgeWord none;
    auto it = edge_map_.find(l);
    return it == edge_map_.end() ? none : it->second;
  }
  const std::map<EdgeLetter, EdgeWord>& edge_map() const { return edge_map_; }
  /// Letters whose inflation differs between occurrences (should be empty).
  const std::vector<std::string>& edge_conflicts() const { return conflicts_; }

 private:
  void build_edge_map() {
    const PrototileSet& set = prototile_set(d_);
    for (const auto& r : rules_)
      for (int k = 0; k < 3; ++k) {
        const EdgeLetter& l = set[r.source].edges()[static_cast<std::size_t>(k)];
        auto [it, fresh] = edge_map_.emplace(l, r.edge_words[static_cast<std::size_t>(k)]);
        if (!fresh && it->second != r.edge_words[static_cast<std::size_t>(k)])
          conflicts_.push_back(l.to_string() + ": " + to_string(it->second) + " vs " + to_string(r.edge_words[static_cast<std::size_t>(k)]) +
                               " in " + set[r.source].name);
      }
  }

  int d_, p_, sign_;
  ExactScalar iota_;
  std::vector<SubstitutionRule> rules_;
  std::map<EdgeLetter, EdgeWord> edge_map_;
  std::vector<std::string> conflicts_;
};

/// phi applied letter by letter; letters without an image throw.
inline EdgeWord inflate_word(const RuleSet& rs, const EdgeWord& w) {
  EdgeWord out;
  for (const auto& l : w) {
    const EdgeWord& img = rs.edge_word(l);
    if (img.empty()) throw DomainError("inflate_word: no image for " + l.to_string());
    out.insert(out.end(), img.begin(), img.end());
  }
  return out;
}

/// Cached rule set Phi_{d,p,sign}.
inline const RuleSet& rule_set(int d, int p, int sign) {
  static std::mutex m;
  static std::map<std::array<int, 3>, std::unique_ptr<RuleSet>> cache;
  std::unique_lock<std::mutex> lock(m);
  auto& slot = cache[{d, p, sign}];
  if (!slot) slot = std::make_unique<RuleSet>(d, p, sign);
  return *slot;
}

inline SubstitutionRule derive_rule(int d, int p, int sign, int V) { return rule_set(d, p, sign).rule(V); }

inline EdgeWord edge_inflation(int d, int p, int sign, const EdgeLetter& l) { return rule_set(d, p, sign).edge_word(l); }

/// Listing in union notation, e.g. "P -> A u B~".
inline std::string rule_listing(const RuleSet& rs) {
  const PrototileSet& set = prototile_set(rs.d());
  std::ostringstream os;
  for (const auto& r : rs.rules()) {
    os << set[r.source].name << " ->";
    bool first = true;
    for (const auto& c : r.children) {
      os << (first ? " " : " u ") << set[c.tile].name;
      first = false;
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace deltoid
