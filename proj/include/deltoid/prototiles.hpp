// Decorated prototiles.
//
// An elementary triangle t of the pattern (d, kappa) carries an inscribed
// elementary triangle of the pattern (2d, -kappa).  Each edge of t contains
// one inscribed vertex, splitting it into two sections; comparing the two
// sections in anticlockwise order gives the edge letter W_nu^{+1, 0, -1}.
#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "deltoid/arrangement.hpp"

namespace deltoid {

struct EdgeLetter {
  int nu = 0;      // length class, edge length S_nu
  int orient = 0;  // +1, 0, -1

  EdgeLetter negated() const { return EdgeLetter{nu, -orient}; }
  std::string to_string() const {
    return "W" + std::to_string(nu) + (orient > 0 ? "+" : orient < 0 ? "-" : "0");
  }
  static EdgeLetter parse(const std::string& s) {
    if (s.size() < 3 || s[0] != 'W') throw DomainError("bad edge letter: " + s);
    EdgeLetter l;
    l.nu = std::stoi(s.substr(1, s.size() - 2));
    const char o = s.back();
    l.orient = o == '+' ? 1 : o == '-' ? -1 : o == '0' ? 0 : throw DomainError("bad edge letter: " + s);
    return l;
  }
  friend bool operator==(const EdgeLetter& a, const EdgeLetter& b) { return a.nu == b.nu && a.orient == b.orient; }
  friend bool operator!=(const EdgeLetter& a, const EdgeLetter& b) { return !(a == b); }
  friend bool operator<(const EdgeLetter& a, const EdgeLetter& b) {
    return a.nu != b.nu ? a.nu < b.nu : a.orient < b.orient;
  }
};

using Signature = std::array<EdgeLetter, 3>;

/// Lexicographically least cyclic rotation.
inline Signature canonical_rotation(const Signature& s) {
  Signature best = s;
  for (int r = 1; r < 3; ++r) {
    Signature c{s[static_cast<std::size_t>(r)], s[static_cast<std::size_t>((r + 1) % 3)], s[static_cast<std::size_t>((r + 2) % 3)]};
    if (c < best) best = c;
  }
  return best;
}

/// Mirror image with the decoration reflected: reversed order, negated letters.
inline Signature tilde_signature(const Signature& s) {
  return canonical_rotation({s[2].negated(), s[1].negated(), s[0].negated()});
}
/// Mirror shape carrying the same edge subdivisions.
inline Signature hat_signature(const Signature& s) { return canonical_rotation({s[2], s[1], s[0]}); }

/// Squared length of S_n in the 2d pattern, as an element of the d field.
inline ExactScalar double_section_length2(int d, int n) {
  // S_n^(2d) = 2 (c_{n-1} - c_{n+1}), c_k = cos(k pi / 2d); squares reduce to cos(k pi / d).
  const auto* f = field_for(d);
  ExactScalar one(f, 1);
  return (one + (cos_val(d, n - 1) + cos_val(d, n + 1)).divided_by(2) - cos_val(d, n) - cos_val(d, 1)) * 4;
}

/// A placed, decorated elementary triangle.
struct Decoration {
  TriangleId base;
  TriangleGeometry geom;
  TriangleId inscribed;  // in the pattern (2d, -kappa)
  std::array<Point2, 3> id_points;
  std::array<EdgeLetter, 3> edges;
  std::array<std::pair<int, int>, 3> sections;  // 2d length classes in anticlockwise order
};

inline Decoration decorate(const TriangleId& t) {
  if (!t.elementary()) throw DomainError("decorate: " + t.to_string() + " is not elementary");
  const auto& s = t.sym;
  const int d = s.d;
  const int e = t.excess();
  const int kp = -s.kappa;
  const auto* f = s.field();
  Decoration out;
  out.base = t;
  out.geom = triangle_geometry(t);
  std::array<int64_t, 3> a{};
  std::array<int, 3> j{};
  for (int k = 0; k < 3; ++k) {
    j[static_cast<std::size_t>(k)] = 2 * s.label(t.idx[static_cast<std::size_t>(k)]) - s.kappa - e;
    a[static_cast<std::size_t>(k)] = 3 * j[static_cast<std::size_t>(k)] - kp;
  }
  SymmetryIndex s2{2 * d, kp};
  out.inscribed = TriangleId::make(s2, j[0], j[1], j[2]);
  if (!out.inscribed.elementary()) throw DomainError("decorate: inscribed triangle is not elementary");
  std::array<Point2, 3> w{intersect_in(f, 2 * d, a[1], a[2]), intersect_in(f, 2 * d, a[0], a[2]), intersect_in(f, 2 * d, a[0], a[1])};
  std::vector<std::pair<int64_t, int64_t>> all_pairs;
  for (int k = 0; k < 3; ++k) {
    const Point2& p0 = out.geom.v[static_cast<std::size_t>(k)];
    const Point2& p1 = out.geom.v[static_cast<std::size_t>((k + 1) % 3)];
    int found = -1;
    for (int c = 0; c < 3; ++c)
      if (strictly_inside_segment(p0, p1, w[static_cast<std::size_t>(c)])) {
        if (found >= 0) throw DomainError("decorate: two inscribed vertices on one edge");
        found = c;
      }
    if (found < 0) throw DomainError("decorate: inscribed vertex missing on edge of " + t.to_string());
    const Point2& m = w[static_cast<std::size_t>(found)];
    out.id_points[static_cast<std::size_t>(k)] = m;
    ExactScalar l0 = dist2(p0, m), l1 = dist2(m, p1);
    const int c = compare(l0, l1);
    EdgeLetter L;
    L.nu = length_class(d, out.geom.angle[static_cast<std::size_t>((k + 2) % 3)]);
    L.orient = c < 0 ? 1 : c > 0 ? -1 : 0;
    out.edges[static_cast<std::size_t>(k)] = L;
    auto cls = [&](const ExactScalar& len2) {
      for (int n = 1; n <= d; ++n)
        if (double_section_length2(d, n) == len2) return n;
      throw DomainError("decorate: section is not a 2d section length");
    };
    out.sections[static_cast<std::size_t>(k)] = {cls(l0), cls(l1)};
  }
  return out;
}

struct Prototile {
  int id = -1;
  std::string name;
  Decoration canon;  // canonical placement
  Signature signature{};
  int tilde = -1;
  int hat = -1;
  int shape = -1;  // undecorated shape class (direct congruence)
  std::vector<TriangleId> occurrences;

  const std::array<Point2, 3>& vertices() const { return canon.geom.v; }
  const std::array<EdgeLetter, 3>& edges() const { return canon.edges; }
  const std::array<int, 3>& angles() const { return canon.geom.angle; }
  int chirality() const { return canon.base.excess(); }
  bool isosceles() const {
    const auto& e = canon.edges;
    return e[0].nu == e[1].nu || e[1].nu == e[2].nu || e[0].nu == e[2].nu;
  }
  /// Twice the area of the prototile.
  ExactScalar area2() const { return deltoid::area2(canon.geom.v); }
};

namespace detail {
inline const std::map<std::array<int, 3>, std::string>& names14() {
  static const std::map<std::array<int, 3>, std::string> m = {
      {{0, 1, 12}, "A"},   {{3, 4, 6}, "A^"},  {{2, 12, 13}, "B"}, {{2, 5, 6}, "B^"},   {{0, 2, 11}, "C"},
      {{2, 4, 7}, "C^"},   {{3, 11, 13}, "D"}, {{1, 5, 7}, "D^"},  {{0, 3, 10}, "E"},   {{1, 4, 8}, "E^"},
      {{4, 10, 13}, "F"},  {{0, 5, 8}, "F^"},  {{0, 4, 9}, "G"},   {{5, 9, 13}, "H"},   {{6, 8, 13}, "I"},
      {{5, 10, 12}, "I^"}, {{0, 6, 7}, "J"},   {{4, 11, 12}, "J^"}, {{1, 2, 10}, "K"},  {{2, 3, 8}, "K^"},
      {{1, 3, 9}, "L"},    {{6, 9, 12}, "M"},  {{7, 8, 12}, "N"},  {{6, 10, 11}, "N^"}, {{7, 9, 11}, "O"},
      {{8, 9, 10}, "P"}};
  return m;
}
inline int kappa_rank(int kappa) { return kappa == 0 ? 0 : kappa == -2 ? 1 : 2; }
}  // namespace detail

/// Name used in listings for other d: kappa and canonical labels.
inline std::string generated_name(const TriangleId& t) {
  auto l = t.labels();
  std::string s = std::to_string(l[0]) + "." + std::to_string(l[1]) + "." + std::to_string(l[2]);
  if (t.sym.kappa != 0) s += "k" + std::to_string(t.sym.kappa);
  return s;
}

/// Display form of a d=14 name: hats and tildes as combining marks.
inline std::string display_name(const std::string& name) {
  std::string base = name, marks;
  while (!base.empty() && (base.back() == '^' || base.back() == '~')) {
    marks.insert(marks.begin(), base.back());
    base.pop_back();
  }
  std::string out = base;
  for (char c : marks) out += c == '^' ? "̂" : "̃";
  return out;
}

/// The decorated prototile set F_d.
class PrototileSet {
 public:
  explicit PrototileSet(int d) : d_(d) {
    if (d < 5) throw DomainError("symmetry number d must be at least 5");
    std::vector<Decoration> decs;
    for (const auto& sym : pattern_family(d))
      for (const auto& t : triangular_pattern(sym)) decs.push_back(decorate(t));
    std::sort(decs.begin(), decs.end(), [](const Decoration& x, const Decoration& y) {
      const int rx = detail::kappa_rank(x.base.sym.kappa), ry = detail::kappa_rank(y.base.sym.kappa);
      if (rx != ry) return rx < ry;
      return x.base.labels() < y.base.labels();
    });
    for (auto& dec : decs) {
      Signature sig = canonical_rotation(dec.edges);
      auto it = by_sig_.find(sig);
      if (it == by_sig_.end()) {
        Prototile p;
        p.id = static_cast<int>(tiles_.size());
        p.canon = dec;
        p.signature = sig;
        by_sig_[sig] = p.id;
        tiles_.push_back(std::move(p));
        it = by_sig_.find(sig);
      }
      tiles_[static_cast<std::size_t>(it->second)].occurrences.push_back(dec.base);
    }
    for (auto& p : tiles_) {
      auto t = by_sig_.find(tilde_signature(p.signature));
      if (t == by_sig_.end()) throw DomainError("prototile without mirror partner");
      p.tilde = t->second;
      if (!p.isosceles()) {
        auto h = by_sig_.find(hat_signature(p.signature));
        if (h != by_sig_.end() && h->second != p.id) p.hat = h->second;
      }
    }
    // shapes: direct congruence classes ignoring orientation
    std::map<std::array<int, 3>, int> shapes;
    for (auto& p : tiles_) {
      std::array<int, 3> best{};
      bool first = true;
      for (int r = 0; r < 3; ++r) {
        std::array<int, 3> c{p.signature[static_cast<std::size_t>(r)].nu, p.signature[static_cast<std::size_t>((r + 1) % 3)].nu,
                             p.signature[static_cast<std::size_t>((r + 2) % 3)].nu};
        if (first || c < best) best = c;
        first = false;
      }
      auto [it, fresh] = shapes.emplace(best, static_cast<int>(shapes.size()));
      p.shape = it->second;
    }
    shape_count_ = static_cast<int>(shapes.size());
    assign_names();
  }

  int d() const { return d_; }
  std::size_t size() const { return tiles_.size(); }
  int shape_count() const { return shape_count_; }
  const std::vector<Prototile>& tiles() const { return tiles_; }
  const Prototile& operator[](int id) const { return tiles_.at(static_cast<std::size_t>(id)); }

  /// Id of the named prototile, or -1.
  int find(const std::string& name) const {
    for (const auto& p : tiles_)
      if (p.name == name) return p.id;
    return -1;
  }
  std::optional<int> find_signature(const Signature& s) const {
    auto it = by_sig_.find(canonical_rotation(s));
    if (it == by_sig_.end()) return std::nullopt;
    return it->second;
  }

  /// Prototile and isometry taking its canonical placement onto the decorated triangle.
  std::pair<int, Isometry> canonicalize(const Decoration& dec) const {
    auto id = find_signature(dec.edges);
    if (!id) throw DomainError("canonicalize: no prototile with this decoration");
    const Prototile& p = tiles_[static_cast<std::size_t>(*id)];
    for (int r = 0; r < 3; ++r) {
      bool ok = true;
      for (int k = 0; k < 3 && ok; ++k)
        ok = dec.edges[static_cast<std::size_t>((k + r) % 3)] == p.canon.edges[static_cast<std::size_t>(k)];
      if (!ok) continue;
      std::array<Point2, 3> to{dec.geom.v[static_cast<std::size_t>(r)], dec.geom.v[static_cast<std::size_t>((r + 1) % 3)],
                               dec.geom.v[static_cast<std::size_t>((r + 2) % 3)]};
      auto g = isometry_between(d_, p.canon.geom.v, to, false);
      if (g) return {*id, *g};
    }
    throw DomainError("canonicalize: no isometry found");
  }
  std::pair<int, Isometry> canonicalize(const TriangleId& t) const { return canonicalize(decorate(t)); }

 private:
  void assign_names() {
    if (d_ == 14) {
      for (auto& p : tiles_) {
        auto l = p.canon.base.labels();
        auto it = detail::names14().find(l);
        if (it != detail::names14().end()) p.name = it->second;
      }
      // every prototile is either named or the mirror of a named one
      for (auto& p : tiles_) {
        auto& partner = tiles_[static_cast<std::size_t>(p.tilde)];
        if (p.name.empty() && !partner.name.empty()) p.name = partner.name + "~";
      }
    }
    for (auto& p : tiles_)
      if (p.name.empty()) p.name = generated_name(p.canon.base);
  }

  int d_;
  std::vector<Prototile> tiles_;
  std::map<Signature, int> by_sig_;
  int shape_count_ = 0;
};

/// Shared prototile set per d.
inline const PrototileSet& prototile_set(int d) {
  static std::mutex m;
  static std::map<int, std::unique_ptr<PrototileSet>> cache;
  std::lock_guard<std::mutex> lock(m);
  auto& slot = cache[d];
  if (!slot) slot = std::make_unique<PrototileSet>(d);
  return *slot;
}

inline const PrototileSet& enumerate_prototiles(int d) { return prototile_set(d); }

}  // namespace deltoid
