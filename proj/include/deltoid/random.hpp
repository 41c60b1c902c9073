// Edge flips, the rearrangement ensemble and random substitutions (d even).
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "deltoid/patch.hpp"

namespace deltoid {

namespace detail {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
inline uint64_t mix(uint64_t a, uint64_t b) { return splitmix64(a ^ splitmix64(b)); }
inline double unit_interval(uint64_t x) { return static_cast<double>(x >> 11) * 0x1.0p-53; }

inline void require_even(int d, const char* what) {
  if (d % 2 != 0 || d < 6)
    throw DomainError(std::string(what) + ": d must be even and at least 6 (edge words are palindromic only for d = 2q)");
}

inline Point2 arrangement_point(const SymmetryIndex& sym, int l1, int l2) {
  return intersect(sym.angle_numerator(sym.index(l1)), sym.angle_numerator(sym.index(l2)), sym.d);
}

inline bool on_line(const SymmetryIndex& sym, int label, const Point2& z) {
  const int i = sym.index(label);
  const Point2 a = intersect(sym.angle_numerator(i), sym.angle_numerator((i + 1) % sym.d), sym.d);
  for (int k = 2; k < sym.d; ++k) {
    const Point2 b = intersect(sym.angle_numerator(i), sym.angle_numerator((i + k) % sym.d), sym.d);
    if (b != a) return orientation(a, b, z) == 0;
  }
  return false;
}

inline std::array<Point2, 3> ccw(std::array<Point2, 3> v) {
  if (orientation(v[0], v[1], v[2]) < 0) std::swap(v[1], v[2]);
  return v;
}

inline std::array<double, 3> sorted_sides(const std::array<Point2, 3>& v) {
  std::array<double, 3> s{};
  for (std::size_t k = 0; k < 3; ++k) s[k] = std::norm(v[(k + 1) % 3].to_complex() - v[k].to_complex());
  std::sort(s.begin(), s.end());
  return s;
}

inline bool near(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  for (std::size_t k = 0; k < 3; ++k)
    if (std::abs(a[k] - b[k]) > 1e-7 * (1 + a[k])) return false;
  return true;
}

}  // namespace detail

/// Shape classes: prototiles that differ only in their decoration share a
/// representative (the lowest id directly congruent to them).
class ShapeCatalog {
 public:
  explicit ShapeCatalog(int d) : d_(d) {
    const PrototileSet& set = prototile_set(d);
    rep_.resize(set.size());
    for (const auto& P : set.tiles()) {
      rep_[static_cast<std::size_t>(P.id)] = {-1, Isometry::identity(d)};
      for (const auto& R : set.tiles()) {
        if (R.id > P.id) break;
        if (auto g = match(R.id, P.vertices(), false)) {
          rep_[static_cast<std::size_t>(P.id)] = {R.id, *g};
          break;
        }
      }
      if (rep_[static_cast<std::size_t>(P.id)].first == P.id) reps_.push_back(P.id);
    }
  }
  int d() const { return d_; }
  /// Representative id and the map taking the representative onto the tile.
  const std::pair<int, Isometry>& representative(int tile) const { return rep_.at(static_cast<std::size_t>(tile)); }
  const std::vector<int>& representatives() const { return reps_; }

  /// Representative placed directly onto the anticlockwise triangle v, if any.
  std::optional<PlacedTile> place(const std::array<Point2, 3>& v) const {
    const auto sides = detail::sorted_sides(v);
    for (int r : reps_) {
      if (!detail::near(sides, detail::sorted_sides(prototile_set(d_)[r].vertices()))) continue;
      if (auto g = match(r, v, false)) return PlacedTile{r, *g};
    }
    return std::nullopt;
  }
  /// Representative congruent to v, allowing a reflection.
  std::optional<PlacedTile> place_any(const std::array<Point2, 3>& v) const {
    if (auto t = place(v)) return t;
    const auto sides = detail::sorted_sides(v);
    for (int r : reps_) {
      if (!detail::near(sides, detail::sorted_sides(prototile_set(d_)[r].vertices()))) continue;
      if (auto g = match(r, v, true)) return PlacedTile{r, *g};
    }
    return std::nullopt;
  }

 private:
  std::optional<Isometry> match(int r, const std::array<Point2, 3>& v, bool reflect) const {
    const auto& pv = prototile_set(d_)[r].vertices();
    for (int s = 0; s < 3; ++s) {
      std::array<Point2, 3> to{v[static_cast<std::size_t>(s)], v[static_cast<std::size_t>((s + 1) % 3)], v[static_cast<std::size_t>((s + 2) % 3)]};
      if (auto g = isometry_between(d_, pv, to, false)) return g;
      if (reflect) {
        std::array<Point2, 3> rev{to[0], to[2], to[1]};
        if (auto g = isometry_between(d_, pv, rev, true)) return g;
      }
    }
    return std::nullopt;
  }

  int d_;
  std::vector<std::pair<int, Isometry>> rep_;
  std::vector<int> reps_;
};

inline const ShapeCatalog& shape_catalog(int d) {
  static std::mutex m;
  static std::map<int, std::unique_ptr<ShapeCatalog>> cache;
  std::lock_guard<std::mutex> lock(m);
  auto& slot = cache[d];
  if (!slot) slot = std::make_unique<ShapeCatalog>(d);
  return *slot;
}

/// Drop the decoration: every tile becomes its shape representative.
inline Patch undecorate(const Patch& p) {
  const ShapeCatalog& sc = shape_catalog(p.d);
  Patch out = p;
  out.decorated = false;
  for (auto& t : out.tiles) {
    const auto& [r, g] = sc.representative(t.tile);
    t = PlacedTile{r, t.iso.compose(g)};
  }
  return out;
}

/// The q vertices p_{c, q+c} of the regular polygon inside the pattern.
inline std::vector<Point2> polygon_vertices(int d, int kappa) {
  detail::require_even(d, "polygon_vertices");
  const SymmetryIndex sym = SymmetryIndex::make(d, kappa);
  const int q = d / 2;
  std::vector<Point2> v;
  for (int c = 0; c < q; ++c) v.push_back(detail::arrangement_point(sym, c, q + c));
  return v;
}

/// Label of the segment containing the polygon edge p_{c,q+c} p_{c+1,q+c+1}, if any.
inline std::optional<int> polygon_edge_line(int d, int kappa, int c) {
  const SymmetryIndex sym = SymmetryIndex::make(d, kappa);
  const auto poly = polygon_vertices(d, kappa);
  const int q = d / 2;
  const Point2& a = poly[static_cast<std::size_t>(detail::mod(c, q))];
  const Point2& b = poly[static_cast<std::size_t>(detail::mod(c + 1, q))];
  for (int i = 0; i < d; ++i)
    if (detail::on_line(sym, sym.label(i), a) && detail::on_line(sym, sym.label(i), b)) return sym.label(i);
  return std::nullopt;
}

struct FlipTemplate {
  int d = 0;
  int kappa = 0;
  int c = 0;               // polygon edge p_{c,q+c} p_{c+1,q+c+1}
  int a = 0;               // case parameter
  std::string case_name;   // "1", "2", "3.1", "3.2"
  std::array<TriangleId, 2> before;            // pattern triangles sharing the old diagonal
  std::array<Point2, 2> old_diagonal;
  std::array<Point2, 2> new_diagonal;          // the polygon edge
  std::array<std::array<Point2, 3>, 2> after;  // anticlockwise halves after the flip
  int old_class = 0, new_class = 0;            // S_old -> S_new
  std::array<PlacedTile, 2> before_tiles;      // undecorated placements
  std::array<PlacedTile, 2> after_tiles;
  std::array<TriangleId, 2> stated_targets;    // congruence targets of the case table
  std::array<TriangleId, 2> stated_before;

  std::array<Point2, 4> outline() const {
    return {new_diagonal[0], old_diagonal[0], new_diagonal[1], old_diagonal[1]};
  }
};

namespace detail {

inline int length_class_of(int d, const ExactScalar& len2) {
  for (int n = 1; n <= d / 2; ++n) {
    const ExactScalar s = section_length(d, n);
    if (s * s == len2) return n;
  }
  return 0;
}

inline std::string case_name(int d, int kappa) {
  const int q = d / 2;
  if (q % 3 == 1) return "1";
  if (q % 3 == 2) return "2";
  return kappa == 0 ? "3.1" : "3.2";
}

/// Case parameter a for polygon edge c, and the stated labels.
struct CaseLabels {
  int a;
  std::array<std::array<int, 3>, 2> before;
  std::array<std::array<int, 3>, 2> targets;
  int target_kappa;
};

inline CaseLabels case_labels(int d, int kappa, int c) {
  const int q = d / 2, l = q / 3;
  const int sgn = kappa == 2 ? -1 : 1;
  // for kappa = 2 the table holds with every label negated
  const int cc = sgn > 0 ? c : static_cast<int>(mod(-c - 1, q));
  CaseLabels r{};
  r.target_kappa = kappa;
  if (q % 3 == 1) {
    const int a = static_cast<int>(mod(cc - l, q));
    r.a = a;
    r.before = {{{l + a, 4 * l + a + 1, l - 2 * a}, {l + a + 1, 4 * l + a + 2, l - 2 * a}}};
    r.targets = {{{3 * l - a, 3 * l + 2 * a + 1, 6 * l - a + 2}, {3 * l - a + 1, 3 * l + 2 * a + 1, 6 * l - a + 1}}};
  } else if (q % 3 == 2) {
    const int a = static_cast<int>(mod(cc - l, q));
    r.a = a;
    r.before = {{{l + a, 4 * l + a + 2, l - 2 * a + 1}, {l + a + 1, 4 * l + a + 3, l - 2 * a + 1}}};
    r.targets = {{{3 * l - a + 2, -a + 1, 3 * l + 2 * a + 2}, {3 * l - a + 3, -a, 3 * l + 2 * a + 2}}};
  } else if (kappa == 0) {
    const int a = static_cast<int>(mod(cc - l, q));
    r.a = a;
    r.before = {{{l + a, 4 * l + a, l - 2 * a - 1}, {l + a + 1, 4 * l + a + 1, l - 2 * a - 1}}};
    r.targets = {{{3 * l - a - 2, 6 * l - a - 1, 3 * l + 2 * a}, {2 * l - a - 2, 5 * l - a - 1, 5 * l + 2 * a}}};
    r.target_kappa = -2;
  } else {
    const int a = static_cast<int>(mod(cc - l + 1, q));
    r.a = a;
    r.before = {{{l + a - 1, 4 * l + a - 1, l - 2 * a - 1}, {l + a, 4 * l + a, l - 2 * a - 1}}};
    r.targets = {{{3 * l - a - 1, 6 * l - a, 3 * l + 2 * a}, {5 * l - a, 2 * l - a - 1, 5 * l + 2 * a}}};
  }
  if (sgn < 0)
    for (auto* group : {&r.before, &r.targets})
      for (auto& t : *group)
        for (auto& x : t) x = -x;
  return r;
}

}  // namespace detail

/// Flip templates of the pattern with symmetry index kappa: one for every
/// polygon edge that is not on a segment and whose two flanking triangles form
/// a convex quadrilateral.
inline std::vector<FlipTemplate> enumerate_flips(int d, int kappa) {
  detail::require_even(d, "enumerate_flips");
  const SymmetryIndex sym = SymmetryIndex::make(d, kappa);
  const Arrangement& arr = arrangement(sym);
  const ShapeCatalog& sc = shape_catalog(d);
  const auto poly = polygon_vertices(d, kappa);
  const int q = d / 2;
  std::vector<FlipTemplate> out;
  for (int c = 0; c < q; ++c) {
    if (polygon_edge_line(d, kappa, c)) continue;
    const Point2& P = poly[static_cast<std::size_t>(c)];
    const Point2& Q = poly[static_cast<std::size_t>((c + 1) % q)];
    std::vector<std::pair<TriangleId, TriangleGeometry>> atP, atQ;
    for (const auto& t : arr.elementary_triangles()) {
      auto g = triangle_geometry(t);
      for (const auto& v : g.v) {
        if (v == P) atP.emplace_back(t, g);
        if (v == Q) atQ.emplace_back(t, g);
      }
    }
    for (const auto& [t1, g1] : atP)
      for (const auto& [t2, g2] : atQ) {
        std::vector<Point2> shared;
        for (const auto& v : g1.v)
          if (v != P && std::find(g2.v.begin(), g2.v.end(), v) != g2.v.end()) shared.push_back(v);
        if (shared.size() != 2 || std::find(g2.v.begin(), g2.v.end(), P) != g2.v.end()) continue;
        const Point2 X = shared[0], Y = shared[1];
        // strictly convex quadrilateral: the diagonals cross
        if (orientation(P, Q, X) * orientation(P, Q, Y) >= 0) continue;
        if (orientation(X, Y, P) * orientation(X, Y, Q) >= 0) continue;
        FlipTemplate ft;
        ft.d = d;
        ft.kappa = kappa;
        ft.c = c;
        ft.case_name = detail::case_name(d, kappa);
        ft.before = {t1, t2};
        ft.old_diagonal = {X, Y};
        ft.new_diagonal = {P, Q};
        ft.after = {detail::ccw({P, Q, X}), detail::ccw({P, Q, Y})};
        ft.old_class = detail::length_class_of(d, dist2(X, Y));
        ft.new_class = detail::length_class_of(d, dist2(P, Q));
        auto b0 = sc.place_any(detail::ccw({g1.v[0], g1.v[1], g1.v[2]}));
        auto b1 = sc.place_any(detail::ccw({g2.v[0], g2.v[1], g2.v[2]}));
        auto a0 = sc.place_any(ft.after[0]);
        auto a1 = sc.place_any(ft.after[1]);
        if (!b0 || !b1 || !a0 || !a1) continue;
        ft.before_tiles = {*b0, *b1};
        ft.after_tiles = {*a0, *a1};
        const auto cl = detail::case_labels(d, kappa, c);
        ft.a = cl.a;
        const SymmetryIndex tsym = SymmetryIndex::make(d, cl.target_kappa);
        ft.stated_targets = {TriangleId::make(tsym, cl.targets[0][0], cl.targets[0][1], cl.targets[0][2]),
                             TriangleId::make(tsym, cl.targets[1][0], cl.targets[1][1], cl.targets[1][2])};
        ft.stated_before = {TriangleId::make(sym, cl.before[0][0], cl.before[0][1], cl.before[0][2]),
                            TriangleId::make(sym, cl.before[1][0], cl.before[1][1], cl.before[1][2])};
        out.push_back(ft);
      }
  }
  return out;
}

/// All templates for d over the patterns that make up its prototile set.
inline const std::vector<FlipTemplate>& flip_catalog(int d) {
  static std::mutex m;
  static std::map<int, std::vector<FlipTemplate>> cache;
  {
    std::lock_guard<std::mutex> lock(m);
    if (auto it = cache.find(d); it != cache.end()) return it->second;
  }
  std::vector<FlipTemplate> all;
  for (const auto& sym : pattern_family(d)) {
    auto f = enumerate_flips(d, sym.kappa);
    all.insert(all.end(), f.begin(), f.end());
  }
  std::lock_guard<std::mutex> lock(m);
  return cache.emplace(d, std::move(all)).first->second;
}

/// Exact congruence of two triangles (any vertex correspondence, reflections allowed).
inline bool congruent(int d, const std::array<Point2, 3>& a, const std::array<Point2, 3>& b) {
  for (int s = 0; s < 3; ++s) {
    std::array<Point2, 3> r{b[static_cast<std::size_t>(s)], b[static_cast<std::size_t>((s + 1) % 3)], b[static_cast<std::size_t>((s + 2) % 3)]};
    if (isometry_between(d, a, r, true)) return true;
    std::array<Point2, 3> m{r[0], r[2], r[1]};
    if (isometry_between(d, a, m, true)) return true;
  }
  return false;
}

struct FlipSite {
  std::array<std::size_t, 2> tiles{};
  std::array<PlacedTile, 2> before;
  std::array<PlacedTile, 2> after;
  std::array<Point2, 2> old_diagonal;
  std::array<Point2, 2> new_diagonal;
  int templ = -1;     // index into flip_catalog(d)
  bool reverse = false;  // the site undoes the template's flip
};

namespace detail {
// One triangulated quadrilateral per template and direction: diagonal (u, v), apexes (x, y).
struct QuadShape {
  int templ;
  bool reverse;
  Point2 u, v, x, y;
  double diag2, other2;
};

inline std::vector<QuadShape> quad_shapes(int d) {
  std::vector<QuadShape> out;
  const auto& cat = flip_catalog(d);
  for (std::size_t i = 0; i < cat.size(); ++i) {
    const auto& t = cat[i];
    const double od = std::norm(t.old_diagonal[1].to_complex() - t.old_diagonal[0].to_complex());
    const double nd = std::norm(t.new_diagonal[1].to_complex() - t.new_diagonal[0].to_complex());
    out.push_back({static_cast<int>(i), false, t.old_diagonal[0], t.old_diagonal[1], t.new_diagonal[0], t.new_diagonal[1], od, nd});
    out.push_back({static_cast<int>(i), true, t.new_diagonal[0], t.new_diagonal[1], t.old_diagonal[0], t.old_diagonal[1], nd, od});
  }
  return out;
}

inline bool close(double a, double b) { return std::abs(a - b) <= 1e-7 * (1 + std::abs(a)); }

inline std::size_t apex(const std::array<std::size_t, 3>& tv, std::size_t a, std::size_t b) {
  for (auto v : tv)
    if (v != a && v != b) return v;
  return tv[0];
}
}  // namespace detail

/// Adjacent tile pairs of an undecorated patch whose union matches a flip
/// template quadrilateral (in either triangulation), in edge order.
inline std::vector<FlipSite> find_flippable(const Patch& p) {
  std::vector<FlipSite> out;
  if (p.decorated) throw DomainError("find_flippable: flips act on undecorated patches (use undecorate)");
  if (p.d % 2 != 0) return out;
  const auto shapes = detail::quad_shapes(p.d);
  if (shapes.empty()) return out;
  const ShapeCatalog& sc = shape_catalog(p.d);
  const PatchTopology topo = build_topology(p);
  for (const auto& [key, uses] : topo.edges) {
    if (uses.size() != 2) continue;
    const Point2& U = topo.verts[key.first];
    const Point2& V = topo.verts[key.second];
    const Point2& X = topo.verts[detail::apex(topo.tile_verts[uses[0].tile], key.first, key.second)];
    const Point2& Y = topo.verts[detail::apex(topo.tile_verts[uses[1].tile], key.first, key.second)];
    const double diag2 = std::norm(V.to_complex() - U.to_complex());
    const double other2 = std::norm(Y.to_complex() - X.to_complex());
    for (const auto& s : shapes) {
      if (!detail::close(s.diag2, diag2) || !detail::close(s.other2, other2)) continue;
      // map template (u, v, x) onto the site in all four labelings, then check y
      bool hit = false;
      for (int swap_uv = 0; swap_uv < 2 && !hit; ++swap_uv)
        for (int swap_xy = 0; swap_xy < 2 && !hit; ++swap_xy) {
          const Point2& u2 = swap_uv ? V : U;
          const Point2& v2 = swap_uv ? U : V;
          const Point2& x2 = swap_xy ? Y : X;
          const Point2& y2 = swap_xy ? X : Y;
          auto g = isometry_between(p.d, {s.u, s.v, s.x}, {u2, v2, x2}, true);
          if (!g || g->apply(s.y) != y2) continue;
          auto h0 = sc.place(detail::ccw({X, Y, U}));
          auto h1 = sc.place(detail::ccw({X, Y, V}));
          if (!h0 || !h1) continue;
          FlipSite site;
          site.tiles = {uses[0].tile, uses[1].tile};
          site.before = {p.tiles[uses[0].tile], p.tiles[uses[1].tile]};
          site.after = {*h0, *h1};
          site.old_diagonal = {U, V};
          site.new_diagonal = {X, Y};
          site.templ = s.templ;
          site.reverse = s.reverse;
          out.push_back(site);
          hit = true;
        }
      if (hit) break;
    }
  }
  return out;
}

/// Replace the two tiles of the site by the flipped pair.
inline Patch apply_flip(const Patch& p, const FlipSite& site) {
  for (int k = 0; k < 2; ++k) {
    const std::size_t i = site.tiles[static_cast<std::size_t>(k)];
    if (i >= p.tiles.size() || !(p.tiles[i] == site.before[static_cast<std::size_t>(k)]))
      throw DomainError("apply_flip: stale flip site (patch changed since it was found)");
  }
  Patch out = p;
  out.tiles[site.tiles[0]] = site.after[0];
  out.tiles[site.tiles[1]] = site.after[1];
  return out;
}

/// `steps` uniformly chosen flips, re-enumerating the sites after each one.
/// New diagonals are appended to `flipped` when it is given.
inline Patch rearrangement_sample(const Patch& in, int steps, uint64_t rng_seed,
                                  std::vector<std::array<Point2, 2>>* flipped = nullptr) {
  if (steps < 0) throw DomainError("rearrangement_sample: negative step count");
  Patch p = in.decorated ? undecorate(in) : in;
  int done = 0;
  for (int s = 0; s < steps; ++s) {
    const auto sites = find_flippable(p);
    if (sites.empty()) break;
    const uint64_t r = detail::mix(rng_seed, static_cast<uint64_t>(s));
    const FlipSite& site = sites[static_cast<std::size_t>(r % sites.size())];
    p = apply_flip(p, site);
    if (flipped) flipped->push_back(site.new_diagonal);
    ++done;
  }
  p.manifest.emplace_back("mode", "rearrange");
  p.manifest.emplace_back("rng_seed", std::to_string(rng_seed));
  p.manifest.emplace_back("steps", std::to_string(steps));
  p.manifest.emplace_back("flips_applied", std::to_string(done));
  return p;
}

/// Base rules iota_{d,q} on shape representatives, plus their flip variants.
struct RandomRuleFamily {
  int d = 0;
  int q = 0;
  int cap = 64;
  /// variants[r][v]: children of representative r in its v-th dissection (v = 0 is the base).
  std::map<int, std::vector<std::vector<RuleChild>>> variants;
  /// members[m][r]: the variant each member uses for representative r.
  std::vector<std::map<int, int>> members;

  std::size_t size() const { return members.size(); }
  const std::vector<RuleChild>& children(std::size_t member, int rep) const {
    return variants.at(rep)[static_cast<std::size_t>(members.at(member).at(rep))];
  }
};

namespace detail {
inline Patch children_patch(int d, const std::vector<RuleChild>& ch) {
  Patch p;
  p.d = d;
  p.decorated = false;
  for (const auto& c : ch) p.tiles.push_back(PlacedTile{c.tile, c.iso});
  return p;
}
}  // namespace detail

inline RandomRuleFamily random_rule_family(int d, int cap = 64) {
  detail::require_even(d, "random_rule_family");
  if (cap < 1) throw DomainError("random_rule_family: cap must be positive");
  RandomRuleFamily fam;
  fam.d = d;
  fam.q = d / 2;
  fam.cap = cap;
  const RuleSet& base = rule_set(d, fam.q, 1);
  const ShapeCatalog& sc = shape_catalog(d);
  std::vector<int> radix;
  for (int r : sc.representatives()) {
    std::vector<RuleChild> ch;
    for (const auto& c : base.rule(r).children) {
      const auto& [rep, g] = sc.representative(c.tile);
      ch.push_back(RuleChild{rep, c.iso.compose(g)});
    }
    auto& vars = fam.variants[r];
    vars.push_back(ch);
    // variants from sets of pairwise disjoint flip sites, in subset order
    const Patch cp = detail::children_patch(d, ch);
    const auto sites = find_flippable(cp);
    std::vector<std::vector<std::size_t>> subsets{{}};
    for (std::size_t s = 0; s < sites.size() && static_cast<int>(subsets.size()) < cap; ++s) {
      const std::size_t n = subsets.size();
      for (std::size_t k = 0; k < n && static_cast<int>(subsets.size()) < cap; ++k) {
        bool disjoint = true;
        for (auto o : subsets[k])
          for (auto t : sites[o].tiles)
            if (t == sites[s].tiles[0] || t == sites[s].tiles[1]) disjoint = false;
        if (!disjoint) continue;
        auto next = subsets[k];
        next.push_back(s);
        subsets.push_back(next);
        Patch fp = cp;
        for (auto o : next) {
          fp.tiles[sites[o].tiles[0]] = sites[o].after[0];
          fp.tiles[sites[o].tiles[1]] = sites[o].after[1];
        }
        std::vector<RuleChild> fc;
        for (const auto& t : fp.tiles) fc.push_back(RuleChild{t.tile, t.iso});
        vars.push_back(fc);
      }
    }
    radix.push_back(static_cast<int>(vars.size()));
  }
  // members: every combination if there are few, else seeded draws
  double total = 1;
  for (int r : radix) total *= r;
  const auto& reps = sc.representatives();
  std::set<std::vector<int>> seen;
  auto add = [&](const std::vector<int>& choice) {
    if (!seen.insert(choice).second) return;
    std::map<int, int> m;
    for (std::size_t k = 0; k < reps.size(); ++k) m[reps[k]] = choice[k];
    fam.members.push_back(m);
  };
  if (total <= cap) {
    std::vector<int> choice(reps.size(), 0);
    while (true) {
      add(choice);
      std::size_t k = 0;
      while (k < choice.size() && ++choice[k] == radix[k]) choice[k++] = 0;
      if (k == choice.size()) break;
    }
  } else {
    add(std::vector<int>(reps.size(), 0));
    for (uint64_t draw = 0; static_cast<int>(fam.members.size()) < cap && draw < 64ULL * static_cast<uint64_t>(cap); ++draw) {
      std::vector<int> choice(reps.size());
      for (std::size_t k = 0; k < reps.size(); ++k)
        choice[k] = static_cast<int>(detail::mix(draw, k) % static_cast<uint64_t>(radix[k]));
      add(choice);
    }
  }
  return fam;
}

/// Uniform distribution over the members of a family.
inline std::vector<double> uniform_pi(const RandomRuleFamily& fam) {
  return std::vector<double>(fam.size(), 1.0 / static_cast<double>(fam.size()));
}

/// n inflation steps from one tile, each tile drawing its member from pi.  The
/// draw depends only on (rng_seed, lineage, step), so the result does not
/// depend on the thread count.
inline Patch random_substitution(int seed_tile, const RandomRuleFamily& fam, const std::vector<double>& pi, int n,
                                 uint64_t rng_seed, unsigned threads = 1) {
  if (n < 0) throw DomainError("random_substitution: negative step count");
  if (pi.size() != fam.size()) throw DomainError("random_substitution: pi has " + std::to_string(pi.size()) + " entries, family has " + std::to_string(fam.size()));
  double sum = 0;
  for (double w : pi) {
    if (!(w > 0)) throw DomainError("random_substitution: pi must be positive on every member");
    sum += w;
  }
  if (std::abs(sum - 1) > 1e-9) throw DomainError("random_substitution: pi is not normalized (sum " + std::to_string(sum) + ")");
  std::vector<double> cdf(pi.size());
  std::partial_sum(pi.begin(), pi.end(), cdf.begin());
  const ExactScalar iota = inflation_factor(fam.d, fam.q);
  const ShapeCatalog& sc = shape_catalog(fam.d);

  Patch p;
  p.d = fam.d;
  p.decorated = false;
  {
    const auto& [rep, g] = sc.representative(seed_tile);
    p.tiles.push_back(PlacedTile{rep, g});
  }
  std::vector<uint64_t> lineage{detail::splitmix64(rng_seed)};
  for (int step = 0; step < n; ++step) {
    std::vector<std::size_t> member(p.tiles.size()), offset(p.tiles.size() + 1, 0);
    for (std::size_t i = 0; i < p.tiles.size(); ++i) {
      const double u = detail::unit_interval(detail::mix(lineage[i], static_cast<uint64_t>(step)));
      member[i] = std::min<std::size_t>(static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin()), pi.size() - 1);
      offset[i + 1] = offset[i] + fam.children(member[i], p.tiles[i].tile).size();
    }
    Patch next;
    next.d = p.d;
    next.decorated = false;
    next.tiles.resize(offset.back());
    std::vector<uint64_t> next_lineage(offset.back());
    auto work = [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        const Isometry g = p.tiles[i].iso.scaled_translation(iota);
        const auto& ch = fam.children(member[i], p.tiles[i].tile);
        for (std::size_t c = 0; c < ch.size(); ++c) {
          next.tiles[offset[i] + c] = PlacedTile{ch[c].tile, g.compose(ch[c].iso)};
          next_lineage[offset[i] + c] = detail::mix(lineage[i], c + 1);
        }
      }
    };
    const std::size_t N = p.tiles.size();
    const unsigned t = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(N)));
    if (t == 1) {
      work(0, N);
    } else {
      std::vector<std::thread> pool;
      const std::size_t chunk = (N + t - 1) / t;
      for (std::size_t lo = 0; lo < N; lo += chunk) pool.emplace_back(work, lo, std::min(N, lo + chunk));
      for (auto& th : pool) th.join();
    }
    p = std::move(next);
    lineage = std::move(next_lineage);
  }
  p.manifest.emplace_back("seed", prototile_set(fam.d)[seed_tile].name);
  p.manifest.emplace_back("mode", "random-substitution");
  p.manifest.emplace_back("rng_seed", std::to_string(rng_seed));
  p.manifest.emplace_back("steps", std::to_string(n));
  p.manifest.emplace_back("family_cap", std::to_string(fam.cap));
  p.manifest.emplace_back("family_size", std::to_string(fam.size()));
  std::string ps;
  for (std::size_t i = 0; i < pi.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", pi[i]);
    ps += (i ? "," : "") + std::string(buf);
  }
  p.manifest.emplace_back("pi", ps);
  return p;
}

}  // namespace deltoid
