// Patches of placed prototiles, inflation, and the face-to-face audit.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "deltoid/substitution.hpp"

namespace deltoid {

struct PlacedTile {
  int tile = -1;
  Isometry iso;

  friend bool operator==(const PlacedTile& a, const PlacedTile& b) { return a.tile == b.tile && a.iso == b.iso; }
};

struct Patch {
  int d = 0;
  bool decorated = true;
  std::vector<PlacedTile> tiles;
  /// Generation metadata: ordered key/value pairs (rule sequence, seeds, ...).
  std::vector<std::pair<std::string, std::string>> manifest;

  static Patch single(int d, int tile) {
    Patch p;
    p.d = d;
    p.tiles.push_back(PlacedTile{tile, Isometry::identity(d)});
    p.manifest.emplace_back("seed", prototile_set(d)[tile].name);
    return p;
  }
  std::size_t size() const { return tiles.size(); }

  std::array<Point2, 3> vertices(std::size_t i) const {
    const auto& t = tiles[i];
    const auto& P = prototile_set(d)[t.tile];
    return {t.iso(P.vertices()[0]), t.iso(P.vertices()[1]), t.iso(P.vertices()[2])};
  }
  std::array<Point2, 3> id_points(std::size_t i) const {
    const auto& t = tiles[i];
    const auto& P = prototile_set(d)[t.tile];
    return {t.iso(P.canon.id_points[0]), t.iso(P.canon.id_points[1]), t.iso(P.canon.id_points[2])};
  }
  /// Twice the total area.
  ExactScalar area2() const {
    ExactScalar a(field_for(d), 0);
    const auto& set = prototile_set(d);
    for (const auto& t : tiles) a = a + set[t.tile].area2();
    return a;
  }
  /// Multiset of prototile counts, indexed by prototile id.
  std::vector<int> counts() const {
    std::vector<int> c(prototile_set(d).size(), 0);
    for (const auto& t : tiles) ++c[static_cast<std::size_t>(t.tile)];
    return c;
  }
};

/// Replace every tile by the children of its rule.  Work is split across
/// `threads` workers; the output order is parent order, then child order.
inline Patch apply(const RuleSet& rs, const Patch& in, unsigned threads = 1) {
  if (rs.d() != in.d) throw DomainError("apply: rule set and patch have different d");
  Patch out;
  out.d = in.d;
  out.decorated = in.decorated;
  out.manifest = in.manifest;
  out.manifest.emplace_back("apply", rs.label());
  std::vector<std::size_t> offset(in.tiles.size() + 1, 0);
  for (std::size_t i = 0; i < in.tiles.size(); ++i) offset[i + 1] = offset[i] + rs.rule(in.tiles[i].tile).children.size();
  out.tiles.resize(offset.back());
  auto work = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const Isometry g = in.tiles[i].iso.scaled_translation(rs.iota());
      const auto& ch = rs.rule(in.tiles[i].tile).children;
      for (std::size_t c = 0; c < ch.size(); ++c) out.tiles[offset[i] + c] = PlacedTile{ch[c].tile, g.compose(ch[c].iso)};
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(in.tiles.size())));
  if (threads == 1) {
    work(0, in.tiles.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t n = in.tiles.size(), chunk = (n + threads - 1) / threads;
    for (std::size_t lo = 0; lo < n; lo += chunk) pool.emplace_back(work, lo, std::min(n, lo + chunk));
    for (auto& t : pool) t.join();
  }
  return out;
}

inline Patch apply_n(const RuleSet& rs, Patch p, int n, unsigned threads = 1) {
  if (n < 0) throw DomainError("apply_n: negative step count");
  for (int i = 0; i < n; ++i) p = apply(rs, p, threads);
  return p;
}

/// (R_1 R_2 ... R_k)^n applied to the seed: within a round the rightmost rule
/// set acts first, as in function composition.
inline Patch compose(const std::vector<const RuleSet*>& seq, Patch seed, int n, unsigned threads = 1) {
  if (n < 0) throw DomainError("compose: negative step count");
  for (int round = 0; round < n; ++round)
    for (auto it = seq.rbegin(); it != seq.rend(); ++it) seed = apply(**it, seed, threads);
  return seed;
}

struct FaceReport {
  std::size_t tiles = 0;
  std::size_t vertices = 0;
  std::size_t shared_edges = 0;
  std::size_t boundary_edges = 0;
  std::size_t interior_vertices = 0;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

struct EdgeUse {
  std::size_t tile;
  int k;
  bool forward;  // the tile's anticlockwise boundary runs from the lower to the higher vertex id
};

/// Shared vertex ids and edge incidences of a patch.
struct PatchTopology {
  std::vector<Point2> verts;
  std::vector<std::array<std::size_t, 3>> tile_verts;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<EdgeUse>> edges;
};

inline PatchTopology build_topology(const Patch& p) {
  PatchTopology t;
  std::unordered_map<Point2, std::size_t, Point2Hash> vid;
  t.tile_verts.resize(p.tiles.size());
  for (std::size_t i = 0; i < p.tiles.size(); ++i) {
    auto v = p.vertices(i);
    for (std::size_t k = 0; k < 3; ++k) {
      auto [it, fresh] = vid.emplace(v[k], t.verts.size());
      if (fresh) t.verts.push_back(v[k]);
      t.tile_verts[i][k] = it->second;
    }
  }
  for (std::size_t i = 0; i < p.tiles.size(); ++i) {
    const bool ccw = !p.tiles[i].iso.reflect;
    for (std::size_t k = 0; k < 3; ++k) {
      const std::size_t a = t.tile_verts[i][k], b = t.tile_verts[i][(k + 1) % 3];
      t.edges[{std::min(a, b), std::max(a, b)}].push_back({i, static_cast<int>(k), (a < b) == ccw});
    }
  }
  return t;
}

namespace detail {
inline std::string describe_tile(const Patch& p, std::size_t i) {
  return "tile " + std::to_string(i) + " (" + prototile_set(p.d)[p.tiles[i].tile].name + ")";
}
}  // namespace detail

/// Checks that tiles meet full edge to full edge with matching decoration
/// points, that no vertex lies inside another tile or its edge, that no two
/// edges cross, and that corner angles around every interior vertex sum to 2 pi.
inline FaceReport verify_face_to_face(const Patch& p, std::size_t max_messages = 50) {
  FaceReport rep;
  rep.tiles = p.tiles.size();
  const auto& set = prototile_set(p.d);
  const PatchTopology topo = build_topology(p);
  const auto& verts = topo.verts;
  const auto& tv = topo.tile_verts;
  std::vector<std::array<Point2, 3>> ids;
  if (p.decorated) {
    ids.resize(p.tiles.size());
    for (std::size_t i = 0; i < p.tiles.size(); ++i) ids[i] = p.id_points(i);
  }
  rep.vertices = verts.size();
  auto add = [&](const std::string& s) {
    if (rep.violations.size() < max_messages) rep.violations.push_back(s);
    else if (rep.violations.size() == max_messages) rep.violations.push_back("...");
  };
  std::vector<char> vertex_open(verts.size(), 0);
  std::vector<std::pair<std::size_t, std::size_t>> unmatched;
  for (const auto& [key, uses] : topo.edges) {
    if (uses.size() == 1) {
      ++rep.boundary_edges;
      vertex_open[key.first] = vertex_open[key.second] = 1;
      unmatched.push_back(key);
      continue;
    }
    if (uses.size() > 2) {
      add("edge shared by " + std::to_string(uses.size()) + " tiles, first " + detail::describe_tile(p, uses[0].tile));
      continue;
    }
    ++rep.shared_edges;
    const auto& u = uses[0];
    const auto& w = uses[1];
    if (u.forward == w.forward) {
      add("overlap: " + detail::describe_tile(p, u.tile) + " and " + detail::describe_tile(p, w.tile) + " lie on the same side of an edge");
      continue;
    }
    if (p.decorated && ids[u.tile][static_cast<std::size_t>(u.k)] != ids[w.tile][static_cast<std::size_t>(w.k)])
      add("decoration mismatch between " + detail::describe_tile(p, u.tile) + " edge " + std::to_string(u.k) + " and " +
          detail::describe_tile(p, w.tile) + " edge " + std::to_string(w.k));
  }
  // T-junctions: a vertex strictly inside an unmatched edge
  if (!unmatched.empty()) {
    double cell = 0;
    for (const auto& [a, b] : unmatched) cell = std::max(cell, std::abs(verts[a].to_complex() - verts[b].to_complex()));
    cell = std::max(cell, 1e-9);
    auto key = [cell](std::complex<double> z) {
      return std::make_pair(static_cast<int64_t>(std::floor(z.real() / cell)), static_cast<int64_t>(std::floor(z.imag() / cell)));
    };
    std::map<std::pair<int64_t, int64_t>, std::vector<std::size_t>> grid;
    for (std::size_t v = 0; v < verts.size(); ++v)
      if (vertex_open[v]) grid[key(verts[v].to_complex())].push_back(v);
    for (const auto& [a, b] : unmatched) {
      const auto za = verts[a].to_complex(), zb = verts[b].to_complex();
      const auto ka = key(za), kb = key(zb);
      for (int64_t gx = std::min(ka.first, kb.first) - 1; gx <= std::max(ka.first, kb.first) + 1; ++gx)
        for (int64_t gy = std::min(ka.second, kb.second) - 1; gy <= std::max(ka.second, kb.second) + 1; ++gy) {
          auto it = grid.find({gx, gy});
          if (it == grid.end()) continue;
          for (std::size_t v : it->second) {
            if (v == a || v == b) continue;
            const auto zv = verts[v].to_complex();
            const double len = std::abs(zb - za);
            const double dist = std::abs(std::imag(std::conj(zb - za) * (zv - za))) / len;
            if (dist > 1e-6 * (1 + len)) continue;
            if (strictly_inside_segment(verts[a], verts[b], verts[v]))
              add("vertex " + std::to_string(v) + " lies inside an edge (not edge to edge)");
          }
        }
    }
  }
  // overlaps without shared vertices: crossing edges and vertices inside a tile
  if (!topo.edges.empty()) {
    std::vector<std::complex<double>> zf(verts.size());
    for (std::size_t v = 0; v < verts.size(); ++v) zf[v] = verts[v].to_complex();
    std::vector<std::pair<std::size_t, std::size_t>> es;
    double cell = 1e-9;
    for (const auto& [key, uses] : topo.edges) {
      es.push_back(key);
      cell = std::max(cell, std::abs(zf[key.first] - zf[key.second]));
    }
    auto key = [cell](std::complex<double> z) {
      return std::make_pair(static_cast<int64_t>(std::floor(z.real() / cell)), static_cast<int64_t>(std::floor(z.imag() / cell)));
    };
    auto fcross = [&](std::size_t a, std::size_t b, std::size_t c) { return std::imag(std::conj(zf[b] - zf[a]) * (zf[c] - zf[a])); };
    const double eps = 1e-9 * cell * cell;
    // sign of the orientation, exact only when the float value is small
    auto side = [&](std::size_t a, std::size_t b, std::size_t c) {
      const double f = fcross(a, b, c);
      if (f > eps) return 1;
      if (f < -eps) return -1;
      return orientation(verts[a], verts[b], verts[c]);
    };
    std::map<std::pair<int64_t, int64_t>, std::vector<std::size_t>> grid;
    for (std::size_t e = 0; e < es.size(); ++e) grid[key((zf[es[e].first] + zf[es[e].second]) * 0.5)].push_back(e);
    for (std::size_t e = 0; e < es.size(); ++e) {
      const auto [a, b] = es[e];
      const auto k = key((zf[a] + zf[b]) * 0.5);
      for (int64_t gx = k.first - 1; gx <= k.first + 1; ++gx)
        for (int64_t gy = k.second - 1; gy <= k.second + 1; ++gy) {
          auto it = grid.find({gx, gy});
          if (it == grid.end()) continue;
          for (std::size_t f : it->second) {
            if (f <= e) continue;
            const auto [c, dd] = es[f];
            if (c == a || c == b || dd == a || dd == b) continue;
            if (side(a, b, c) * side(a, b, dd) < 0 && side(c, dd, a) * side(c, dd, b) < 0)
              add("edges cross between vertices " + std::to_string(a) + "-" + std::to_string(b) + " and " + std::to_string(c) + "-" +
                  std::to_string(dd));
          }
        }
    }
    std::map<std::pair<int64_t, int64_t>, std::vector<std::size_t>> vgrid;
    for (std::size_t v = 0; v < verts.size(); ++v) vgrid[key(zf[v])].push_back(v);
    for (std::size_t i = 0; i < tv.size(); ++i) {
      const auto& t = tv[i];
      const auto k = key((zf[t[0]] + zf[t[1]] + zf[t[2]]) / 3.0);
      for (int64_t gx = k.first - 1; gx <= k.first + 1; ++gx)
        for (int64_t gy = k.second - 1; gy <= k.second + 1; ++gy) {
          auto it = vgrid.find({gx, gy});
          if (it == vgrid.end()) continue;
          for (std::size_t v : it->second) {
            if (v == t[0] || v == t[1] || v == t[2]) continue;
            const int s0 = side(t[0], t[1], v);
            if (s0 != 0 && side(t[1], t[2], v) == s0 && side(t[2], t[0], v) == s0)
              add("vertex " + std::to_string(v) + " lies inside " + detail::describe_tile(p, i));
          }
        }
    }
  }
  // angle sums
  std::vector<int> angle(verts.size(), 0);
  for (std::size_t i = 0; i < p.tiles.size(); ++i)
    for (int k = 0; k < 3; ++k) angle[tv[i][static_cast<std::size_t>(k)]] += set[p.tiles[i].tile].angles()[static_cast<std::size_t>(k)];
  for (std::size_t v = 0; v < verts.size(); ++v) {
    if (angle[v] > 2 * p.d) add("angle sum exceeds 2 pi at vertex " + std::to_string(v));
    if (!vertex_open[v]) {
      ++rep.interior_vertices;
      if (angle[v] != 2 * p.d) add("angle sum " + std::to_string(angle[v]) + " pi/d at interior vertex " + std::to_string(v));
    }
  }
  return rep;
}

}  // namespace deltoid
