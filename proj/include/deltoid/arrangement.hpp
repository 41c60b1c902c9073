// Deltoid-tangent line arrangements and their triangular patterns.
//
// Line nu of the family (d, kappa) has direction angle phi = (3 nu - kappa) pi / (3d)
// and is tangent to the deltoid z(t) = 2 e^{it} + e^{-2it}.  Its segment runs from
// z(phi) to z(phi + pi); points on it are e^{-2i phi} + t e^{i phi}, t in [-2, 2].
// Two lines phi, psi meet at e^{-2i phi} + e^{-2i psi} + e^{2i(phi + psi)}, so all
// vertices have integer coordinates in the cyclotomic basis.
#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "deltoid/exactnum.hpp"
#include "deltoid/geometry.hpp"

namespace deltoid {

struct SymmetryIndex {
  int d = 0;
  int kappa = 0;

  static SymmetryIndex make(int d, int kappa) {
    if (d < 5) throw DomainError("symmetry number d must be at least 5");
    if (kappa != 0 && kappa != 2 && kappa != -2) throw DomainError("kappa must be one of -2, 0, 2");
    if (kappa != 0 && d % 3 != 0) throw DomainError("kappa = +-2 requires 3 | d");
    return SymmetryIndex{d, kappa};
  }
  int q() const { return d % 2 ? (d - 1) / 2 : d / 2; }
  /// Printed label of the segment with internal index i in 0..d-1.
  int label(int i) const { return (kappa == 2 && i > 0) ? i - d : i; }
  int index(int label) const { return static_cast<int>(detail::mod(label, d)); }
  /// Direction angle of segment i in units of pi/(3d).
  int angle_numerator(int i) const { return 3 * label(i) - kappa; }
  const CyclotomicField* field() const { return field_for(d); }

  friend bool operator==(const SymmetryIndex& a, const SymmetryIndex& b) { return a.d == b.d && a.kappa == b.kappa; }
  friend bool operator<(const SymmetryIndex& a, const SymmetryIndex& b) {
    return a.d != b.d ? a.d < b.d : a.kappa < b.kappa;
  }
};

inline std::vector<int> i_odd(int d) {
  std::vector<int> r;
  for (int n = 1; n <= 2 * (d / 2) - 1; n += 2) r.push_back(n);
  return r;
}
inline std::vector<int> i_even(int d) {
  std::vector<int> r;
  for (int n = 2; n <= 2 * ((d + 1) / 2) - 2; n += 2) r.push_back(n);
  return r;
}

/// Length class of S_n: S_n and S_{d-n} have equal length.
inline int length_class(int d, int n) {
  const int r = static_cast<int>(detail::mod(n, d));
  return std::min(r, d - r);
}

/// S_n = 4 sin(pi/d) sin(n pi/d), the edge length unit of the pattern.
inline ExactScalar section_length(int d, int n) { return sin_val(d, 1) * sin_val(d, n) * 4; }

namespace detail {
/// zeta_{m}^k as an element of field f (requires m | conductor).
inline ExactScalar root_of(const CyclotomicField* f, int m, int64_t k) {
  if (f->conductor() % m != 0) throw DomainError("root of unity not in field");
  return ExactScalar::root(f, k * (f->conductor() / m));
}
}  // namespace detail

/// Point z(phi) on the deltoid with phi = numerator * pi / (3d).
inline Point2 deltoid_point(int d, int64_t numerator) {
  const auto* f = field_for(d);
  return Point2(detail::root_of(f, 6 * d, numerator) * 2 + detail::root_of(f, 6 * d, -2 * numerator));
}

/// Zero exactly when z lies on the deltoid curve.
inline ExactScalar deltoid_equation(const Point2& p) {
  const ExactScalar& z = p.z;
  ExactScalar n = z * z.conj();
  ExactScalar c = z * z * z;
  return n * n + n * 18 - ExactScalar(z.field(), 27) - (c + c.conj()) * 4;
}

/// Intersection of the tangent lines with angles a pi/(3D) and b pi/(3D),
/// computed in the field f.  D may be d or 2d.
inline Point2 intersect_in(const CyclotomicField* f, int D, int64_t a, int64_t b) {
  if (detail::mod(a - b, 3 * D) == 0) throw DomainError("no intersection: parallel segments");
  return Point2(detail::root_of(f, 3 * D, -a) + detail::root_of(f, 3 * D, -b) + detail::root_of(f, 3 * D, a + b));
}

/// p(phi, psi) with phi = phi_num pi/(3d), psi = psi_num pi/(3d).
inline Point2 intersect(int64_t phi_num, int64_t psi_num, int d) { return intersect_in(field_for(d), d, phi_num, psi_num); }

struct SegmentId {
  SymmetryIndex sym;
  int index = 0;  // 0..d-1
  Point2 start;   // z(phi)
  Point2 end;     // z(phi + pi)

  int label() const { return sym.label(index); }
  int angle_numerator() const { return sym.angle_numerator(index); }
  /// z_{2(d - nu) + kappa}: the tangency point z(-2 phi).
  Point2 tangency_point() const { return deltoid_point(sym.d, -2 * static_cast<int64_t>(angle_numerator())); }
  /// Unit direction e^{i phi}.
  ExactScalar direction() const { return detail::root_of(sym.field(), 6 * sym.d, angle_numerator()); }
};

inline std::vector<SegmentId> build_segments(const SymmetryIndex& sym) {
  const SymmetryIndex s = SymmetryIndex::make(sym.d, sym.kappa);
  std::vector<SegmentId> out;
  for (int i = 0; i < s.d; ++i) {
    SegmentId g;
    g.sym = s;
    g.index = i;
    const int a = s.angle_numerator(i);
    g.start = deltoid_point(s.d, a);
    g.end = deltoid_point(s.d, a + 3 * s.d);
    out.push_back(std::move(g));
  }
  return out;
}

struct Concurrent {
  SymmetryIndex sym;
  std::array<int, 3> idx;
};

struct TriangleId {
  SymmetryIndex sym;
  std::array<int, 3> idx{};  // sorted internal indices 0..d-1

  static TriangleId make(const SymmetryIndex& sym, int a, int b, int c) {
    TriangleId t;
    t.sym = sym;
    t.idx = {sym.index(a), sym.index(b), sym.index(c)};
    std::sort(t.idx.begin(), t.idx.end());
    if (t.idx[0] == t.idx[1] || t.idx[1] == t.idx[2]) throw DomainError("triangle needs three distinct segments");
    return t;
  }
  std::array<int, 3> labels() const {
    std::array<int, 3> l{sym.label(idx[0]), sym.label(idx[1]), sym.label(idx[2])};
    std::sort(l.begin(), l.end());
    return l;
  }
  int sigma() const {
    auto l = labels();
    return l[0] + l[1] + l[2];
  }
  /// sigma - kappa reduced to (-d/2, d/2].
  int excess() const {
    int r = static_cast<int>(detail::mod(sigma() - sym.kappa, sym.d));
    return r > sym.d / 2 ? r - sym.d : r;
  }
  bool concurrent() const { return excess() == 0; }
  bool elementary() const { return excess() == 1 || excess() == -1; }
  /// Scale class p: the triangle is congruent to iota_{d,p} times an elementary one.
  int scale_class() const { return std::abs(excess()); }
  /// Angles (nu-mu, mu-lambda, lambda-nu+d) in units of pi/d, at the vertices
  /// opposite lambda, nu and mu respectively.
  std::array<int, 3> angles() const {
    auto l = labels();
    return {l[2] - l[1], l[1] - l[0], l[0] - l[2] + sym.d};
  }
  std::string to_string() const {
    auto l = labels();
    std::string s = "D" + std::to_string(sym.d) + "^(" + std::to_string(sym.kappa) + ")(" + std::to_string(l[0]) + "," +
                    std::to_string(l[1]) + "," + std::to_string(l[2]) + ")";
    return s;
  }
  friend bool operator==(const TriangleId& a, const TriangleId& b) { return a.sym == b.sym && a.idx == b.idx; }
  friend bool operator<(const TriangleId& a, const TriangleId& b) {
    if (!(a.sym == b.sym)) return a.sym < b.sym;
    return a.idx < b.idx;
  }
};

/// Exact placement of a triangle: anticlockwise vertices, edge k runs from
/// vertex k to vertex k+1 and lies on segment `line[k]`; `angle[k]` is the
/// interior angle at vertex k in units of pi/d.
struct TriangleGeometry {
  std::array<Point2, 3> v;
  std::array<int, 3> line{};
  std::array<int, 3> angle{};
};

/// Geometry of the triangle cut out by three lines with angle numerators a[k]
/// (in units of pi/(3D)), evaluated in field f.
inline TriangleGeometry triangle_geometry_in(const CyclotomicField* f, int D, const std::array<int64_t, 3>& a,
                                             const std::array<int, 3>& line_ids) {
  // vertex opposite line k
  std::array<Point2, 3> opp{intersect_in(f, D, a[1], a[2]), intersect_in(f, D, a[0], a[2]), intersect_in(f, D, a[0], a[1])};
  TriangleGeometry g;
  const int o = orientation(opp[0], opp[1], opp[2]);
  if (o == 0) throw DomainError("degenerate triangle: segments are concurrent");
  std::array<int, 3> ord = o > 0 ? std::array<int, 3>{0, 1, 2} : std::array<int, 3>{0, 2, 1};
  for (int k = 0; k < 3; ++k) {
    const int vk = ord[static_cast<std::size_t>(k)];
    const int vn = ord[static_cast<std::size_t>((k + 1) % 3)];
    g.v[static_cast<std::size_t>(k)] = opp[static_cast<std::size_t>(vk)];
    // edge between the vertices opposite vk and vn lies on the remaining line
    g.line[static_cast<std::size_t>(k)] = line_ids[static_cast<std::size_t>(3 - vk - vn)];
  }
  return g;
}

inline TriangleGeometry triangle_geometry(const TriangleId& t) {
  const auto& s = t.sym;
  std::array<int64_t, 3> a{s.angle_numerator(t.idx[0]), s.angle_numerator(t.idx[1]), s.angle_numerator(t.idx[2])};
  TriangleGeometry g = triangle_geometry_in(s.field(), s.d, a, t.idx);
  // interior angle at vertex k is the angle opposite edge k+1
  auto l = t.labels();
  auto ang = t.angles();  // opposite l0, l2, l1
  auto angle_opposite = [&](int line) {
    const int lab = s.label(line);
    if (lab == l[0]) return ang[0];
    if (lab == l[2]) return ang[1];
    return ang[2];
  };
  for (int k = 0; k < 3; ++k) g.angle[static_cast<std::size_t>(k)] = angle_opposite(g.line[static_cast<std::size_t>((k + 1) % 3)]);
  return g;
}

inline std::variant<TriangleId, Concurrent> classify_triple(const SymmetryIndex& sym, int lambda, int mu, int nu) {
  TriangleId t = TriangleId::make(sym, lambda, mu, nu);
  if (t.concurrent()) return Concurrent{sym, t.idx};
  return t;
}

/// Twice the signed area of a triangle.
inline ExactScalar area2(const std::array<Point2, 3>& v) { return cross2(v[0], v[1], v[2]); }

struct VertexRecord {
  Point2 location;
  int multiplicity = 0;
  std::vector<int> segments;  // internal indices, sorted
};

/// The arrangement A_d^(kappa) restricted to its segments.
class Arrangement {
 public:
  explicit Arrangement(const SymmetryIndex& sym) : sym_(SymmetryIndex::make(sym.d, sym.kappa)) {
    segments_ = build_segments(sym_);
    const int d = sym_.d;
    std::unordered_map<Point2, int, Point2Hash> ids;
    on_segment_.assign(static_cast<std::size_t>(d), {});
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) {
        Point2 p = intersect_in(sym_.field(), d, sym_.angle_numerator(i), sym_.angle_numerator(j));
        auto [it, fresh] = ids.emplace(p, static_cast<int>(vertices_.size()));
        if (fresh) vertices_.push_back(VertexRecord{p, 0, {}});
        auto& rec = vertices_[static_cast<std::size_t>(it->second)];
        for (int s : {i, j})
          if (std::find(rec.segments.begin(), rec.segments.end(), s) == rec.segments.end()) rec.segments.push_back(s);
      }
    for (std::size_t v = 0; v < vertices_.size(); ++v) {
      auto& rec = vertices_[v];
      std::sort(rec.segments.begin(), rec.segments.end());
      rec.multiplicity = static_cast<int>(rec.segments.size());
      for (int s : rec.segments) on_segment_[static_cast<std::size_t>(s)].push_back(static_cast<int>(v));
    }
    // order vertices along each segment by decreasing parameter t (start at z(phi), t = 2)
    for (int s = 0; s < d; ++s) {
      auto& list = on_segment_[static_cast<std::size_t>(s)];
      std::vector<std::pair<ExactScalar, int>> keyed;
      for (int v : list) keyed.emplace_back(parameter(s, vertices_[static_cast<std::size_t>(v)].location), v);
      std::sort(keyed.begin(), keyed.end(), [](const auto& x, const auto& y) { return compare(x.first, y.first) > 0; });
      list.clear();
      for (auto& kv : keyed) list.push_back(kv.second);
    }
  }

  const SymmetryIndex& sym() const { return sym_; }
  const std::vector<SegmentId>& segments() const { return segments_; }
  const std::vector<VertexRecord>& vertices() const { return vertices_; }
  /// Vertex ids on segment i, in traversal order from z(phi).
  const std::vector<int>& vertices_on(int i) const { return on_segment_.at(static_cast<std::size_t>(i)); }

  /// Parameter t of a point on segment i: p = e^{-2i phi} + t e^{i phi}.
  ExactScalar parameter(int i, const Point2& p) const {
    const auto& g = segments_[static_cast<std::size_t>(i)];
    const int a = g.angle_numerator();
    const auto* f = sym_.field();
    return (p.z - detail::root_of(f, 3 * sym_.d, -a)) * detail::root_of(f, 6 * sym_.d, -a);
  }

  /// Counts of multiplicity-2 and multiplicity-3 vertices on segment i.
  std::pair<int, int> vertex_multiplicities(int i) const {
    int v2 = 0, v3 = 0;
    for (int v : vertices_on(i)) {
      const int m = vertices_[static_cast<std::size_t>(v)].multiplicity;
      if (m == 2) ++v2;
      else if (m == 3) ++v3;
      else throw DomainError("unexpected vertex multiplicity " + std::to_string(m));
    }
    return {v2, v3};
  }

  /// Exact piece lengths along segment i, in traversal order from z(phi).
  std::vector<ExactScalar> piece_lengths(int i) const {
    const auto& list = vertices_on(i);
    std::vector<ExactScalar> out;
    for (std::size_t k = 0; k + 1 < list.size(); ++k)
      out.push_back(parameter(i, vertices_[static_cast<std::size_t>(list[k])].location) -
                    parameter(i, vertices_[static_cast<std::size_t>(list[k + 1])].location));
    return out;
  }

  /// Length classes n (piece length S_n, 1 <= n <= q) in traversal order from z(phi).
  std::vector<int> pieces(int i) const {
    std::vector<int> out;
    for (const auto& len : piece_lengths(i)) out.push_back(classify_length(len));
    return out;
  }

  /// Length class of an exact length, or throws if it is not some S_n.
  int classify_length(const ExactScalar& len) const {
    if (units_.empty()) {
      std::lock_guard<std::mutex> lock(mu_);
      if (units_.empty())
        for (int n = 1; n <= sym_.d / 2; ++n) units_.push_back(section_length(sym_.d, n));
    }
    for (std::size_t n = 0; n < units_.size(); ++n)
      if (units_[n] == len) return static_cast<int>(n) + 1;
    throw DomainError("length is not a section length");
  }

  const std::vector<TriangleId>& elementary_triangles() const {
    std::lock_guard<std::mutex> lock(mu_);
    if (!tri_built_) {
      const int d = sym_.d;
      for (int a = 0; a < d; ++a)
        for (int b = a + 1; b < d; ++b)
          for (int c = b + 1; c < d; ++c) {
            TriangleId t = TriangleId::make(sym_, a, b, c);
            if (t.elementary()) triangles_.push_back(t);
          }
      tri_built_ = true;
    }
    return triangles_;
  }

  /// True iff no segment meets the open interior of the triangle.
  bool is_face(const TriangleId& t) const {
    TriangleGeometry g = triangle_geometry(t);
    for (int s = 0; s < sym_.d; ++s) {
      if (s == t.idx[0] || s == t.idx[1] || s == t.idx[2]) continue;
      const auto& seg = segments_[static_cast<std::size_t>(s)];
      int pos = 0, neg = 0;
      for (const auto& v : g.v) {
        const int o = orientation(seg.start, seg.end, v);
        if (o > 0) ++pos;
        if (o < 0) ++neg;
      }
      if (pos > 0 && neg > 0) return false;
    }
    return true;
  }

  /// Triangles found by face enumeration (independent of the index-sum criterion).
  std::vector<TriangleId> geometric_faces() const {
    std::vector<TriangleId> out;
    const int d = sym_.d;
    for (int a = 0; a < d; ++a)
      for (int b = a + 1; b < d; ++b)
        for (int c = b + 1; c < d; ++c) {
          TriangleId t = TriangleId::make(sym_, a, b, c);
          if (t.concurrent()) continue;
          if (is_face(t)) out.push_back(t);
        }
    return out;
  }

 private:
  SymmetryIndex sym_;
  std::vector<SegmentId> segments_;
  std::vector<VertexRecord> vertices_;
  std::vector<std::vector<int>> on_segment_;
  mutable std::mutex mu_;
  mutable std::vector<ExactScalar> units_;
  mutable std::vector<TriangleId> triangles_;
  mutable bool tri_built_ = false;
};

/// Shared immutable arrangement per (d, kappa).
inline const Arrangement& arrangement(const SymmetryIndex& sym) {
  static std::mutex m;
  static std::map<std::pair<int, int>, std::unique_ptr<Arrangement>> cache;
  std::lock_guard<std::mutex> lock(m);
  auto& slot = cache[{sym.d, sym.kappa}];
  if (!slot) slot = std::make_unique<Arrangement>(sym);
  return *slot;
}

inline std::pair<int, int> vertex_multiplicities(const SymmetryIndex& sym, int mu_label) {
  return arrangement(sym).vertex_multiplicities(sym.index(mu_label));
}

/// Length classes of the pieces of G_mu, oriented so the sequence is the
/// lexicographically smaller of its two traversals.
inline std::vector<int> subdivision_sequence(const SymmetryIndex& sym, int mu_label) {
  auto fwd = arrangement(sym).pieces(sym.index(mu_label));
  std::vector<int> rev(fwd.rbegin(), fwd.rend());
  return std::min(fwd, rev);
}

inline const std::vector<TriangleId>& triangular_pattern(const SymmetryIndex& sym) {
  return arrangement(sym).elementary_triangles();
}

/// Multiplicity table: (v2, v3) expected on G_mu.
inline std::pair<int, int> closed_form_multiplicities(const SymmetryIndex& sym, int mu_label) {
  const int d = sym.d;
  const int m = std::abs(mu_label);
  auto in = [](const std::vector<int>& s, int x) { return std::find(s.begin(), s.end(), x) != s.end(); };
  const std::pair<int, int> odd0{0, (d - 1) / 2}, odd2{2, (d - 3) / 2};
  const std::pair<int, int> even1{1, (d - 2) / 2}, even3{3, (d - 4) / 2};
  if (sym.kappa == 0) {
    const int mu = static_cast<int>(detail::mod(mu_label, d));
    if (d % 2 == 1) {
      const int q = (d - 1) / 2;
      if (q % 3 == 1) {
        const int l = (q - 1) / 3;
        return (mu == 0 || mu == 2 * l + 1 || mu == 4 * l + 2) ? odd0 : odd2;
      }
      return mu == 0 ? odd0 : odd2;
    }
    const int q = d / 2;
    if (q % 3 == 0) {
      const int l = q / 3;
      return (in(i_odd(d), mu) || mu == 0 || mu == 2 * l || mu == 4 * l) ? even1 : even3;
    }
    return (in(i_odd(d), mu) || mu == 0) ? even1 : even3;
  }
  const int q = d / 3;
  if (q % 2 == 0) return in(i_odd(d), m) ? even1 : even3;
  return odd2;
}

/// Subdivision sequence (running S-indices) for G_mu from the case table.
inline std::vector<int> closed_form_subdivision(const SymmetryIndex& sym, int mu_label) {
  const int d = sym.d;
  const int m = std::abs(mu_label);
  auto drop1 = [](std::vector<int> s) {
    s.erase(std::remove(s.begin(), s.end(), 1), s.end());
    return s;
  };
  if (d % 2 == 1) {
    const int q = (d - 1) / 2;
    if (sym.kappa != 0) return i_odd(d);
    const int mu = static_cast<int>(detail::mod(mu_label, d));
    if (q % 3 == 1) {
      const int l = (q - 1) / 3;
      return (mu == 0 || mu == 2 * l + 1 || mu == 4 * l + 2) ? drop1(i_odd(d)) : i_odd(d);
    }
    return mu == 0 ? drop1(i_odd(d)) : i_odd(d);
  }
  const int q = d / 2;
  if (sym.kappa != 0) return m % 2 == 1 ? i_even(d) : i_odd(d);
  const int mu = static_cast<int>(detail::mod(mu_label, d));
  if (q % 3 == 0) {
    const int l = q / 3;
    if (mu % 2 == 1) return i_even(d);
    return (mu == 0 || mu == 2 * l || mu == 4 * l) ? drop1(i_odd(d)) : i_odd(d);
  }
  if (mu == 0) return drop1(i_odd(d));
  return mu % 2 == 0 ? i_odd(d) : i_even(d);
}

/// The case-table sequence in length classes, oriented like subdivision_sequence.
inline std::vector<int> closed_form_subdivision_classes(const SymmetryIndex& sym, int mu_label) {
  auto e = closed_form_subdivision(sym, mu_label);
  for (auto& x : e) x = length_class(sym.d, x);
  std::vector<int> r(e.rbegin(), e.rend());
  return std::min(e, r);
}

/// Closed-form count of elementary triangles in the pattern (d, kappa).
inline int census_formula(const SymmetryIndex& sym) {
  const int d = sym.d;
  const int r = static_cast<int>(std::lround((d - 3) * (d - 3) / 12.0));
  if (d % 3 != 0) return d % 2 ? d - 1 + 4 * r : d - 2 + 4 * r;
  const int q = d / 3;
  if (sym.kappa == 0) {
    if (q % 2 == 1) {
      const int l = (q - 1) / 2;
      return 6 * (r - l * (l - 1));
    }
    const int l = q / 2;
    return 6 * (r - (l - 1) * (l - 1));
  }
  if (q % 2 == 1) {
    const int l = (q - 1) / 2;
    return 9 * l + 1 + 3 * (r - l * (l - 1)) + 6 * l * (l - 1);
  }
  const int l = q / 2;
  return 9 * l - 5 + 3 * (r - (l - 1) * (l - 1)) + 6 * (l - 1) * (l - 1);
}

/// The symmetry indices whose patterns make up the prototile set for d.
inline std::vector<SymmetryIndex> pattern_family(int d) {
  if (d % 3 == 0) return {SymmetryIndex::make(d, -2), SymmetryIndex::make(d, 0), SymmetryIndex::make(d, 2)};
  return {SymmetryIndex::make(d, 0)};
}

}  // namespace deltoid
