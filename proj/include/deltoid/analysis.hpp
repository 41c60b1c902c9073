// Substitution matrices, tile frequencies, vertex stars and census reports.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "deltoid/random.hpp"

namespace deltoid {

/// Entry (i, j): number of children of type i in the rule for type j.
using SubstitutionMatrix = Eigen::Matrix<int64_t, Eigen::Dynamic, Eigen::Dynamic>;

inline SubstitutionMatrix substitution_matrix(const RuleSet& rs) {
  const int n = static_cast<int>(rs.rules().size());
  SubstitutionMatrix M = SubstitutionMatrix::Zero(n, n);
  for (const auto& r : rs.rules())
    for (const auto& c : r.children) ++M(c.tile, r.source);
  return M;
}

/// Matrix of a composition: the rightmost rule set acts first.
inline SubstitutionMatrix substitution_matrix(const std::vector<const RuleSet*>& seq) {
  if (seq.empty()) throw DomainError("substitution_matrix: empty composition");
  SubstitutionMatrix M = substitution_matrix(*seq.back());
  for (auto it = seq.rbegin() + 1; it != seq.rend(); ++it) M = substitution_matrix(**it) * M;
  return M;
}

struct Primitivity {
  bool primitive = false;
  int exponent = 0;  // smallest k with M^k > 0, when primitive
};

/// Boolean powers up to the Wielandt bound (n-1)^2 + 1.
inline Primitivity primitivity(const SubstitutionMatrix& M) {
  const int n = static_cast<int>(M.rows());
  using B = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;
  const B A = (M.array() > 0).cast<int>();
  B P = A;
  const int bound = (n - 1) * (n - 1) + 1;
  for (int k = 1; k <= bound; ++k) {
    if ((P.array() > 0).all()) return {true, k};
    P = ((P * A).array() > 0).cast<int>();
  }
  return {false, 0};
}

/// Dominant eigenvalue always; Perron vectors only for primitive matrices.
struct FrequencyReport {
  Primitivity prim;
  double eigenvalue = 0;
  std::vector<double> frequencies;  // right Perron vector, sums to 1
  std::vector<double> left;         // left Perron vector, normalized to max 1
  double residual = 0;              // max |M v - lambda v| with v normalized to max 1
};

inline FrequencyReport tile_frequencies(const SubstitutionMatrix& M) {
  FrequencyReport r;
  r.prim = primitivity(M);
  const Eigen::MatrixXd A = M.cast<double>();
  Eigen::EigenSolver<Eigen::MatrixXd> es(A);
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()[i].real() > es.eigenvalues()[best].real()) best = i;
  r.eigenvalue = es.eigenvalues()[best].real();
  Eigen::VectorXd v = es.eigenvectors().col(best).real();
  if (v.sum() < 0) v = -v;
  v /= v.cwiseAbs().maxCoeff();
  r.residual = (A * v - r.eigenvalue * v).cwiseAbs().maxCoeff();
  if (!r.prim.primitive) return r;
  v /= v.sum();
  r.frequencies.assign(v.data(), v.data() + v.size());
  Eigen::EigenSolver<Eigen::MatrixXd> et(A.transpose());
  Eigen::Index bt = 0;
  for (Eigen::Index i = 1; i < et.eigenvalues().size(); ++i)
    if (et.eigenvalues()[i].real() > et.eigenvalues()[bt].real()) bt = i;
  Eigen::VectorXd w = et.eigenvectors().col(bt).real();
  if (w.sum() < 0) w = -w;
  w /= w.cwiseAbs().maxCoeff();
  r.left.assign(w.data(), w.data() + w.size());
  return r;
}

inline FrequencyReport tile_frequencies(const RuleSet& rs) { return tile_frequencies(substitution_matrix(rs)); }

/// Exact check that every rule covers iota^2 times the area of its source.
inline bool area_identity(const RuleSet& rs) {
  const PrototileSet& set = prototile_set(rs.d());
  const ExactScalar i2 = rs.iota() * rs.iota();
  for (const auto& r : rs.rules()) {
    ExactScalar a(field_for(rs.d()), 0);
    for (const auto& c : r.children) a = a + set[c.tile].area2();
    if (a != set[r.source].area2() * i2) return false;
  }
  return true;
}

/// Fraction of each prototile type among the tiles of a patch.
inline std::vector<double> empirical_frequencies(const Patch& p) {
  auto c = p.counts();
  std::vector<double> f(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) f[i] = p.tiles.empty() ? 0 : static_cast<double>(c[i]) / static_cast<double>(p.tiles.size());
  return f;
}

struct VertexStar {
  Point2 vertex;
  /// (shape representative, corner angle in pi/d) anticlockwise, minimal rotation.
  std::vector<std::pair<int, int>> signature;
  int order = 1;
};

namespace detail {
inline int direction_index(int d, std::complex<double> w) {
  constexpr double pi = 3.14159265358979323846;
  return static_cast<int>(mod(static_cast<int64_t>(std::llround(std::arg(w) / (pi / (3 * d)))), 6 * d));
}

template <class T>
std::vector<T> min_rotation(const std::vector<T>& s) {
  std::vector<T> best = s;
  for (std::size_t k = 1; k < s.size(); ++k) {
    std::vector<T> r(s.begin() + static_cast<std::ptrdiff_t>(k), s.end());
    r.insert(r.end(), s.begin(), s.begin() + static_cast<std::ptrdiff_t>(k));
    if (r < best) best = r;
  }
  return best;
}

template <class T>
int rotational_order(const std::vector<T>& s) {
  const std::size_t n = s.size();
  for (std::size_t period = 1; period <= n; ++period) {
    if (n % period) continue;
    bool ok = true;
    for (std::size_t i = 0; ok && i < n; ++i) ok = s[i] == s[(i + period) % n];
    if (ok) return static_cast<int>(n / period);
  }
  return 1;
}
}  // namespace detail

/// Stars of all interior vertices (corner angles summing to 2 pi), at shape level.
inline std::vector<VertexStar> vertex_configurations(const Patch& p) {
  const ShapeCatalog& sc = shape_catalog(p.d);
  const PatchTopology topo = build_topology(p);
  const auto& set = prototile_set(p.d);
  // corner list per vertex: (start direction, shape, angle)
  std::vector<std::vector<std::tuple<int, int, int>>> corners(topo.verts.size());
  for (std::size_t i = 0; i < p.tiles.size(); ++i) {
    const auto v = p.vertices(i);
    const auto& ang = set[p.tiles[i].tile].angles();
    const int shape = sc.representative(p.tiles[i].tile).first;
    const bool ccw = !p.tiles[i].iso.reflect;
    for (std::size_t k = 0; k < 3; ++k) {
      const std::size_t next = ccw ? (k + 1) % 3 : (k + 2) % 3;
      const int dir = detail::direction_index(p.d, v[next].to_complex() - v[k].to_complex());
      corners[topo.tile_verts[i][k]].emplace_back(dir, shape, ang[k]);
    }
  }
  std::vector<VertexStar> out;
  for (std::size_t v = 0; v < corners.size(); ++v) {
    int sum = 0;
    for (const auto& c : corners[v]) sum += std::get<2>(c);
    if (sum != 2 * p.d) continue;
    auto cs = corners[v];
    std::sort(cs.begin(), cs.end());
    std::vector<std::pair<int, int>> seq;
    for (const auto& [dir, shape, a] : cs) seq.emplace_back(shape, a);
    VertexStar s;
    s.vertex = topo.verts[v];
    s.order = detail::rotational_order(seq);
    s.signature = detail::min_rotation(seq);
    out.push_back(std::move(s));
  }
  return out;
}

struct SymmetricStarSearch {
  int d = 0, p = 0, sign = 1;
  int depth = 0;        // first depth at which the best order appears
  int best_order = 1;
  std::vector<std::pair<int, int>> signature;
  std::vector<int> orders_by_depth;  // best order at depth 1..max_depth
};

/// Iterate the rules from every prototile up to max_depth (stopping once a
/// patch exceeds max_tiles) and report the most symmetric vertex star seen.
inline SymmetricStarSearch find_symmetric_stars(int d, int p, int sign, int max_depth = 5, std::size_t max_tiles = 20000) {
  SymmetricStarSearch r{d, p, sign, 0, 1, {}, {}};
  const RuleSet& rs = rule_set(d, p, sign);
  std::vector<Patch> level;
  for (const auto& P : prototile_set(d).tiles()) level.push_back(Patch::single(d, P.id));
  for (int depth = 1; depth <= max_depth; ++depth) {
    int best = 1;
    std::vector<Patch> next;
    for (const auto& pa : level) {
      if (pa.size() * static_cast<std::size_t>(std::ceil(rs.iota().to_double() * rs.iota().to_double())) > max_tiles) continue;
      Patch q = apply(rs, pa);
      for (const auto& s : vertex_configurations(q)) {
        best = std::max(best, s.order);
        if (s.order > r.best_order) {
          r.best_order = s.order;
          r.depth = depth;
          r.signature = s.signature;
        }
      }
      next.push_back(std::move(q));
    }
    r.orders_by_depth.push_back(best);
    level = std::move(next);
    if (level.empty()) break;
  }
  return r;
}

struct CensusReport {
  int d = 0;
  struct Pattern {
    int kappa = 0;
    int geometric = 0;   // elementary triangles by index sum
    int faces = 0;       // elementary triangles that are faces of the arrangement
    int formula = 0;
    bool multiplicities = true;  // every segment's (v2, v3) matches
    bool subdivisions = true;    // every segment's subdivision sequence matches
  };
  std::vector<Pattern> patterns;
  int prototiles = 0;
  bool all_match() const {
    for (const auto& p : patterns)
      if (p.geometric != p.formula || p.faces != p.formula || !p.multiplicities || !p.subdivisions) return false;
    return true;
  }
};

inline CensusReport census_report(int d) {
  if (d < 5) throw DomainError("census_report: d must be at least 5");
  CensusReport rep;
  rep.d = d;
  for (const auto& sym : pattern_family(d)) {
    CensusReport::Pattern pt;
    pt.kappa = sym.kappa;
    const Arrangement& arr = arrangement(sym);
    pt.geometric = static_cast<int>(arr.elementary_triangles().size());
    pt.faces = 0;
    for (const auto& t : arr.geometric_faces())
      if (t.elementary()) ++pt.faces;
    pt.formula = census_formula(sym);
    for (int i = 0; i < d; ++i) {
      const int mu = sym.label(i);
      if (vertex_multiplicities(sym, mu) != closed_form_multiplicities(sym, mu)) pt.multiplicities = false;
      if (subdivision_sequence(sym, mu) != closed_form_subdivision_classes(sym, mu)) pt.subdivisions = false;
    }
    rep.patterns.push_back(pt);
  }
  rep.prototiles = static_cast<int>(prototile_set(d).size());
  return rep;
}

struct PisotRow {
  int d = 0;
  std::vector<int> p;  // one entry for a single factor, two for a product
  PisotReport report;
};

/// PV classification of iota_{d,p} for 5 <= d <= max_d and all valid p.
inline std::vector<PisotRow> pisot_table(int max_d) {
  std::vector<PisotRow> rows;
  for (int d = 5; d <= max_d; ++d)
    for (int p = 2; p <= d / 2; ++p) rows.push_back({d, {p}, pisot_report(inflation_factor(d, p))});
  return rows;
}

}  // namespace deltoid
