#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "deltoid/arrangement.hpp"

using namespace deltoid;
using cd = std::complex<double>;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Plain floating-point model of the pattern: line i is e^{-2i phi} + t e^{i phi}.
struct FloatPattern {
  int d;
  std::vector<double> phi;

  FloatPattern(int d_, int kappa) : d(d_) {
    for (int i = 0; i < d; ++i) {
      const int label = (kappa == 2 && i > 0) ? i - d : i;
      phi.push_back((3 * label - kappa) * kPi / (3 * d));
    }
  }
  cd base(int i) const { return std::polar(1.0, -2 * phi[static_cast<std::size_t>(i)]); }
  cd dir(int i) const { return std::polar(1.0, phi[static_cast<std::size_t>(i)]); }
  // parameter t on line i of its crossing with line j
  double cross_t(int i, int j) const {
    const cd a = base(i), u = dir(i), b = base(j), w = dir(j);
    const double den = u.real() * w.imag() - u.imag() * w.real();
    const cd r = b - a;
    return (r.real() * w.imag() - r.imag() * w.real()) / den;
  }
  cd at(int i, double t) const { return base(i) + t * dir(i); }

  // crossing parameters on line i, grouped: (t, number of lines through the point)
  std::vector<std::pair<double, int>> vertices(int i) const {
    std::vector<double> ts;
    for (int j = 0; j < d; ++j)
      if (j != i) ts.push_back(cross_t(i, j));
    std::sort(ts.begin(), ts.end());
    std::vector<std::pair<double, int>> out;
    for (double t : ts) {
      if (!out.empty() && std::abs(out.back().first - t) < 1e-9) ++out.back().second;
      else out.emplace_back(t, 2);
    }
    return out;
  }
};

std::vector<SymmetryIndex> all_patterns(int lo, int hi) {
  std::vector<SymmetryIndex> r;
  for (int d = lo; d <= hi; ++d)
    for (const auto& s : pattern_family(d)) r.push_back(s);
  return r;
}

}  // namespace

TEST(Arrangement, SegmentsAreTangentChordsOfTheDeltoid) {
  for (const auto& sym : all_patterns(5, 12))
    for (const auto& g : build_segments(sym)) {
      EXPECT_TRUE(deltoid_equation(g.start).is_zero());
      EXPECT_TRUE(deltoid_equation(g.end).is_zero());
      EXPECT_TRUE(deltoid_equation(g.tangency_point()).is_zero());
      EXPECT_NEAR(std::abs(g.end.to_complex() - g.start.to_complex()), 4.0, 1e-12);
    }
}

TEST(Arrangement, IntersectionMatchesFloatModel) {
  const FloatPattern fp(14, 0);
  for (int i = 0; i < 14; ++i)
    for (int j = 0; j < 14; ++j) {
      if (i == j) continue;
      const Point2 p = intersect(3 * i, 3 * j, 14);
      EXPECT_LT(std::abs(p.to_complex() - fp.at(i, fp.cross_t(i, j))), 1e-12);
    }
  EXPECT_THROW(intersect(0, 42, 14), DomainError);
}

TEST(Arrangement, KappaChecks) {
  EXPECT_THROW(SymmetryIndex::make(14, 2), DomainError);
  EXPECT_THROW(SymmetryIndex::make(12, 1), DomainError);
  EXPECT_THROW(SymmetryIndex::make(4, 0), DomainError);
  EXPECT_NO_THROW(SymmetryIndex::make(12, -2));
}

// Vertex multiplicities: exact arrangement vs float model vs the printed table.
TEST(Arrangement, MultiplicityTableUpTo18) {
  for (const auto& sym : all_patterns(5, 18)) {
    const FloatPattern fp(sym.d, sym.kappa);
    for (int i = 0; i < sym.d; ++i) {
      int v2 = 0, v3 = 0;
      for (auto [t, m] : fp.vertices(i)) {
        EXPECT_LE(std::abs(t), 2 + 1e-9);
        ASSERT_LE(m, 3) << "d=" << sym.d;
        (m == 2 ? v2 : v3)++;
      }
      const int mu = sym.label(i);
      EXPECT_EQ(vertex_multiplicities(sym, mu), std::make_pair(v2, v3)) << "d=" << sym.d << " kappa=" << sym.kappa << " mu=" << mu;
      EXPECT_EQ(closed_form_multiplicities(sym, mu), std::make_pair(v2, v3)) << "d=" << sym.d << " kappa=" << sym.kappa << " mu=" << mu;
    }
  }
}

TEST(Arrangement, MultiplicityRowsD14AndD7) {
  const auto s14 = SymmetryIndex::make(14, 0);
  EXPECT_EQ(vertex_multiplicities(s14, 0), std::make_pair(1, 6));
  EXPECT_EQ(vertex_multiplicities(s14, 5), std::make_pair(1, 6));
  EXPECT_EQ(vertex_multiplicities(s14, 4), std::make_pair(3, 5));
  const auto s7 = SymmetryIndex::make(7, 0);
  EXPECT_EQ(vertex_multiplicities(s7, 0), std::make_pair(0, 3));
  EXPECT_EQ(vertex_multiplicities(s7, 3), std::make_pair(2, 2));
  // q = 3l+1 with l = 1: mu in {0, 3, 6} behave like mu = 0
  const auto s9 = SymmetryIndex::make(9, 0);
  EXPECT_EQ(vertex_multiplicities(s9, 3), std::make_pair(0, 4));
  EXPECT_EQ(vertex_multiplicities(s9, 1), std::make_pair(2, 3));
}

// Piece classes from the float model compared with the exact sequence and the case table.
TEST(Arrangement, SubdivisionSequencesUpTo18) {
  for (const auto& sym : all_patterns(5, 18)) {
    const FloatPattern fp(sym.d, sym.kappa);
    const Arrangement& arr = arrangement(sym);
    for (int i = 0; i < sym.d; ++i) {
      auto vs = fp.vertices(i);
      std::vector<int> classes;
      for (std::size_t k = 0; k + 1 < vs.size(); ++k) {
        const double len = vs[k + 1].first - vs[k].first;
        int best = -1;
        for (int n = 1; n <= sym.d / 2; ++n)
          if (std::abs(len - 4 * std::sin(kPi / sym.d) * std::sin(n * kPi / sym.d)) < 1e-9) best = n;
        ASSERT_GT(best, 0) << "d=" << sym.d << " piece " << len;
        classes.push_back(best);
      }
      std::vector<int> rev(classes.rbegin(), classes.rend());
      const auto oracle = std::min(classes, rev);
      const int mu = sym.label(i);
      EXPECT_EQ(subdivision_sequence(sym, mu), oracle) << "d=" << sym.d << " kappa=" << sym.kappa << " mu=" << mu;
      EXPECT_EQ(closed_form_subdivision_classes(sym, mu), oracle) << "d=" << sym.d << " kappa=" << sym.kappa << " mu=" << mu;
      // exact comparison of each piece with its section length
      const auto lens = arr.piece_lengths(i);
      const auto raw = arr.pieces(i);
      for (std::size_t k = 0; k < lens.size(); ++k) EXPECT_EQ(lens[k], section_length(sym.d, raw[k]));
      ExactScalar total(sym.field(), 0);
      for (const auto& l : lens) total += l;
      EXPECT_LE(compare(total, ExactScalar(sym.field(), 4)), 0);
    }
  }
}

TEST(Arrangement, LengthClassesFold) {
  EXPECT_EQ(length_class(14, 9), 5);
  EXPECT_EQ(length_class(14, 7), 7);
  EXPECT_EQ(length_class(14, -3), 3);
  EXPECT_EQ(section_length(14, 3), section_length(14, 11));
}

// Count of elementary triangles: float face enumeration with the index-sum test.
TEST(Census, ClosedFormsUpTo18) {
  for (const auto& sym : all_patterns(5, 18)) {
    const FloatPattern fp(sym.d, sym.kappa);
    int faces = 0, elementary_faces = 0;
    for (int a = 0; a < sym.d; ++a)
      for (int b = a + 1; b < sym.d; ++b)
        for (int c = b + 1; c < sym.d; ++c) {
          const cd p = fp.at(a, fp.cross_t(a, b)), q = fp.at(b, fp.cross_t(b, c)), r = fp.at(c, fp.cross_t(c, a));
          const double area = std::imag(std::conj(q - p) * (r - p));
          if (std::abs(area) < 1e-9) continue;
          bool face = true;
          for (int s = 0; s < sym.d && face; ++s) {
            if (s == a || s == b || s == c) continue;
            int pos = 0, neg = 0;
            for (cd v : {p, q, r}) {
              const double o = std::imag(std::conj(fp.dir(s)) * (v - fp.base(s)));
              if (o > 1e-9) ++pos;
              if (o < -1e-9) ++neg;
            }
            face = !(pos && neg);
          }
          if (!face) continue;
          ++faces;
          if (TriangleId::make(sym, a, b, c).elementary()) ++elementary_faces;
        }
    const int formula = census_formula(sym);
    EXPECT_EQ(elementary_faces, formula) << "d=" << sym.d << " kappa=" << sym.kappa;
    EXPECT_EQ(static_cast<int>(arrangement(sym).elementary_triangles().size()), formula) << "d=" << sym.d << " kappa=" << sym.kappa;
    EXPECT_EQ(elementary_faces, faces) << "every triangular face is elementary, d=" << sym.d;
  }
  EXPECT_EQ(census_formula(SymmetryIndex::make(14, 0)), 52);
}

TEST(Triangles, AnglesSumToPi) {
  for (const auto& t : arrangement(SymmetryIndex::make(14, 0)).elementary_triangles()) {
    auto a = t.angles();
    EXPECT_EQ(a[0] + a[1] + a[2], 14);
    const TriangleGeometry g = triangle_geometry(t);
    EXPECT_EQ(orientation(g.v[0], g.v[1], g.v[2]), 1);
  }
}
