#include <gtest/gtest.h>

#include <set>

#include "deltoid/random.hpp"

using namespace deltoid;

namespace {

std::array<Point2, 3> corners(const TriangleId& t) {
  const auto g = triangle_geometry(t);
  return {g.v[0], g.v[1], g.v[2]};
}

// Flip parameters a listed for each case, with q = d/2 and l = q/3.
std::set<int> stated_range(int d, int kappa) {
  const int q = d / 2, l = q / 3;
  std::set<int> r;
  if (q % 3 == 1) {
    for (int a = 1; a <= 3 * l; ++a)
      if (a != l) r.insert(a);
  } else if (q % 3 == 2) {
    for (int a = 1; a <= 3 * l + 1; ++a)
      if (a != l + 1) r.insert(a);
  } else if (kappa == 0) {
    for (int a = 1; a <= 3 * l - 1; ++a) r.insert(a);
  } else {
    for (int a = 1; a <= 3 * l - 1; ++a)
      if (a != l && a != 2 * l) r.insert(a);
  }
  return r;
}

std::set<Point2, bool (*)(const Point2&, const Point2&)> corner_set(const Patch& p) {
  std::set<Point2, bool (*)(const Point2&, const Point2&)> s([](const Point2& a, const Point2& b) {
    const auto x = a.to_complex(), y = b.to_complex();
    return std::make_pair(x.real(), x.imag()) < std::make_pair(y.real(), y.imag());
  });
  for (std::size_t i = 0; i < p.size(); ++i)
    for (const auto& v : p.vertices(i)) s.insert(v);
  return s;
}

Patch base_678() { return undecorate(apply_n(rule_set(14, 3, 1), Patch::single(14, prototile_set(14).find("G")), 3)); }

}  // namespace

TEST(FlipTemplates, CongruentToStatedTargets) {
  for (int d = 8; d <= 18; d += 2) {
    std::set<std::string> cases;
    for (const auto& sym : pattern_family(d)) {
      std::set<int> as;
      for (const auto& ft : enumerate_flips(d, sym.kappa)) {
        cases.insert(ft.case_name);
        as.insert(ft.a);
        EXPECT_EQ(ft.old_class, d / 2);
        EXPECT_EQ(ft.new_class, d / 2 - 1);
        const bool straight = congruent(d, ft.after[0], corners(ft.stated_targets[0])) &&
                              congruent(d, ft.after[1], corners(ft.stated_targets[1]));
        const bool crossed = congruent(d, ft.after[0], corners(ft.stated_targets[1])) &&
                             congruent(d, ft.after[1], corners(ft.stated_targets[0]));
        EXPECT_TRUE(straight || crossed) << d << " kappa " << sym.kappa << " a " << ft.a;
        const std::set<TriangleId> got{ft.before[0], ft.before[1]}, want{ft.stated_before[0], ft.stated_before[1]};
        EXPECT_EQ(got, want) << d << " kappa " << sym.kappa << " a " << ft.a;
      }
      // kappa = 2 mirrors kappa = -2, so only the number of flips is compared there
      std::set<int> want = stated_range(d, sym.kappa == 2 ? -2 : sym.kappa);
      // the kappa = 0 polygon with q = 3l has one more flippable edge, a = 0
      if ((d / 2) % 3 == 0 && sym.kappa == 0) want.insert(0);
      if (sym.kappa == 2) EXPECT_EQ(as.size(), want.size()) << d;
      else EXPECT_EQ(as, want) << d << " kappa " << sym.kappa;
    }
    EXPECT_FALSE(cases.empty()) << d;
  }
  EXPECT_THROW(enumerate_flips(9, 0), DomainError);
}

TEST(FlipTemplates, EveryCaseIsCovered) {
  std::set<std::string> cases;
  for (int d = 8; d <= 18; d += 2)
    for (const auto& ft : flip_catalog(d)) cases.insert(ft.case_name);
  EXPECT_EQ(cases, (std::set<std::string>{"1", "2", "3.1", "3.2"}));
}

TEST(Flips, OutlinePreservedAndReversible) {
  for (int d : {8, 10, 12, 14}) {
    for (const auto& ft : flip_catalog(d)) {
      Patch q;
      q.d = d;
      q.decorated = false;
      q.tiles = {ft.before_tiles[0], ft.before_tiles[1]};
      const auto sites = find_flippable(q);
      ASSERT_EQ(sites.size(), 1u) << d << " a " << ft.a;
      const Patch f = apply_flip(q, sites[0]);
      EXPECT_EQ(f.area2(), q.area2());
      // the same four corners, with the diagonal swapped
      EXPECT_EQ(corner_set(q), corner_set(f));
      EXPECT_EQ(corner_set(f).size(), 4u);
      const auto fv0 = f.vertices(0), fv1 = f.vertices(1);
      for (const auto& v : ft.outline()) {
        const bool in0 = std::find(fv0.begin(), fv0.end(), v) != fv0.end();
        const bool in1 = std::find(fv1.begin(), fv1.end(), v) != fv1.end();
        EXPECT_TRUE(in0 || in1);
      }
      for (const auto& v : sites[0].new_diagonal) {
        EXPECT_NE(std::find(fv0.begin(), fv0.end(), v), fv0.end());
        EXPECT_NE(std::find(fv1.begin(), fv1.end(), v), fv1.end());
      }
      EXPECT_TRUE(verify_face_to_face(f).ok());
      // and back
      const auto back = find_flippable(f);
      ASSERT_EQ(back.size(), 1u);
      EXPECT_NE(back[0].reverse, sites[0].reverse);
      const Patch g = apply_flip(f, back[0]);
      EXPECT_EQ(std::multiset<int>({g.tiles[0].tile, g.tiles[1].tile}), std::multiset<int>({q.tiles[0].tile, q.tiles[1].tile}));
      EXPECT_EQ(corner_set(g), corner_set(q));
    }
  }
}

TEST(Flips, StaleSiteAndDecoratedPatchAreRejected) {
  const Patch base = base_678();
  const auto sites = find_flippable(base);
  ASSERT_FALSE(sites.empty());
  const Patch once = apply_flip(base, sites[0]);
  EXPECT_THROW(apply_flip(once, sites[0]), DomainError);
  EXPECT_THROW(find_flippable(Patch::single(14, 0)), DomainError);
}

TEST(Rearrangement, HundredFlipsOnA678TilePatch) {
  const Patch base = base_678();
  ASSERT_GE(base.size(), 500u);
  ASSERT_TRUE(verify_face_to_face(base).ok());
  std::vector<std::array<Point2, 2>> marks;
  const Patch r = rearrangement_sample(base, 100, 7, &marks);
  EXPECT_EQ(marks.size(), 100u);
  EXPECT_EQ(r.size(), base.size());
  EXPECT_EQ(r.area2(), base.area2());
  const FaceReport fr = verify_face_to_face(r);
  EXPECT_TRUE(fr.ok()) << (fr.violations.empty() ? "" : fr.violations.front());
  EXPECT_NE(r.tiles, base.tiles);
  EXPECT_EQ(rearrangement_sample(base, 100, 7).tiles, r.tiles);
  EXPECT_NE(rearrangement_sample(base, 100, 8).tiles, r.tiles);
  EXPECT_THROW(rearrangement_sample(base, -1, 7), DomainError);
}

TEST(RandomFamily, BaseMemberAndCap) {
  const RandomRuleFamily fam = random_rule_family(14, 64);
  EXPECT_EQ(fam.q, 7);
  EXPECT_GT(fam.size(), 1u);
  EXPECT_LE(fam.size(), 64u);
  for (const auto& [rep, v] : fam.members.front()) EXPECT_EQ(v, 0);
  // each variant covers the same area as the base dissection
  const auto& set = prototile_set(14);
  for (const auto& [rep, vars] : fam.variants)
    for (const auto& ch : vars) {
      ExactScalar a(field_for(14), 0), b(field_for(14), 0);
      for (const auto& c : ch) a += set[c.tile].area2();
      for (const auto& c : vars.front()) b += set[c.tile].area2();
      EXPECT_EQ(a, b);
    }
  EXPECT_EQ(random_rule_family(14, 1).size(), 1u);
  EXPECT_THROW(random_rule_family(13, 64), DomainError);
  EXPECT_THROW(random_rule_family(14, 0), DomainError);
}

TEST(RandomSubstitution, ThreeStepsUniform) {
  const RandomRuleFamily fam = random_rule_family(14, 64);
  const int seed = prototile_set(14).find("G");
  const Patch p = random_substitution(seed, fam, uniform_pi(fam), 3, 11);
  const FaceReport fr = verify_face_to_face(p);
  EXPECT_TRUE(fr.ok()) << (fr.violations.empty() ? "" : fr.violations.front());
  const ExactScalar i = inflation_factor(14, 7);
  const ExactScalar i2 = i * i;
  EXPECT_EQ(p.area2(), prototile_set(14)[seed].area2() * i2 * i2 * i2);
  EXPECT_EQ(random_substitution(seed, fam, uniform_pi(fam), 3, 11, 3).tiles, p.tiles);
  EXPECT_NE(random_substitution(seed, fam, uniform_pi(fam), 3, 12).tiles, p.tiles);
}

TEST(RandomSubstitution, PiIsValidated) {
  const RandomRuleFamily fam = random_rule_family(14, 8);
  std::vector<double> pi = uniform_pi(fam);
  pi.pop_back();
  EXPECT_THROW(random_substitution(0, fam, pi, 1, 1), DomainError);
  pi = uniform_pi(fam);
  pi[0] = 0;
  EXPECT_THROW(random_substitution(0, fam, pi, 1, 1), DomainError);
  pi = uniform_pi(fam);
  pi[0] *= 2;
  EXPECT_THROW(random_substitution(0, fam, pi, 1, 1), DomainError);
  EXPECT_THROW(random_substitution(0, fam, uniform_pi(fam), -1, 1), DomainError);
}
