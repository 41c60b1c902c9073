#include <gtest/gtest.h>

#include <fstream>
#include <map>
#include <sstream>

#include "deltoid/patch.hpp"

using namespace deltoid;

namespace {

// "G -> I~ F^ ..." lines, names as in the prototile set.
std::map<std::string, std::multiset<std::string>> read_rules(const std::string& path) {
  std::ifstream in(path);
  std::map<std::string, std::multiset<std::string>> r;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string src, arrow, c;
    if (!(ls >> src >> arrow)) continue;
    auto& kids = r[src];
    while (ls >> c) kids.insert(c);
  }
  return r;
}

std::multiset<std::string> derived_children(const RuleSet& rs, int tile) {
  std::multiset<std::string> m;
  for (const auto& c : rs.rule(tile).children) m.insert(prototile_set(rs.d()).tiles()[static_cast<std::size_t>(c.tile)].name);
  return m;
}

EdgeWord word(std::initializer_list<const char*> ls) {
  EdgeWord w;
  for (const char* s : ls) w.push_back(EdgeLetter::parse(s));
  return w;
}

std::vector<int> reversed(std::vector<int> v) {
  std::reverse(v.begin(), v.end());
  return v;
}

}  // namespace

TEST(EdgeSubdivision, Progressions) {
  EXPECT_EQ(edge_subdivision(14, 3, 1), (std::vector<int>{3}));
  EXPECT_EQ(edge_subdivision(14, 3, 2), (std::vector<int>{2, 4}));
  EXPECT_EQ(edge_subdivision(14, 3, 5), (std::vector<int>{3, 5, 7}));
  EXPECT_THROW(edge_subdivision(14, 3, 8), DomainError);
}

TEST(RulesD14, InflatedFIsReadOffTheRightTriangle) {
  const RuleSet& rs = rule_set(14, 3, 1);
  const auto& loc = rs.rule(prototile_set(14).find("F")).located;
  ASSERT_TRUE(loc.has_value());
  EXPECT_EQ(loc->target.labels(), (std::array<int, 3>{2, 5, 10}));
}

TEST(RulesD14, PrintedRulesMatchExceptOneErratum) {
  const auto printed = read_rules(std::string(DELTOID_TEST_DATA) + "/phi_14_3_plus.txt");
  ASSERT_EQ(printed.size(), 26u);
  const RuleSet& rs = rule_set(14, 3, 1);
  const PrototileSet& set = prototile_set(14);
  std::vector<std::string> mismatched;
  for (const auto& [src, kids] : printed) {
    const int id = set.find(src);
    ASSERT_GE(id, 0) << src;
    if (derived_children(rs, id) != kids) mismatched.push_back(src);
  }
  EXPECT_EQ(mismatched, std::vector<std::string>{"D^"});
  EXPECT_EQ(derived_children(rs, set.find("P")), (std::multiset<std::string>{"A", "B~"}));

  // The printed D^ rule lists C^~ twice; without the repeat it is the derived rule.
  auto d_hat = printed.at("D^");
  d_hat.erase(d_hat.find("C^~"));
  EXPECT_EQ(derived_children(rs, set.find("D^")), d_hat);
  // and the printed list covers more than iota^2 times the tile
  ExactScalar printed_area(field_for(14), 0);
  for (const auto& n : printed.at("D^")) printed_area += set[set.find(n)].area2();
  const ExactScalar i2 = rs.iota() * rs.iota();
  EXPECT_EQ(printed_area - set[set.find("D^")].area2() * i2, set[set.find("C^~")].area2());
}

TEST(RulesD14, PrintedEdgeWords) {
  const RuleSet& rs = rule_set(14, 3, 1);
  EXPECT_EQ(rs.edge_word(EdgeLetter::parse("W1+")), word({"W3-"}));
  EXPECT_EQ(rs.edge_word(EdgeLetter::parse("W2+")), word({"W4-", "W2-"}));
  EXPECT_EQ(rs.edge_word(EdgeLetter::parse("W3+")), word({"W5-", "W3-", "W1-"}));
  EXPECT_EQ(rs.edge_word(EdgeLetter::parse("W4+")), word({"W6-", "W4-", "W2-"}));
  EXPECT_EQ(rs.edge_word(EdgeLetter::parse("W5+")), word({"W70", "W5-", "W3-"}));
  EXPECT_EQ(rs.edge_word(EdgeLetter::parse("W6+")), word({"W6+", "W6-", "W4-"}));
  EXPECT_EQ(rs.edge_word(EdgeLetter::parse("W70")), word({"W5+", "W70", "W5-"}));
  EXPECT_TRUE(rs.edge_conflicts().empty());
}

TEST(RulesD14, MinusWordsAreFlippedPlusWords) {
  const RuleSet& plus = rule_set(14, 3, 1);
  const RuleSet& minus = rule_set(14, 3, -1);
  for (const auto& [l, w] : minus.edge_map()) EXPECT_EQ(w, plus.edge_word(l.negated())) << l.to_string();
}

// Phi_- of T uses the Phi_+ dissection of the reflected partner.
TEST(RulesD14, MinusRulesBorrowFromPartners) {
  const RuleSet& plus = rule_set(14, 3, 1);
  const RuleSet& minus = rule_set(14, 3, -1);
  const PrototileSet& set = prototile_set(14);
  for (const auto& P : set.tiles()) {
    const int partner = P.isosceles() ? P.tilde : set[P.tilde].hat;
    ASSERT_GE(partner, 0) << P.name;
    EXPECT_EQ(derived_children(minus, P.id), derived_children(plus, partner)) << P.name;
  }
}

// Every rule covers exactly iota^2 times its tile, for every d <= 14.
TEST(Rules, AreaIdentityUpTo14) {
  for (int d = 5; d <= 14; ++d)
    for (int p = 2; p <= d / 2; ++p)
      for (int s : {1, -1}) {
        const RuleSet& rs = rule_set(d, p, s);
        const PrototileSet& set = prototile_set(d);
        const ExactScalar i2 = rs.iota() * rs.iota();
        for (const auto& r : rs.rules()) {
          ExactScalar a(field_for(d), 0);
          for (const auto& c : r.children) a += set[c.tile].area2();
          EXPECT_EQ(a, set[r.source].area2() * i2) << rs.label() << " " << set[r.source].name;
        }
        EXPECT_TRUE(rs.edge_conflicts().empty()) << rs.label();
      }
}

TEST(Rules, Eq312AndProjectionsThroughFourSteps) {
  const std::vector<std::pair<int, int>> cases{{14, 3}, {14, 5}, {10, 3}, {8, 3}, {5, 2}};
  for (auto [d, p] : cases)
    for (int s : {1, -1}) {
      const RuleSet& rs = rule_set(d, p, s);
      for (const auto& [l, w] : rs.edge_map()) {
        EdgeWord a{l}, b{l.negated()};
        for (int n = 1; n <= 4; ++n) {
          a = inflate_word(rs, a);
          b = inflate_word(rs, b);
          EXPECT_EQ(a, mir(rho(b))) << rs.label() << " " << l.to_string() << " n=" << n;
          EXPECT_EQ(proj(a), reversed(proj(b))) << rs.label() << " " << l.to_string() << " n=" << n;
        }
      }
    }
}

TEST(Rules, BaseWordsArePalindromicForEvenD) {
  for (int d : {8, 10, 12, 14}) {
    const RuleSet& rs = rule_set(d, d / 2, 1);
    for (const auto& [l, w] : rs.edge_map()) EXPECT_TRUE(palindromic(proj(w))) << d << " " << l.to_string();
  }
  // not so for iota_{14,3}
  EXPECT_FALSE(palindromic(proj(rule_set(14, 3, 1).edge_word(EdgeLetter::parse("W2+")))));
}

// iota_{d,3} times a kappa=-2 triangle with index sum -3 is the kappa=0 triangle on the same labels.
TEST(Rules, KappaTransitionForMultiplesOfThree) {
  for (int d : {9, 12, 15, 18}) {
    const auto sym = SymmetryIndex::make(d, -2);
    int seen = 0;
    for (const auto& t : arrangement(sym).elementary_triangles()) {
      if (detail::mod(t.sigma() + 3, d) != 0) continue;
      ++seen;
      const auto l = t.labels();
      const TriangleId want = TriangleId::make(SymmetryIndex::make(d, 0), l[0], l[1], l[2]);
      bool found = false;
      for (const auto& c : locate_candidates(d, 3, t)) found = found || c.target == want;
      EXPECT_TRUE(found) << t.to_string();
    }
    EXPECT_GT(seen, 0) << d;
  }
}

TEST(Rules, ChildrenTileTheInflatedParent) {
  for (auto [d, p] : std::vector<std::pair<int, int>>{{14, 3}, {9, 3}, {12, 5}}) {
    const RuleSet& rs = rule_set(d, p, 1);
    for (const auto& P : prototile_set(d).tiles()) {
      const Patch q = apply(rs, Patch::single(d, P.id));
      EXPECT_TRUE(verify_face_to_face(q).ok()) << rs.label() << " " << P.name;
    }
  }
}

TEST(Rules, BadArguments) {
  EXPECT_THROW(rule_set(14, 8, 1), DomainError);
  EXPECT_THROW(rule_set(14, 3, 0), DomainError);
  EXPECT_THROW(inflate_word(rule_set(14, 3, 1), word({"W9+"})), DomainError);
}
