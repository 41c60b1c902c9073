// Acceptance checks: one PASS/FAIL line per criterion.
//   acceptance [--criterion N] [--verbose]
#include <chrono>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "deltoid/deltoid.hpp"

using namespace deltoid;

namespace {

bool verbose = false;

struct Result {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fixed(double x, int prec) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(prec);
  s << x;
  return s.str();
}

std::vector<SymmetryIndex> patterns_5_to_18() {
  std::vector<SymmetryIndex> r;
  for (int d = 5; d <= 18; ++d)
    for (const auto& s : pattern_family(d)) r.push_back(s);
  return r;
}

Result multiplicity_table() {
  const auto t0 = Clock::now();
  int rows = 0, bad = 0;
  for (const auto& sym : patterns_5_to_18())
    for (int i = 0; i < sym.d; ++i) {
      const int mu = sym.label(i);
      ++rows;
      if (vertex_multiplicities(sym, mu) != closed_form_multiplicities(sym, mu)) {
        ++bad;
        if (verbose) std::cout << "  d=" << sym.d << " kappa=" << sym.kappa << " mu=" << mu << " differs\n";
      }
    }
  const double s = seconds_since(t0);
  return {bad == 0 && s < 30, std::to_string(rows) + " rows (d,kappa,mu), " + std::to_string(bad) + " mismatches, " + fixed(s, 2) + " s"};
}

Result subdivision_table() {
  int segs = 0, bad = 0;
  for (const auto& sym : patterns_5_to_18()) {
    const Arrangement& arr = arrangement(sym);
    for (int i = 0; i < sym.d; ++i) {
      ++segs;
      const int mu = sym.label(i);
      bool ok = subdivision_sequence(sym, mu) == closed_form_subdivision_classes(sym, mu);
      const auto lens = arr.piece_lengths(i);
      const auto raw = arr.pieces(i);
      ExactScalar total(sym.field(), 0);
      for (std::size_t k = 0; k < lens.size(); ++k) {
        ok = ok && lens[k] == section_length(sym.d, raw[k]);
        total += lens[k];
      }
      ok = ok && compare(total, ExactScalar(sym.field(), 4)) <= 0;
      if (!ok) {
        ++bad;
        if (verbose) std::cout << "  d=" << sym.d << " kappa=" << sym.kappa << " mu=" << mu << " differs\n";
      }
    }
  }
  return {bad == 0, std::to_string(segs) + " segments, exact piece lengths, " + std::to_string(bad) + " mismatches"};
}

const std::map<std::string, std::array<int, 3>> kD14Names = {
    {"A", {0, 1, 12}},  {"A^", {3, 4, 6}},  {"B", {2, 12, 13}}, {"B^", {2, 5, 6}},   {"C", {0, 2, 11}},  {"C^", {2, 4, 7}},
    {"D", {3, 11, 13}}, {"D^", {1, 5, 7}},  {"E", {0, 3, 10}},  {"E^", {1, 4, 8}},   {"F", {4, 10, 13}}, {"F^", {0, 5, 8}},
    {"G", {0, 4, 9}},   {"H", {5, 9, 13}},  {"I", {6, 8, 13}},  {"I^", {5, 10, 12}}, {"J", {0, 6, 7}},   {"J^", {4, 11, 12}},
    {"K", {1, 2, 10}},  {"K^", {2, 3, 8}},  {"L", {1, 3, 9}},   {"M", {6, 9, 12}},   {"N", {7, 8, 12}},  {"N^", {6, 10, 11}},
    {"O", {7, 9, 11}},  {"P", {8, 9, 10}}};

Result census() {
  int bad = 0;
  for (int d = 5; d <= 18; ++d)
    if (!census_report(d).all_match()) {
      ++bad;
      if (verbose) std::cout << "  census d=" << d << " differs\n";
    }
  const int n14 = census_formula(SymmetryIndex::make(14, 0));
  const auto tri14 = static_cast<int>(arrangement(SymmetryIndex::make(14, 0)).elementary_triangles().size());
  const PrototileSet& set = prototile_set(14);
  int named = 0;
  for (const auto& [name, labels] : kD14Names) {
    const int id = set.find(name);
    if (id >= 0 && set[id].canon.base.labels() == labels && set[id].canon.base.excess() == -1) ++named;
    else if (verbose) std::cout << "  prototile " << name << " differs\n";
  }
  const bool ok = bad == 0 && n14 == 52 && tri14 == 52 && named == 26 && set.size() == 52;
  return {ok, "d=5..18 closed forms " + std::string(bad ? "differ" : "match") + ", d=14 count " + std::to_string(tri14) + ", named sigma=-1 tiles " +
                  std::to_string(named) + "/26"};
}

Result golden_rules(const std::string& data) {
  std::ifstream in(data + "/phi_14_3_plus.txt");
  if (!in) return {false, "cannot read " + data + "/phi_14_3_plus.txt"};
  const RuleSet& rs = rule_set(14, 3, 1);
  const PrototileSet& set = prototile_set(14);
  std::string line;
  int rules = 0;
  std::vector<std::string> mismatched;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string src, arrow, c;
    if (!(ls >> src >> arrow)) continue;
    ++rules;
    std::multiset<std::string> printed, derived;
    while (ls >> c) printed.insert(c);
    const int id = set.find(src);
    if (id < 0) {
      mismatched.push_back(src);
      continue;
    }
    for (const auto& ch : rs.rule(id).children) derived.insert(set[ch.tile].name);
    if (printed != derived) {
      mismatched.push_back(src);
      if (verbose) {
        std::cout << "  " << src << " printed:";
        for (const auto& n : printed) std::cout << " " << n;
        std::cout << "\n  " << src << " derived:";
        for (const auto& n : derived) std::cout << " " << n;
        std::cout << "\n";
      }
    }
  }
  const std::vector<std::pair<std::string, std::vector<std::string>>> words = {
      {"W1+", {"W3-"}}, {"W2+", {"W4-", "W2-"}}, {"W3+", {"W5-", "W3-", "W1-"}}, {"W4+", {"W6-", "W4-", "W2-"}},
      {"W5+", {"W70", "W5-", "W3-"}}, {"W6+", {"W6+", "W6-", "W4-"}}, {"W70", {"W5+", "W70", "W5-"}}};
  int words_ok = 0;
  for (const auto& [l, w] : words) {
    EdgeWord want;
    for (const auto& s : w) want.push_back(EdgeLetter::parse(s));
    if (rs.edge_word(EdgeLetter::parse(l)) == want) ++words_ok;
  }
  std::string detail = std::to_string(rules - static_cast<int>(mismatched.size())) + "/" + std::to_string(rules) + " printed rules match, " +
                       std::to_string(words_ok) + "/7 edge words match";
  for (const auto& m : mismatched) detail += "; mismatch " + m;
  if (std::find(mismatched.begin(), mismatched.end(), "D^") != mismatched.end())
    detail += " (printed list repeats C^~, exceeding iota^2 area(D^) by exactly area(C^~))";
  return {rules == 26 && mismatched.empty() && words_ok == 7, detail};
}

Result trig() {
  long checks = 0, bad = 0;
  for (int d = 5; d <= 30; ++d) {
    const int q = d / 2;
    const ExactScalar s1 = sin_val(d, 1);
    for (int l = 2; l <= q; ++l) {
      const ExactScalar sl = sin_val(d, l);
      for (int j = 1; j <= q; ++j) {
        ExactScalar rhs(field_for(d), 0);
        if (j <= l)
          for (int k = 0; k < j; ++k) rhs += sin_val(d, l - j + 2 * k + 1);
        else
          for (int k = 0; k < l; ++k) rhs += sin_val(d, j - l + 2 * k + 1);
        ++checks;
        if (sl * sin_val(d, j) != s1 * rhs) ++bad;
      }
      ++checks;
      if (sl * sin_val(d, 2) != s1 * (sin_val(d, l - 1) + sin_val(d, l + 1))) ++bad;
    }
  }
  long words = 0, wbad = 0;
  for (auto [d, p] : std::vector<std::pair<int, int>>{{14, 3}, {14, 5}, {10, 3}, {8, 3}, {5, 2}})
    for (int s : {1, -1}) {
      const RuleSet& rs = rule_set(d, p, s);
      for (const auto& [l, w] : rs.edge_map()) {
        EdgeWord a{l}, b{l.negated()};
        for (int n = 1; n <= 4; ++n) {
          a = inflate_word(rs, a);
          b = inflate_word(rs, b);
          ++words;
          auto pb = proj(b);
          std::reverse(pb.begin(), pb.end());
          if (a != mir(rho(b)) || proj(a) != pb) ++wbad;
        }
      }
    }
  return {bad == 0 && wbad == 0, std::to_string(checks) + " sine identities (d<=30) with " + std::to_string(bad) + " failures; " +
                                     std::to_string(words) + " word checks (n<=4) with " + std::to_string(wbad) + " failures"};
}

Result face_to_face() {
  const auto t0 = Clock::now();
  std::size_t sets = 0, patches = 0, tiles = 0, bad = 0;
  for (int d = 5; d <= 14; ++d)
    for (int p = 2; p <= d / 2; ++p)
      for (int s : {1, -1}) {
        const RuleSet& rs = rule_set(d, p, s);
        ++sets;
        for (const auto& P : prototile_set(d).tiles()) {
          const Patch q = apply_n(rs, Patch::single(d, P.id), 3);
          ++patches;
          tiles += q.size();
          const FaceReport r = verify_face_to_face(q);
          if (!r.ok()) {
            ++bad;
            if (verbose) std::cout << "  " << rs.label() << " from " << P.name << ": " << r.violations.front() << "\n";
          }
        }
      }
  const double base_s = seconds_since(t0);
  const int G = prototile_set(14).find("G");
  const std::vector<std::pair<std::string, std::pair<std::vector<std::array<int, 2>>, int>>> composites = {
      {"(Phi14,3,+ Phi14,3,-)^3(G)", {{{3, 1}, {3, -1}}, 3}},
      {"(Phi14,3,+ Phi14,5,+)^2(G)", {{{3, 1}, {5, 1}}, 2}},
      {"(Phi14,5,- Phi14,3,+)^2(G)", {{{5, -1}, {3, 1}}, 2}}};
  std::string detail;
  bool slow = false;
  for (const auto& [name, spec] : composites) {
    const auto t1 = Clock::now();
    std::vector<const RuleSet*> seq;
    for (auto [p, s] : spec.first) seq.push_back(&rule_set(14, p, s));
    const Patch q = compose(seq, Patch::single(14, G), spec.second);
    const FaceReport r = verify_face_to_face(q);
    const double s = seconds_since(t1);
    slow = slow || s >= 120;
    if (!r.ok()) ++bad;
    detail += "; " + name + " " + std::to_string(q.size()) + " tiles " + (r.ok() ? "ok" : "VIOLATED") + " " + fixed(s, 1) + " s";
  }
  return {bad == 0 && !slow, "Phi^3 from every prototile for " + std::to_string(sets) + " rule sets (d<=14): " + std::to_string(patches) +
                                 " patches, " + std::to_string(tiles) + " tiles, " + fixed(base_s, 1) + " s" + detail};
}

Result pisot() {
  const bool a = is_pisot(inflation_factor(14, 5));
  const bool b = is_pisot(inflation_factor(14, 3) * inflation_factor(14, 5));
  const bool c = is_pisot(inflation_factor(5, 2));
  const auto rows = pisot_table(14);
  int certified = 0, pv = 0;
  double min_margin = 1e300, max_width = 0;
  for (const auto& row : rows) {
    bool ok = true;
    for (const auto& e : row.report.conjugate_moduli) {
      max_width = std::max(max_width, 2 * e.rad);
      ok = ok && 2 * e.rad < 1e-6 && !e.contains(1.0);
    }
    if (!row.report.conjugate_moduli.empty()) min_margin = std::min(min_margin, row.report.margin);
    if (ok) ++certified;
    if (row.report.is_pisot()) ++pv;
    if (verbose) {
      std::cout << "  iota_{" << row.d << "," << row.p[0] << "} = " << fixed(row.report.value, 6) << " degree " << row.report.minimal_polynomial.degree()
                << (row.report.is_pisot() ? " Pisot" : " not Pisot") << " margin " << row.report.margin << "\n";
    }
  }
  const bool ok = a && b && c && certified == static_cast<int>(rows.size());
  return {ok, std::string("iota_{14,5} ") + (a ? "Pisot" : "not Pisot") + ", iota_{14,3}*iota_{14,5} " + (b ? "Pisot" : "not Pisot") +
                  ", iota_{5,2} " + (c ? "Pisot" : "not Pisot") + "; table d<=14: " + std::to_string(rows.size()) + " rows, " +
                  std::to_string(pv) + " Pisot, " + std::to_string(certified) + " certified, max width " + fixed(max_width, 12) +
                  ", min margin " + fixed(min_margin, 6)};
}

Result flip_audit() {
  int templates = 0, bad = 0;
  std::set<std::string> cases;
  std::set<int> kappas;
  for (int d = 8; d <= 18; d += 2)
    for (const auto& ft : flip_catalog(d)) {
      ++templates;
      cases.insert(ft.case_name);
      kappas.insert(ft.kappa);
      auto corners = [](const TriangleId& t) {
        const auto g = triangle_geometry(t);
        return std::array<Point2, 3>{g.v[0], g.v[1], g.v[2]};
      };
      const bool straight = congruent(d, ft.after[0], corners(ft.stated_targets[0])) && congruent(d, ft.after[1], corners(ft.stated_targets[1]));
      const bool crossed = congruent(d, ft.after[0], corners(ft.stated_targets[1])) && congruent(d, ft.after[1], corners(ft.stated_targets[0]));
      const bool before = std::set<TriangleId>{ft.before[0], ft.before[1]} == std::set<TriangleId>{ft.stated_before[0], ft.stated_before[1]};
      Patch q;
      q.d = d;
      q.decorated = false;
      q.tiles = {ft.before_tiles[0], ft.before_tiles[1]};
      const auto sites = find_flippable(q);
      bool outline = sites.size() == 1;
      if (outline) {
        const Patch f = apply_flip(q, sites[0]);
        std::vector<Point2> cq, cf;
        for (std::size_t i = 0; i < 2; ++i)
          for (const auto& v : q.vertices(i))
            if (std::find(cq.begin(), cq.end(), v) == cq.end()) cq.push_back(v);
        for (std::size_t i = 0; i < 2; ++i)
          for (const auto& v : f.vertices(i))
            if (std::find(cf.begin(), cf.end(), v) == cf.end()) cf.push_back(v);
        outline = cq.size() == 4 && cf.size() == 4 && f.area2() == q.area2();
        for (const auto& v : ft.outline()) outline = outline && std::find(cf.begin(), cf.end(), v) != cf.end();
        outline = outline && verify_face_to_face(f).ok();
      }
      if (!(straight || crossed) || !before || !outline) {
        ++bad;
        if (verbose) std::cout << "  d=" << d << " kappa=" << ft.kappa << " a=" << ft.a << " fails\n";
      }
    }
  std::string cs;
  for (const auto& c : cases) cs += (cs.empty() ? "" : ",") + c;
  const bool ok = bad == 0 && cases.size() == 4 && kappas.size() == 3;
  return {ok, std::to_string(templates) + " templates for d=8..18 (cases " + cs + ", " + std::to_string(kappas.size()) + " kappa values), " +
                  std::to_string(bad) + " failures of congruence or outline"};
}

Result palindromes() {
  int words = 0, bad = 0;
  for (int d : {8, 10, 12, 14}) {
    const RuleSet& rs = rule_set(d, d / 2, 1);
    for (const auto& [l, w] : rs.edge_map()) {
      ++words;
      if (!palindromic(proj(w))) ++bad;
    }
  }
  return {bad == 0, std::to_string(words) + " base edge words for d=8,10,12,14, " + std::to_string(bad) + " not palindromic"};
}

Result ensembles() {
  const int G = prototile_set(14).find("G");
  const Patch base = undecorate(apply_n(rule_set(14, 3, 1), Patch::single(14, G), 3));
  const Patch r = rearrangement_sample(base, 100, 2024);
  const auto ra = manifest_area2(r);
  const bool r_ok = base.size() >= 500 && verify_face_to_face(r).ok() && r.area2() == base.area2() && ra && *ra == r.area2();
  int flips = 0;
  for (const auto& [k, v] : r.manifest)
    if (k == "flips_applied") flips = std::stoi(v);

  const RandomRuleFamily fam = random_rule_family(14, 64);
  const Patch s = random_substitution(G, fam, uniform_pi(fam), 3, 2024, 1);
  const auto sa = manifest_area2(s);
  const ExactScalar i2 = inflation_factor(14, 7) * inflation_factor(14, 7);
  const bool s_ok = verify_face_to_face(s).ok() && sa && *sa == s.area2() && s.area2() == prototile_set(14)[G].area2() * i2 * i2 * i2;

  const std::string es = export_patch(s);
  bool bytes = true;
  for (unsigned t : {2u, 4u}) bytes = bytes && export_patch(random_substitution(G, fam, uniform_pi(fam), 3, 2024, t)) == es;
  const Patch base4 = undecorate(apply_n(rule_set(14, 3, 1), Patch::single(14, G), 3, 4));
  bytes = bytes && export_patch(rearrangement_sample(base4, 100, 2024)) == export_patch(r);
  return {r_ok && s_ok && flips == 100 && bytes,
          "R_r: " + std::to_string(flips) + " flips on " + std::to_string(base.size()) + " tiles " + (r_ok ? "ok" : "FAILED") + "; R_s: n=3, " +
              std::to_string(fam.size()) + " members, " + std::to_string(s.size()) + " tiles " + (s_ok ? "ok" : "FAILED") +
              "; exports across 1/2/4 threads " + (bytes ? "identical" : "DIFFER")};
}

Result perron() {
  int sets = 0, bad = 0;
  double worst = 0;
  for (int d = 5; d <= 14; ++d)
    for (int p = 2; p <= d / 2; ++p)
      for (int s : {1, -1}) {
        const RuleSet& rs = rule_set(d, p, s);
        ++sets;
        const double i2 = rs.iota().to_double() * rs.iota().to_double();
        const double err = std::abs(tile_frequencies(rs).eigenvalue - i2);
        worst = std::max(worst, err);
        if (!(err < 1e-9)) ++bad;
      }
  std::ostringstream w;
  w << worst;
  return {bad == 0, std::to_string(sets) + " rule sets (d<=14), max |lambda - iota^2| = " + w.str()};
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  std::string data = DELTOID_TEST_DATA;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--criterion") && i + 1 < argc) only = std::atoi(argv[++i]);
    else if (!std::strcmp(argv[i], "--data") && i + 1 < argc) data = argv[++i];
    else if (!std::strcmp(argv[i], "--verbose")) verbose = true;
    else {
      std::cerr << "usage: acceptance [--criterion N] [--data DIR] [--verbose]\n";
      return 2;
    }
  }
  const std::vector<std::pair<std::string, std::function<Result()>>> criteria = {
      {"vertex multiplicity table", multiplicity_table},
      {"segment subdivision sequences", subdivision_table},
      {"elementary triangle census and d=14 names", census},
      {"d=14 printed rules and edge words", [&] { return golden_rules(data); }},
      {"trigonometric and edge word identities", trig},
      {"face-to-face patches", face_to_face},
      {"Pisot classification", pisot},
      {"flip congruence audit", flip_audit},
      {"palindromic base words", palindromes},
      {"random ensembles", ensembles},
      {"Perron eigenvalues", perron},
  };
  if (only < 0 || only > static_cast<int>(criteria.size())) {
    std::cerr << "no criterion " << only << "\n";
    return 2;
  }
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    if (only && static_cast<int>(k) + 1 != only) continue;
    Result r;
    try {
      r = criteria[k].second();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    if (!r.pass) ++failed;
    std::cout << "Criterion " << k + 1 << ": " << (r.pass ? "PASS" : "FAIL") << " - " << criteria[k].first << ": " << r.detail << std::endl;
  }
  return failed ? 1 : 0;
}
