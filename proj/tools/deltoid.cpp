// deltoid: command-line driver for the arrangement, prototile, substitution,
// random-tiling and analysis code.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "deltoid/deltoid.hpp"

namespace fs = std::filesystem;
using namespace deltoid;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  int d = 14;
  int p = 0;  // 0: command default
  int kappa = 0;
  std::string sign = "+";
  std::string mode = "deterministic";
  int n = 1;
  int steps = 100;
  std::string seed_tile;
  uint64_t rng_seed = 1;
  std::string pi = "uniform";
  int family_cap = 64;
  double max_tiles = 5e6;
  std::string compose;
  unsigned threads = 1;
  std::string out;
  std::string config;
  std::string patch_file;
  bool no_svg = false;
  // render options
  double stroke = 0.02;
  int digits = 10;
  bool id_overlay = false;
  bool highlight = false;
};

int parse_sign(const std::string& s) {
  if (s == "+" || s == "1" || s == "plus") return 1;
  if (s == "-" || s == "-1" || s == "minus") return -1;
  throw UsageError("sign must be + or -, got '" + s + "'");
}

// "5+,3-" -> {(5,+1), (3,-1)}
std::vector<std::pair<int, int>> parse_compose(const std::string& s) {
  std::vector<std::pair<int, int>> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.size() < 2) throw UsageError("bad --compose item '" + item + "' (expected e.g. 5+)");
    const int sg = parse_sign(item.substr(item.size() - 1));
    int p = 0;
    try {
      std::size_t used = 0;
      p = std::stoi(item.substr(0, item.size() - 1), &used);
      if (used != item.size() - 1) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("bad --compose item '" + item + "' (expected e.g. 5+)");
    }
    out.emplace_back(p, sg);
  }
  return out;
}

int tile_id(int d, const std::string& name) {
  if (name.empty()) return 0;
  const int t = prototile_set(d).find(name);
  if (t < 0) throw DomainError("no prototile named '" + name + "' for d=" + std::to_string(d));
  return t;
}

std::vector<double> load_pi(const std::string& spec, const RandomRuleFamily& fam) {
  if (spec == "uniform") return uniform_pi(fam);
  std::string text = read_text(spec);
  for (char& c : text)
    if (c == ',') c = ' ';
  std::istringstream in(text);
  std::vector<double> pi;
  double w;
  while (in >> w) pi.push_back(w);
  if (!in.eof()) throw SchemaError("pi file " + spec + ": expected whitespace or comma separated weights");
  return pi;
}

// Values from the config file replace those given on the command line.
// Top-level keys apply to every command, keys in a [command] table to that
// command only (and win over top-level keys).
void apply_config(RunConfig& c, const std::string& command) {
  if (c.config.empty()) return;
  if (!fs::exists(c.config)) throw IOError("cannot read config " + c.config);
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_file(c.config);
  } catch (const CLI::Error& e) {
    throw SchemaError("config " + c.config + ": " + e.what());
  }
  auto set = [&](const CLI::ConfigItem& it) {
    if (it.name == "++" || it.name == "--") return;  // section markers
    if (it.inputs.size() != 1) throw SchemaError("config key " + it.name + ": expected one value");
    const std::string& v = it.inputs[0];
    auto as_int = [&]() {
      try {
        return std::stoll(v);
      } catch (const std::exception&) {
        throw SchemaError("config key " + it.name + ": not an integer: " + v);
      }
    };
    auto as_double = [&]() {
      try {
        return std::stod(v);
      } catch (const std::exception&) {
        throw SchemaError("config key " + it.name + ": not a number: " + v);
      }
    };
    const std::string& k = it.name;
    if (k == "d") c.d = static_cast<int>(as_int());
    else if (k == "p") c.p = static_cast<int>(as_int());
    else if (k == "kappa") c.kappa = static_cast<int>(as_int());
    else if (k == "sign") c.sign = v;
    else if (k == "mode") c.mode = v;
    else if (k == "n") c.n = static_cast<int>(as_int());
    else if (k == "steps") c.steps = static_cast<int>(as_int());
    else if (k == "seed-tile" || k == "seed_tile") c.seed_tile = v;
    else if (k == "rng-seed" || k == "rng_seed") c.rng_seed = static_cast<uint64_t>(as_int());
    else if (k == "pi") c.pi = v;
    else if (k == "family-cap" || k == "family_cap") c.family_cap = static_cast<int>(as_int());
    else if (k == "max-tiles" || k == "max_tiles") c.max_tiles = static_cast<double>(as_int());
    else if (k == "compose") c.compose = v;
    else if (k == "threads") c.threads = static_cast<unsigned>(as_int());
    else if (k == "out") c.out = v;
    else if (k == "stroke") c.stroke = as_double();
    else if (k == "digits") c.digits = static_cast<int>(as_int());
    else if (k == "id-overlay" || k == "id_overlay") c.id_overlay = v == "true" || v == "1";
    else if (k == "highlight") c.highlight = v == "true" || v == "1";
    else if (k == "no-svg" || k == "no_svg") c.no_svg = v == "true" || v == "1";
    else throw SchemaError("config: unknown key " + k);
  };
  for (const auto& it : items)
    if (it.parents.empty()) set(it);
  for (const auto& it : items)
    if (it.parents.size() == 1 && it.parents[0] == command) set(it);
}

void validate(const RunConfig& c, const std::string& command) {
  if (command == "verify") return;
  if (c.d < 5) throw DomainError("d must be at least 5");
  if (c.d > 60) throw DomainError("d above 60 is not supported");
  parse_sign(c.sign);
  if (c.p != 0 && (c.p < 2 || c.p > c.d / 2)) throw DomainError("p must satisfy 2 <= p <= floor(d/2)");
  if (c.n < 0) throw DomainError("n must be non-negative");
  if (c.steps < 0) throw DomainError("steps must be non-negative");
  if (c.family_cap < 1) throw DomainError("family cap must be positive");
  if (c.max_tiles < 1) throw DomainError("max tiles must be positive");
  if (c.threads < 1) throw DomainError("threads must be positive");
  if (!(c.stroke > 0)) throw DomainError("stroke width must be positive");
  if (c.digits < 1 || c.digits > 17) throw DomainError("digits must lie in 1..17");
  if (command == "arrange") {
    bool ok = false;
    for (const auto& s : pattern_family(c.d)) ok = ok || s.kappa == c.kappa;
    if (!ok) throw DomainError("kappa " + std::to_string(c.kappa) + " is not used for d=" + std::to_string(c.d));
  }
  if (command == "random") {
    if (c.mode != "rearrange" && c.mode != "subst") throw UsageError("random --mode must be rearrange or subst");
    if (c.d % 2) throw DomainError("random tilings need even d (palindromic base rules)");
  }
  if (!c.compose.empty())
    for (auto [p, s] : parse_compose(c.compose))
      if (p < 2 || p > c.d / 2) throw DomainError("--compose: p=" + std::to_string(p) + " out of range for d=" + std::to_string(c.d));
  if (!c.seed_tile.empty()) tile_id(c.d, c.seed_tile);
}

class Output {
 public:
  explicit Output(const RunConfig& c) {
    dir_ = c.out;
    if (dir_.empty())
      if (const char* env = std::getenv("DELTOID_OUT_DIR")) dir_ = env;
    if (dir_.empty()) dir_ = ".";
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw IOError("cannot create output directory " + dir_ + ": " + ec.message());
  }
  void write(const std::string& name, const std::string& text) {
    const std::string path = (fs::path(dir_) / name).string();
    write_text(path, text);
    std::cout << "wrote " << path << "\n";
  }

 private:
  std::string dir_;
};

std::string sign_tag(int s) { return s > 0 ? "plus" : "minus"; }

RenderOptions render_options(const RunConfig& c) {
  RenderOptions o;
  o.stroke = c.stroke;
  o.digits = c.digits;
  o.id_overlay = c.id_overlay;
  return o;
}

std::string safe(std::string s) {
  for (char& ch : s)
    if (ch == '^') ch = 'h';
    else if (ch == '~') ch = 't';
  return s;
}

void cmd_arrange(const RunConfig& c) {
  const SymmetryIndex sym = SymmetryIndex::make(c.d, c.kappa);
  Output out(c);
  const std::string stem = "arrange_d" + std::to_string(c.d) + "_k" + std::to_string(c.kappa);
  const std::string dump = arrangement_dump(sym);
  out.write(stem + ".txt", dump);
  if (!c.no_svg) out.write(stem + ".svg", render_arrangement_svg(sym, render_options(c)));
  const CensusReport rep = census_report(c.d);
  for (const auto& pt : rep.patterns)
    if (pt.kappa == c.kappa)
      std::cout << "elementary triangles " << pt.geometric << " (formula " << pt.formula << "), multiplicities " << (pt.multiplicities ? "ok" : "MISMATCH")
                << ", subdivisions " << (pt.subdivisions ? "ok" : "MISMATCH") << "\n";
}

void cmd_prototiles(const RunConfig& c) {
  const PrototileSet& set = prototile_set(c.d);
  Output out(c);
  const std::string stem = "prototiles_d" + std::to_string(c.d);
  out.write(stem + ".txt", prototile_catalog(c.d));
  if (!c.no_svg) {
    std::vector<std::pair<std::string, Patch>> items;
    for (const auto& P : set.tiles()) items.emplace_back(P.name, Patch::single(c.d, P.id));
    RenderOptions o = render_options(c);
    o.id_overlay = true;
    out.write(stem + ".svg", render_sheet_svg(c.d, items, o));
  }
  std::cout << set.size() << " prototiles, " << set.shape_count() << " shapes\n";
}

void cmd_rules(const RunConfig& c) {
  const int p = c.p ? c.p : c.d / 2;
  const int sg = parse_sign(c.sign);
  const RuleSet& rs = rule_set(c.d, p, sg);
  Output out(c);
  const std::string stem = "rules_d" + std::to_string(c.d) + "_p" + std::to_string(p) + "_" + sign_tag(sg);
  const std::string listing = rule_listing(rs);
  out.write(stem + ".txt", listing);
  out.write(stem + ".json", rule_machine_listing(rs));
  if (!c.no_svg) {
    std::vector<std::pair<std::string, Patch>> items;
    for (const auto& P : prototile_set(c.d).tiles()) items.emplace_back(P.name, apply(rs, Patch::single(c.d, P.id)));
    out.write(stem + ".svg", render_sheet_svg(c.d, items, render_options(c)));
  }
  std::cout << listing;
  std::cout << "area identity " << (area_identity(rs) ? "holds" : "FAILS") << ", edge conflicts " << rs.edge_conflicts().size() << "\n";
}

void report_patch(const Patch& p) {
  const FaceReport fr = verify_face_to_face(p);
  std::cout << "tiles " << p.size() << ", face-to-face " << (fr.ok() ? "ok" : "VIOLATED") << "\n";
  for (const auto& v : fr.violations) std::cout << "  " << v << "\n";
}

void cmd_tile(const RunConfig& c) {
  const int p = c.p ? c.p : c.d / 2;
  const int sg = parse_sign(c.sign);
  std::vector<const RuleSet*> seq{&rule_set(c.d, p, sg)};
  std::string stem = "tile_d" + std::to_string(c.d) + "_p" + std::to_string(p) + sign_tag(sg);
  for (auto [q, s] : parse_compose(c.compose)) {
    seq.push_back(&rule_set(c.d, q, s));
    stem += "_p" + std::to_string(q) + sign_tag(s);
  }
  const int seed = tile_id(c.d, c.seed_tile);
  stem += "_" + safe(prototile_set(c.d)[seed].name) + "_n" + std::to_string(c.n);
  // tile count from the rules alone, so oversized requests fail before allocating
  std::vector<double> cnt(prototile_set(c.d).size(), 0);
  cnt[static_cast<std::size_t>(seed)] = 1;
  for (int round = 0; round < c.n; ++round)
    for (auto it = seq.rbegin(); it != seq.rend(); ++it) {
      std::vector<double> next(cnt.size(), 0);
      for (std::size_t t = 0; t < cnt.size(); ++t)
        for (const auto& ch : (*it)->rule(static_cast<int>(t)).children) next[static_cast<std::size_t>(ch.tile)] += cnt[t];
      cnt = next;
    }
  double total = 0;
  for (double x : cnt) total += x;
  if (total > c.max_tiles)
    throw DomainError("patch would have " + std::to_string(static_cast<long long>(total)) + " tiles, above --max-tiles " +
                      std::to_string(static_cast<long long>(c.max_tiles)));
  const Patch patch = compose(seq, Patch::single(c.d, seed), c.n, c.threads);
  Output out(c);
  out.write(stem + ".json", export_patch(patch));
  if (!c.no_svg) out.write(stem + ".svg", render_patch_svg(patch, render_options(c)));
  report_patch(patch);
}

void cmd_random(const RunConfig& c) {
  const int seed = tile_id(c.d, c.seed_tile);
  Patch patch;
  std::vector<std::array<Point2, 2>> marks;
  std::string stem = "random_d" + std::to_string(c.d) + "_" + c.mode + "_s" + std::to_string(c.rng_seed);
  if (c.mode == "rearrange") {
    const int p = c.p ? c.p : c.d / 2;
    const Patch base = apply_n(rule_set(c.d, p, parse_sign(c.sign)), Patch::single(c.d, seed), c.n, c.threads);
    patch = rearrangement_sample(base, c.steps, c.rng_seed, &marks);
  } else {
    const RandomRuleFamily fam = random_rule_family(c.d, c.family_cap);
    patch = random_substitution(seed, fam, load_pi(c.pi, fam), c.steps, c.rng_seed, c.threads);
    for (const auto& s : find_flippable(patch)) marks.push_back(s.new_diagonal);
  }
  Output out(c);
  out.write(stem + ".json", export_patch(patch));
  if (!c.no_svg) {
    RenderOptions o = render_options(c);
    if (c.highlight) o.highlight = marks;
    out.write(stem + ".svg", render_patch_svg(patch, o));
  }
  for (const auto& [k, v] : patch.manifest)
    if (k == "flips_applied" || k == "family_size") std::cout << k << " " << v << "\n";
  report_patch(patch);
}

std::string iota_name(int d, int p) { return "ι_{" + std::to_string(d) + "," + std::to_string(p) + "}"; }

void print_pisot(const std::string& name, const PisotReport& r) {
  std::cout << name << ": Pisot=" << (r.is_pisot() ? "true" : "false") << "  value " << r.value << "  minpoly "
            << r.minimal_polynomial.to_string() << "  margin " << r.margin << "\n";
}

void cmd_analyze(const RunConfig& c) {
  const CensusReport rep = census_report(c.d);
  std::cout << "census d=" << c.d << ": " << rep.prototiles << " prototiles\n";
  for (const auto& pt : rep.patterns)
    std::cout << "  kappa=" << pt.kappa << ": elementary triangles " << pt.geometric << ", faces " << pt.faces << ", formula " << pt.formula
              << ", multiplicities " << (pt.multiplicities ? "ok" : "MISMATCH") << ", subdivisions " << (pt.subdivisions ? "ok" : "MISMATCH") << "\n";
  std::vector<int> ps;
  if (c.p) ps.push_back(c.p);
  else
    for (int p = 2; p <= c.d / 2; ++p) ps.push_back(p);
  const PrototileSet& set = prototile_set(c.d);
  for (int p : ps)
    for (int sg : {1, -1}) {
      const RuleSet& rs = rule_set(c.d, p, sg);
      const FrequencyReport fr = tile_frequencies(rs);
      const double i2 = rs.iota().to_double() * rs.iota().to_double();
      std::printf("%s: eigenvalue %.12f, iota^2 %.12f, residual %.2e, %s", rs.label().c_str(), fr.eigenvalue, i2, fr.residual,
                  fr.prim.primitive ? "primitive" : "not primitive");
      if (fr.prim.primitive) std::printf(" (exponent %d)", fr.prim.exponent);
      std::printf("\n");
      if (!fr.frequencies.empty()) {
        std::printf("  frequencies:");
        for (std::size_t i = 0; i < fr.frequencies.size(); ++i) std::printf(" %s=%.6f", set[static_cast<int>(i)].name.c_str(), fr.frequencies[i]);
        std::printf("\n");
      }
      std::fflush(stdout);
    }
  for (int p = 2; p <= c.d / 2; ++p) print_pisot(iota_name(c.d, p), pisot_report(inflation_factor(c.d, p)));
  for (int p = 2; p <= c.d / 2; ++p)
    for (int q = p + 1; q <= c.d / 2; ++q)
      print_pisot(iota_name(c.d, p) + "·" + iota_name(c.d, q), pisot_report(inflation_factor(c.d, p) * inflation_factor(c.d, q)));
}

int cmd_verify(const RunConfig& c) {
  const Patch p = import_patch(read_text(c.patch_file));
  const FaceReport fr = verify_face_to_face(p);
  bool ok = fr.ok();
  std::cout << "tiles " << fr.tiles << ", vertices " << fr.vertices << ", shared edges " << fr.shared_edges << ", boundary edges "
            << fr.boundary_edges << ", interior vertices " << fr.interior_vertices << "\n";
  for (const auto& v : fr.violations) std::cout << "  " << v << "\n";
  if (const auto a = manifest_area2(p)) {
    const bool area_ok = *a == p.area2();
    std::cout << "area " << (area_ok ? "matches" : "DOES NOT match") << " the manifest\n";
    ok = ok && area_ok;
  }
  std::cout << (ok ? "PASS" : "FAIL") << "\n";
  return ok ? 0 : 1;
}

void add_common(CLI::App* s, RunConfig& c) {
  s->add_option("--out", c.out, "Output directory (default: $DELTOID_OUT_DIR or .)");
  s->add_option("--config", c.config, "TOML config file; its values override flags");
  s->add_option("--stroke", c.stroke, "SVG stroke width in tile units");
  s->add_option("--digits", c.digits, "Decimals written for SVG coordinates");
  s->add_flag("--id-overlay", c.id_overlay, "Draw the interior decoration");
  s->add_flag("--no-svg", c.no_svg, "Skip SVG output");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deltoid-arrangement substitution tilings"};
  app.require_subcommand(1);
  RunConfig c;

  auto* arrange = app.add_subcommand("arrange", "Arrangement dump and SVG");
  arrange->add_option("--d", c.d, "Number of segments")->required();
  arrange->add_option("--kappa", c.kappa, "Symmetry index kappa");
  add_common(arrange, c);

  auto* protos = app.add_subcommand("prototiles", "Prototile catalog and SVG sheet");
  protos->add_option("--d", c.d)->required();
  add_common(protos, c);

  auto* rules = app.add_subcommand("rules", "Derived substitution rules");
  rules->add_option("--d", c.d)->required();
  rules->add_option("--p", c.p, "Inflation index (default floor(d/2))");
  rules->add_option("--sign", c.sign, "+ or -");
  add_common(rules, c);

  auto* tile = app.add_subcommand("tile", "Iterate rules from a seed tile");
  tile->add_option("--d", c.d)->required();
  tile->add_option("--p", c.p);
  tile->add_option("--sign", c.sign);
  tile->add_option("--seed-tile", c.seed_tile, "Prototile name, e.g. G or F^~");
  tile->add_option("--n", c.n, "Number of rounds");
  tile->add_option("--compose", c.compose, "Further rule sets applied before the first, e.g. 5+,3-");
  tile->add_option("--threads", c.threads);
  tile->add_option("--max-tiles", c.max_tiles, "Refuse patches larger than this");
  add_common(tile, c);

  auto* rnd = app.add_subcommand("random", "Random tilings by flips or random rule choice");
  rnd->add_option("--d", c.d)->required();
  rnd->add_option("--mode", c.mode, "rearrange or subst")->required();
  rnd->add_option("--steps", c.steps, "Flips (rearrange) or inflation steps (subst)");
  rnd->add_option("--rng-seed", c.rng_seed);
  rnd->add_option("--pi", c.pi, "uniform or a file of weights");
  rnd->add_option("--family-cap", c.family_cap);
  rnd->add_option("--seed-tile", c.seed_tile);
  rnd->add_option("--p", c.p, "Base rule set for rearrange");
  rnd->add_option("--sign", c.sign, "Base rule sign for rearrange");
  rnd->add_option("--n", c.n, "Base inflation rounds for rearrange");
  rnd->add_option("--threads", c.threads);
  rnd->add_flag("--highlight", c.highlight, "Draw flipped diagonals thick");
  add_common(rnd, c);

  auto* analyze = app.add_subcommand("analyze", "Census, frequencies and Pisot classification");
  analyze->add_option("--d", c.d)->required();
  analyze->add_option("--p", c.p);
  analyze->add_option("--config", c.config);

  auto* verify = app.add_subcommand("verify", "Audit a patch file");
  verify->add_option("patch", c.patch_file)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error[UsageError]: " << e.what() << "\n";
    return 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    apply_config(c, command);
    validate(c, command);
    if (command == "arrange") cmd_arrange(c);
    else if (command == "prototiles") cmd_prototiles(c);
    else if (command == "rules") cmd_rules(c);
    else if (command == "tile") cmd_tile(c);
    else if (command == "random") cmd_random(c);
    else if (command == "analyze") cmd_analyze(c);
    else if (command == "verify") return cmd_verify(c);
  } catch (const UsageError& e) {
    std::cerr << "error[UsageError]: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "error[DomainError]: " << e.what() << "\n";
    return 3;
  } catch (const SchemaError& e) {
    std::cerr << "error[SchemaError]: " << e.what() << "\n";
    return 4;
  } catch (const ArithmeticOverflow& e) {
    std::cerr << "error[ArithmeticOverflow]: " << e.what() << "\n";
    return 5;
  } catch (const IOError& e) {
    std::cerr << "error[IOError]: " << e.what() << "\n";
    return 6;
  } catch (const std::exception& e) {
    std::cerr << "error[InternalError]: " << e.what() << "\n";
    return 70;
  }
  return 0;
}
