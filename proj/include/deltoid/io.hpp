// Patch interchange format, SVG rendering and text dumps.
#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "deltoid/analysis.hpp"

namespace deltoid {

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IOError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr int kPatchSchemaVersion = 1;

namespace detail {

inline std::string fmt_double(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

inline nlohmann::json scalar_json(const ExactScalar& s) {
  return nlohmann::json{{"den", s.denominator()}, {"num", s.numerators()}};
}

inline ExactScalar scalar_from_json(const nlohmann::json& j, const CyclotomicField* f, const std::string& where) {
  if (!j.is_object() || !j.contains("num") || !j.contains("den")) throw SchemaError(where + ": expected {\"den\", \"num\"}");
  if (!j["num"].is_array()) throw SchemaError(where + ": num must be an array");
  if (static_cast<int>(j["num"].size()) != f->degree())
    throw SchemaError(where + ": coefficient vector has " + std::to_string(j["num"].size()) + " entries, the field has degree " +
                      std::to_string(f->degree()));
  std::vector<int64_t> num;
  for (const auto& x : j["num"]) {
    if (!x.is_number_integer()) throw SchemaError(where + ": coefficients must be integers");
    num.push_back(x.get<int64_t>());
  }
  if (!j["den"].is_number_integer() || j["den"].get<int64_t>() <= 0) throw SchemaError(where + ": den must be a positive integer");
  return ExactScalar(f, std::move(num), j["den"].get<int64_t>());
}

}  // namespace detail

/// Writes the patch.  Tiles go one per line so large patches stay diffable;
/// the float shadow is derived from the exact data and never read back.
inline std::string export_patch(const Patch& p, int shadow_digits = 17) {
  const PrototileSet& set = prototile_set(p.d);
  const CyclotomicField* f = field_for(p.d);
  std::ostringstream os;
  nlohmann::json names = nlohmann::json::array();
  for (const auto& P : set.tiles()) names.push_back(P.name);
  nlohmann::json manifest = nlohmann::json::array();
  for (const auto& [k, v] : p.manifest) manifest.push_back({k, v});
  os << "{\n";
  os << "  \"format\": \"deltoid-patch\",\n";
  os << "  \"schema_version\": " << kPatchSchemaVersion << ",\n";
  os << "  \"d\": " << p.d << ",\n";
  os << "  \"field\": " << nlohmann::json{{"conductor", f->conductor()}, {"degree", f->degree()}}.dump() << ",\n";
  os << "  \"decorated\": " << (p.decorated ? "true" : "false") << ",\n";
  os << "  \"prototiles\": " << names.dump() << ",\n";
  os << "  \"manifest\": " << manifest.dump() << ",\n";
  os << "  \"tiles\": [";
  for (std::size_t i = 0; i < p.tiles.size(); ++i) {
    const auto& t = p.tiles[i];
    nlohmann::json j{{"tile", set[t.tile].name}, {"rot", t.iso.rot}, {"reflect", t.iso.reflect}, {"translation", detail::scalar_json(t.iso.translation.z)}};
    os << (i ? ",\n    " : "\n    ") << j.dump();
  }
  os << (p.tiles.empty() ? "],\n" : "\n  ],\n");
  os << "  \"shadow\": {\"digits\": " << shadow_digits << ", \"vertices\": [";
  for (std::size_t i = 0; i < p.tiles.size(); ++i) {
    auto v = p.vertices(i);
    os << (i ? ",\n    [" : "\n    [");
    for (std::size_t k = 0; k < 3; ++k) {
      const auto c = v[k].to_complex();
      os << (k ? ", " : "") << detail::fmt_double(c.real(), shadow_digits) << ", " << detail::fmt_double(c.imag(), shadow_digits);
    }
    os << "]";
  }
  os << (p.tiles.empty() ? "]}\n" : "\n  ]}\n");
  os << "}\n";
  return os.str();
}

inline Patch import_patch(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object() || j.value("format", "") != "deltoid-patch") throw SchemaError("not a deltoid-patch file");
  if (!j.contains("schema_version") || !j["schema_version"].is_number_integer())
    throw SchemaError("missing schema_version");
  if (j["schema_version"].get<int>() != kPatchSchemaVersion)
    throw SchemaError("schema version " + std::to_string(j["schema_version"].get<int>()) + " is not supported (expected " +
                      std::to_string(kPatchSchemaVersion) + ")");
  for (const char* key : {"d", "field", "decorated", "prototiles", "manifest", "tiles"})
    if (!j.contains(key)) throw SchemaError(std::string("missing field \"") + key + "\"");
  if (!j["d"].is_number_integer()) throw SchemaError("d must be an integer");
  Patch p;
  p.d = j["d"].get<int>();
  if (p.d < 5) throw SchemaError("d must be at least 5");
  const CyclotomicField* f = field_for(p.d);
  if (j["field"].value("conductor", -1) != f->conductor() || j["field"].value("degree", -1) != f->degree())
    throw SchemaError("field block does not match d = " + std::to_string(p.d));
  if (!j["decorated"].is_boolean()) throw SchemaError("decorated must be a boolean");
  p.decorated = j["decorated"].get<bool>();
  const PrototileSet& set = prototile_set(p.d);
  if (j["prototiles"].size() != set.size()) throw SchemaError("prototile list does not match the set for d = " + std::to_string(p.d));
  for (const auto& m : j["manifest"]) {
    if (!m.is_array() || m.size() != 2 || !m[0].is_string() || !m[1].is_string()) throw SchemaError("manifest entries must be [key, value] strings");
    p.manifest.emplace_back(m[0].get<std::string>(), m[1].get<std::string>());
  }
  std::size_t i = 0;
  for (const auto& t : j["tiles"]) {
    const std::string where = "tile " + std::to_string(i++);
    if (!t.is_object() || !t.contains("tile") || !t.contains("rot") || !t.contains("reflect") || !t.contains("translation"))
      throw SchemaError(where + ": expected tile, rot, reflect, translation");
    if (!t["tile"].is_string()) throw SchemaError(where + ": tile must be a prototile name");
    const int id = set.find(t["tile"].get<std::string>());
    if (id < 0) throw SchemaError(where + ": unknown prototile " + t["tile"].get<std::string>());
    if (!t["rot"].is_number_integer() || t["rot"].get<int>() < 0 || t["rot"].get<int>() >= 6 * p.d)
      throw SchemaError(where + ": rot must be an integer in [0, 6d)");
    if (!t["reflect"].is_boolean()) throw SchemaError(where + ": reflect must be a boolean");
    PlacedTile pt;
    pt.tile = id;
    pt.iso = Isometry::identity(p.d);
    pt.iso.rot = t["rot"].get<int>();
    pt.iso.reflect = t["reflect"].get<bool>();
    pt.iso.translation = Point2(detail::scalar_from_json(t["translation"], f, where));
    p.tiles.push_back(pt);
  }
  return p;
}

/// Twice the area a patch must have according to its manifest: the seed tile
/// scaled by iota^2 for every recorded inflation step.  Empty when the
/// manifest carries no seed.
inline std::optional<ExactScalar> manifest_area2(const Patch& p) {
  std::optional<ExactScalar> a;
  for (const auto& [k, v] : p.manifest) {
    if (k == "seed") {
      const int t = prototile_set(p.d).find(v);
      if (t < 0) throw SchemaError("manifest: unknown seed tile " + v);
      a = prototile_set(p.d)[t].area2();
    } else if (k == "apply" && a) {
      int d = 0, q = 0;
      char sg = 0;
      if (std::sscanf(v.c_str(), "Phi(%d,%d,%c)", &d, &q, &sg) != 3 || d != p.d) throw SchemaError("manifest: bad apply entry " + v);
      const ExactScalar i = inflation_factor(d, q);
      a = *a * i * i;
    } else if (k == "steps" && a) {
      bool subst = false;
      for (const auto& [k2, v2] : p.manifest) subst = subst || (k2 == "mode" && v2 == "random-substitution");
      if (!subst) continue;
      int steps = -1;
      if (std::sscanf(v.c_str(), "%d", &steps) != 1 || steps < 0) throw SchemaError("manifest: bad steps entry " + v);
      const ExactScalar i = inflation_factor(p.d, p.d / 2);
      for (int s = steps; s > 0; --s) a = *a * i * i;
    }
  }
  return a;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IOError("cannot write " + path);
  out << text;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IOError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct RenderOptions {
  double stroke = 0.02;
  int digits = 10;        // decimals written for every coordinate
  double size = 800;      // pixel width of the viewport
  bool id_overlay = false;
  std::vector<std::array<Point2, 2>> highlight;  // segments drawn thick
};

namespace detail {

inline std::string hsl(int k, int n, double light = 0.72) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "hsl(%d,55%%,%d%%)", (k * 360 / std::max(n, 1) + 17) % 360, static_cast<int>(light * 100));
  return buf;
}

class SvgCanvas {
 public:
  explicit SvgCanvas(const RenderOptions& o) : o_(o) {}
  void extend(std::complex<double> z) {
    lo_ = {std::min(lo_.real(), z.real()), std::min(lo_.imag(), z.imag())};
    hi_ = {std::max(hi_.real(), z.real()), std::max(hi_.imag(), z.imag())};
  }
  std::string coord(double v) const {
    std::ostringstream s;
    s << std::fixed << std::setprecision(o_.digits) << v;
    return s.str();
  }
  // y is flipped so the picture has the usual orientation
  std::string pt(std::complex<double> z) const { return coord(z.real()) + "," + coord(-z.imag()); }
  std::string finish(const std::string& body, const std::string& defs = "") const {
    const double pad = 0.05 * std::max(hi_.real() - lo_.real(), hi_.imag() - lo_.imag()) + o_.stroke;
    const double w = hi_.real() - lo_.real() + 2 * pad, h = hi_.imag() - lo_.imag() + 2 * pad;
    std::ostringstream s;
    s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << coord(o_.size) << "\" height=\""
      << coord(o_.size * h / w) << "\" viewBox=\"" << coord(lo_.real() - pad) << " " << coord(-hi_.imag() - pad) << " " << coord(w)
      << " " << coord(h) << "\">\n";
    if (!defs.empty()) s << "<defs>\n" << defs << "</defs>\n";
    s << body << "</svg>\n";
    return s.str();
  }
  const RenderOptions& options() const { return o_; }

 private:
  RenderOptions o_;
  std::complex<double> lo_{1e300, 1e300}, hi_{-1e300, -1e300};
};

inline std::string hatch_defs(double stroke) {
  std::ostringstream s;
  s << "<pattern id=\"hatch\" patternUnits=\"userSpaceOnUse\" width=\"" << 6 * stroke << "\" height=\"" << 6 * stroke
    << "\" patternTransform=\"rotate(45)\"><line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"" << 6 * stroke
    << "\" stroke=\"black\" stroke-opacity=\"0.35\" stroke-width=\"" << stroke << "\"/></pattern>\n";
  return s.str();
}

}  // namespace detail

/// One fill colour per undecorated shape; decorated variants of a shape other
/// than its representative carry a hatch overlay.
inline std::string render_patch_svg(const Patch& p, const RenderOptions& o = {}) {
  const PrototileSet& set = prototile_set(p.d);
  const ShapeCatalog& sc = shape_catalog(p.d);
  detail::SvgCanvas cv(o);
  std::ostringstream body;
  const int nshapes = static_cast<int>(sc.representatives().size());
  std::map<int, int> shape_index;
  for (int r : sc.representatives()) shape_index.emplace(r, static_cast<int>(shape_index.size()));
  body << "<g stroke=\"black\" stroke-width=\"" << cv.coord(o.stroke) << "\" stroke-linejoin=\"round\">\n";
  std::ostringstream hatch;
  for (std::size_t i = 0; i < p.tiles.size(); ++i) {
    const auto v = p.vertices(i);
    std::string pts;
    for (std::size_t k = 0; k < 3; ++k) {
      cv.extend(v[k].to_complex());
      pts += (k ? " " : "") + cv.pt(v[k].to_complex());
    }
    const int rep = sc.representative(p.tiles[i].tile).first;
    body << "<polygon points=\"" << pts << "\" fill=\"" << detail::hsl(shape_index[rep], nshapes) << "\"><title>" << set[p.tiles[i].tile].name
         << "</title></polygon>\n";
    if (p.decorated && rep != p.tiles[i].tile) hatch << "<polygon points=\"" << pts << "\"/>\n";
  }
  body << "</g>\n";
  if (!hatch.str().empty()) body << "<g fill=\"url(#hatch)\" stroke=\"none\">\n" << hatch.str() << "</g>\n";
  if (o.id_overlay && p.decorated) {
    body << "<g fill=\"none\" stroke=\"black\" stroke-opacity=\"0.6\" stroke-width=\"" << cv.coord(o.stroke / 2) << "\">\n";
    for (std::size_t i = 0; i < p.tiles.size(); ++i) {
      const auto m = p.id_points(i);
      body << "<polygon points=\"" << cv.pt(m[0].to_complex()) << " " << cv.pt(m[1].to_complex()) << " " << cv.pt(m[2].to_complex()) << "\"/>\n";
    }
    body << "</g>\n";
  }
  if (!o.highlight.empty()) {
    body << "<g stroke=\"black\" stroke-width=\"" << cv.coord(4 * o.stroke) << "\" stroke-linecap=\"round\">\n";
    for (const auto& s : o.highlight)
      body << "<line x1=\"" << cv.coord(s[0].to_complex().real()) << "\" y1=\"" << cv.coord(-s[0].to_complex().imag()) << "\" x2=\""
           << cv.coord(s[1].to_complex().real()) << "\" y2=\"" << cv.coord(-s[1].to_complex().imag()) << "\"/>\n";
    body << "</g>\n";
  }
  if (p.tiles.empty()) cv.extend({0, 0}), cv.extend({1, 1});
  return cv.finish(body.str(), detail::hatch_defs(o.stroke));
}

/// Segments of the pattern, the deltoid, and for even d the inscribed polygon.
inline std::string render_arrangement_svg(const SymmetryIndex& sym, const RenderOptions& o = {}) {
  detail::SvgCanvas cv(o);
  std::ostringstream body;
  constexpr double pi = 3.14159265358979323846;
  std::string curve;
  for (int k = 0; k <= 360; ++k) {
    const double t = 2 * pi * k / 360;
    const std::complex<double> z = 2.0 * std::polar(1.0, t) + std::polar(1.0, -2 * t);
    cv.extend(z);
    curve += (k ? " " : "") + cv.pt(z);
  }
  body << "<polyline fill=\"none\" stroke=\"gray\" stroke-width=\"" << cv.coord(o.stroke) << "\" points=\"" << curve << "\"/>\n";
  const Arrangement& arr = arrangement(sym);
  body << "<g stroke=\"black\" stroke-width=\"" << cv.coord(o.stroke) << "\">\n";
  for (const auto& s : arr.segments()) {
    const auto a = s.start.to_complex(), b = s.end.to_complex();
    body << "<line x1=\"" << cv.coord(a.real()) << "\" y1=\"" << cv.coord(-a.imag()) << "\" x2=\"" << cv.coord(b.real()) << "\" y2=\""
         << cv.coord(-b.imag()) << "\"><title>G" << s.label() << "</title></line>\n";
  }
  body << "</g>\n";
  if (sym.d % 2 == 0 && sym.d >= 6) {
    std::string poly;
    for (const auto& v : polygon_vertices(sym.d, sym.kappa)) poly += (poly.empty() ? "" : " ") + cv.pt(v.to_complex());
    body << "<polygon fill=\"none\" stroke=\"crimson\" stroke-width=\"" << cv.coord(2 * o.stroke) << "\" points=\"" << poly << "\"/>\n";
  }
  body << "<g fill=\"crimson\">\n";
  for (const auto& v : arr.vertices())
    if (v.multiplicity >= 3) {
      const auto z = v.location.to_complex();
      body << "<circle cx=\"" << cv.coord(z.real()) << "\" cy=\"" << cv.coord(-z.imag()) << "\" r=\"" << cv.coord(1.5 * o.stroke) << "\"/>\n";
    }
  body << "</g>\n";
  return cv.finish(body.str());
}

/// Sheet of placed patches laid out on a grid, each with a caption.
inline std::string render_sheet_svg(int d, const std::vector<std::pair<std::string, Patch>>& items, const RenderOptions& o = {}) {
  detail::SvgCanvas cv(o);
  std::ostringstream body;
  const int cols = std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(items.size())))));
  double cell = 0;
  for (const auto& [name, p] : items)
    for (std::size_t i = 0; i < p.tiles.size(); ++i)
      for (const auto& v : p.vertices(i)) cell = std::max(cell, std::abs(v.to_complex()));
  cell = 2.4 * std::max(cell, 1e-9);
  const ShapeCatalog& sc = shape_catalog(d);
  std::map<int, int> shape_index;
  for (int r : sc.representatives()) shape_index.emplace(r, static_cast<int>(shape_index.size()));
  for (std::size_t n = 0; n < items.size(); ++n) {
    const std::complex<double> off(static_cast<double>(static_cast<int>(n) % cols) * cell, -static_cast<double>(static_cast<int>(n) / cols) * cell);
    const Patch& p = items[n].second;
    body << "<g stroke=\"black\" stroke-width=\"" << cv.coord(o.stroke) << "\">\n";
    for (std::size_t i = 0; i < p.tiles.size(); ++i) {
      const auto v = p.vertices(i);
      std::string pts;
      for (std::size_t k = 0; k < 3; ++k) {
        cv.extend(v[k].to_complex() + off);
        pts += (k ? " " : "") + cv.pt(v[k].to_complex() + off);
      }
      body << "<polygon points=\"" << pts << "\" fill=\"" << detail::hsl(shape_index[sc.representative(p.tiles[i].tile).first], static_cast<int>(shape_index.size())) << "\"/>\n";
      if (o.id_overlay && p.decorated) {
        const auto m = p.id_points(i);
        body << "<polygon fill=\"none\" stroke-width=\"" << cv.coord(o.stroke / 2) << "\" points=\"" << cv.pt(m[0].to_complex() + off) << " "
             << cv.pt(m[1].to_complex() + off) << " " << cv.pt(m[2].to_complex() + off) << "\"/>\n";
      }
    }
    body << "</g>\n";
    const std::complex<double> label = off + std::complex<double>(0, -0.45 * cell);
    cv.extend(label);
    body << "<text x=\"" << cv.coord(label.real()) << "\" y=\"" << cv.coord(-label.imag()) << "\" font-size=\"" << cv.coord(0.08 * cell)
         << "\" text-anchor=\"middle\">" << items[n].first << "</text>\n";
  }
  return cv.finish(body.str());
}

/// Vertices with multiplicities and the subdivision of every segment.
inline std::string arrangement_dump(const SymmetryIndex& sym) {
  const Arrangement& arr = arrangement(sym);
  std::ostringstream os;
  os << "pattern d=" << sym.d << " kappa=" << sym.kappa << "\n";
  os << "segments " << arr.segments().size() << ", vertices " << arr.vertices().size() << ", elementary triangles "
     << arr.elementary_triangles().size() << "\n";
  for (int i = 0; i < sym.d; ++i) {
    const int mu = sym.label(i);
    auto [v2, v3] = arr.vertex_multiplicities(i);
    os << "G" << mu << ": v2=" << v2 << " v3=" << v3 << " pieces";
    for (int c : subdivision_sequence(sym, mu)) os << " S" << c;
    os << "\n";
  }
  for (const auto& t : arr.elementary_triangles()) os << t.to_string() << (t.excess() > 0 ? " +" : " -") << "\n";
  return os.str();
}

inline std::string prototile_catalog(int d) {
  const PrototileSet& set = prototile_set(d);
  std::ostringstream os;
  os << "prototiles d=" << d << ": " << set.size() << " (" << set.shape_count() << " shapes)\n";
  for (const auto& P : set.tiles()) {
    auto a = P.angles();
    os << P.name << "  " << P.canon.base.to_string() << "  edges";
    for (const auto& e : P.edges()) os << " " << e.to_string();
    os << "  angles " << a[0] << "," << a[1] << "," << a[2] << "  chirality " << (P.chirality() > 0 ? "+" : "-");
    if (P.tilde >= 0) os << "  tilde " << set[P.tilde].name;
    if (P.hat >= 0) os << "  hat " << set[P.hat].name;
    os << "\n";
  }
  return os.str();
}

inline std::string rule_machine_listing(const RuleSet& rs) {
  const PrototileSet& set = prototile_set(rs.d());
  nlohmann::json j;
  j["d"] = rs.d();
  j["p"] = rs.p();
  j["sign"] = rs.sign() > 0 ? "+" : "-";
  j["rules"] = nlohmann::json::array();
  for (const auto& r : rs.rules()) {
    nlohmann::json children = nlohmann::json::array();
    for (const auto& c : r.children)
      children.push_back({{"tile", set[c.tile].name}, {"rot", c.iso.rot}, {"reflect", c.iso.reflect}, {"translation", detail::scalar_json(c.iso.translation.z)}});
    j["rules"].push_back({{"source", set[r.source].name}, {"children", children}});
  }
  return j.dump(1) + "\n";
}

}  // namespace deltoid
