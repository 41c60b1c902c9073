// Exact plane geometry over a cyclotomic field.
//
// A point is stored as the complex number x + iy, itself an element of the
// field (the field always contains i).  Real coordinates are recovered with
// x() and y().  Rotations by multiples of pi/(3d) are multiplications by
// roots of unity, reflection in the real axis is complex conjugation.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>

#include "deltoid/exactnum.hpp"

namespace deltoid {

struct Point2 {
  ExactScalar z;

  Point2() = default;
  explicit Point2(ExactScalar v) : z(std::move(v)) {}

  const CyclotomicField* field() const { return z.field(); }
  ExactScalar x() const { return (z + z.conj()).divided_by(2); }
  ExactScalar y() const {
    const int N = z.field()->conductor();
    return (z - z.conj()).times_root(-N / 4).divided_by(2);
  }
  std::complex<double> to_complex() const { return z.to_complex(); }

  friend bool operator==(const Point2& a, const Point2& b) { return a.z == b.z; }
  friend bool operator!=(const Point2& a, const Point2& b) { return !(a == b); }
  friend Point2 operator+(const Point2& a, const Point2& b) { return Point2(a.z + b.z); }
  friend Point2 operator-(const Point2& a, const Point2& b) { return Point2(a.z - b.z); }
};

struct Point2Hash {
  std::size_t operator()(const Point2& p) const { return p.z.hash(); }
};

/// Imaginary part of w as a real field element.
inline ExactScalar imag_part(const ExactScalar& w) {
  const int N = w.field()->conductor();
  return (w - w.conj()).times_root(-N / 4).divided_by(2);
}

/// Twice the signed area of (a, b, c): Im(conj(b - a) * (c - a)).
inline ExactScalar cross2(const Point2& a, const Point2& b, const Point2& c) {
  return imag_part((b.z - a.z).conj() * (c.z - a.z));
}

/// +1 anticlockwise, -1 clockwise, 0 collinear.
inline int orientation(const Point2& a, const Point2& b, const Point2& c) { return cross2(a, b, c).sign(); }

/// Squared distance (a real field element).
inline ExactScalar dist2(const Point2& a, const Point2& b) {
  ExactScalar w = b.z - a.z;
  return w * w.conj();
}

/// True iff p lies on the closed segment [a, b].
inline bool on_segment(const Point2& a, const Point2& b, const Point2& p) {
  if (!cross2(a, b, p).is_zero()) return false;
  // dot(p - a, b - a) in [0, |b-a|^2]
  ExactScalar dot = ((p.z - a.z) * (b.z - a.z).conj() + (p.z - a.z).conj() * (b.z - a.z)).divided_by(2);
  return dot.sign() >= 0 && compare(dot, dist2(a, b)) <= 0;
}

/// True iff p lies strictly between a and b on the segment.
inline bool strictly_inside_segment(const Point2& a, const Point2& b, const Point2& p) {
  return p != a && p != b && on_segment(a, b, p);
}

/// Closed triangle containment for an anticlockwise triangle.
inline bool in_triangle(const std::array<Point2, 3>& t, const Point2& p) {
  for (int k = 0; k < 3; ++k)
    if (orientation(t[static_cast<std::size_t>(k)], t[static_cast<std::size_t>((k + 1) % 3)], p) < 0) return false;
  return true;
}

/// Isometry z -> w^rot * (reflect ? conj(z) : z) + translation, with
/// w = exp(i pi / (3d)).  Rotations are therefore multiples of pi/(3d).
struct Isometry {
  int d = 0;
  int rot = 0;  // in [0, 6d)
  bool reflect = false;
  Point2 translation;

  static Isometry identity(int d) {
    Isometry g;
    g.d = d;
    g.translation = Point2(ExactScalar(field_for(d), 0));
    return g;
  }
  static Isometry rotation(int d, int rot) {
    Isometry g = identity(d);
    g.rot = static_cast<int>(detail::mod(rot, 6 * d));
    return g;
  }
  static Isometry reflection(int d) {
    Isometry g = identity(d);
    g.reflect = true;
    return g;
  }
  static Isometry translation_by(const Point2& t, int d) {
    Isometry g = identity(d);
    g.translation = t;
    return g;
  }

  ExactScalar rotate(const ExactScalar& z) const {
    const int step = z.field()->conductor() / (6 * d);
    return z.times_root(static_cast<int64_t>(rot) * step);
  }
  /// Linear part only (used for directions).
  ExactScalar linear(const ExactScalar& z) const { return rotate(reflect ? z.conj() : z); }
  Point2 apply(const Point2& p) const { return Point2(linear(p.z) + translation.z); }
  Point2 operator()(const Point2& p) const { return apply(p); }

  /// (this o other)(z) = this(other(z))
  Isometry compose(const Isometry& other) const {
    Isometry r;
    r.d = d;
    r.reflect = reflect != other.reflect;
    r.rot = static_cast<int>(detail::mod(reflect ? rot - other.rot : rot + other.rot, 6 * d));
    r.translation = apply(other.translation);
    return r;
  }

  Isometry inverse() const {
    // z = w^rot * c(y) + t  =>  y = c(w^-rot (z - t))
    Isometry r;
    r.d = d;
    r.reflect = reflect;
    r.rot = static_cast<int>(reflect ? rot : detail::mod(-rot, 6 * d));
    ExactScalar back = (-translation.z).times_root(-static_cast<int64_t>(rot) * (translation.z.field()->conductor() / (6 * d)));
    r.translation = Point2(reflect ? back.conj() : back);
    return r;
  }

  /// Same map, with the translation multiplied by a real scalar s (used when
  /// a whole patch is inflated by s).
  Isometry scaled_translation(const ExactScalar& s) const {
    Isometry r = *this;
    r.translation = Point2(translation.z * s);
    return r;
  }

  friend bool operator==(const Isometry& a, const Isometry& b) {
    return a.d == b.d && a.rot == b.rot && a.reflect == b.reflect && a.translation == b.translation;
  }
};

/// Direct or opposite isometry mapping the ordered triple `from` onto `to`,
/// if one exists with rotation a multiple of pi/(3d).
inline std::optional<Isometry> isometry_between(int d, const std::array<Point2, 3>& from, const std::array<Point2, 3>& to,
                                                bool allow_reflection = true) {
  const ExactScalar ef = from[1].z - from[0].z, et = to[1].z - to[0].z;
  const int step = ef.field()->conductor() / (6 * d);
  const std::complex<double> cf = ef.to_complex(), ct = et.to_complex();
  if (std::abs(std::abs(cf) - std::abs(ct)) > 1e-7 * (1 + std::abs(cf))) return std::nullopt;
  constexpr double pi = 3.14159265358979323846;
  for (int refl = 0; refl <= (allow_reflection ? 1 : 0); ++refl) {
    ExactScalar base = refl ? ef.conj() : ef;
    // the float angle picks the rotation; the exact test confirms it
    const double turn = std::arg(ct / (refl ? std::conj(cf) : cf)) / (pi / (3 * d));
    const int r = static_cast<int>(detail::mod(static_cast<int64_t>(std::llround(turn)), 6 * d));
    if (base.times_root(static_cast<int64_t>(r) * step) != et) continue;
    Isometry g;
    g.d = d;
    g.rot = r;
    g.reflect = refl != 0;
    g.translation = Point2(to[0].z - g.linear(from[0].z));
    if (g.apply(from[2]) == to[2]) return g;
  }
  return std::nullopt;
}

}  // namespace deltoid
