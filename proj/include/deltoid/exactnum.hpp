// Exact arithmetic in cyclotomic fields Q(zeta_N).
//
// Every coordinate, length and inflation factor handled by the library is an
// element of Q(zeta_N) for a conductor N derived from d (see field_for()).
// Elements are stored in the power basis 1, zeta, ..., zeta^{phi(N)-1} as
// 64-bit integer numerators over one positive common denominator.  All
// arithmetic is checked; an intermediate that leaves the int64 range throws
// ArithmeticOverflow instead of silently wrapping.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <mpfr.h>

namespace deltoid {

struct ArithmeticOverflow : std::overflow_error {
  using std::overflow_error::overflow_error;
};

struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline int64_t add_checked(int64_t a, int64_t b) {
  int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw ArithmeticOverflow("int64 overflow in addition");
  return r;
}

inline int64_t mul_checked(int64_t a, int64_t b) {
  int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw ArithmeticOverflow("int64 overflow in multiplication");
  return r;
}

inline int64_t narrow(__int128 v) {
  if (v > INT64_MAX || v < INT64_MIN) throw ArithmeticOverflow("int64 overflow after accumulation");
  return static_cast<int64_t>(v);
}

inline int64_t mod(int64_t a, int64_t m) {
  int64_t r = a % m;
  return r < 0 ? r + m : r;
}

inline int euler_phi(int n) {
  int result = n;
  for (int p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      while (n % p == 0) n /= p;
      result -= result / p;
    }
  }
  if (n > 1) result -= result / n;
  return result;
}

// Integer polynomial helpers (ascending coefficients).
inline std::vector<int64_t> poly_exact_div(std::vector<int64_t> num, const std::vector<int64_t>& den) {
  // den is monic.
  const std::size_t dn = den.size();
  if (num.size() < dn) return {0};
  std::vector<int64_t> q(num.size() - dn + 1, 0);
  for (std::size_t i = num.size(); i-- >= dn;) {
    int64_t c = num[i];
    if (c == 0) continue;
    std::size_t shift = i - (dn - 1);
    q[shift] = c;
    for (std::size_t j = 0; j < dn; ++j) num[shift + j] = add_checked(num[shift + j], -mul_checked(c, den[j]));
  }
  return q;
}

inline std::vector<int64_t> cyclotomic_polynomial(int n) {
  static std::mutex mu;
  static std::map<int, std::vector<int64_t>> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(n); it != cache.end()) return it->second;
  }
  std::vector<int64_t> p(static_cast<std::size_t>(n) + 1, 0);
  p[0] = -1;
  p[static_cast<std::size_t>(n)] = 1;
  for (int d = 1; d < n; ++d) {
    if (n % d == 0) p = poly_exact_div(p, cyclotomic_polynomial(d));
  }
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(n, p);
  return p;
}

// Small RAII wrapper over an MPFR variable.
class Mpfr {
 public:
  explicit Mpfr(mpfr_prec_t prec) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }
  Mpfr(const Mpfr& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
  Mpfr& operator=(const Mpfr& o) {
    if (this != &o) { mpfr_set_prec(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
    return *this;
  }
  ~Mpfr() { mpfr_clear(v_); }
  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

 private:
  mpfr_t v_;
};

}  // namespace detail

/// The field Q(zeta_N) with its reduction tables.  Instances are created once
/// per conductor through get() and never mutated afterwards.
class CyclotomicField {
 public:
  using SparseRow = std::vector<std::pair<int, int64_t>>;

  static const CyclotomicField* get(int conductor) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<CyclotomicField>> registry;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = registry[conductor];
    if (!slot) slot.reset(new CyclotomicField(conductor));
    return slot.get();
  }

  int conductor() const { return N_; }
  int degree() const { return n_; }

  /// zeta^k reduced modulo the cyclotomic polynomial, k taken mod N.
  const SparseRow& root_row(int64_t k) const { return rows_[static_cast<std::size_t>(detail::mod(k, N_))]; }
  std::complex<double> root_value(int64_t k) const { return roots_[static_cast<std::size_t>(detail::mod(k, N_))]; }
  const std::vector<int>& units() const { return units_; }

 private:
  explicit CyclotomicField(int conductor) : N_(conductor) {
    if (conductor < 1) throw DomainError("conductor must be positive");
    phi_ = detail::cyclotomic_polynomial(conductor);
    n_ = static_cast<int>(phi_.size()) - 1;
    rows_.resize(static_cast<std::size_t>(N_));
    std::vector<int64_t> cur(static_cast<std::size_t>(n_), 0);
    cur[0] = 1;
    for (int k = 0; k < N_; ++k) {
      SparseRow row;
      for (int j = 0; j < n_; ++j)
        if (cur[static_cast<std::size_t>(j)] != 0) row.emplace_back(j, cur[static_cast<std::size_t>(j)]);
      rows_[static_cast<std::size_t>(k)] = std::move(row);
      // multiply by x and reduce
      int64_t top = cur[static_cast<std::size_t>(n_ - 1)];
      for (int j = n_ - 1; j > 0; --j) cur[static_cast<std::size_t>(j)] = cur[static_cast<std::size_t>(j - 1)];
      cur[0] = 0;
      if (top != 0)
        for (int j = 0; j < n_; ++j)
          cur[static_cast<std::size_t>(j)] =
              detail::add_checked(cur[static_cast<std::size_t>(j)], -detail::mul_checked(top, phi_[static_cast<std::size_t>(j)]));
    }
    roots_.resize(static_cast<std::size_t>(N_));
    for (int k = 0; k < N_; ++k) {
      long double a = 2.0L * 3.141592653589793238462643383279502884L * k / N_;
      roots_[static_cast<std::size_t>(k)] = {static_cast<double>(std::cos(a)), static_cast<double>(std::sin(a))};
    }
    for (int a = 1; a < N_; ++a)
      if (std::gcd(a, N_) == 1) units_.push_back(a);
    if (N_ == 1) units_.push_back(0);
  }

  int N_;
  int n_ = 0;
  std::vector<int64_t> phi_;
  std::vector<SparseRow> rows_;
  std::vector<std::complex<double>> roots_;
  std::vector<int> units_;
};

/// Conductor used for a given symmetry number d: it must contain zeta_{6d}
/// (tangency points at multiples of pi/(3d)) and i (so that sines are in the
/// field).  For even d, 6d is already divisible by 4.
inline int conductor_for(int d) { return std::lcm(6 * d, 4); }
inline const CyclotomicField* field_for(int d) { return CyclotomicField::get(conductor_for(d)); }

/// Certified real enclosure [mid - rad, mid + rad].
struct Enclosure {
  double mid = 0;
  double rad = 0;
  bool contains(double v) const { return v >= mid - rad && v <= mid + rad; }
};

/// An element of Q(zeta_N).
class ExactScalar {
 public:
  ExactScalar() = default;
  explicit ExactScalar(const CyclotomicField* f, int64_t value = 0) : f_(f), num_(static_cast<std::size_t>(f->degree()), 0) {
    num_[0] = value;
  }
  ExactScalar(const CyclotomicField* f, std::vector<int64_t> num, int64_t den) : f_(f), num_(std::move(num)), den_(den) {
    if (static_cast<int>(num_.size()) != f_->degree()) throw DomainError("coefficient vector length does not match field degree");
    if (den_ == 0) throw DomainError("zero denominator");
    normalize();
  }

  /// zeta_N^k
  static ExactScalar root(const CyclotomicField* f, int64_t k) {
    ExactScalar r(f);
    r.num_[0] = 0;
    for (auto [j, c] : f->root_row(k)) r.num_[static_cast<std::size_t>(j)] = c;
    return r;
  }
  /// exp(2 pi i k / m); m must divide the conductor.
  static ExactScalar unit(const CyclotomicField* f, int64_t k, int m) {
    if (f->conductor() % m != 0) throw DomainError("root order does not divide the field conductor");
    return root(f, k * (f->conductor() / m));
  }
  static ExactScalar rational(const CyclotomicField* f, int64_t p, int64_t q) {
    std::vector<int64_t> v(static_cast<std::size_t>(f->degree()), 0);
    v[0] = p;
    return ExactScalar(f, std::move(v), q);
  }

  const CyclotomicField* field() const { return f_; }
  const std::vector<int64_t>& numerators() const { return num_; }
  int64_t denominator() const { return den_; }
  bool valid() const { return f_ != nullptr; }

  bool is_zero() const {
    return std::all_of(num_.begin(), num_.end(), [](int64_t c) { return c == 0; });
  }
  bool is_integral() const { return den_ == 1; }

  friend bool operator==(const ExactScalar& a, const ExactScalar& b) {
    return a.f_ == b.f_ && a.den_ == b.den_ && a.num_ == b.num_;
  }
  friend bool operator!=(const ExactScalar& a, const ExactScalar& b) { return !(a == b); }

  ExactScalar operator-() const {
    ExactScalar r = *this;
    for (auto& c : r.num_) c = detail::mul_checked(c, -1);
    return r;
  }

  ExactScalar& operator+=(const ExactScalar& o) {
    same_field(o);
    if (den_ == o.den_) {
      for (std::size_t i = 0; i < num_.size(); ++i) num_[i] = detail::add_checked(num_[i], o.num_[i]);
      if (den_ != 1) normalize();
      return *this;
    }
    int64_t g = std::gcd(den_, o.den_);
    int64_t fa = o.den_ / g, fb = den_ / g;
    for (std::size_t i = 0; i < num_.size(); ++i)
      num_[i] = detail::add_checked(detail::mul_checked(num_[i], fa), detail::mul_checked(o.num_[i], fb));
    den_ = detail::mul_checked(den_, fa);
    normalize();
    return *this;
  }
  ExactScalar& operator-=(const ExactScalar& o) { return *this += -o; }

  ExactScalar& operator*=(const ExactScalar& o) {
    *this = multiply(*this, o);
    return *this;
  }
  ExactScalar& operator/=(const ExactScalar& o) {
    *this = multiply(*this, o.inverse());
    return *this;
  }

  friend ExactScalar operator+(ExactScalar a, const ExactScalar& b) { return a += b; }
  friend ExactScalar operator-(ExactScalar a, const ExactScalar& b) { return a -= b; }
  friend ExactScalar operator*(const ExactScalar& a, const ExactScalar& b) { return multiply(a, b); }
  friend ExactScalar operator/(const ExactScalar& a, const ExactScalar& b) { return multiply(a, b.inverse()); }
  friend ExactScalar operator*(ExactScalar a, int64_t k) {
    for (auto& c : a.num_) c = detail::mul_checked(c, k);
    a.normalize();
    return a;
  }
  friend ExactScalar operator*(int64_t k, ExactScalar a) { return std::move(a) * k; }
  ExactScalar divided_by(int64_t k) const {
    if (k == 0) throw DomainError("division by zero");
    ExactScalar r = *this;
    if (k < 0) { r = -r; k = -k; }
    r.den_ = detail::mul_checked(r.den_, k);
    r.normalize();
    return r;
  }

  /// this * zeta^k, cheaper than a general multiplication.
  ExactScalar times_root(int64_t k) const {
    const int N = f_->conductor();
    std::vector<__int128> acc(num_.size(), 0);
    for (std::size_t j = 0; j < num_.size(); ++j) {
      if (num_[j] == 0) continue;
      for (auto [t, c] : f_->root_row(detail::mod(static_cast<int64_t>(j) + k, N)))
        acc[static_cast<std::size_t>(t)] += static_cast<__int128>(num_[j]) * c;
    }
    ExactScalar r(f_, 0);
    for (std::size_t j = 0; j < acc.size(); ++j) r.num_[j] = detail::narrow(acc[j]);
    r.den_ = den_;
    return r;
  }

  /// Field automorphism zeta -> zeta^a (gcd(a, N) = 1).
  ExactScalar galois(int64_t a) const {
    const int N = f_->conductor();
    std::vector<__int128> acc(num_.size(), 0);
    for (std::size_t j = 0; j < num_.size(); ++j) {
      if (num_[j] == 0) continue;
      for (auto [t, c] : f_->root_row(detail::mod(static_cast<int64_t>(j) * a, N)))
        acc[static_cast<std::size_t>(t)] += static_cast<__int128>(num_[j]) * c;
    }
    ExactScalar r(f_, 0);
    for (std::size_t j = 0; j < acc.size(); ++j) r.num_[j] = detail::narrow(acc[j]);
    r.den_ = den_;
    return r;
  }
  ExactScalar conj() const { return galois(-1); }
  bool is_real() const { return *this == conj(); }

  ExactScalar inverse() const;

  /// Complex embedding under zeta -> exp(2 pi i a / N).
  std::complex<double> to_complex(int64_t a = 1) const {
    std::complex<double> s = 0;
    for (std::size_t j = 0; j < num_.size(); ++j)
      if (num_[j] != 0) s += static_cast<double>(num_[j]) * f_->root_value(static_cast<int64_t>(j) * a);
    return s / static_cast<double>(den_);
  }
  double to_double() const { return to_complex().real(); }

  /// Certified enclosure of the real part of the embedding, using MPFR at
  /// `bits` of precision (MPFR's cos is correctly rounded).
  Enclosure real_enclosure(mpfr_prec_t bits, int64_t a = 1) const;

  /// Exact sign of a real element (-1, 0, 1).
  int sign() const;

  friend int compare(const ExactScalar& a, const ExactScalar& b) { return (a - b).sign(); }
  friend bool operator<(const ExactScalar& a, const ExactScalar& b) { return compare(a, b) < 0; }
  friend bool operator>(const ExactScalar& a, const ExactScalar& b) { return compare(a, b) > 0; }

  std::size_t hash() const {
    std::size_t h = std::hash<int64_t>()(den_) ^ static_cast<std::size_t>(f_->conductor());
    for (int64_t c : num_) h = h * 1000003u ^ std::hash<int64_t>()(c);
    return h;
  }

  /// "n0 n1 ... / den" text form used by the exporters.
  std::string coeff_string() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < num_.size(); ++i) os << (i ? " " : "") << num_[i];
    if (den_ != 1) os << " / " << den_;
    return os.str();
  }

 private:
  void same_field(const ExactScalar& o) const {
    if (f_ != o.f_) throw DomainError("mixing elements of different cyclotomic fields");
  }

  void normalize() {
    if (den_ < 0) {
      den_ = detail::mul_checked(den_, -1);
      for (auto& c : num_) c = detail::mul_checked(c, -1);
    }
    if (den_ == 1) return;
    int64_t g = den_;
    for (int64_t c : num_) {
      if (g == 1) break;
      g = std::gcd(g, c < 0 ? -c : c);
    }
    if (g > 1) {
      den_ /= g;
      for (auto& c : num_) c /= g;
    }
  }

  static ExactScalar multiply(const ExactScalar& a, const ExactScalar& b) {
    a.same_field(b);
    const CyclotomicField* f = a.f_;
    const std::size_t n = a.num_.size();
    std::vector<__int128> prod(2 * n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (a.num_[i] == 0) continue;
      for (std::size_t j = 0; j < n; ++j)
        if (b.num_[j] != 0) prod[i + j] += static_cast<__int128>(a.num_[i]) * b.num_[j];
    }
    std::vector<__int128> acc(prod.begin(), prod.begin() + static_cast<std::ptrdiff_t>(n));
    for (std::size_t k = n; k < 2 * n; ++k) {
      if (prod[k] == 0) continue;
      const int64_t c = detail::narrow(prod[k]);
      for (auto [t, r] : f->root_row(static_cast<int64_t>(k))) acc[static_cast<std::size_t>(t)] += static_cast<__int128>(c) * r;
    }
    ExactScalar r(f, 0);
    for (std::size_t j = 0; j < n; ++j) r.num_[j] = detail::narrow(acc[j]);
    r.den_ = detail::mul_checked(a.den_, b.den_);
    r.normalize();
    return r;
  }

  const CyclotomicField* f_ = nullptr;
  std::vector<int64_t> num_;
  int64_t den_ = 1;
};

struct ExactScalarHash {
  std::size_t operator()(const ExactScalar& x) const { return x.hash(); }
};

inline ExactScalar ExactScalar::inverse() const {
  using boost::multiprecision::cpp_int;
  using boost::multiprecision::cpp_rational;
  if (is_zero()) throw DomainError("division by zero");
  const int n = f_->degree();
  // Solve M y = e0 where column j of M is (this * zeta^j).
  std::vector<std::vector<cpp_rational>> m(static_cast<std::size_t>(n), std::vector<cpp_rational>(static_cast<std::size_t>(n) + 1));
  for (int j = 0; j < n; ++j) {
    ExactScalar col = times_root(j);
    for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = cpp_rational(col.num_[static_cast<std::size_t>(i)], col.den_);
  }
  m[0][static_cast<std::size_t>(n)] = 1;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    while (piv < n && m[static_cast<std::size_t>(piv)][static_cast<std::size_t>(c)] == 0) ++piv;
    if (piv == n) throw DomainError("singular multiplication matrix");
    std::swap(m[static_cast<std::size_t>(piv)], m[static_cast<std::size_t>(c)]);
    cpp_rational inv = 1 / m[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)];
    for (int k = c; k <= n; ++k) m[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)] *= inv;
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      cpp_rational fct = m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
      if (fct == 0) continue;
      for (int k = c; k <= n; ++k)
        m[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)] -= fct * m[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)];
    }
  }
  cpp_int den = 1;
  for (int i = 0; i < n; ++i) {
    const cpp_int q = boost::multiprecision::denominator(m[static_cast<std::size_t>(i)][static_cast<std::size_t>(n)]);
    den = den / boost::multiprecision::gcd(den, q) * q;
  }
  if (den > INT64_MAX) throw ArithmeticOverflow("inverse denominator exceeds int64");
  std::vector<int64_t> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const cpp_rational& v = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(n)];
    cpp_int num = boost::multiprecision::numerator(v) * (den / boost::multiprecision::denominator(v));
    if (num > INT64_MAX || num < INT64_MIN) throw ArithmeticOverflow("inverse numerator exceeds int64");
    out[static_cast<std::size_t>(i)] = static_cast<int64_t>(num);
  }
  return ExactScalar(f_, std::move(out), static_cast<int64_t>(den));
}

inline Enclosure ExactScalar::real_enclosure(mpfr_prec_t bits, int64_t a) const {
  using detail::Mpfr;
  const int N = f_->conductor();
  Mpfr pi(bits), acc(bits), t(bits), c(bits);
  mpfr_const_pi(pi.get(), MPFR_RNDN);
  double abs_sum = 0;
  for (std::size_t j = 0; j < num_.size(); ++j) {
    if (num_[j] == 0) continue;
    int64_t k = detail::mod(static_cast<int64_t>(j) * a, N);
    mpfr_mul_si(t.get(), pi.get(), 2 * k, MPFR_RNDN);
    mpfr_div_si(t.get(), t.get(), N, MPFR_RNDN);
    mpfr_cos(c.get(), t.get(), MPFR_RNDN);
    mpfr_mul_si(c.get(), c.get(), num_[j], MPFR_RNDN);
    mpfr_add(acc.get(), acc.get(), c.get(), MPFR_RNDN);
    abs_sum += std::fabs(static_cast<double>(num_[j])) + 1.0;
  }
  mpfr_div_si(acc.get(), acc.get(), den_, MPFR_RNDN);
  // Each term carries a few ulps of error relative to 2^(-bits) * |coeff| * 2N;
  // the bound below dominates them with a wide margin.
  double rad = std::ldexp(abs_sum * 64.0 * (N + 1) * static_cast<double>(num_.size() + 1), -static_cast<int>(bits)) /
               static_cast<double>(den_);
  return {acc.to_double(), rad + std::fabs(acc.to_double()) * 1e-15};
}

inline int ExactScalar::sign() const {
  if (is_zero()) return 0;
  // fast path: double evaluation with a conservative bound
  double v = to_complex().real();
  double abs_sum = 0;
  for (int64_t c : num_) abs_sum += std::fabs(static_cast<double>(c));
  double bound = abs_sum * (static_cast<double>(num_.size()) + 8.0) * 4.0e-16 / static_cast<double>(den_);
  if (std::fabs(v) > bound) return v > 0 ? 1 : -1;
  for (mpfr_prec_t bits = 256; bits <= 1 << 16; bits *= 4) {
    Enclosure e = real_enclosure(bits);
    if (e.mid - e.rad > 0) return 1;
    if (e.mid + e.rad < 0) return -1;
  }
  throw ArithmeticOverflow("sign undecided at maximal precision (element is not real?)");
}

/// Integer polynomial, ascending degree.
struct IntPolynomial {
  std::vector<int64_t> coeffs;

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  int64_t leading() const { return coeffs.back(); }
  int64_t content() const {
    int64_t g = 0;
    for (int64_t c : coeffs) g = std::gcd(g, c < 0 ? -c : c);
    return g;
  }
  bool is_monic() const { return !coeffs.empty() && coeffs.back() == 1; }
  friend bool operator==(const IntPolynomial&, const IntPolynomial&) = default;

  ExactScalar evaluate(const ExactScalar& x) const {
    ExactScalar acc(x.field(), 0);
    for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * x + ExactScalar(x.field(), coeffs[i]);
    return acc;
  }

  std::string to_string(const std::string& var = "x") const {
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = coeffs.size(); i-- > 0;) {
      int64_t c = coeffs[i];
      if (c == 0) continue;
      int64_t a = c < 0 ? -c : c;
      if (first) os << (c < 0 ? "-" : "");
      else os << (c < 0 ? " - " : " + ");
      if (a != 1 || i == 0) os << a;
      if (i > 0) os << var;
      if (i > 1) os << "^" << i;
      first = false;
    }
    if (first) os << "0";
    return os.str();
  }
};

// ---------------------------------------------------------------------------
// Trigonometric constants.

/// sin(nu * pi / d) as an element of field_for(d).
inline ExactScalar sin_val(int d, int64_t nu) {
  if (d < 1) throw DomainError("d must be positive");
  const CyclotomicField* f = field_for(d);
  const int N = f->conductor();
  // sin(t) = (e^{it} - e^{-it}) / (2i) = -i (e^{it} - e^{-it}) / 2
  int64_t k = nu * (N / (2 * d));
  ExactScalar diff = ExactScalar::root(f, k) - ExactScalar::root(f, -k);
  return (diff.times_root(-N / 4)).divided_by(2);
}

/// cos(nu * pi / d)
inline ExactScalar cos_val(int d, int64_t nu) {
  const CyclotomicField* f = field_for(d);
  const int N = f->conductor();
  int64_t k = nu * (N / (2 * d));
  return (ExactScalar::root(f, k) + ExactScalar::root(f, -k)).divided_by(2);
}

/// Inflation factor s_p / s_1, computed as the Chebyshev sum
/// sum_{k=0}^{p-1} zeta_{2d}^{p-1-2k} (no division needed).
inline ExactScalar inflation_factor(int d, int p) {
  if (d < 5) throw DomainError("d must be at least 5");
  if (p < 2 || p > d / 2) throw DomainError("inflation index p must satisfy 2 <= p <= floor(d/2)");
  const CyclotomicField* f = field_for(d);
  const int step = f->conductor() / (2 * d);
  ExactScalar r(f, 0);
  for (int k = 0; k < p; ++k) r += ExactScalar::root(f, static_cast<int64_t>(p - 1 - 2 * k) * step);
  return r;
}

// ---------------------------------------------------------------------------
// Algebraic diagnostics.

/// Exact Galois orbit of x (distinct conjugates), paired with one automorphism
/// exponent producing each.
inline std::vector<std::pair<int, ExactScalar>> galois_orbit(const ExactScalar& x) {
  std::vector<std::pair<int, ExactScalar>> out;
  for (int a : x.field()->units()) {
    ExactScalar y = x.galois(a);
    bool seen = std::any_of(out.begin(), out.end(), [&](const auto& p) { return p.second == y; });
    if (!seen) out.emplace_back(a, std::move(y));
  }
  return out;
}

/// Primitive integer minimal polynomial of x.  The orbit is computed exactly,
/// the product of (X - conjugate) is expanded in MPFR, rounded, and the result
/// is verified exactly by evaluation at x.
inline IntPolynomial minimal_polynomial(const ExactScalar& x) {
  using boost::multiprecision::cpp_int;
  const int64_t D = x.denominator();
  ExactScalar y = x * D;  // algebraic integer
  auto orbit = galois_orbit(y);
  const std::size_t deg = orbit.size();
  for (mpfr_prec_t bits = 192; bits <= 4096; bits *= 2) {
    using detail::Mpfr;
    // complex coefficients (re, im), ascending
    std::vector<Mpfr> re(deg + 1, Mpfr(bits)), im(deg + 1, Mpfr(bits));
    mpfr_set_ui(re[0].get(), 1, MPFR_RNDN);
    Mpfr pi(bits);
    mpfr_const_pi(pi.get(), MPFR_RNDN);
    const int N = x.field()->conductor();
    std::size_t cur = 0;
    for (const auto& [a, conj] : orbit) {
      Mpfr cr(bits), ci(bits), t(bits), s(bits), c(bits);
      for (std::size_t j = 0; j < conj.numerators().size(); ++j) {
        int64_t v = conj.numerators()[j];
        if (v == 0) continue;
        mpfr_mul_si(t.get(), pi.get(), 2 * static_cast<long>(j), MPFR_RNDN);
        mpfr_div_si(t.get(), t.get(), N, MPFR_RNDN);
        mpfr_sin_cos(s.get(), c.get(), t.get(), MPFR_RNDN);
        mpfr_mul_si(c.get(), c.get(), v, MPFR_RNDN);
        mpfr_mul_si(s.get(), s.get(), v, MPFR_RNDN);
        mpfr_add(cr.get(), cr.get(), c.get(), MPFR_RNDN);
        mpfr_add(ci.get(), ci.get(), s.get(), MPFR_RNDN);
      }
      // multiply polynomial (degree cur) by (X - root)
      ++cur;
      for (std::size_t k = cur + 1; k-- > 0;) {
        Mpfr nr(bits), ni(bits), tr(bits), ti(bits);
        // new[k] = old[k-1] - root * old[k]
        mpfr_mul(tr.get(), cr.get(), re[k].get(), MPFR_RNDN);
        mpfr_mul(ti.get(), ci.get(), im[k].get(), MPFR_RNDN);
        mpfr_sub(nr.get(), tr.get(), ti.get(), MPFR_RNDN);  // Re(root*old)
        mpfr_mul(tr.get(), cr.get(), im[k].get(), MPFR_RNDN);
        mpfr_mul(ti.get(), ci.get(), re[k].get(), MPFR_RNDN);
        mpfr_add(ni.get(), tr.get(), ti.get(), MPFR_RNDN);  // Im(root*old)
        mpfr_neg(nr.get(), nr.get(), MPFR_RNDN);
        mpfr_neg(ni.get(), ni.get(), MPFR_RNDN);
        if (k > 0) {
          mpfr_add(nr.get(), nr.get(), re[k - 1].get(), MPFR_RNDN);
          mpfr_add(ni.get(), ni.get(), im[k - 1].get(), MPFR_RNDN);
        }
        re[k] = nr;
        im[k] = ni;
      }
    }
    IntPolynomial p;
    bool ok = true;
    for (std::size_t k = 0; k <= deg && ok; ++k) {
      Mpfr r(bits);
      mpfr_round(r.get(), re[k].get());
      Mpfr diff(bits);
      mpfr_sub(diff.get(), re[k].get(), r.get(), MPFR_RNDN);
      if (std::fabs(diff.to_double()) > 1e-6 || std::fabs(im[k].to_double()) > 1e-6 || !mpfr_fits_slong_p(r.get(), MPFR_RNDN)) ok = false;
      else p.coeffs.push_back(mpfr_get_si(r.get(), MPFR_RNDN));
    }
    if (!ok) continue;
    if (!p.evaluate(y).is_zero()) continue;
    // minimal polynomial of x = P(D X), made primitive.
    std::vector<cpp_int> big(deg + 1);
    cpp_int pw = 1;
    for (std::size_t k = 0; k <= deg; ++k) {
      big[k] = cpp_int(p.coeffs[k]) * pw;
      pw *= D;
    }
    cpp_int g = 0;
    for (auto& c : big) g = boost::multiprecision::gcd(g, c);
    IntPolynomial out;
    for (auto& c : big) {
      cpp_int v = c / g;
      if (v > INT64_MAX || v < INT64_MIN) throw ArithmeticOverflow("minimal polynomial coefficient exceeds int64");
      out.coeffs.push_back(static_cast<int64_t>(v));
    }
    if (out.leading() < 0)
      for (auto& c : out.coeffs) c = -c;
    return out;
  }
  throw ArithmeticOverflow("minimal polynomial not recovered at maximal precision");
}

/// Outcome of the Pisot-Vijayaraghavan test.
struct PisotReport {
  enum class Verdict { Pisot, NotPisot, Boundary, NotAlgebraicInteger, NotRealAboveOne };
  Verdict verdict = Verdict::NotPisot;
  IntPolynomial minimal_polynomial;
  double value = 0;
  /// Certified moduli of the non-principal conjugates: enclosure of |y|.
  std::vector<Enclosure> conjugate_moduli;
  /// min over conjugates of the distance between the enclosure and 1.
  double margin = 0;
  std::string reason;

  bool is_pisot() const { return verdict == Verdict::Pisot; }
};

/// PV test with certified conjugate bounds: each conjugate modulus is enclosed
/// by an MPFR interval narrower than 1e-6 that excludes 1.
inline PisotReport pisot_report(const ExactScalar& x) {
  PisotReport rep;
  rep.value = x.to_double();
  if (!x.is_real() || x.sign() == 0 || compare(x, ExactScalar(x.field(), 1)) <= 0) {
    rep.verdict = PisotReport::Verdict::NotRealAboveOne;
    rep.reason = "not a real number greater than one";
    return rep;
  }
  rep.minimal_polynomial = minimal_polynomial(x);
  if (!rep.minimal_polynomial.is_monic()) {
    rep.verdict = PisotReport::Verdict::NotAlgebraicInteger;
    rep.reason = "not an algebraic integer";
    return rep;
  }
  const ExactScalar one(x.field(), 1);
  bool all_inside = true;
  rep.margin = 1e300;
  for (const auto& [a, y] : galois_orbit(x)) {
    if (y == x) continue;
    ExactScalar mod2 = y * y.conj();
    if (mod2 == one) {
      rep.verdict = PisotReport::Verdict::Boundary;
      rep.reason = "a conjugate lies on the unit circle (Salem/boundary)";
      rep.conjugate_moduli.push_back({1.0, 0.0});
      rep.margin = 0;
      return rep;
    }
    Enclosure e;
    for (mpfr_prec_t bits = 64; bits <= 1 << 16; bits *= 2) {
      e = mod2.real_enclosure(bits);
      if (2 * e.rad < 1e-6 && !e.contains(1.0)) break;
    }
    if (e.contains(1.0)) throw ArithmeticOverflow("conjugate modulus not separated from 1");
    // |y| = sqrt(|y|^2); sqrt is monotone so the enclosure maps through.
    double lo = std::sqrt(std::max(0.0, e.mid - e.rad)), hi = std::sqrt(e.mid + e.rad);
    Enclosure m{(lo + hi) / 2, (hi - lo) / 2};
    rep.conjugate_moduli.push_back(m);
    rep.margin = std::min(rep.margin, std::fabs(m.mid - 1.0) - m.rad);
    if (m.mid > 1.0) all_inside = false;
  }
  if (rep.conjugate_moduli.empty()) rep.margin = 0;
  rep.verdict = all_inside ? PisotReport::Verdict::Pisot : PisotReport::Verdict::NotPisot;
  rep.reason = all_inside ? "all other conjugates inside the unit disc" : "a conjugate lies outside the unit disc";
  return rep;
}

inline bool is_pisot(const ExactScalar& x) { return pisot_report(x).is_pisot(); }

}  // namespace deltoid
