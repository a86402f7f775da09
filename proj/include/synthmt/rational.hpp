#pragma once

#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>

namespace synthmt {

/// Thrown when an exact computation leaves the 64-bit range.
struct OverflowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::int64_t narrow(__int128 v) {
  if (v > INT64_MAX || v < INT64_MIN) throw OverflowError("rational arithmetic overflow");
  return static_cast<std::int64_t>(v);
}

inline __int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace detail

/// Exact rational with gcd-reduced representation and positive denominator.
/// All arithmetic runs through 128-bit intermediates and throws OverflowError
/// instead of wrapping.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT: implicit by design
  Rational(std::int64_t n, std::int64_t d) { assign(n, d); }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  bool is_integer() const { return den_ == 1; }
  bool is_zero() const { return num_ == 0; }
  int sign() const { return num_ > 0 ? 1 : num_ < 0 ? -1 : 0; }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return make(__int128(a.num_) * b.den_ + __int128(b.num_) * a.den_,
                __int128(a.den_) * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return make(__int128(a.num_) * b.den_ - __int128(b.num_) * a.den_,
                __int128(a.den_) * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return make(__int128(a.num_) * b.num_, __int128(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("rational division by zero");
    return make(__int128(a.num_) * b.den_, __int128(a.den_) * b.num_);
  }
  Rational operator-() const {
    Rational r;
    r.num_ = detail::narrow(-__int128(num_));
    r.den_ = den_;
    return r;
  }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    return __int128(a.num_) * b.den_ < __int128(b.num_) * a.den_;
  }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

  /// Largest integer <= *this.
  std::int64_t floor() const {
    std::int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
  }
  /// Smallest integer >= *this.
  std::int64_t ceil() const {
    std::int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ > 0) ++q;
    return q;
  }

  std::string to_string() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  /// Accepts "12", "-3", "3/2", "-7/4", "1.5", "-0.25".
  static Rational parse(std::string_view text);

 private:
  static Rational make(__int128 n, __int128 d) {
    if (d == 0) throw std::domain_error("rational with zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 g = detail::gcd128(n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    Rational r;
    r.num_ = detail::narrow(n);
    r.den_ = detail::narrow(d);
    return r;
  }

  void assign(std::int64_t n, std::int64_t d) { *this = make(n, d); }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

inline Rational Rational::parse(std::string_view text) {
  auto bad = [&] { return std::invalid_argument("malformed rational: '" + std::string(text) + "'"); };
  if (text.empty()) throw bad();
  bool neg = false;
  size_t i = 0;
  if (text[i] == '-' || text[i] == '+') {
    neg = text[i] == '-';
    ++i;
  }
  if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i]))) throw bad();
  __int128 num = 0;
  __int128 den = 1;
  for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
    num = num * 10 + (text[i] - '0');
    if (num > __int128(INT64_MAX) * INT64_MAX) throw OverflowError("rational literal too large");
  }
  if (i < text.size() && text[i] == '.') {
    ++i;
    if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i]))) throw bad();
    for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
      num = num * 10 + (text[i] - '0');
      den *= 10;
      if (den > INT64_MAX / 10) throw OverflowError("rational literal too precise");
    }
  } else if (i < text.size() && text[i] == '/') {
    ++i;
    if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i]))) throw bad();
    __int128 d = 0;
    for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
      d = d * 10 + (text[i] - '0');
      if (d > INT64_MAX) throw OverflowError("rational literal too large");
    }
    den = d;
  }
  if (i != text.size()) throw bad();
  return make(neg ? -num : num, den);
}

}  // namespace synthmt

template <>
struct std::hash<synthmt::Rational> {
  size_t operator()(const synthmt::Rational& r) const noexcept {
    return std::hash<std::int64_t>{}(r.num()) * 1000003u ^ std::hash<std::int64_t>{}(r.den());
  }
};
