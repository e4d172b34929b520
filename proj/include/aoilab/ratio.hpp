#pragma once

#include <gmpxx.h>

#include <cctype>
#include <compare>
#include <ostream>
#include <string>
#include <string_view>

#include "aoilab/error.hpp"

namespace aoilab {

/// Exact rational number in canonical form (reduced, positive denominator).
///
/// Every time and size in the library is a Ratio, so tie conditions such as
/// "new size <= remaining size" are decided without rounding.
class Ratio {
 public:
  Ratio() = default;
  Ratio(long value) : value_(value) {}  // NOLINT(google-explicit-constructor)
  Ratio(int value) : value_(value) {}   // NOLINT(google-explicit-constructor)
  Ratio(long num, long den) : value_(mpz_class(num), mpz_class(den == 0 ? 1 : den)) {
    if (den == 0) throw Error(ErrorCode::ParseError, "zero denominator");
    value_.canonicalize();
  }
  explicit Ratio(mpq_class value) : value_(std::move(value)) { value_.canonicalize(); }

  /// Parses "p/q", an integer, or a plain decimal such as "-1.45".
  static Ratio parse(std::string_view text) {
    std::string s(trim(text));
    if (s.empty()) throw Error(ErrorCode::ParseError, "empty number");
    if (auto slash = s.find('/'); slash != std::string::npos) {
      std::string num = s.substr(0, slash);
      std::string den = s.substr(slash + 1);
      if (!is_integer(num) || !is_integer(den) || den[0] == '-' || den[0] == '+')
        throw Error(ErrorCode::ParseError, "malformed rational '" + s + "'");
      mpz_class n(strip_plus(num)), d(den);
      if (d == 0) throw Error(ErrorCode::ParseError, "zero denominator in '" + s + "'");
      return Ratio(mpq_class(n, d));
    }
    auto dot = s.find('.');
    if (dot == std::string::npos) {
      if (!is_integer(s)) throw Error(ErrorCode::ParseError, "malformed number '" + s + "'");
      return Ratio(mpq_class(mpz_class(strip_plus(s))));
    }
    std::string whole = s.substr(0, dot);
    std::string frac = s.substr(dot + 1);
    bool negative = !whole.empty() && whole[0] == '-';
    if (!whole.empty() && (whole[0] == '-' || whole[0] == '+')) whole.erase(0, 1);
    if ((whole.empty() && frac.empty()) || !all_digits(whole) || !all_digits(frac))
      throw Error(ErrorCode::ParseError, "malformed decimal '" + s + "'");
    mpz_class num(whole.empty() ? std::string("0") : whole);
    mpz_class scale = 1;
    for (char c : frac) {
      num = num * 10 + (c - '0');
      scale *= 10;
    }
    if (negative) num = -num;
    return Ratio(mpq_class(num, scale));
  }

  const mpq_class& value() const { return value_; }
  mpz_class numerator() const { return value_.get_num(); }
  mpz_class denominator() const { return value_.get_den(); }
  int sign() const { return sgn(value_); }
  bool is_zero() const { return sign() == 0; }

  /// Canonical machine form: "p/q", or "p" when q == 1.
  std::string str() const {
    if (value_.get_den() == 1) return value_.get_num().get_str();
    return value_.get_num().get_str() + "/" + value_.get_den().get_str();
  }

  /// Decimal rendering truncated (toward zero) to `significant` digits;
  /// terminating expansions shorter than that are printed exactly.
  std::string decimal(int significant = 30) const {
    mpz_class num = abs(value_.get_num());
    const mpz_class& den = value_.get_den();
    std::string out = sign() < 0 ? "-" : "";
    mpz_class whole = num / den;
    mpz_class rem = num % den;
    std::string whole_str = whole.get_str();
    out += whole_str;
    int used = whole == 0 ? 0 : static_cast<int>(whole_str.size());
    if (rem == 0) return out;
    out += '.';
    bool leading = whole == 0;
    while (rem != 0 && used < significant) {
      rem *= 10;
      mpz_class digit = rem / den;
      rem %= den;
      out += static_cast<char>('0' + digit.get_si());
      if (!(leading && digit == 0)) {
        leading = false;
        ++used;
      }
    }
    return out;
  }

  double to_double() const { return value_.get_d(); }

  Ratio& operator+=(const Ratio& o) { value_ += o.value_; return *this; }
  Ratio& operator-=(const Ratio& o) { value_ -= o.value_; return *this; }
  Ratio& operator*=(const Ratio& o) { value_ *= o.value_; return *this; }
  Ratio& operator/=(const Ratio& o) {
    if (o.is_zero()) throw Error(ErrorCode::RangeOutOfBounds, "division by zero");
    value_ /= o.value_;
    return *this;
  }

  friend Ratio operator+(Ratio a, const Ratio& b) { return a += b; }
  friend Ratio operator-(Ratio a, const Ratio& b) { return a -= b; }
  friend Ratio operator*(Ratio a, const Ratio& b) { return a *= b; }
  friend Ratio operator/(Ratio a, const Ratio& b) { return a /= b; }
  friend Ratio operator-(const Ratio& a) { return Ratio(mpq_class(-a.value_)); }

  friend bool operator==(const Ratio& a, const Ratio& b) { return a.value_ == b.value_; }
  friend std::strong_ordering operator<=>(const Ratio& a, const Ratio& b) {
    int c = cmp(a.value_, b.value_);
    return c < 0 ? std::strong_ordering::less
                 : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
  }

  friend std::ostream& operator<<(std::ostream& os, const Ratio& r) { return os << r.str(); }

 private:
  static std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  }
  static bool all_digits(const std::string& s) {
    for (char c : s)
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
  }
  static bool is_integer(const std::string& s) {
    std::string body = s;
    if (!body.empty() && (body[0] == '-' || body[0] == '+')) body.erase(0, 1);
    return !body.empty() && all_digits(body);
  }
  static std::string strip_plus(const std::string& s) {
    return !s.empty() && s[0] == '+' ? s.substr(1) : s;
  }

  mpq_class value_;
};

inline Ratio min(const Ratio& a, const Ratio& b) { return b < a ? b : a; }
inline Ratio max(const Ratio& a, const Ratio& b) { return a < b ? b : a; }

}  // namespace aoilab
