#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>
#include <string_view>

#include "posheaf/error.hpp"

namespace posheaf {

/// Arbitrary-precision rational, always kept in lowest terms by GMP.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using BigInt = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                             boost::multiprecision::et_off>;

enum class FieldKind { Rationals, PrimeField, ApproxReals };

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

/// Runtime description of the ground field: "Q", "Fp:<p>" or "R".
struct FieldTag {
  FieldKind kind = FieldKind::Rationals;
  std::uint32_t prime = 0;

  static FieldTag rationals() { return {FieldKind::Rationals, 0}; }
  static FieldTag reals() { return {FieldKind::ApproxReals, 0}; }
  static FieldTag prime_field(std::uint64_t p) {
    if (p >= (std::uint64_t{1} << 31) || !is_prime(p))
      throw Error(ErrorCode::FieldMismatch, "Fp requires a prime below 2^31, got " + std::to_string(p));
    return {FieldKind::PrimeField, static_cast<std::uint32_t>(p)};
  }

  bool exact() const { return kind != FieldKind::ApproxReals; }

  std::string to_string() const {
    switch (kind) {
      case FieldKind::Rationals: return "Q";
      case FieldKind::PrimeField: return "Fp:" + std::to_string(prime);
      case FieldKind::ApproxReals: return "R";
    }
    return "?";
  }

  static FieldTag parse(std::string_view text) {
    if (text == "Q") return rationals();
    if (text == "R") return reals();
    if (text.substr(0, 3) == "Fp:") {
      std::uint64_t p = 0;
      auto digits = text.substr(3);
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), p);
      if (ec == std::errc() && ptr == digits.data() + digits.size()) return prime_field(p);
    }
    throw Error(ErrorCode::SchemaError, "field: expected \"Q\", \"Fp:<p>\" or \"R\", got \"" +
                                            std::string(text) + "\"");
  }

  friend bool operator==(const FieldTag&, const FieldTag&) = default;
};

/// Element of Z/pZ. A default-constructed value is a modulus-free zero that
/// adopts the modulus of whatever it is combined with.
class ModP {
 public:
  ModP() = default;
  ModP(std::int64_t value, std::uint32_t modulus) : modulus_(modulus) {
    std::int64_t r = value % static_cast<std::int64_t>(modulus);
    if (r < 0) r += modulus;
    value_ = static_cast<std::uint32_t>(r);
  }

  std::uint32_t value() const { return value_; }
  std::uint32_t modulus() const { return modulus_; }

  ModP inverse() const {
    if (value_ == 0) throw Error(ErrorCode::FieldMismatch, "inverse of zero in prime field");
    // Fermat: a^(p-2)
    std::uint64_t result = 1, base = value_, exp = modulus_ - 2;
    while (exp) {
      if (exp & 1) result = result * base % modulus_;
      base = base * base % modulus_;
      exp >>= 1;
    }
    return raw(static_cast<std::uint32_t>(result), modulus_);
  }

  friend ModP operator+(ModP a, ModP b) {
    auto p = common(a, b);
    std::uint64_t s = std::uint64_t{a.value_} + b.value_;
    return raw(static_cast<std::uint32_t>(s >= p ? s - p : s), p);
  }
  friend ModP operator-(ModP a, ModP b) {
    auto p = common(a, b);
    return raw(a.value_ >= b.value_ ? a.value_ - b.value_ : a.value_ + (p - b.value_), p);
  }
  friend ModP operator*(ModP a, ModP b) {
    auto p = common(a, b);
    if (p == 0) return {};
    return raw(static_cast<std::uint32_t>(std::uint64_t{a.value_} * b.value_ % p), p);
  }
  friend ModP operator/(ModP a, ModP b) {
    if (b.modulus_ == 0) b.modulus_ = a.modulus_;
    return a * b.inverse();
  }
  ModP operator-() const { return value_ == 0 ? *this : raw(modulus_ - value_, modulus_); }
  ModP& operator+=(ModP o) { return *this = *this + o; }
  ModP& operator-=(ModP o) { return *this = *this - o; }
  ModP& operator*=(ModP o) { return *this = *this * o; }
  ModP& operator/=(ModP o) { return *this = *this / o; }
  friend bool operator==(ModP a, ModP b) { return a.value_ == b.value_; }

 private:
  static ModP raw(std::uint32_t v, std::uint32_t p) {
    ModP r;
    r.value_ = v;
    r.modulus_ = p;
    return r;
  }
  static std::uint32_t common(ModP a, ModP b) { return a.modulus_ ? a.modulus_ : b.modulus_; }

  std::uint32_t value_ = 0;
  std::uint32_t modulus_ = 0;
};

template <class T>
struct Field;

template <>
struct Field<Rational> {
  static constexpr bool exact = true;

  FieldTag tag() const { return FieldTag::rationals(); }
  Rational zero() const { return Rational(0); }
  Rational one() const { return Rational(1); }
  Rational from_int(long long v) const { return Rational(v); }
  Rational from_rational(const Rational& r) const { return r; }
  bool is_zero(const Rational& x) const { return x.is_zero(); }

  /// Canonical "p/q" literal; "/q" omitted when q == 1.
  std::string format(const Rational& x) const {
    BigInt num = boost::multiprecision::numerator(x);
    BigInt den = boost::multiprecision::denominator(x);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
  }

  Rational parse(std::string_view text) const {
    auto slash = text.find('/');
    auto num = parse_int(text.substr(0, slash), text);
    if (slash == std::string_view::npos) return Rational(num);
    auto den = parse_int(text.substr(slash + 1), text);
    if (den == 0) throw Error(ErrorCode::ParseError, "zero denominator in \"" + std::string(text) + "\"");
    return Rational(num) / Rational(den);
  }

 private:
  static BigInt parse_int(std::string_view digits, std::string_view whole) {
    std::size_t start = (!digits.empty() && (digits[0] == '-' || digits[0] == '+')) ? 1 : 0;
    bool ok = digits.size() > start;
    for (std::size_t i = start; i < digits.size() && ok; ++i) ok = digits[i] >= '0' && digits[i] <= '9';
    if (!ok) throw Error(ErrorCode::ParseError, "invalid rational literal \"" + std::string(whole) + "\"");
    return BigInt(std::string(digits[0] == '+' ? digits.substr(1) : digits));
  }
};

template <>
struct Field<ModP> {
  static constexpr bool exact = true;
  std::uint32_t prime = 2;

  FieldTag tag() const { return FieldTag::prime_field(prime); }
  ModP zero() const { return ModP(0, prime); }
  ModP one() const { return ModP(1, prime); }
  ModP from_int(long long v) const { return ModP(v, prime); }
  ModP from_rational(const Rational& r) const {
    BigInt p(prime);
    BigInt num = boost::multiprecision::numerator(r) % p;
    BigInt den = boost::multiprecision::denominator(r) % p;
    if (den == 0) throw Error(ErrorCode::FieldMismatch, "denominator vanishes modulo " + std::to_string(prime));
    return ModP(num.convert_to<long long>(), prime) / ModP(den.convert_to<long long>(), prime);
  }
  bool is_zero(const ModP& x) const { return x.value() == 0; }
  std::string format(const ModP& x) const { return std::to_string(x.value()); }
  ModP parse(std::string_view text) const {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
      throw Error(ErrorCode::ParseError, "invalid residue literal \"" + std::string(text) + "\"");
    return ModP(v, prime);
  }
};

template <>
struct Field<double> {
  static constexpr bool exact = false;

  FieldTag tag() const { return FieldTag::reals(); }
  double zero() const { return 0.0; }
  double one() const { return 1.0; }
  double from_int(long long v) const { return static_cast<double>(v); }
  double from_rational(const Rational& r) const { return r.convert_to<double>(); }
  bool is_zero(double x) const { return x == 0.0; }
  std::string format(double x) const {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
  }
  double parse(std::string_view text) const {
    std::string s(text);
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size())
      throw Error(ErrorCode::ParseError, "invalid real literal \"" + s + "\"");
    return v;
  }
};

template <class T>
concept ExactScalar = Field<T>::exact;

/// Calls fn with the descriptor of an exact field; ApproxReals is rejected.
template <class Fn>
decltype(auto) visit_exact_field(FieldTag tag, Fn&& fn) {
  switch (tag.kind) {
    case FieldKind::Rationals: return fn(Field<Rational>{});
    case FieldKind::PrimeField: return fn(Field<ModP>{tag.prime});
    case FieldKind::ApproxReals: break;
  }
  throw Error(ErrorCode::FieldMismatch, "exact field required, got R");
}

}  // namespace posheaf
