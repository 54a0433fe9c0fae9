#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace succession {

/// Arbitrary-precision rational, kept canonical (lowest terms, positive
/// denominator). Thin value wrapper over GMP's mpq.
class Rational {
  public:
    Rational() : q_(0) {}
    Rational(long n) : q_(n) {}               // NOLINT(google-explicit-constructor)
    Rational(int n) : q_(n) {}                // NOLINT(google-explicit-constructor)
    Rational(long num, long den);
    explicit Rational(mpq_class q);
    explicit Rational(const mpz_class& num, const mpz_class& den);

    /// Accepts "p/q", integer, and decimal literals ("0.9", "-2", "1.5e-3").
    /// Decimal literals become the exact decimal fraction (0.9 -> 9/10).
    static Rational parse(std::string_view text);
    static std::optional<Rational> try_parse(std::string_view text);

    Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
    Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
    Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }
    Rational& operator/=(const Rational& o);

    friend Rational operator+(Rational a, const Rational& b) { a += b; return a; }
    friend Rational operator-(Rational a, const Rational& b) { a -= b; return a; }
    friend Rational operator*(Rational a, const Rational& b) { a *= b; return a; }
    friend Rational operator/(Rational a, const Rational& b) { a /= b; return a; }
    Rational operator-() const { return Rational(mpq_class(-q_)); }

    friend bool operator==(const Rational& a, const Rational& b) { return a.q_ == b.q_; }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        const int c = cmp(a.q_, b.q_);
        return c < 0 ? std::strong_ordering::less
             : c > 0 ? std::strong_ordering::greater
                     : std::strong_ordering::equal;
    }

    Rational pow(unsigned long exponent) const;

    bool is_zero() const { return sgn(q_) == 0; }
    int sign() const { return sgn(q_); }
    bool is_integer() const { return q_.get_den() == 1; }

    /// Nearest double (correctly rounded, ties to even).
    double to_double() const;

    /// Canonical "numerator/denominator" form, e.g. "1826214/1826215", "1/1".
    std::string to_fraction_string() const;

    /// Fixed-point decimal with `digits` fractional digits, rounded
    /// half-to-even on the exact value. Locale independent.
    std::string to_decimal_string(int digits) const;

    const mpq_class& raw() const { return q_; }

  private:
    mpq_class q_;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

}  // namespace succession
