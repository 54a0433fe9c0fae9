#include "succession/rational.hpp"

#include <cctype>
#include <cmath>
#include <cstring>
#include <limits>
#include <ostream>

#include "succession/errors.hpp"

namespace succession {

Rational::Rational(long num, long den) {
    if (den == 0) throw DomainError("rational with zero denominator");
    q_ = mpq_class(num, den);
    q_.canonicalize();
}

Rational::Rational(mpq_class q) : q_(std::move(q)) {
    if (q_.get_den() == 0) throw DomainError("rational with zero denominator");
    q_.canonicalize();
}

Rational::Rational(const mpz_class& num, const mpz_class& den) {
    if (den == 0) throw DomainError("rational with zero denominator");
    q_ = mpq_class(num, den);
    q_.canonicalize();
}

Rational& Rational::operator/=(const Rational& o) {
    if (o.is_zero()) throw DomainError("rational division by zero");
    q_ /= o.q_;
    return *this;
}

Rational Rational::pow(unsigned long exponent) const {
    mpz_class num, den;
    mpz_pow_ui(num.get_mpz_t(), q_.get_num().get_mpz_t(), exponent);
    mpz_pow_ui(den.get_mpz_t(), q_.get_den().get_mpz_t(), exponent);
    mpq_class out(num, den);
    out.canonicalize();
    return Rational(std::move(out));
}

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

// Exact decimal literal -> rational: mantissa scaled by a power of ten.
std::optional<mpq_class> parse_decimal(std::string_view text) {
    std::string_view s = text;
    bool negative = false;
    if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }

    long exponent = 0;
    if (auto epos = s.find_first_of("eE"); epos != std::string_view::npos) {
        std::string_view exp = s.substr(epos + 1);
        s = s.substr(0, epos);
        bool eneg = false;
        if (!exp.empty() && (exp.front() == '+' || exp.front() == '-')) {
            eneg = exp.front() == '-';
            exp.remove_prefix(1);
        }
        if (!all_digits(exp) || exp.size() > 9) return std::nullopt;
        for (char c : exp) exponent = exponent * 10 + (c - '0');
        if (eneg) exponent = -exponent;
    }

    std::string digits;
    long frac_digits = 0;
    if (auto dot = s.find('.'); dot != std::string_view::npos) {
        std::string_view ipart = s.substr(0, dot);
        std::string_view fpart = s.substr(dot + 1);
        if (ipart.empty() && fpart.empty()) return std::nullopt;
        if (!ipart.empty() && !all_digits(ipart)) return std::nullopt;
        if (!fpart.empty() && !all_digits(fpart)) return std::nullopt;
        digits = std::string(ipart) + std::string(fpart);
        frac_digits = static_cast<long>(fpart.size());
    } else {
        if (!all_digits(s)) return std::nullopt;
        digits = std::string(s);
    }
    if (digits.empty()) return std::nullopt;

    mpz_class mantissa(digits, 10);
    if (negative) mantissa = -mantissa;

    const long power = exponent - frac_digits;
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(power)));
    mpq_class q = power >= 0 ? mpq_class(mantissa * scale) : mpq_class(mantissa, scale);
    q.canonicalize();
    return q;
}

}  // namespace

std::optional<Rational> Rational::try_parse(std::string_view text) {
    if (text.empty()) return std::nullopt;
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        std::string_view num = text.substr(0, slash);
        std::string_view den = text.substr(slash + 1);
        bool nneg = false;
        if (!num.empty() && (num.front() == '+' || num.front() == '-')) {
            nneg = num.front() == '-';
            num.remove_prefix(1);
        }
        if (!all_digits(num) || !all_digits(den)) return std::nullopt;
        mpz_class n(std::string(num), 10), d(std::string(den), 10);
        if (d == 0) return std::nullopt;
        if (nneg) n = -n;
        mpq_class q(n, d);
        q.canonicalize();
        return Rational(std::move(q));
    }
    if (auto q = parse_decimal(text)) return Rational(std::move(*q));
    return std::nullopt;
}

Rational Rational::parse(std::string_view text) {
    if (auto r = try_parse(text)) return *r;
    throw ParseError("not a rational literal: '" + std::string(text) + "'");
}

double Rational::to_double() const {
    // mpq_get_d truncates toward zero; fix up to the nearest double by
    // comparing the two candidates exactly.
    const double d0 = q_.get_d();
    if (!std::isfinite(d0)) return d0;
    const double d1 = std::nextafter(d0, sgn(q_) >= 0
                                             ? std::numeric_limits<double>::infinity()
                                             : -std::numeric_limits<double>::infinity());
    if (!std::isfinite(d1)) return d0;
    mpq_class e0(mpq_class(d0) - q_);
    mpq_class e1(mpq_class(d1) - q_);
    if (sgn(e0) < 0) e0 = -e0;
    if (sgn(e1) < 0) e1 = -e1;
    const int c = cmp(e0, e1);
    if (c < 0) return d0;
    if (c > 0) return d1;
    // Exact tie: prefer the candidate with even mantissa, like IEEE rounding.
    std::uint64_t bits;
    static_assert(sizeof bits == sizeof d0);
    std::memcpy(&bits, &d0, sizeof bits);
    return (bits & 1u) == 0 ? d0 : d1;
}

std::string Rational::to_fraction_string() const {
    return q_.get_num().get_str() + "/" + q_.get_den().get_str();
}

std::string Rational::to_decimal_string(int digits) const {
    if (digits < 0) throw DomainError("negative digit count");
    const bool negative = sgn(q_) < 0;
    mpz_class num = abs(q_.get_num());
    const mpz_class& den = q_.get_den();

    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));

    mpz_class shifted = num * scale;
    mpz_class quot, rem;
    mpz_fdiv_qr(quot.get_mpz_t(), rem.get_mpz_t(), shifted.get_mpz_t(), den.get_mpz_t());

    // Round half to even on the exact remainder.
    const int c = cmp(rem * 2, den);
    if (c > 0 || (c == 0 && mpz_odd_p(quot.get_mpz_t()))) quot += 1;

    std::string s = quot.get_str();
    if (static_cast<int>(s.size()) <= digits) {
        s.insert(0, static_cast<std::size_t>(digits) + 1 - s.size(), '0');
    }
    if (digits > 0) s.insert(s.size() - static_cast<std::size_t>(digits), 1, '.');
    if (negative && quot != 0) s.insert(0, 1, '-');
    return s;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) {
    return os << r.to_fraction_string();
}

}  // namespace succession
