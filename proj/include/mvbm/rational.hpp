#pragma once

#include <gmpxx.h>

#include <compare>
#include <iosfwd>
#include <string>
#include <string_view>

namespace mvbm {

// Exact rational number. All welfare values, utilities and ratios in this
// library are computed with exact arithmetic; no floating point is used in
// any decision or comparison.
class Rational {
public:
    Rational() : v_(0) {}
    Rational(long n) : v_(static_cast<long>(n)) {}  // NOLINT(google-explicit-constructor)
    Rational(long num, long den);
    explicit Rational(mpq_class v) : v_(std::move(v)) { v_.canonicalize(); }

    // Accepts "3", "-7", "1/10", "-3/4", and decimal literals like "0.1" or
    // "2.25" (converted exactly, e.g. "0.1" == 1/10). Throws ParseError on
    // anything else, including zero denominators.
    static Rational parse(std::string_view text);

    // Canonical form: "num/den" with den > 1, plain "num" when den == 1.
    std::string str() const;

    double to_double() const { return v_.get_d(); }
    bool is_zero() const { return v_ == 0; }
    int sign() const { return sgn(v_); }

    // Numerator/denominator of the canonical form, for callers that need to
    // feed them into integer arithmetic. Throw ValidationError when the value
    // does not fit in a long.
    long num_long() const;
    long den_long() const;

    Rational operator-() const { return Rational(mpq_class(-v_)); }
    Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
    Rational& operator/=(const Rational& o);

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
    friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
    friend bool operator<=(const Rational& a, const Rational& b) { return a.v_ <= b.v_; }
    friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }
    friend bool operator>=(const Rational& a, const Rational& b) { return a.v_ >= b.v_; }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r);

private:
    mpq_class v_;
};

}  // namespace mvbm
