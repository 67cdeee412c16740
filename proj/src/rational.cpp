#include "mvbm/rational.hpp"

#include <cctype>
#include <ostream>

#include "mvbm/errors.hpp"

namespace mvbm {
namespace {

bool is_integer_literal(std::string_view s) {
    if (s.empty()) return false;
    size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    }
    return true;
}

mpz_class parse_mpz(std::string_view s, std::string_view full) {
    if (!is_integer_literal(s)) {
        throw ParseError("not a rational literal: '" + std::string(full) + "'");
    }
    if (s[0] == '+') s.remove_prefix(1);  // mpz_set_str rejects an explicit plus sign
    return mpz_class(std::string(s), 10);
}

}  // namespace

Rational::Rational(long num, long den) {
    if (den == 0) throw ParseError("rational with zero denominator");
    v_ = mpq_class(num, den);
    v_.canonicalize();
}

Rational& Rational::operator/=(const Rational& o) {
    if (o.v_ == 0) throw ValidationError("division by zero rational");
    v_ /= o.v_;
    return *this;
}

long Rational::num_long() const {
    if (!v_.get_num().fits_slong_p()) throw ValidationError("numerator does not fit in long");
    return v_.get_num().get_si();
}

long Rational::den_long() const {
    if (!v_.get_den().fits_slong_p()) throw ValidationError("denominator does not fit in long");
    return v_.get_den().get_si();
}

Rational Rational::parse(std::string_view text) {
    // Trim surrounding whitespace.
    size_t b = 0, e = text.size();
    while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
    std::string_view s = text.substr(b, e - b);
    if (s.empty()) throw ParseError("empty rational literal");

    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        mpz_class num = parse_mpz(s.substr(0, slash), text);
        mpz_class den = parse_mpz(s.substr(slash + 1), text);
        if (den == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
        mpq_class q(num, den);
        q.canonicalize();
        return Rational(std::move(q));
    }

    if (auto dot = s.find('.'); dot != std::string_view::npos) {
        std::string_view int_part = s.substr(0, dot);
        std::string_view frac_part = s.substr(dot + 1);
        bool neg = !int_part.empty() && int_part[0] == '-';
        if (!int_part.empty() && (int_part[0] == '-' || int_part[0] == '+')) {
            int_part.remove_prefix(1);
        }
        if (int_part.empty() && frac_part.empty()) {
            throw ParseError("not a rational literal: '" + std::string(text) + "'");
        }
        for (std::string_view part : {int_part, frac_part}) {
            for (char c : part) {
                if (!std::isdigit(static_cast<unsigned char>(c))) {
                    throw ParseError("not a rational literal: '" + std::string(text) + "'");
                }
            }
        }
        std::string digits = std::string(int_part) + std::string(frac_part);
        if (digits.empty()) {
            throw ParseError("not a rational literal: '" + std::string(text) + "'");
        }
        mpz_class num(digits, 10);
        mpz_class den = 1;
        for (size_t i = 0; i < frac_part.size(); ++i) den *= 10;
        mpq_class q(num, den);
        q.canonicalize();
        if (neg) q = -q;
        return Rational(std::move(q));
    }

    return Rational(mpq_class(parse_mpz(s, text)));
}

std::string Rational::str() const {
    if (v_.get_den() == 1) return v_.get_num().get_str();
    return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

std::ostream& operator<<(std::ostream& os, const Rational& r) {
    return os << r.str();
}

}  // namespace mvbm
