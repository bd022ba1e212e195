#include "ftrans/numeric.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>

namespace ftrans {

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

}  // namespace

Int parse_int(std::string_view text) {
    std::string_view body = text;
    bool neg = false;
    if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
        neg = body.front() == '-';
        body.remove_prefix(1);
    }
    if (!all_digits(body)) throw ConfigError("not an integer: '" + std::string(text) + "'");
    Int v{std::string(body)};
    return neg ? Int(-v) : v;
}

Rational parse_rational(std::string_view text) {
    auto slash = text.find('/');
    if (slash != std::string_view::npos) {
        Int p = parse_int(text.substr(0, slash));
        Int q = parse_int(text.substr(slash + 1));
        if (q == 0) throw ConfigError("zero denominator in '" + std::string(text) + "'");
        return Rational(p, q);
    }
    // decimal with optional fraction and exponent, parsed exactly
    std::string_view body = text;
    bool neg = false;
    if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
        neg = body.front() == '-';
        body.remove_prefix(1);
    }
    long long exp10 = 0;
    auto epos = body.find_first_of("eE");
    if (epos != std::string_view::npos) {
        exp10 = static_cast<long long>(parse_int(body.substr(epos + 1)));
        body = body.substr(0, epos);
    }
    std::string digits;
    auto dot = body.find('.');
    if (dot != std::string_view::npos) {
        digits = std::string(body.substr(0, dot)) + std::string(body.substr(dot + 1));
        exp10 -= static_cast<long long>(body.size() - dot - 1);
    } else {
        digits = std::string(body);
    }
    if (!all_digits(digits) || std::llabs(exp10) > 100000)
        throw ConfigError("not a rational: '" + std::string(text) + "'");
    Int mant(digits);
    if (neg) mant = -mant;
    if (exp10 >= 0) return Rational(mant * pow10(static_cast<unsigned>(exp10)));
    return Rational(mant, pow10(static_cast<unsigned>(-exp10)));
}

std::string to_string(const Int& v) { return v.str(); }

std::string to_string(const Rational& v) {
    if (denominator(v) == 1) return numerator(v).str();
    return numerator(v).str() + "/" + denominator(v).str();
}

Int floor_div(const Int& a, const Int& b) {
    Int q = a / b;  // truncates toward zero
    Int r = a - q * b;
    if (r != 0 && ((r < 0) != (b < 0))) --q;
    return q;
}

Int ceil_div(const Int& a, const Int& b) { return -floor_div(-a, b); }

Int isqrt(const Int& v) {
    if (v < 0) throw DomainError("isqrt of negative value");
    return boost::multiprecision::sqrt(v);
}

Int pow10(unsigned exponent) { return boost::multiprecision::pow(Int(10), exponent); }

Int pow2(unsigned exponent) {
    Int one = 1;
    return one << exponent;
}

unsigned bit_length(const Int& v) {
    if (v == 0) return 0;
    return static_cast<unsigned>(boost::multiprecision::msb(boost::multiprecision::abs(v))) + 1;
}

Int floor_log2(const Rational& v) {
    if (v <= 0) throw DomainError("floor_log2 of non-positive value");
    const Int& p = numerator(v);
    const Int& q = denominator(v);
    // estimate from bit lengths, then correct by at most one step
    long long t = static_cast<long long>(bit_length(p)) - static_cast<long long>(bit_length(q));
    auto pow_le = [&](long long e) {  // 2^e <= p/q
        if (e >= 0) return (q << static_cast<unsigned>(e)) <= p;
        return q <= (p << static_cast<unsigned>(-e));
    };
    while (!pow_le(t)) --t;
    while (pow_le(t + 1)) ++t;
    return Int(t);
}

unsigned long long to_u64(const Int& v, std::string_view what) {
    if (v < 0 || v > Int(std::numeric_limits<unsigned long long>::max()))
        throw DomainError(std::string(what) + " out of machine range: " + v.str());
    return static_cast<unsigned long long>(v);
}

double to_double(const Rational& v) {
    const Int& p = numerator(v);
    const Int& q = denominator(v);
    // scale both sides so convert_to never overflows
    long long shift = static_cast<long long>(bit_length(p)) - static_cast<long long>(bit_length(q));
    Int pp = p, qq = q;
    long long bias = 0;
    if (bit_length(p) > 900 || bit_length(q) > 900) {
        unsigned drop_p = bit_length(p) > 120 ? bit_length(p) - 120 : 0;
        unsigned drop_q = bit_length(q) > 120 ? bit_length(q) - 120 : 0;
        pp >>= drop_p;
        qq >>= drop_q;
        bias = static_cast<long long>(drop_p) - static_cast<long long>(drop_q);
        if (qq == 0) return std::numeric_limits<double>::infinity();
    }
    (void)shift;
    double r = pp.convert_to<double>() / qq.convert_to<double>();
    return std::ldexp(r, static_cast<int>(std::max<long long>(std::min<long long>(bias, 100000), -100000)));
}

std::string format_float15(const Rational& v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", to_double(v));
    return buf;
}

}  // namespace ftrans
