#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <compare>

namespace tsnkit {

/// Exact rational number over int64 with int128 intermediates.
///
/// All time quantities in the toolkit (transmission times, queuing delays,
/// traversal-time bounds, simulator clocks) are carried as Rational
/// microseconds so that repeated sums and fixed-point iterations never
/// accumulate floating-point error. Always stored reduced, den > 0.
class Rational {
public:
    constexpr Rational() : num_(0), den_(1) {}
    Rational(std::int64_t value) : num_(value), den_(1) {}
    Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) { normalize(); }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_negative() const { return num_ < 0; }
    bool is_integer() const { return den_ == 1; }

    friend Rational operator+(const Rational& a, const Rational& b) {
        __int128 n = (__int128)a.num_ * b.den_ + (__int128)b.num_ * a.den_;
        __int128 d = (__int128)a.den_ * b.den_;
        return from_wide(n, d);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        __int128 n = (__int128)a.num_ * b.den_ - (__int128)b.num_ * a.den_;
        __int128 d = (__int128)a.den_ * b.den_;
        return from_wide(n, d);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return from_wide((__int128)a.num_ * b.num_, (__int128)a.den_ * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw std::domain_error("Rational: division by zero");
        return from_wide((__int128)a.num_ * b.den_, (__int128)a.den_ * b.num_);
    }
    Rational operator-() const { Rational r; r.num_ = -num_; r.den_ = den_; return r; }

    Rational& operator+=(const Rational& o) { *this = *this + o; return *this; }
    Rational& operator-=(const Rational& o) { *this = *this - o; return *this; }
    Rational& operator*=(const Rational& o) { *this = *this * o; return *this; }
    Rational& operator/=(const Rational& o) { *this = *this / o; return *this; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        __int128 lhs = (__int128)a.num_ * b.den_;
        __int128 rhs = (__int128)b.num_ * a.den_;
        if (lhs < rhs) return std::strong_ordering::less;
        if (lhs > rhs) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    /// floor(a / b) as an integer, exact.
    static std::int64_t floor_div(const Rational& a, const Rational& b) {
        if (b.num_ <= 0) throw std::domain_error("Rational::floor_div: divisor must be positive");
        __int128 n = (__int128)a.num_ * b.den_;
        __int128 d = (__int128)a.den_ * b.num_;
        __int128 q = n / d;
        if (n % d != 0 && (n < 0)) q -= 1;
        return narrow(q);
    }

    /// ceil(a / b) as an integer, exact.
    static std::int64_t ceil_div(const Rational& a, const Rational& b) {
        if (b.num_ <= 0) throw std::domain_error("Rational::ceil_div: divisor must be positive");
        __int128 n = (__int128)a.num_ * b.den_;
        __int128 d = (__int128)a.den_ * b.num_;
        __int128 q = n / d;
        if (n % d != 0 && (n > 0)) q += 1;
        return narrow(q);
    }

    double to_double() const { return (double)num_ / (double)den_; }

    /// Fixed-point decimal string with `decimals` digits, round half away from zero.
    std::string to_decimal_string(int decimals = 3) const {
        __int128 scale = 1;
        for (int i = 0; i < decimals; ++i) scale *= 10;
        __int128 n = (__int128)num_ * scale;
        __int128 q = n / den_;
        __int128 r = n % den_;
        if (r < 0) r = -r;
        if (2 * r >= den_) q += (num_ < 0 ? -1 : 1);
        bool neg = q < 0;
        if (neg) q = -q;
        __int128 whole = q / scale;
        __int128 frac = q % scale;
        std::string fs;
        for (int i = 0; i < decimals; ++i) { fs.insert(fs.begin(), char('0' + (int)(frac % 10))); frac /= 10; }
        std::string ws;
        if (whole == 0) ws = "0";
        while (whole > 0) { ws.insert(ws.begin(), char('0' + (int)(whole % 10))); whole /= 10; }
        std::string out = neg ? "-" : "";
        out += ws;
        if (decimals > 0) { out += "."; out += fs; }
        return out;
    }

    static Rational min(const Rational& a, const Rational& b) { return a <= b ? a : b; }
    static Rational max(const Rational& a, const Rational& b) { return a >= b ? a : b; }

private:
    static Rational from_wide(__int128 n, __int128 d) {
        if (d == 0) throw std::domain_error("Rational: zero denominator");
        if (d < 0) { n = -n; d = -d; }
        __int128 a = n < 0 ? -n : n;
        __int128 b = d;
        while (b != 0) { __int128 t = a % b; a = b; b = t; }
        if (a != 0) { n /= a; d /= a; }
        Rational r;
        r.num_ = narrow(n);
        r.den_ = narrow(d);
        return r;
    }

    static std::int64_t narrow(__int128 v) {
        if (v > INT64_MAX || v < INT64_MIN)
            throw std::overflow_error("Rational: value out of 64-bit range");
        return (std::int64_t)v;
    }

    void normalize() {
        if (den_ == 0) throw std::domain_error("Rational: zero denominator");
        if (den_ < 0) { num_ = -num_; den_ = -den_; }
        std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
        if (g > 1) { num_ /= g; den_ /= g; }
    }

    std::int64_t num_;
    std::int64_t den_;
};

/// Time value in microseconds.
using Duration = Rational;

}  // namespace tsnkit
