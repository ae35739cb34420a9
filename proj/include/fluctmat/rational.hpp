#pragma once

#include <cstdint>
#include <numeric>
#include <ostream>

#include "fluctmat/errors.hpp"

namespace fluctmat {

// Exact fraction on int64, enough for group averages like (N-r)!/N! with
// N <= 12 and for signed counting sums. Always kept in lowest terms with
// positive denominator.
struct Rat64 {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rat64() = default;
    Rat64(std::int64_t n) : num(n), den(1) {}
    Rat64(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }

    void normalize() {
        if (den == 0) throw ZeroModulus("Rat64: zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    friend Rat64 operator+(Rat64 a, Rat64 b) { return Rat64(a.num * b.den + b.num * a.den, a.den * b.den); }
    friend Rat64 operator-(Rat64 a, Rat64 b) { return Rat64(a.num * b.den - b.num * a.den, a.den * b.den); }
    friend Rat64 operator*(Rat64 a, Rat64 b) { return Rat64(a.num * b.num, a.den * b.den); }
    friend Rat64 operator/(Rat64 a, Rat64 b) {
        if (b.num == 0) throw ZeroModulus("Rat64: division by zero");
        return Rat64(a.num * b.den, a.den * b.num);
    }
    Rat64& operator+=(Rat64 b) { return *this = *this + b; }
    friend bool operator==(Rat64 a, Rat64 b) { return a.num == b.num && a.den == b.den; }
    friend bool operator!=(Rat64 a, Rat64 b) { return !(a == b); }

    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

    friend std::ostream& operator<<(std::ostream& os, Rat64 r) {
        os << r.num;
        if (r.den != 1) os << '/' << r.den;
        return os;
    }
};

// Half-integer values, used for graph sum exponents (denominator 1 or 2).
struct HalfInt {
    int twice = 0;  // value = twice / 2

    HalfInt() = default;
    explicit HalfInt(int twice_value) : twice(twice_value) {}
    static HalfInt whole(int k) { return HalfInt(2 * k); }

    bool is_integer() const { return twice % 2 == 0; }
    double value() const { return twice / 2.0; }

    friend HalfInt operator+(HalfInt a, HalfInt b) { return HalfInt(a.twice + b.twice); }
    HalfInt& operator+=(HalfInt b) {
        twice += b.twice;
        return *this;
    }
    friend bool operator==(HalfInt a, HalfInt b) { return a.twice == b.twice; }
    friend bool operator!=(HalfInt a, HalfInt b) { return a.twice != b.twice; }

    friend std::ostream& operator<<(std::ostream& os, HalfInt h) {
        if (h.twice % 2 == 0) return os << h.twice / 2;
        return os << h.twice << "/2";
    }
};

}  // namespace fluctmat
