#pragma once

#include "billiards/vec2.hpp"

#include <gmpxx.h>

#include <cmath>
#include <stdexcept>
#include <string>

namespace billiards {

// Exact element a + b*sqrt(3) of Q(sqrt 3).
struct QS3 {
    mpq_class a, b;

    QS3() = default;
    QS3(int x) : a(x), b(0) {}
    QS3(mpq_class x) : a(std::move(x)), b(0) {}
    QS3(mpq_class x, mpq_class y) : a(std::move(x)), b(std::move(y)) {}

    static QS3 root3() { return QS3(0, 1); }

    friend QS3 operator+(const QS3& x, const QS3& y) { return {x.a + y.a, x.b + y.b}; }
    friend QS3 operator-(const QS3& x, const QS3& y) { return {x.a - y.a, x.b - y.b}; }
    friend QS3 operator*(const QS3& x, const QS3& y) { return {x.a * y.a + 3 * x.b * y.b, x.a * y.b + x.b * y.a}; }
    friend QS3 operator/(const QS3& x, const QS3& y) {
        mpq_class d = y.a * y.a - 3 * y.b * y.b;
        if (d == 0) throw std::domain_error("division by zero in Q(sqrt 3)");
        return x * QS3(y.a / d, -y.b / d);
    }
    QS3 operator-() const { return {-a, -b}; }
    QS3& operator+=(const QS3& y) { return *this = *this + y; }
    QS3& operator-=(const QS3& y) { return *this = *this - y; }
    QS3& operator*=(const QS3& y) { return *this = *this * y; }
    QS3& operator/=(const QS3& y) { return *this = *this / y; }
    friend bool operator==(const QS3& x, const QS3& y) { return x.a == y.a && x.b == y.b; }

    int sign() const {
        // sign of a + b sqrt3 without rounding
        int sa = sgn(a), sb = sgn(b);
        if (sa == 0) return sb;
        if (sb == 0 || sa == sb) return sa;
        mpq_class lhs = a * a, rhs = 3 * b * b;
        return lhs > rhs ? sa : (lhs < rhs ? sb : 0);
    }
    friend bool operator<(const QS3& x, const QS3& y) { return (x - y).sign() < 0; }

    double to_double() const { return a.get_d() + b.get_d() * std::sqrt(3.0); }
    std::string str() const {
        if (b == 0) return a.get_str();
        return a.get_str() + (b < 0 ? "-" : "+") + mpq_class(abs(b)).get_str() + "*sqrt3";
    }
};

template <>
inline ReferenceFrame<QS3> frame<QS3>() {
    const QS3 half(mpq_class(1, 2));
    const QS3 h3(mpq_class(0), mpq_class(1, 2));
    ReferenceFrame<QS3> f;
    f.w0 = {QS3(0), QS3(1)};
    f.u0 = {QS3(1), QS3(0)};
    f.w1 = {-h3, half};
    f.w2 = {h3, half};
    f.u1 = {half, h3};
    f.u2 = {-half, h3};
    return f;
}

} // namespace billiards
