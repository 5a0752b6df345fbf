#pragma once

#include "billiards/errors.hpp"
#include "billiards/scalar.hpp"

namespace billiards {

template <class R>
struct Vec2 {
    R x{0};
    R y{0};

    Vec2() = default;
    Vec2(R x_, R y_) : x(std::move(x_)), y(std::move(y_)) {}

    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    Vec2& operator*=(const R& s) { x *= s; y *= s; return *this; }

    friend Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
    friend Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
    friend Vec2 operator*(Vec2 a, const R& s) { return a *= s; }
    friend Vec2 operator*(const R& s, Vec2 a) { return a *= s; }
    friend Vec2 operator/(const Vec2& a, const R& s) { return Vec2(a.x / s, a.y / s); }
    Vec2 operator-() const { return Vec2(-x, -y); }
    friend bool operator==(const Vec2& a, const Vec2& b) { return a.x == b.x && a.y == b.y; }
};

template <class R>
R dot(const Vec2<R>& a, const Vec2<R>& b) { return a.x * b.x + a.y * b.y; }

template <class R>
R cross(const Vec2<R>& a, const Vec2<R>& b) { return a.x * b.y - a.y * b.x; }

template <class R>
R norm2(const Vec2<R>& a) { return dot(a, a); }

template <class R>
R norm(const Vec2<R>& a) { return sqrt(norm2(a)); }

// Orthogonal projection of z onto the line spanned by w.
template <class R>
Vec2<R> project(const Vec2<R>& w, const Vec2<R>& z) {
    R ww = norm2(w);
    if (ww == R(0)) throw Error(ErrorKind::ZeroDirection, "projection onto the zero vector");
    return w * (dot(z, w) / ww);
}

template <class R>
struct ReferenceFrame {
    Vec2<R> w0, u0, w1, w2, u1, u2;
};

// w0 is vertical, w1 and w2 are the arms at 60 degrees on either side of it;
// u_k is a unit normal of w_k.
template <class R>
ReferenceFrame<R> frame() {
    const R half = R(1) / R(2);
    const R h3 = sqrt(R(3)) / R(2);
    ReferenceFrame<R> f;
    f.w0 = {R(0), R(1)};
    f.u0 = {R(1), R(0)};
    f.w1 = {-h3, half};
    f.w2 = {h3, half};
    f.u1 = {half, h3};
    f.u2 = {-half, h3};
    return f;
}

template <class R>
Vec2<double> to_double(const Vec2<R>& v) {
    return {Num<R>::to_double(v.x), Num<R>::to_double(v.y)};
}

template <class R>
Vec2<R> from_double(const Vec2<double>& v) {
    return {R(v.x), R(v.y)};
}

} // namespace billiards
