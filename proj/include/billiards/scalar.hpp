#pragma once

#include <mpfr.h>

#include <cmath>
#include <compare>
#include <string>

namespace billiards {

// Arbitrary-precision float backed by MPFR. New values take the
// thread-local working precision; copies keep the precision of their source.
class BigFloat {
public:
    static mpfr_prec_t working_precision();
    static void set_working_precision(mpfr_prec_t bits);

    BigFloat();
    BigFloat(double d);
    BigFloat(int i);
    BigFloat(long i);
    explicit BigFloat(const std::string& decimal);
    BigFloat(const BigFloat& o);
    BigFloat(BigFloat&& o) noexcept;
    BigFloat& operator=(const BigFloat& o);
    BigFloat& operator=(BigFloat&& o) noexcept;
    ~BigFloat();

    mpfr_srcptr get() const { return v_; }
    mpfr_ptr get() { return v_; }
    mpfr_prec_t precision() const { return mpfr_get_prec(v_); }

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    std::string to_string() const;

    BigFloat& operator+=(const BigFloat& o);
    BigFloat& operator-=(const BigFloat& o);
    BigFloat& operator*=(const BigFloat& o);
    BigFloat& operator/=(const BigFloat& o);

    friend BigFloat operator+(BigFloat a, const BigFloat& b) { return a += b; }
    friend BigFloat operator-(BigFloat a, const BigFloat& b) { return a -= b; }
    friend BigFloat operator*(BigFloat a, const BigFloat& b) { return a *= b; }
    friend BigFloat operator/(BigFloat a, const BigFloat& b) { return a /= b; }
    BigFloat operator-() const;

    friend bool operator==(const BigFloat& a, const BigFloat& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
    friend std::partial_ordering operator<=>(const BigFloat& a, const BigFloat& b);

private:
    mpfr_t v_;
};

// RAII guard for the working precision of the current thread.
class PrecisionScope {
public:
    explicit PrecisionScope(mpfr_prec_t bits);
    ~PrecisionScope();
    PrecisionScope(const PrecisionScope&) = delete;
    PrecisionScope& operator=(const PrecisionScope&) = delete;

private:
    mpfr_prec_t saved_;
};

BigFloat sqrt(const BigFloat& x);
BigFloat abs(const BigFloat& x);
inline double sqrt(double x) { return std::sqrt(x); }
inline double abs(double x) { return std::fabs(x); }

template <class R>
struct Num;

template <>
struct Num<double> {
    static constexpr const char* name = "double";
    static double parse(const std::string& s);
    static std::string str(double x);
    static double to_double(double x) { return x; }
    static int bits() { return 53; }
    static double machine_eps() { return 0x1p-52; }
    static bool finite(double x) { return std::isfinite(x); }
};

template <>
struct Num<BigFloat> {
    static constexpr const char* name = "bigfloat";
    static BigFloat parse(const std::string& s) { return BigFloat(s); }
    static std::string str(const BigFloat& x) { return x.to_string(); }
    static double to_double(const BigFloat& x) { return x.to_double(); }
    static int bits() { return static_cast<int>(BigFloat::working_precision()); }
    static BigFloat machine_eps();
    static bool finite(const BigFloat& x) { return mpfr_number_p(x.get()) != 0; }
};

template <class R>
R max_of(const R& a, const R& b) { return a < b ? b : a; }
template <class R>
R min_of(const R& a, const R& b) { return b < a ? b : a; }

} // namespace billiards
