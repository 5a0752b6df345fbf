#include "billiards/scalar.hpp"

#include <charconv>
#include <cstdlib>
#include <stdexcept>

namespace billiards {

namespace {
thread_local mpfr_prec_t g_precision = 128;
}

mpfr_prec_t BigFloat::working_precision() { return g_precision; }

void BigFloat::set_working_precision(mpfr_prec_t bits) {
    if (bits < MPFR_PREC_MIN || bits > MPFR_PREC_MAX)
        throw std::invalid_argument("precision out of range");
    g_precision = bits;
}

BigFloat::BigFloat() {
    mpfr_init2(v_, g_precision);
    mpfr_set_zero(v_, 1);
}

BigFloat::BigFloat(double d) {
    mpfr_init2(v_, g_precision);
    mpfr_set_d(v_, d, MPFR_RNDN);
}

BigFloat::BigFloat(int i) {
    mpfr_init2(v_, g_precision);
    mpfr_set_si(v_, i, MPFR_RNDN);
}

BigFloat::BigFloat(long i) {
    mpfr_init2(v_, g_precision);
    mpfr_set_si(v_, i, MPFR_RNDN);
}

BigFloat::BigFloat(const std::string& decimal) {
    mpfr_init2(v_, g_precision);
    char* end = nullptr;
    mpfr_strtofr(v_, decimal.c_str(), &end, 10, MPFR_RNDN);
    if (decimal.empty() || *end != '\0') {
        mpfr_clear(v_);
        throw std::invalid_argument("not a decimal number: " + decimal);
    }
}

BigFloat::BigFloat(const BigFloat& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
}

BigFloat::BigFloat(BigFloat&& o) noexcept {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_swap(v_, o.v_);
}

BigFloat& BigFloat::operator=(const BigFloat& o) {
    if (this != &o) {
        mpfr_set_prec(v_, mpfr_get_prec(o.v_));
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
}

BigFloat& BigFloat::operator=(BigFloat&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
}

BigFloat::~BigFloat() { mpfr_clear(v_); }

std::string BigFloat::to_string() const {
    if (mpfr_nan_p(v_)) return "nan";
    if (mpfr_inf_p(v_)) return mpfr_sgn(v_) > 0 ? "inf" : "-inf";
    if (mpfr_zero_p(v_)) return mpfr_signbit(v_) ? "-0" : "0";
    mpfr_exp_t exp = 0;
    // n = 0 asks MPFR for enough digits to round-trip exactly.
    char* raw = mpfr_get_str(nullptr, &exp, 10, 0, v_, MPFR_RNDN);
    std::string digits(raw);
    mpfr_free_str(raw);
    std::string sign;
    if (digits[0] == '-') {
        sign = "-";
        digits.erase(0, 1);
    }
    while (digits.size() > 1 && digits.back() == '0') digits.pop_back();
    std::string out = sign + digits.substr(0, 1);
    if (digits.size() > 1) out += "." + digits.substr(1);
    if (exp - 1 != 0) out += "e" + std::to_string(static_cast<long>(exp - 1));
    return out;
}

BigFloat& BigFloat::operator+=(const BigFloat& o) {
    mpfr_add(v_, v_, o.v_, MPFR_RNDN);
    return *this;
}
BigFloat& BigFloat::operator-=(const BigFloat& o) {
    mpfr_sub(v_, v_, o.v_, MPFR_RNDN);
    return *this;
}
BigFloat& BigFloat::operator*=(const BigFloat& o) {
    mpfr_mul(v_, v_, o.v_, MPFR_RNDN);
    return *this;
}
BigFloat& BigFloat::operator/=(const BigFloat& o) {
    mpfr_div(v_, v_, o.v_, MPFR_RNDN);
    return *this;
}

BigFloat BigFloat::operator-() const {
    BigFloat r(*this);
    mpfr_neg(r.v_, r.v_, MPFR_RNDN);
    return r;
}

std::partial_ordering operator<=>(const BigFloat& a, const BigFloat& b) {
    if (mpfr_unordered_p(a.v_, b.v_)) return std::partial_ordering::unordered;
    int c = mpfr_cmp(a.v_, b.v_);
    if (c < 0) return std::partial_ordering::less;
    if (c > 0) return std::partial_ordering::greater;
    return std::partial_ordering::equivalent;
}

PrecisionScope::PrecisionScope(mpfr_prec_t bits) : saved_(BigFloat::working_precision()) {
    BigFloat::set_working_precision(bits);
}
PrecisionScope::~PrecisionScope() { BigFloat::set_working_precision(saved_); }

BigFloat sqrt(const BigFloat& x) {
    BigFloat r;
    mpfr_sqrt(r.get(), x.get(), MPFR_RNDN);
    return r;
}

BigFloat abs(const BigFloat& x) {
    BigFloat r;
    mpfr_abs(r.get(), x.get(), MPFR_RNDN);
    return r;
}

double Num<double>::parse(const std::string& s) {
    double v = 0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (!s.empty() && s[0] == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) throw std::invalid_argument("not a decimal number: " + s);
    return v;
}

std::string Num<double>::str(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

BigFloat Num<BigFloat>::machine_eps() {
    BigFloat e(1);
    mpfr_mul_2si(e.get(), e.get(), 1 - static_cast<long>(BigFloat::working_precision()), MPFR_RNDN);
    return e;
}

} // namespace billiards
