#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace orbitwist {

/// Exact rational number over int64 with overflow-checked arithmetic.
/// Overflow throws instead of wrapping; all fixture computations stay far
/// below the limits, so a throw indicates a misuse, not a tuning problem.
class Rational {
  public:
    Rational() : num_(0), den_(1) {}
    Rational(std::int64_t n) : num_(n), den_(1) {}
    Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) { normalize(); }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_integer() const { return den_ == 1; }

    Rational operator-() const { return Rational(checked_neg(num_), den_, already_normal_tag{}); }

    friend Rational operator+(const Rational& a, const Rational& b) {
        std::int64_t g = std::gcd(a.den_, b.den_);
        std::int64_t bd = b.den_ / g;
        std::int64_t n = checked_add(checked_mul(a.num_, bd), checked_mul(b.num_, a.den_ / g));
        std::int64_t d = checked_mul(a.den_, bd);
        return Rational(n, d);
    }
    friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
    friend Rational operator*(const Rational& a, const Rational& b) {
        std::int64_t g1 = std::gcd(std::abs(a.num_), b.den_);
        std::int64_t g2 = std::gcd(std::abs(b.num_), a.den_);
        std::int64_t n = checked_mul(a.num_ / g1, b.num_ / g2);
        std::int64_t d = checked_mul(a.den_ / g2, b.den_ / g1);
        return Rational(n, d, already_normal_tag{});
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw std::domain_error("Rational: division by zero");
        return a * Rational(b.den_, b.num_);
    }

    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return (__int128)a.num_ * b.den_ < (__int128)b.num_ * a.den_;
    }
    friend bool operator<=(const Rational& a, const Rational& b) { return a < b || a == b; }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator>=(const Rational& a, const Rational& b) { return b <= a; }

    /// Integer floor.
    std::int64_t floor() const {
        std::int64_t q = num_ / den_;
        if (num_ % den_ != 0 && num_ < 0) --q;
        return q;
    }

    double to_double() const { return double(num_) / double(den_); }

    std::string str() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    static std::int64_t checked_add(std::int64_t a, std::int64_t b) {
        std::int64_t r;
        if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("Rational: add overflow");
        return r;
    }
    static std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
        std::int64_t r;
        if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("Rational: mul overflow");
        return r;
    }
    static std::int64_t checked_neg(std::int64_t a) {
        if (a == INT64_MIN) throw std::overflow_error("Rational: neg overflow");
        return -a;
    }

  private:
    struct already_normal_tag {};
    Rational(std::int64_t n, std::int64_t d, already_normal_tag) : num_(n), den_(d) {}

    void normalize() {
        if (den_ == 0) throw std::domain_error("Rational: zero denominator");
        if (den_ < 0) { num_ = checked_neg(num_); den_ = checked_neg(den_); }
        std::int64_t g = std::gcd(std::abs(num_), den_);
        if (g > 1) { num_ /= g; den_ /= g; }
        if (num_ == 0) den_ = 1;
    }

    std::int64_t num_;
    std::int64_t den_;
};

/// Gaussian rational a + b*i, the coefficient field of every exact module.
class GaussianRational {
  public:
    GaussianRational() = default;
    GaussianRational(std::int64_t n) : re_(n) {}
    GaussianRational(Rational re) : re_(re) {}
    GaussianRational(Rational re, Rational im) : re_(re), im_(im) {}

    static GaussianRational i() { return GaussianRational(Rational(0), Rational(1)); }

    const Rational& re() const { return re_; }
    const Rational& im() const { return im_; }
    bool is_zero() const { return re_.is_zero() && im_.is_zero(); }

    GaussianRational operator-() const { return GaussianRational(-re_, -im_); }
    friend GaussianRational operator+(const GaussianRational& a, const GaussianRational& b) {
        return GaussianRational(a.re_ + b.re_, a.im_ + b.im_);
    }
    friend GaussianRational operator-(const GaussianRational& a, const GaussianRational& b) {
        return GaussianRational(a.re_ - b.re_, a.im_ - b.im_);
    }
    friend GaussianRational operator*(const GaussianRational& a, const GaussianRational& b) {
        return GaussianRational(a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_);
    }
    friend GaussianRational operator/(const GaussianRational& a, const GaussianRational& b) {
        Rational n = b.re_ * b.re_ + b.im_ * b.im_;
        if (n.is_zero()) throw std::domain_error("GaussianRational: division by zero");
        return GaussianRational((a.re_ * b.re_ + a.im_ * b.im_) / n,
                                (a.im_ * b.re_ - a.re_ * b.im_) / n);
    }
    GaussianRational& operator+=(const GaussianRational& o) { return *this = *this + o; }
    GaussianRational& operator-=(const GaussianRational& o) { return *this = *this - o; }
    GaussianRational& operator*=(const GaussianRational& o) { return *this = *this * o; }

    friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }
    friend bool operator!=(const GaussianRational& a, const GaussianRational& b) { return !(a == b); }

    std::string str() const {
        if (im_.is_zero()) return re_.str();
        if (re_.is_zero()) return im_.str() + "i";
        return re_.str() + (im_ > Rational(0) ? "+" : "") + im_.str() + "i";
    }

  private:
    Rational re_;
    Rational im_;
};

/// Element of Q/Z; the exponent q of a root of unity e^{2*pi*i*q}.
/// Stored reduced into [0,1).
class QModZ {
  public:
    QModZ() : q_(0) {}
    explicit QModZ(Rational q) : q_(reduce(q)) {}
    QModZ(std::int64_t n, std::int64_t d) : q_(reduce(Rational(n, d))) {}

    const Rational& value() const { return q_; }
    bool is_zero() const { return q_.is_zero(); }

    friend QModZ operator+(QModZ a, QModZ b) { return QModZ(a.q_ + b.q_); }
    friend QModZ operator-(QModZ a, QModZ b) { return QModZ(a.q_ - b.q_); }
    QModZ operator-() const { return QModZ(-q_); }
    QModZ& operator+=(QModZ o) { return *this = *this + o; }
    QModZ& operator-=(QModZ o) { return *this = *this - o; }

    friend bool operator==(QModZ a, QModZ b) { return a.q_ == b.q_; }
    friend bool operator!=(QModZ a, QModZ b) { return !(a == b); }
    friend bool operator<(QModZ a, QModZ b) { return a.q_ < b.q_; }

    /// e^{2 pi i q} when it is a Gaussian rational, i.e. q a multiple of 1/4.
    bool is_quarter_integral() const { return q_.den() == 1 || q_.den() == 2 || q_.den() == 4; }
    GaussianRational exact_value() const {
        if (!is_quarter_integral())
            throw std::domain_error("QModZ: e^{2pi i q} not Gaussian rational for q=" + q_.str());
        std::int64_t k = q_.num() * (4 / q_.den());  // in {0,1,2,3}
        switch (k % 4) {
            case 0: return GaussianRational(1);
            case 1: return GaussianRational::i();
            case 2: return GaussianRational(-1);
            default: return -GaussianRational::i();
        }
    }

    std::string str() const { return q_.str(); }

  private:
    static Rational reduce(Rational q) { return q - Rational(q.floor()); }
    Rational q_;
};

}  // namespace orbitwist
