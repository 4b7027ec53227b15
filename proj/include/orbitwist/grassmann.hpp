#pragma once

#include <bit>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

#include "orbitwist/rational.hpp"

namespace orbitwist {

/// Element of the Grassmann algebra on k anticommuting generators eta_i,
/// with Gaussian-rational coefficients. Keys are generator bitmasks.
class GrassmannValue {
  public:
    GrassmannValue() = default;

    static GrassmannValue scalar(const GaussianRational& c) {
        GrassmannValue v;
        v.add(0, c);
        return v;
    }
    static GrassmannValue generator(std::size_t i) {
        GrassmannValue v;
        v.add(std::uint64_t(1) << i, GaussianRational(1));
        return v;
    }

    bool is_zero() const { return terms_.empty(); }
    const std::map<std::uint64_t, GaussianRational>& terms() const { return terms_; }

    GaussianRational coeff(std::uint64_t mask) const {
        auto it = terms_.find(mask);
        return it == terms_.end() ? GaussianRational() : it->second;
    }
    GaussianRational body() const { return coeff(0); }

    /// The nilpotent part (all terms with at least one generator).
    GrassmannValue soul() const {
        GrassmannValue v = *this;
        v.terms_.erase(0);
        return v;
    }

    bool is_nilpotent() const { return body().is_zero(); }
    bool is_even() const {
        for (auto& [m, c] : terms_)
            if (std::popcount(m) & 1) return false;
        return true;
    }
    bool is_odd() const {
        for (auto& [m, c] : terms_)
            if (!(std::popcount(m) & 1)) return false;
        return true;
    }
    GrassmannValue parity_part(int par) const {
        GrassmannValue v;
        for (auto& [m, c] : terms_)
            if ((std::popcount(m) & 1) == par) v.add(m, c);
        return v;
    }

    void add(std::uint64_t mask, const GaussianRational& c) {
        if (c.is_zero()) return;
        auto it = terms_.find(mask);
        if (it == terms_.end()) {
            terms_.emplace(mask, c);
        } else {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    friend GrassmannValue operator+(const GrassmannValue& a, const GrassmannValue& b) {
        GrassmannValue r = a;
        for (auto& [m, c] : b.terms_) r.add(m, c);
        return r;
    }
    friend GrassmannValue operator-(const GrassmannValue& a, const GrassmannValue& b) {
        GrassmannValue r = a;
        for (auto& [m, c] : b.terms_) r.add(m, -c);
        return r;
    }
    GrassmannValue operator-() const {
        GrassmannValue r;
        for (auto& [m, c] : terms_) r.add(m, -c);
        return r;
    }
    friend GrassmannValue operator*(const GrassmannValue& a, const GrassmannValue& b) {
        GrassmannValue r;
        for (auto& [ma, ca] : a.terms_)
            for (auto& [mb, cb] : b.terms_) {
                if (ma & mb) continue;
                r.add(ma | mb, merge_sign(ma, mb) == 1 ? ca * cb : -(ca * cb));
            }
        return r;
    }
    GrassmannValue operator*(const GaussianRational& c) const {
        GrassmannValue r;
        for (auto& [m, k] : terms_) r.add(m, k * c);
        return r;
    }
    GrassmannValue& operator+=(const GrassmannValue& o) { return *this = *this + o; }
    GrassmannValue& operator-=(const GrassmannValue& o) { return *this = *this - o; }
    GrassmannValue& operator*=(const GrassmannValue& o) { return *this = *this * o; }

    friend bool operator==(const GrassmannValue& a, const GrassmannValue& b) {
        return a.terms_ == b.terms_;
    }
    friend bool operator!=(const GrassmannValue& a, const GrassmannValue& b) { return !(a == b); }

    /// Taylor expansion of exp for a purely nilpotent argument.
    static GrassmannValue exp_nilpotent(const GrassmannValue& nu) {
        if (!nu.is_nilpotent())
            throw std::domain_error("GrassmannValue: exp of non-nilpotent value");
        GrassmannValue acc = scalar(GaussianRational(1));
        GrassmannValue power = acc;
        Rational fact(1);
        for (int j = 1; j <= 64; ++j) {
            power = power * nu;
            if (power.is_zero()) break;
            fact *= Rational(j);
            acc += power * GaussianRational(Rational(1) / fact);
        }
        return acc;
    }

    static int merge_sign(std::uint64_t a, std::uint64_t b) {
        int inv = 0;
        for (std::uint64_t m = b; m;) {
            int i = std::countr_zero(m);
            m &= m - 1;
            inv += std::popcount(a >> (i + 1));
        }
        return (inv & 1) ? -1 : 1;
    }

    std::string str(const std::string& gen = "e") const {
        if (terms_.empty()) return "0";
        std::string out;
        for (auto& [m, c] : terms_) {
            if (!out.empty()) out += " + ";
            out += "(" + c.str() + ")";
            for (std::uint64_t w = m; w;) {
                int i = std::countr_zero(w);
                w &= w - 1;
                out += "*" + gen + std::to_string(i + 1);
            }
        }
        return out;
    }

  private:
    std::map<std::uint64_t, GaussianRational> terms_;
};

}  // namespace orbitwist
