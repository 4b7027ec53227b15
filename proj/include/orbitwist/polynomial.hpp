#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "orbitwist/rational.hpp"

namespace orbitwist {

/// Sparse multivariate polynomial over the Gaussian rationals.
/// Exponent vectors are fixed-length (one slot per chart variable);
/// total degree is capped so runaway products fail fast.
class Polynomial {
  public:
    static constexpr int kDegreeCap = 32;

    using Monomial = std::vector<std::uint8_t>;

    Polynomial() : nvars_(0) {}
    explicit Polynomial(std::size_t nvars) : nvars_(nvars) {}

    static Polynomial constant(std::size_t nvars, const GaussianRational& c) {
        Polynomial p(nvars);
        if (!c.is_zero()) p.terms_[Monomial(nvars, 0)] = c;
        return p;
    }
    static Polynomial variable(std::size_t nvars, std::size_t idx) {
        Polynomial p(nvars);
        Monomial m(nvars, 0);
        m.at(idx) = 1;
        p.terms_[m] = GaussianRational(1);
        return p;
    }

    std::size_t nvars() const { return nvars_; }
    bool is_zero() const { return terms_.empty(); }
    const std::map<Monomial, GaussianRational>& terms() const { return terms_; }

    GaussianRational constant_term() const {
        auto it = terms_.find(Monomial(nvars_, 0));
        return it == terms_.end() ? GaussianRational() : it->second;
    }

    bool is_constant() const {
        return terms_.empty() ||
               (terms_.size() == 1 && terms_.begin()->first == Monomial(nvars_, 0));
    }

    int total_degree() const {
        int d = 0;
        for (auto& [m, c] : terms_) d = std::max(d, degree_of(m));
        return d;
    }

    void add_term(const Monomial& m, const GaussianRational& c) {
        if (m.size() != nvars_) throw std::invalid_argument("Polynomial: bad monomial length");
        if (degree_of(m) > kDegreeCap) throw std::domain_error("Polynomial: degree cap exceeded");
        auto it = terms_.find(m);
        if (it == terms_.end()) {
            if (!c.is_zero()) terms_.emplace(m, c);
        } else {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
        a.check_compat(b);
        Polynomial r = a;
        for (auto& [m, c] : b.terms_) r.add_term(m, c);
        return r;
    }
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
        a.check_compat(b);
        Polynomial r = a;
        for (auto& [m, c] : b.terms_) r.add_term(m, -c);
        return r;
    }
    Polynomial operator-() const {
        Polynomial r(nvars_);
        for (auto& [m, c] : terms_) r.terms_[m] = -c;
        return r;
    }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        a.check_compat(b);
        Polynomial r(a.nvars_);
        for (auto& [ma, ca] : a.terms_)
            for (auto& [mb, cb] : b.terms_) {
                Monomial m(a.nvars_);
                for (std::size_t i = 0; i < a.nvars_; ++i) {
                    int e = int(ma[i]) + int(mb[i]);
                    if (e > kDegreeCap) throw std::domain_error("Polynomial: degree cap exceeded");
                    m[i] = std::uint8_t(e);
                }
                r.add_term(m, ca * cb);
            }
        return r;
    }
    Polynomial operator*(const GaussianRational& c) const {
        Polynomial r(nvars_);
        if (c.is_zero()) return r;
        for (auto& [m, k] : terms_) r.terms_[m] = k * c;
        return r;
    }
    Polynomial& operator+=(const Polynomial& o) { return *this = *this + o; }
    Polynomial& operator-=(const Polynomial& o) { return *this = *this - o; }

    friend bool operator==(const Polynomial& a, const Polynomial& b) {
        return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
    }
    friend bool operator!=(const Polynomial& a, const Polynomial& b) { return !(a == b); }

    Polynomial derivative(std::size_t var) const {
        Polynomial r(nvars_);
        for (auto& [m, c] : terms_) {
            if (m[var] == 0) continue;
            Monomial d = m;
            d[var] -= 1;
            r.add_term(d, c * GaussianRational(m[var]));
        }
        return r;
    }

    /// Antiderivative in `var` with zero constant term in that variable.
    Polynomial antiderivative(std::size_t var) const {
        Polynomial r(nvars_);
        for (auto& [m, c] : terms_) {
            Monomial d = m;
            d[var] += 1;
            if (degree_of(d) > kDegreeCap) throw std::domain_error("Polynomial: degree cap exceeded");
            r.add_term(d, c * GaussianRational(Rational(1, m[var] + 1)));
        }
        return r;
    }

    /// Substitute each variable by the given polynomial (in a target variable space).
    Polynomial substitute(const std::vector<Polynomial>& images) const {
        if (images.size() != nvars_) throw std::invalid_argument("Polynomial: arity mismatch");
        std::size_t out_vars = images.empty() ? 0 : images[0].nvars();
        Polynomial r(out_vars);
        for (auto& [m, c] : terms_) {
            Polynomial t = Polynomial::constant(out_vars, c);
            for (std::size_t i = 0; i < nvars_; ++i)
                for (int k = 0; k < m[i]; ++k) t = t * images[i];
            r += t;
        }
        return r;
    }

    /// Evaluate at a rational point.
    GaussianRational evaluate(const std::vector<GaussianRational>& point) const {
        if (point.size() != nvars_) throw std::invalid_argument("Polynomial: arity mismatch");
        GaussianRational acc;
        for (auto& [m, c] : terms_) {
            GaussianRational t = c;
            for (std::size_t i = 0; i < nvars_; ++i)
                for (int k = 0; k < m[i]; ++k) t *= point[i];
            acc += t;
        }
        return acc;
    }

    std::string str(const std::vector<std::string>& names) const {
        if (terms_.empty()) return "0";
        std::string out;
        for (auto& [m, c] : terms_) {
            if (!out.empty()) out += " + ";
            out += "(" + c.str() + ")";
            for (std::size_t i = 0; i < nvars_; ++i) {
                if (m[i] == 0) continue;
                out += "*" + names[i];
                if (m[i] > 1) out += "^" + std::to_string(int(m[i]));
            }
        }
        return out;
    }

    static int degree_of(const Monomial& m) {
        int d = 0;
        for (auto e : m) d += e;
        return d;
    }

  private:
    void check_compat(const Polynomial& o) const {
        if (nvars_ != o.nvars_) throw std::invalid_argument("Polynomial: variable count mismatch");
    }

    std::size_t nvars_;
    std::map<Monomial, GaussianRational> terms_;
};

}  // namespace orbitwist
