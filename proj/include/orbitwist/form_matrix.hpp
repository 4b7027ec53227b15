#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "orbitwist/graded_form.hpp"

namespace orbitwist {

/// Square matrix of graded forms acting on a super vector space C^{p|q},
/// even block first. Multiplication is plain row-by-column with wedge
/// products of the entries; supertrace is trace(even) - trace(odd).
class FormMatrix {
  public:
    FormMatrix() : p_(0), q_(0) {}
    FormMatrix(ChartPtr chart, std::size_t p, std::size_t q)
        : chart_(std::move(chart)), p_(p), q_(q),
          entries_((p + q) * (p + q), GradedForm(chart_)) {}

    static FormMatrix identity(ChartPtr chart, std::size_t p, std::size_t q) {
        FormMatrix m(chart, p, q);
        for (std::size_t i = 0; i < p + q; ++i) m.at(i, i) = GradedForm::one(m.chart_);
        return m;
    }

    std::size_t p() const { return p_; }
    std::size_t q() const { return q_; }
    std::size_t dim() const { return p_ + q_; }
    const ChartPtr& chart() const { return chart_; }
    bool block_odd(std::size_t i) const { return i >= p_; }

    GradedForm& at(std::size_t i, std::size_t j) { return entries_[i * dim() + j]; }
    const GradedForm& at(std::size_t i, std::size_t j) const { return entries_[i * dim() + j]; }

    bool is_zero() const {
        for (auto& e : entries_)
            if (!e.is_zero()) return false;
        return true;
    }

    friend FormMatrix operator+(const FormMatrix& a, const FormMatrix& b) {
        a.check_compat(b);
        FormMatrix r = a;
        for (std::size_t i = 0; i < r.entries_.size(); ++i) r.entries_[i] += b.entries_[i];
        return r;
    }
    friend FormMatrix operator-(const FormMatrix& a, const FormMatrix& b) {
        a.check_compat(b);
        FormMatrix r = a;
        for (std::size_t i = 0; i < r.entries_.size(); ++i) r.entries_[i] -= b.entries_[i];
        return r;
    }
    FormMatrix operator-() const {
        FormMatrix r = *this;
        for (auto& e : r.entries_) e = -e;
        return r;
    }
    friend FormMatrix operator*(const FormMatrix& a, const FormMatrix& b) {
        a.check_compat(b);
        FormMatrix r(a.chart_, a.p_, a.q_);
        for (std::size_t i = 0; i < a.dim(); ++i)
            for (std::size_t k = 0; k < a.dim(); ++k) {
                if (a.at(i, k).is_zero()) continue;
                for (std::size_t j = 0; j < a.dim(); ++j) {
                    if (b.at(k, j).is_zero()) continue;
                    r.at(i, j) += wedge(a.at(i, k), b.at(k, j));
                }
            }
        return r;
    }

    friend bool operator==(const FormMatrix& a, const FormMatrix& b) {
        return a.p_ == b.p_ && a.q_ == b.q_ && a.entries_ == b.entries_;
    }
    friend bool operator!=(const FormMatrix& a, const FormMatrix& b) { return !(a == b); }

    /// Left multiplication by a scalar form.
    FormMatrix scalar_wedge(const GradedForm& s) const {
        FormMatrix r(chart_, p_, q_);
        for (std::size_t i = 0; i < entries_.size(); ++i) r.entries_[i] = wedge(s, entries_[i]);
        return r;
    }

    FormMatrix d() const {
        FormMatrix r(chart_, p_, q_);
        for (std::size_t i = 0; i < entries_.size(); ++i) r.entries_[i] = exterior_d(entries_[i]);
        return r;
    }

    void check_compat(const FormMatrix& o) const {
        if (p_ != o.p_ || q_ != o.q_) throw std::invalid_argument("FormMatrix: shape mismatch");
    }

  private:
    ChartPtr chart_;
    std::size_t p_, q_;
    std::vector<GradedForm> entries_;
};

/// Supertrace. On even supermatrices this is trace(even block) minus
/// trace(odd block); the odd-parity component of an odd-block diagonal
/// entry enters with a plus sign, which is what makes the graded cyclicity
/// str(MN) = (-1)^{|M||N|} str(NM) hold for all homogeneous matrices.
inline GradedForm supertrace(const FormMatrix& m) {
    GradedForm r(m.chart());
    for (std::size_t i = 0; i < m.dim(); ++i) {
        if (!m.block_odd(i)) {
            r += m.at(i, i);
        } else {
            r -= m.at(i, i).parity_part(0);
            r += m.at(i, i).parity_part(1);
        }
    }
    return r;
}

/// exp of a matrix whose entries all lie in the positive-degree ideal
/// (no component of form degree 0 and Grassmann degree 0). The Taylor sum
/// terminates because such entries are nilpotent.
inline FormMatrix exp_positive_degree(const FormMatrix& m) {
    for (std::size_t i = 0; i < m.dim(); ++i)
        for (std::size_t j = 0; j < m.dim(); ++j)
            if (!m.at(i, j).component(MonoKey{}).is_zero())
                throw std::domain_error("exp_positive_degree: non-nilpotent degree-0 part");
    std::size_t order = m.chart()->n() + m.chart()->k();
    FormMatrix acc = FormMatrix::identity(m.chart(), m.p(), m.q());
    FormMatrix power = acc;
    Rational fact(1);
    for (std::size_t j = 1; j <= order; ++j) {
        power = power * m;
        if (power.is_zero()) break;
        fact *= Rational(std::int64_t(j));
        FormMatrix term = power;
        GaussianRational inv(Rational(1) / fact);
        for (std::size_t i = 0; i < m.dim(); ++i)
            for (std::size_t l = 0; l < m.dim(); ++l) term.at(i, l) = term.at(i, l) * inv;
        acc = acc + term;
    }
    return acc;
}

/// exp of a scalar form in the positive-degree ideal, as a 1x1 convenience.
inline GradedForm exp_positive_degree(const GradedForm& s) {
    FormMatrix m(s.chart(), 1, 0);
    m.at(0, 0) = s;
    return exp_positive_degree(m).at(0, 0);
}

}  // namespace orbitwist
