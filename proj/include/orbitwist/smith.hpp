#pragma once

#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace orbitwist {

/// Dense integer matrix with overflow-checked elementary operations.
class IntMatrix {
  public:
    IntMatrix() : rows_(0), cols_(0) {}
    IntMatrix(std::size_t r, std::size_t c) : rows_(r), cols_(c), a_(r * c, 0) {}

    static IntMatrix identity(std::size_t n) {
        IntMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::int64_t& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    std::int64_t at(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    void swap_rows(std::size_t i, std::size_t j) {
        if (i == j) return;
        for (std::size_t c = 0; c < cols_; ++c) std::swap(at(i, c), at(j, c));
    }
    void swap_cols(std::size_t i, std::size_t j) {
        if (i == j) return;
        for (std::size_t r = 0; r < rows_; ++r) std::swap(at(r, i), at(r, j));
    }
    void scale_row(std::size_t i, std::int64_t s) {
        for (std::size_t c = 0; c < cols_; ++c) at(i, c) = mul(at(i, c), s);
    }
    void scale_col(std::size_t j, std::int64_t s) {
        for (std::size_t r = 0; r < rows_; ++r) at(r, j) = mul(at(r, j), s);
    }
    /// row_i += q * row_k
    void add_row(std::size_t i, std::size_t k, std::int64_t q) {
        for (std::size_t c = 0; c < cols_; ++c) at(i, c) = add(at(i, c), mul(q, at(k, c)));
    }
    /// col_j += q * col_k
    void add_col(std::size_t j, std::size_t k, std::int64_t q) {
        for (std::size_t r = 0; r < rows_; ++r) at(r, j) = add(at(r, j), mul(q, at(r, k)));
    }

    IntMatrix operator*(const IntMatrix& o) const {
        if (cols_ != o.rows_) throw std::invalid_argument("IntMatrix: shape mismatch");
        IntMatrix r(rows_, o.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                std::int64_t v = at(i, k);
                if (v == 0) continue;
                for (std::size_t j = 0; j < o.cols_; ++j)
                    r.at(i, j) = add(r.at(i, j), mul(v, o.at(k, j)));
            }
        return r;
    }

    static std::int64_t add(std::int64_t a, std::int64_t b) {
        std::int64_t r;
        if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("IntMatrix: add overflow");
        return r;
    }
    static std::int64_t mul(std::int64_t a, std::int64_t b) {
        std::int64_t r;
        if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("IntMatrix: mul overflow");
        return r;
    }

  private:
    std::size_t rows_, cols_;
    std::vector<std::int64_t> a_;
};

/// Smith normal form U*A*V = D with unimodular U, V. Also tracks the
/// inverses so kernels and cokernel generators can be read off directly.
struct SmithResult {
    IntMatrix d;      // diagonal (rows x cols of A)
    IntMatrix u;      // rows x rows
    IntMatrix u_inv;  // rows x rows
    IntMatrix v;      // cols x cols
    IntMatrix v_inv;  // cols x cols
    std::vector<std::int64_t> divisors;  // nonzero diagonal entries
};

inline SmithResult smith_normal_form(IntMatrix a, bool track_u = true, bool track_v = true) {
    std::size_t m = a.rows(), n = a.cols();
    SmithResult r{a,
                  track_u ? IntMatrix::identity(m) : IntMatrix(),
                  track_u ? IntMatrix::identity(m) : IntMatrix(),
                  track_v ? IntMatrix::identity(n) : IntMatrix(),
                  track_v ? IntMatrix::identity(n) : IntMatrix(),
                  {}};
    IntMatrix& d = r.d;

    auto row_op = [&](std::size_t i, std::size_t k, std::int64_t q) {
        d.add_row(i, k, q);
        if (track_u) {
            r.u.add_row(i, k, q);
            r.u_inv.add_col(k, i, -q);
        }
    };
    auto col_op = [&](std::size_t j, std::size_t k, std::int64_t q) {
        d.add_col(j, k, q);
        if (track_v) {
            r.v.add_col(j, k, q);
            r.v_inv.add_row(k, j, -q);
        }
    };
    auto row_swap = [&](std::size_t i, std::size_t j) {
        d.swap_rows(i, j);
        if (track_u) {
            r.u.swap_rows(i, j);
            r.u_inv.swap_cols(i, j);
        }
    };
    auto col_swap = [&](std::size_t i, std::size_t j) {
        d.swap_cols(i, j);
        if (track_v) {
            r.v.swap_cols(i, j);
            r.v_inv.swap_rows(i, j);
        }
    };
    auto row_negate = [&](std::size_t i) {
        d.scale_row(i, -1);
        if (track_u) {
            r.u.scale_row(i, -1);
            r.u_inv.scale_col(i, -1);
        }
    };

    std::size_t k = 0;
    while (k < m && k < n) {
        // find a nonzero pivot of least magnitude in the trailing block
        std::size_t pi = k, pj = k;
        std::int64_t best = 0;
        for (std::size_t i = k; i < m; ++i)
            for (std::size_t j = k; j < n; ++j) {
                std::int64_t v = std::llabs(d.at(i, j));
                if (v != 0 && (best == 0 || v < best)) {
                    best = v;
                    pi = i;
                    pj = j;
                }
            }
        if (best == 0) break;
        row_swap(k, pi);
        col_swap(k, pj);

        bool clean = false;
        while (!clean) {
            clean = true;
            for (std::size_t i = k + 1; i < m; ++i) {
                std::int64_t q = d.at(i, k) / d.at(k, k);
                if (q != 0) row_op(i, k, -q);
                if (d.at(i, k) != 0) {
                    row_swap(k, i);  // smaller remainder becomes the pivot
                    clean = false;
                }
            }
            for (std::size_t j = k + 1; j < n; ++j) {
                std::int64_t q = d.at(k, j) / d.at(k, k);
                if (q != 0) col_op(j, k, -q);
                if (d.at(k, j) != 0) {
                    col_swap(k, j);
                    clean = false;
                }
            }
        }
        if (d.at(k, k) < 0) row_negate(k);
        ++k;
    }

    // enforce divisibility d_k | d_{k+1}
    for (std::size_t i = 0; i + 1 < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            if (d.at(j, j) % d.at(i, i) == 0) continue;
            // fold d_j into position i and redo the local elimination
            col_op(i, j, 1);
            bool clean = false;
            while (!clean) {
                clean = true;
                std::int64_t q = d.at(j, i) / d.at(i, i);
                if (q != 0) row_op(j, i, -q);
                if (d.at(j, i) != 0) {
                    row_swap(i, j);
                    clean = false;
                    continue;
                }
                q = d.at(i, j) / d.at(i, i);
                if (q != 0) col_op(j, i, -q);
                if (d.at(i, j) != 0) {
                    col_swap(i, j);
                    clean = false;
                }
            }
            if (d.at(i, i) < 0) row_negate(i);
            if (d.at(j, j) < 0) row_negate(j);
        }
    }

    for (std::size_t i = 0; i < k; ++i) r.divisors.push_back(d.at(i, i));
    return r;
}

/// Solve A x = b over the integers; returns false when no solution exists.
inline bool solve_integer(const SmithResult& s, const std::vector<std::int64_t>& b,
                          std::vector<std::int64_t>& x) {
    std::size_t m = s.d.rows(), n = s.d.cols();
    if (b.size() != m) throw std::invalid_argument("solve_integer: size mismatch");
    std::vector<std::int64_t> ub(m, 0);
    for (std::size_t i = 0; i < m; ++i) {
        std::int64_t acc = 0;
        for (std::size_t j = 0; j < m; ++j)
            acc = IntMatrix::add(acc, IntMatrix::mul(s.u.at(i, j), b[j]));
        ub[i] = acc;
    }
    std::vector<std::int64_t> y(n, 0);
    std::size_t rank = s.divisors.size();
    for (std::size_t i = 0; i < m; ++i) {
        if (i < rank) {
            if (ub[i] % s.divisors[i] != 0) return false;
            y[i] = ub[i] / s.divisors[i];
        } else if (ub[i] != 0) {
            return false;
        }
    }
    x.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::int64_t acc = 0;
        for (std::size_t j = 0; j < n; ++j)
            acc = IntMatrix::add(acc, IntMatrix::mul(s.v.at(i, j), y[j]));
        x[i] = acc;
    }
    return true;
}

}  // namespace orbitwist
