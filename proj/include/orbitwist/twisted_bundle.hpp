#pragma once

#include <Eigen/Dense>
#include <complex>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "orbitwist/deligne.hpp"
#include "orbitwist/form_matrix.hpp"

namespace orbitwist {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

inline Complex unit_phase(QModZ q) {
    return std::polar(1.0, 2.0 * M_PI * q.value().to_double());
}

struct SuperDim {
    int p = 0;
    int q = 0;
    int total() const { return p + q; }
    bool operator==(const SuperDim& o) const { return p == o.p && q == o.q; }
};

inline Complex numeric_supertrace(const CMatrix& m, SuperDim d) {
    Complex s = 0;
    for (int i = 0; i < d.p; ++i) s += m(i, i);
    for (int i = d.p; i < d.total(); ++i) s -= m(i, i);
    return s;
}

/// Exact matrix over the Gaussian rationals, used wherever Tier-C identities
/// are asserted with no tolerance.
class ExactMatrix {
  public:
    ExactMatrix() : r_(0), c_(0) {}
    ExactMatrix(std::size_t r, std::size_t c) : r_(r), c_(c), a_(r * c) {}

    static ExactMatrix identity(std::size_t n) {
        ExactMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = GaussianRational(1);
        return m;
    }

    std::size_t rows() const { return r_; }
    std::size_t cols() const { return c_; }
    GaussianRational& at(std::size_t i, std::size_t j) { return a_[i * c_ + j]; }
    const GaussianRational& at(std::size_t i, std::size_t j) const { return a_[i * c_ + j]; }

    friend ExactMatrix operator*(const ExactMatrix& x, const ExactMatrix& y) {
        if (x.c_ != y.r_) throw std::invalid_argument("ExactMatrix: shape mismatch");
        ExactMatrix r(x.r_, y.c_);
        for (std::size_t i = 0; i < x.r_; ++i)
            for (std::size_t k = 0; k < x.c_; ++k) {
                if (x.at(i, k).is_zero()) continue;
                for (std::size_t j = 0; j < y.c_; ++j)
                    r.at(i, j) += x.at(i, k) * y.at(k, j);
            }
        return r;
    }
    ExactMatrix operator*(const GaussianRational& s) const {
        ExactMatrix r = *this;
        for (auto& v : r.a_) v = v * s;
        return r;
    }
    friend ExactMatrix operator-(const ExactMatrix& x, const ExactMatrix& y) {
        ExactMatrix r = x;
        for (std::size_t i = 0; i < r.a_.size(); ++i) r.a_[i] -= y.a_[i];
        return r;
    }
    friend bool operator==(const ExactMatrix& x, const ExactMatrix& y) {
        return x.r_ == y.r_ && x.c_ == y.c_ && x.a_ == y.a_;
    }

    bool is_zero() const {
        for (auto& v : a_)
            if (!v.is_zero()) return false;
        return true;
    }

    /// Inverse by Gauss-Jordan elimination over Q(i).
    ExactMatrix inverse() const {
        if (r_ != c_) throw std::invalid_argument("ExactMatrix: inverse needs square");
        ExactMatrix a = *this, inv = identity(r_);
        for (std::size_t col = 0; col < c_; ++col) {
            std::size_t piv = col;
            while (piv < r_ && a.at(piv, col).is_zero()) ++piv;
            if (piv == r_) throw std::domain_error("ExactMatrix: singular");
            for (std::size_t j = 0; j < c_; ++j) {
                std::swap(a.at(col, j), a.at(piv, j));
                std::swap(inv.at(col, j), inv.at(piv, j));
            }
            GaussianRational d = a.at(col, col);
            for (std::size_t j = 0; j < c_; ++j) {
                a.at(col, j) = a.at(col, j) / d;
                inv.at(col, j) = inv.at(col, j) / d;
            }
            for (std::size_t i = 0; i < r_; ++i) {
                if (i == col || a.at(i, col).is_zero()) continue;
                GaussianRational f = a.at(i, col);
                for (std::size_t j = 0; j < c_; ++j) {
                    a.at(i, j) -= f * a.at(col, j);
                    inv.at(i, j) -= f * inv.at(col, j);
                }
            }
        }
        return inv;
    }

    CMatrix numeric() const {
        CMatrix m(r_, c_);
        for (std::size_t i = 0; i < r_; ++i)
            for (std::size_t j = 0; j < c_; ++j)
                m(int(i), int(j)) = Complex(at(i, j).re().to_double(), at(i, j).im().to_double());
        return m;
    }

    /// Embed as a scalar-entry FormMatrix with the given super dimension.
    FormMatrix as_form_matrix(const ChartPtr& chart, SuperDim d) const {
        if (r_ != std::size_t(d.total()) || c_ != std::size_t(d.total()))
            throw std::invalid_argument("ExactMatrix: dimension mismatch");
        FormMatrix m(chart, d.p, d.q);
        for (std::size_t i = 0; i < r_; ++i)
            for (std::size_t j = 0; j < c_; ++j)
                if (!at(i, j).is_zero()) m.at(i, j) = GradedForm::scalar(chart, at(i, j));
        return m;
    }

  private:
    std::size_t r_, c_;
    std::vector<GaussianRational> a_;
};

/// Twisted vector bundle: a super vector space per object, projective
/// transition matrices rho per morphism, and (Tier-C) a superconnection
/// written as d + W with W a FormMatrix per object. Exact matrices are
/// carried alongside the numeric ones whenever the fixture permits.
class TwistedBundle {
  public:
    TwistedBundle(std::shared_ptr<const DeligneCocycle> cocycle, std::vector<SuperDim> dims)
        : c_(std::move(cocycle)), dims_(std::move(dims)),
          rho_(c_->groupoid().n_morphisms()) {
        if (int(dims_.size()) != c_->groupoid().n_objects())
            throw std::invalid_argument("TwistedBundle: dims per object");
    }

    const DeligneCocycle& cocycle() const { return *c_; }
    std::shared_ptr<const DeligneCocycle> cocycle_ptr() const { return c_; }
    const FiniteGroupoid& groupoid() const { return c_->groupoid(); }
    SuperDim dim(int x) const { return dims_.at(x); }

    const CMatrix& rho(int f) const { return rho_.at(f); }
    void set_rho(int f, CMatrix m) {
        const auto& G = groupoid();
        if (m.rows() != dim(G.tgt(f)).total() || m.cols() != dim(G.src(f)).total())
            throw std::invalid_argument("TwistedBundle: rho shape");
        rho_.at(f) = std::move(m);
    }
    void set_rho_exact(int f, ExactMatrix m) {
        if (exact_rho_.empty()) exact_rho_.resize(rho_.size());
        set_rho(f, m.numeric());
        exact_rho_.at(f) = std::move(m);
    }
    bool has_exact() const { return !exact_rho_.empty(); }
    const ExactMatrix& rho_exact(int f) const { return exact_rho_.at(f); }

    bool has_nabla() const { return !nabla_.empty(); }
    const FormMatrix& nabla(int x) const { return nabla_.at(x); }
    void set_nabla(int x, FormMatrix w) {
        if (nabla_.empty())
            nabla_.assign(dims_.size(), FormMatrix());
        nabla_.at(x) = std::move(w);
    }

  private:
    std::shared_ptr<const DeligneCocycle> c_;
    std::vector<SuperDim> dims_;
    std::vector<CMatrix> rho_;
    std::vector<ExactMatrix> exact_rho_;
    std::vector<FormMatrix> nabla_;
};

/// Checks the projective square condition rho(g) rho(f) = e(q) rho(g o f),
/// identity and invertibility, and (Tier-C) that the transitions intertwine
/// the superconnections exactly.
inline ValidationReport validate_bundle(const TwistedBundle& v, double tol = 1e-9) {
    ValidationReport rep;
    const auto& G = v.groupoid();
    const auto& c = v.cocycle();
    for (int x = 0; x < G.n_objects(); ++x) {
        int e = G.identity(x);
        if (!v.rho(e).isApprox(CMatrix::Identity(v.dim(x).total(), v.dim(x).total()), tol))
            rep.violations.push_back("identity morphism " + std::to_string(e) +
                                     ": rho(id) != Id");
    }
    for (int f = 0; f < G.n_morphisms(); ++f) {
        Eigen::FullPivLU<CMatrix> lu(v.rho(f));
        if (!lu.isInvertible())
            rep.violations.push_back("morphism " + std::to_string(f) + ": rho not invertible");
    }
    for (int g = 0; g < G.n_morphisms(); ++g)
        for (int f = 0; f < G.n_morphisms(); ++f) {
            if (!G.composable(g, f)) continue;
            bool ok;
            if (v.has_exact() && c.q(g, f).is_quarter_integral()) {
                ExactMatrix lhs = v.rho_exact(g) * v.rho_exact(f);
                ExactMatrix rhs = v.rho_exact(G.compose(g, f)) * c.q(g, f).exact_value();
                ok = (lhs - rhs).is_zero();
            } else {
                CMatrix lhs = v.rho(g) * v.rho(f);
                CMatrix rhs = unit_phase(c.q(g, f)) * v.rho(G.compose(g, f));
                ok = (lhs - rhs).norm() <= tol * (1.0 + rhs.norm());
            }
            if (!ok)
                rep.violations.push_back("pair (" + std::to_string(g) + "," + std::to_string(f) +
                                         "): projective square fails");
        }
    if (v.has_nabla()) {
        if (!v.has_exact()) {
            rep.violations.push_back("Tier-C bundle lacks exact transition matrices");
            return rep;
        }
        for (int f = 0; f < G.n_morphisms(); ++f) {
            // W_tgt * rho(f) - rho(f) * W_src = A(f) * rho(f), exactly.
            SuperDim d = v.dim(G.src(f));
            FormMatrix rf = v.rho_exact(f).as_form_matrix(c.chart(), d);
            FormMatrix lhs = v.nabla(G.tgt(f)) * rf - rf * v.nabla(G.src(f));
            FormMatrix rhs = rf.scalar_wedge(c.A(f));
            if (lhs != rhs)
                rep.violations.push_back("morphism " + std::to_string(f) +
                                         ": connection not intertwined");
        }
    }
    return rep;
}

/// Curvature of the superconnection d + W at the object x: dW + W ^ W.
inline FormMatrix curvature(const TwistedBundle& v, int x) {
    if (!v.has_nabla()) throw std::domain_error("curvature: Tier-D bundle has no superconnection");
    const FormMatrix& w = v.nabla(x);
    return w.d() + w * w;
}

/// Section of the transgressed line over inertia objects: numeric values in
/// Tier-D, graded forms in Tier-C.
struct NumericSection {
    CVector values;
};
struct FormSection {
    std::vector<GradedForm> forms;
    friend bool operator==(const FormSection& a, const FormSection& b) {
        return a.forms == b.forms;
    }
};

/// Chern character, numeric route: per inertia object (x, g) the supertrace
/// of rho(g)^{-1} against exp(curvature - B) (which is 1 in Tier-D).
inline NumericSection chern_character(const TwistedBundle& v, const InertiaGroupoid& I) {
    NumericSection out;
    out.values.resize(I.n_objects());
    for (int i = 0; i < I.n_objects(); ++i) {
        int x = I.project_object(i);
        int g = I.sector(i);
        CMatrix m = v.rho(g).inverse();
        out.values(i) = numeric_supertrace(m, v.dim(x));
    }
    return out;
}

/// Chern character, exact Tier-C route: str(rho(g)^{-1} exp(curv - B)).
inline FormSection chern_character_forms(const TwistedBundle& v, const InertiaGroupoid& I) {
    if (!v.has_nabla() || !v.has_exact())
        throw std::domain_error("chern_character_forms: needs a Tier-C bundle");
    const auto& c = v.cocycle();
    FormSection out;
    for (int i = 0; i < I.n_objects(); ++i) {
        int x = I.project_object(i);
        int g = I.sector(i);
        SuperDim d = v.dim(x);
        FormMatrix curv = curvature(v, x);
        FormMatrix arg = curv - FormMatrix::identity(c.chart(), d.p, d.q).scalar_wedge(c.B(x));
        FormMatrix rho_inv = v.rho_exact(g).inverse().as_form_matrix(c.chart(), d);
        out.forms.push_back(supertrace(rho_inv * exp_positive_degree(arg)));
    }
    return out;
}

/// The delocalized differential: s -> ds + nabla' ^ s + Omega ^ s, object
/// by object over inertia. Identically zero on Tier-D data.
inline FormSection twisted_differential(const TransgressedLine& t, const FormSection& s) {
    FormSection out;
    if (!t.tier_c()) {
        for (auto& f : s.forms) out.forms.push_back(GradedForm(f.chart()));
        return out;
    }
    for (std::size_t i = 0; i < s.forms.size(); ++i) {
        GradedForm r = exterior_d(s.forms[i]);
        r += wedge(t.nabla_prime.at(i), s.forms[i]);
        r += wedge(t.omega3.at(i), s.forms[i]);
        out.forms.push_back(r);
    }
    return out;
}

inline bool is_closed(const TransgressedLine& t, const FormSection& s) {
    for (auto& f : twisted_differential(t, s).forms)
        if (!f.is_zero()) return false;
    return true;
}

/// Basis of flat sections of the transgressed line in degree zero: solves
/// tau(target) = e^{2 pi i H(f)} tau(source) over all inertia morphisms.
/// The dimension equals the number of twist-regular components.
struct FlatSections {
    int dimension = 0;
    std::vector<int> regular_components;     // indices into components
    std::vector<std::vector<int>> components;  // inertia objects per component
    /// Basis vectors as phase exponents; QModZ(0) entries where supported,
    /// std::nullopt elsewhere.
    std::vector<std::vector<std::optional<QModZ>>> basis;

    CMatrix numeric_basis(int n_objects) const {
        CMatrix m = CMatrix::Zero(n_objects, dimension);
        for (int k = 0; k < dimension; ++k)
            for (int i = 0; i < n_objects; ++i)
                if (basis[k][i]) m(i, k) = unit_phase(*basis[k][i]);
        return m;
    }
};

inline FlatSections flat_sections(const TransgressedLine& t) {
    const auto& I = t.inertia->groupoid();
    FlatSections out;
    out.components = connected_components(I);
    for (std::size_t ci = 0; ci < out.components.size(); ++ci) {
        const auto& comp = out.components[ci];
        // spanning phases by BFS from the least object
        std::vector<std::optional<QModZ>> tau(I.n_objects());
        tau[comp[0]] = QModZ();
        std::vector<int> queue{comp[0]};
        for (std::size_t qi = 0; qi < queue.size(); ++qi) {
            int x = queue[qi];
            for (int f = 0; f < I.n_morphisms(); ++f) {
                int y = -1;
                QModZ step;
                if (I.src(f) == x) {
                    y = I.tgt(f);
                    step = t.H[f];
                } else if (I.tgt(f) == x) {
                    y = I.src(f);
                    step = -t.H[f];
                } else {
                    continue;
                }
                if (!tau[y]) {
                    tau[y] = *tau[x] + step;
                    queue.push_back(y);
                }
            }
        }
        // consistency of every morphism in the component
        bool regular = true;
        for (int f = 0; f < I.n_morphisms() && regular; ++f) {
            if (!tau[I.src(f)] || !tau[I.tgt(f)]) continue;
            if (*tau[I.tgt(f)] != *tau[I.src(f)] + t.H[f]) regular = false;
        }
        if (regular) {
            out.regular_components.push_back(int(ci));
            out.basis.push_back(std::move(tau));
        }
    }
    out.dimension = int(out.basis.size());
    return out;
}

/// ch transforms along inertia morphisms exactly by the transgressed phase:
/// ch(target) = e^{2 pi i H(f)} ch(source); afterwards ch must lie in the
/// span of the flat sections.
inline bool ch_equivariance_check(const TwistedBundle& v, const TransgressedLine& t,
                                  double tol = 1e-9) {
    const auto& I = *t.inertia;
    NumericSection ch = chern_character(v, I);
    for (int f = 0; f < I.groupoid().n_morphisms(); ++f) {
        Complex lhs = ch.values(I.groupoid().tgt(f));
        Complex rhs = unit_phase(t.H[f]) * ch.values(I.groupoid().src(f));
        if (std::abs(lhs - rhs) > tol * (1.0 + std::abs(rhs))) return false;
    }
    auto flat = flat_sections(t);
    CMatrix basis = flat.numeric_basis(I.n_objects());
    if (flat.dimension == 0) return ch.values.norm() <= tol;
    CVector resid = ch.values - basis * basis.colPivHouseholderQr().solve(ch.values);
    return resid.norm() <= tol * (1.0 + ch.values.norm());
}

// ---------------------------------------------------------------------------
// Irreducible projective representations
// ---------------------------------------------------------------------------

struct IrrepDecomposition {
    std::vector<int> dims;                         // ascending
    std::vector<std::vector<CMatrix>> reps;        // reps[k][g]
    bool converged = false;
};

namespace detail {

/// Dimension of the commutant of the collection of matrices, with an
/// orthonormal nullspace basis (as vectorized matrices) returned.
inline int commutant(const std::vector<CMatrix>& ms, std::vector<CMatrix>* basis,
                     double tol = 1e-9) {
    int d = int(ms[0].rows());
    CMatrix sys = CMatrix::Zero(int(ms.size()) * d * d, d * d);
    int row0 = 0;
    for (auto& m : ms) {
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                int r = row0 + i * d + j;
                // (X m - m X)_{ij} = sum_k X_{ik} m_{kj} - m_{ik} X_{kj}
                for (int k = 0; k < d; ++k) {
                    sys(r, i * d + k) += m(k, j);
                    sys(r, k * d + j) -= m(i, k);
                }
            }
        row0 += d * d;
    }
    Eigen::JacobiSVD<CMatrix> svd(sys, Eigen::ComputeFullV);
    auto sv = svd.singularValues();
    double cutoff = tol * (sv.size() ? std::max(1.0, sv(0)) : 1.0);
    int null_dim = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) <= cutoff) ++null_dim;
    if (basis) {
        basis->clear();
        for (int k = 0; k < null_dim; ++k) {
            CVector col = svd.matrixV().col(sv.size() - 1 - k);
            CMatrix x(d, d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) x(i, j) = col(i * d + j);
            basis->push_back(x);
        }
    }
    return null_dim;
}

}  // namespace detail

/// Decomposes the twisted regular representation of a finite group into
/// irreducibles by eigen-splitting along random Hermitian commutant
/// elements. Returns the distinct irreducibles up to isomorphism.
inline IrrepDecomposition irreducible_projective_reps(const MultTable& table,
                                                      const std::vector<std::vector<QModZ>>& q,
                                                      std::uint64_t seed = 12345) {
    int n = int(table.size());
    std::vector<CMatrix> left(n), right(n);
    for (int g = 0; g < n; ++g) {
        left[g] = CMatrix::Zero(n, n);
        right[g] = CMatrix::Zero(n, n);
        for (int y = 0; y < n; ++y) {
            left[g](table[g][y], y) = unit_phase(q[g][y]);
            right[g](table[y][g], y) = unit_phase(q[y][g]);
        }
    }

    IrrepDecomposition out;
    for (int attempt = 0; attempt < 5 && !out.converged; ++attempt) {
        std::mt19937_64 rng(seed + std::uint64_t(attempt) * 7919);
        std::normal_distribution<double> gauss(0.0, 1.0);

        // queue of invariant subspaces, represented by orthonormal columns
        std::vector<CMatrix> pending{CMatrix::Identity(n, n)}, done;
        bool stuck = false;
        for (int round = 0; round < 4 * n + 8 && !pending.empty(); ++round) {
            CMatrix qb = pending.back();
            pending.pop_back();
            int d = int(qb.cols());
            CMatrix h;
            if (d == n && n > 1) {
                // the commutant of the regular module is spanned by the
                // right multiplications; no need to solve for it
                CMatrix a = CMatrix::Zero(n, n);
                for (int g = 0; g < n; ++g) a += Complex(gauss(rng), gauss(rng)) * right[g];
                h = a + a.adjoint();
            } else {
                std::vector<CMatrix> ms(n);
                for (int g = 0; g < n; ++g) ms[g] = qb.adjoint() * left[g] * qb;
                std::vector<CMatrix> comm;
                int cdim = detail::commutant(ms, &comm);
                if (cdim == 1) {
                    done.push_back(qb);
                    continue;
                }
                h = CMatrix::Zero(d, d);
                for (auto& x : comm) {
                    Complex cc(gauss(rng), gauss(rng));
                    h += cc * x + std::conj(cc) * x.adjoint();
                }
            }
            Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
            auto ev = es.eigenvalues();
            double scale = std::max(1.0, std::abs(ev(d - 1) - ev(0)));
            int start = 0;
            int pieces = 0;
            for (int i = 1; i <= d; ++i) {
                if (i == d || ev(i) - ev(i - 1) > 1e-7 * scale) {
                    CMatrix sub = es.eigenvectors().middleCols(start, i - start);
                    pending.push_back(qb * sub);
                    ++pieces;
                    start = i;
                }
            }
            if (pieces <= 1) {
                stuck = true;
                break;
            }
        }
        if (stuck || !pending.empty()) continue;

        // group the irreducible pieces by their projective characters
        std::vector<std::vector<Complex>> chars;
        std::vector<std::vector<CMatrix>> reps;
        std::vector<int> dims;
        for (auto& qb : done) {
            std::vector<Complex> chi(n);
            std::vector<CMatrix> ms(n);
            for (int g = 0; g < n; ++g) {
                ms[g] = qb.adjoint() * left[g] * qb;
                chi[g] = ms[g].trace();
            }
            bool fresh = true;
            for (auto& seen : chars) {
                double diff = 0;
                for (int g = 0; g < n; ++g) diff += std::abs(seen[g] - chi[g]);
                if (diff < 1e-6 * n) {
                    fresh = false;
                    break;
                }
            }
            if (fresh) {
                chars.push_back(chi);
                reps.push_back(ms);
                dims.push_back(int(qb.cols()));
            }
        }
        long long pieces_total = 0;
        for (auto& qb : done) pieces_total += qb.cols();
        // every irreducible appears dim-many times in the regular module,
        // so the distinct dims must satisfy sum d_i^2 = |G|
        long long expect = 0;
        for (int d : dims) expect += (long long)d * d;
        if (pieces_total == n && expect == n) {
            std::vector<std::size_t> order(dims.size());
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(),
                      [&](std::size_t a, std::size_t b) { return dims[a] < dims[b]; });
            for (auto k : order) {
                out.dims.push_back(dims[k]);
                out.reps.push_back(reps[k]);
            }
            out.converged = true;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Concordance witnesses
// ---------------------------------------------------------------------------

struct ConcordanceWitness {
    std::vector<GradedForm> omega;  // per inertia object, on chart x R
    bool endpoints_ok = false;
    bool closed_ok = false;
    FormSection recovered;  // integrate_fiber applied to omega
};

namespace detail {

inline ChartPtr extend_chart(const ChartPtr& base, const std::string& fiber = "s") {
    std::vector<std::string> ev = base->even_vars;
    ev.push_back(fiber);
    return make_chart(std::move(ev), base->odd_params);
}

inline ChartMap projection_map(const ChartPtr& ext, const ChartPtr& base) {
    std::vector<Polynomial> im;
    for (std::size_t i = 0; i < base->n(); ++i) im.push_back(Polynomial::variable(ext->n(), i));
    return ChartMap(ext, base, std::move(im));
}

inline ChartMap endpoint_map(const ChartPtr& base, const ChartPtr& ext, int value) {
    std::vector<Polynomial> im;
    for (std::size_t i = 0; i < base->n(); ++i) im.push_back(Polynomial::variable(base->n(), i));
    im.push_back(Polynomial::constant(base->n(), GaussianRational(value)));
    return ChartMap(base, ext, std::move(im));
}

}  // namespace detail

/// Builds the concordance omega = omega0 + A(t * alpha) over chart x [0,1],
/// checks its endpoints and closedness, and recovers alpha by fiber
/// integration (the recovery carries the sign (-1)^{|alpha|+1}).
inline ConcordanceWitness concordance_witness(const TransgressedLine& t, const FormSection& omega0,
                                              const FormSection& alpha) {
    if (!t.tier_c()) throw std::domain_error("concordance_witness: needs Tier-C data");
    if (!is_closed(t, omega0)) throw std::invalid_argument("concordance_witness: omega0 not closed");
    const ChartPtr base = *t.chart;
    ChartPtr ext = detail::extend_chart(base);
    ChartMap proj = detail::projection_map(ext, base);
    ChartMap at0 = detail::endpoint_map(base, ext, 0);
    ChartMap at1 = detail::endpoint_map(base, ext, 1);
    std::size_t fiber = ext->n() - 1;

    ConcordanceWitness out;
    out.endpoints_ok = true;
    out.closed_ok = true;
    FormSection d_alpha = twisted_differential(t, alpha);
    for (std::size_t i = 0; i < omega0.forms.size(); ++i) {
        GradedForm w0 = pullback(proj, omega0.forms[i]);
        GradedForm al = pullback(proj, alpha.forms[i]);
        GradedForm a_conn = pullback(proj, t.nabla_prime[i]);
        GradedForm om3 = pullback(proj, t.omega3[i]);
        GradedForm tvar = GradedForm::coordinate(ext, fiber);
        // A(t alpha) = dt ^ alpha + t * (d alpha + A ^ alpha + Omega ^ alpha)
        GradedForm a_t_alpha = exterior_d(wedge(tvar, al)) + wedge(a_conn, wedge(tvar, al)) +
                               wedge(om3, wedge(tvar, al));
        GradedForm w = w0 + a_t_alpha;
        out.omega.push_back(w);

        if (pullback(at0, w) != omega0.forms[i]) out.endpoints_ok = false;
        if (pullback(at1, w) != omega0.forms[i] + d_alpha.forms[i]) out.endpoints_ok = false;
        GradedForm dw = exterior_d(w) + wedge(a_conn, w) + wedge(om3, w);
        if (!dw.is_zero()) out.closed_ok = false;
        out.recovered.forms.push_back(integrate_fiber(w));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Structural constructions on bundles
// ---------------------------------------------------------------------------

/// Direct sum within each super block.
inline TwistedBundle direct_sum(const TwistedBundle& a, const TwistedBundle& b) {
    const auto& G = a.groupoid();
    std::vector<SuperDim> dims;
    for (int x = 0; x < G.n_objects(); ++x)
        dims.push_back({a.dim(x).p + b.dim(x).p, a.dim(x).q + b.dim(x).q});
    TwistedBundle out(a.cocycle_ptr(), dims);
    auto embed = [](const CMatrix& ma, const CMatrix& mb, SuperDim da, SuperDim db,
                    SuperDim sa, SuperDim sb) {
        CMatrix m = CMatrix::Zero(da.total() + db.total(), sa.total() + sb.total());
        // even blocks first: [a_even, b_even, a_odd, b_odd]
        m.block(0, 0, da.p, sa.p) = ma.block(0, 0, da.p, sa.p);
        m.block(da.p, sa.p, db.p, sb.p) = mb.block(0, 0, db.p, sb.p);
        m.block(da.p + db.p, sa.p + sb.p, da.q, sa.q) = ma.block(da.p, sa.p, da.q, sa.q);
        m.block(da.p + db.p + da.q, sa.p + sb.p + sa.q, db.q, sb.q) =
            mb.block(db.p, sb.p, db.q, sb.q);
        m.block(0, sa.p + sb.p, da.p, sa.q) = ma.block(0, sa.p, da.p, sa.q);
        m.block(da.p + db.p, 0, da.q, sa.p) = ma.block(da.p, 0, da.q, sa.p);
        m.block(da.p, sa.p + sb.p + sa.q, db.p, sb.q) = mb.block(0, sb.p, db.p, sb.q);
        m.block(da.p + db.p + da.q, sa.p, db.q, sb.p) = mb.block(db.p, 0, db.q, sb.p);
        return m;
    };
    for (int f = 0; f < G.n_morphisms(); ++f)
        out.set_rho(f, embed(a.rho(f), b.rho(f), a.dim(G.tgt(f)), b.dim(G.tgt(f)),
                             a.dim(G.src(f)), b.dim(G.src(f))));
    return out;
}

/// Tensor with an untwisted bundle (both purely even).
inline TwistedBundle tensor_untwisted(const TwistedBundle& a, const TwistedBundle& b) {
    const auto& G = a.groupoid();
    std::vector<SuperDim> dims;
    for (int x = 0; x < G.n_objects(); ++x) {
        if (a.dim(x).q != 0 || b.dim(x).q != 0)
            throw std::invalid_argument("tensor_untwisted: even bundles only");
        dims.push_back({a.dim(x).p * b.dim(x).p, 0});
    }
    TwistedBundle out(a.cocycle_ptr(), dims);
    for (int f = 0; f < G.n_morphisms(); ++f) {
        CMatrix m(out.dim(G.tgt(f)).total(), out.dim(G.src(f)).total());
        const CMatrix& ma = a.rho(f);
        const CMatrix& mb = b.rho(f);
        for (int i = 0; i < ma.rows(); ++i)
            for (int j = 0; j < ma.cols(); ++j)
                m.block(i * mb.rows(), j * mb.cols(), mb.rows(), mb.cols()) = ma(i, j) * mb;
        out.set_rho(f, m);
    }
    return out;
}

}  // namespace orbitwist
