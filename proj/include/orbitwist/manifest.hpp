#pragma once

#include <json.hpp>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "orbitwist/deligne.hpp"
#include "orbitwist/groupoid.hpp"
#include "orbitwist/groups.hpp"
#include "orbitwist/transgression.hpp"
#include "orbitwist/twisted_bundle.hpp"

namespace orbitwist {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Exact number parsing: rationals as "p/q", complex as "p/q+r/si"
// ---------------------------------------------------------------------------

inline Rational parse_rational(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(std::stoll(s));
        return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
    } catch (const std::exception&) {
        throw std::invalid_argument("bad rational: '" + s + "'");
    }
}

inline GaussianRational parse_complex(std::string s) {
    if (s.empty()) throw std::invalid_argument("bad complex: empty");
    if (s.back() != 'i') return GaussianRational(parse_rational(s));
    s.pop_back();
    // find the sign splitting real and imaginary parts (not the leading one)
    for (std::size_t k = s.size(); k-- > 1;) {
        if ((s[k] == '+' || s[k] == '-') && s[k - 1] != '/') {
            Rational re = parse_rational(s.substr(0, k));
            std::string im = s.substr(k);
            if (im == "+") im = "1";
            if (im == "-") im = "-1";
            return GaussianRational(re, parse_rational(im));
        }
    }
    if (s.empty() || s == "+") return GaussianRational(Rational(0), Rational(1));
    if (s == "-") return GaussianRational(Rational(0), Rational(-1));
    return GaussianRational(Rational(0), parse_rational(s));
}

inline GradedForm parse_form(const json& j, const ChartPtr& chart) {
    GradedForm f(chart);
    for (auto& term : j.at("terms")) {
        Polynomial::Monomial m(chart->n(), 0);
        if (term.contains("t")) {
            auto t = term.at("t");
            if (t.size() != chart->n()) throw std::invalid_argument("form term: exponent arity");
            for (std::size_t i = 0; i < chart->n(); ++i) m[i] = t.at(i).get<std::uint8_t>();
        }
        MonoKey key;
        if (term.contains("eta"))
            for (int i : term.at("eta")) key.eta |= std::uint64_t(1) << (i - 1);
        if (term.contains("dt"))
            for (int i : term.at("dt")) key.dt |= std::uint64_t(1) << (i - 1);
        Polynomial p(chart->n());
        p.add_term(m, parse_complex(term.at("c").get<std::string>()));
        f.add_term(key, p);
    }
    return f;
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

struct Manifest {
    GroupoidPtr groupoid;
    std::optional<MultTable> group;  // set when the groupoid is one-object
    std::shared_ptr<const DeligneCocycle> cocycle;
    std::int64_t modulus = 2;
    std::vector<std::pair<std::string, TwistedBundle>> bundles;
    std::vector<std::pair<std::string, Skeleton>> loops;
    std::vector<std::string> tasks;
};

inline MultTable group_from_json(const json& j) {
    if (j.contains("name")) return named_group(j.at("name").get<std::string>());
    MultTable t;
    for (auto& row : j.at("table")) t.push_back(row.get<std::vector<int>>());
    return t;
}

inline Manifest load_manifest(const json& j) {
    Manifest m;
    const json& gj = j.at("groupoid");
    std::string type = gj.at("type").get<std::string>();
    FiniteGroupoid G;
    if (type == "group") {
        m.group = group_from_json(gj);
        G = from_group(*m.group);
    } else if (type == "pair") {
        G = pair_groupoid(gj.at("n").get<int>());
    } else if (type == "action") {
        std::vector<std::vector<int>> action;
        for (auto& row : gj.at("action")) action.push_back(row.get<std::vector<int>>());
        G = action_groupoid(group_from_json(gj.at("group")), action);
    } else {
        throw std::invalid_argument("groupoid type must be group|pair|action");
    }

    ChartPtr chart;
    if (j.contains("chart")) {
        chart = make_chart(j.at("chart").at("even").get<std::vector<std::string>>(),
                           j.at("chart").value("odd", std::vector<std::string>{}));
        G.set_chart(chart);
    }
    G.validate();
    m.groupoid = std::make_shared<const FiniteGroupoid>(std::move(G));

    DeligneCocycle c(m.groupoid);
    if (j.contains("cocycle")) {
        const json& cj = j.at("cocycle");
        if (cj.contains("exponents")) {
            auto& rows = cj.at("exponents");
            for (int a = 0; a < m.groupoid->n_morphisms(); ++a)
                for (int b = 0; b < m.groupoid->n_morphisms(); ++b) {
                    if (!m.groupoid->composable(a, b)) continue;
                    c.set_q(a, b, QModZ(parse_rational(rows.at(a).at(b).get<std::string>())));
                }
        } else if (cj.contains("h2_class")) {
            if (!m.group) throw std::invalid_argument("h2_class needs a one-object groupoid");
            auto& hj = cj.at("h2_class");
            m.modulus = hj.at("modulus").get<std::int64_t>();
            auto h2 = group_h2(*m.group, m.modulus);
            auto coeff = hj.at("coefficients").get<std::vector<std::int64_t>>();
            auto table = h2.representative(coeff);
            for (int a = 0; a < m.groupoid->n_morphisms(); ++a)
                for (int b = 0; b < m.groupoid->n_morphisms(); ++b)
                    if (m.groupoid->composable(a, b)) c.set_q(a, b, table[a][b]);
        }
        if (cj.contains("modulus")) m.modulus = cj.at("modulus").get<std::int64_t>();
        if (cj.contains("A"))
            for (auto& [key, val] : cj.at("A").items())
                c.set_A(std::stoi(key), parse_form(val, c.chart()));
        if (cj.contains("B"))
            for (auto& [key, val] : cj.at("B").items())
                c.set_B(std::stoi(key), parse_form(val, c.chart()));
    }
    m.cocycle = std::make_shared<const DeligneCocycle>(std::move(c));

    if (j.contains("bundles"))
        for (auto& bj : j.at("bundles")) {
            std::vector<SuperDim> dims;
            for (auto& d : bj.at("dims")) dims.push_back({d.at(0).get<int>(), d.at(1).get<int>()});
            TwistedBundle v(m.cocycle, dims);
            for (auto& [key, val] : bj.at("rho").items()) {
                int f = std::stoi(key);
                std::size_t rows = val.size();
                ExactMatrix mat(rows, val.at(0).size());
                bool exact = true;
                for (std::size_t r = 0; r < rows; ++r)
                    for (std::size_t cidx = 0; cidx < mat.cols(); ++cidx)
                        mat.at(r, cidx) = parse_complex(val.at(r).at(cidx).get<std::string>());
                if (exact)
                    v.set_rho_exact(f, mat);
            }
            m.bundles.emplace_back(bj.value("name", "bundle" + std::to_string(m.bundles.size())),
                                   std::move(v));
        }

    if (j.contains("loops"))
        for (auto& lj : j.at("loops")) {
            Skeleton k;
            k.closed = lj.value("closed", true);
            for (auto& aj : lj.at("arcs")) {
                Rational b = parse_rational(aj.at("b").get<std::string>());
                Rational a = parse_rational(aj.at("a").get<std::string>());
                k.arcs.emplace_back(aj.at("object").get<int>(),
                                    SuperInterval(SuperPoint::at(b), SuperPoint::at(a)));
            }
            k.jumps = lj.at("jumps").get<std::vector<int>>();
            k.validate(*m.groupoid);
            m.loops.emplace_back(lj.value("name", "loop" + std::to_string(m.loops.size())), k);
        }

    if (j.contains("tasks")) m.tasks = j.at("tasks").get<std::vector<std::string>>();
    return m;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline std::string format_complex(Complex z) {
    char buf[64];
    double re = z.real() == 0.0 ? 0.0 : z.real();  // normalize -0
    double im = z.imag() == 0.0 ? 0.0 : z.imag();
    if (std::abs(im) < 1e-12) {
        std::snprintf(buf, sizeof buf, "%.10g", re);
    } else {
        std::snprintf(buf, sizeof buf, "%.10g%+.10gi", re, im);
    }
    return buf;
}

struct ReportResult {
    std::string text;   // TSV
    json data;          // same content as JSON
    bool computation_ok = true;
};

inline ReportResult run_report(const Manifest& m, std::uint64_t seed) {
    ReportResult out;
    std::ostringstream os;
    auto t = transgress(*m.cocycle);
    const auto& I = *t.inertia;

    bool want = m.tasks.empty();
    auto task = [&](const char* name) {
        return want || std::find(m.tasks.begin(), m.tasks.end(), name) != m.tasks.end();
    };

    os << "groupoid\tobjects=" << m.groupoid->n_objects()
       << "\tmorphisms=" << m.groupoid->n_morphisms() << "\n";
    out.data["groupoid"] = {{"objects", m.groupoid->n_objects()},
                            {"morphisms", m.groupoid->n_morphisms()}};

    if (task("sectors")) {
        for (int i = 0; i < I.n_objects(); ++i) {
            auto [x, g] = I.object_data(i);
            os << "sector\t" << i << "\tobject=" << x << "\tautomorphism=" << g << "\n";
            out.data["sectors"].push_back({{"index", i}, {"object", x}, {"automorphism", g}});
        }
    }
    if (task("transgress")) {
        for (int f = 0; f < I.groupoid().n_morphisms(); ++f) {
            os << "H\t" << f << "\t" << t.H[f].str() << "\n";
            out.data["H"].push_back(t.H[f].str());
        }
    }
    if (task("flat")) {
        auto flat = flat_sections(t);
        os << "flat_dim\t" << flat.dimension << "\n";
        out.data["flat_dim"] = flat.dimension;
    }
    if (task("irreps") && m.group) {
        std::vector<std::vector<QModZ>> q(m.group->size(), std::vector<QModZ>(m.group->size()));
        for (std::size_t a = 0; a < m.group->size(); ++a)
            for (std::size_t b = 0; b < m.group->size(); ++b)
                q[a][b] = m.cocycle->q(int(a), int(b));
        auto irr = irreducible_projective_reps(*m.group, q, seed);
        if (!irr.converged) {
            os << "irreps\tNOT-CONVERGED\n";
            out.computation_ok = false;
        } else {
            os << "irreps\t";
            for (std::size_t k = 0; k < irr.dims.size(); ++k)
                os << (k ? "," : "") << irr.dims[k];
            os << "\n";
            out.data["irreps"] = irr.dims;
        }
    }
    if (task("chern")) {
        for (auto& [name, v] : m.bundles) {
            auto ch = chern_character(v, I);
            for (int i = 0; i < I.n_objects(); ++i) {
                os << "ch\t" << name << "\t" << i << "\t" << format_complex(ch.values(i)) << "\n";
                out.data["ch"][name].push_back(format_complex(ch.values(i)));
            }
        }
    }
    if (task("holonomy")) {
        for (auto& [name, k] : m.loops) {
            auto v = loop_holonomy(k, *m.cocycle);
            os << "holonomy\t" << name << "\t" << v.str() << "\n";
            out.data["holonomy"][name] = v.str();
        }
    }
    if (task("reduction")) {
        for (auto& [name, v] : m.bundles) {
            auto rep = dimensional_reduction_check(v, I);
            os << "reduction\t" << name << "\t" << (rep.ok() ? "PASS" : "FAIL") << "\n";
            out.data["reduction"][name] = rep.ok();
            if (!rep.ok()) out.computation_ok = false;
        }
    }
    out.text = os.str();
    return out;
}

/// Full validation pass over every object in the manifest.
inline ValidationReport validate_manifest(const Manifest& m) {
    ValidationReport all;
    m.groupoid->validate();
    auto crep = validate_cocycle(*m.cocycle);
    all.violations.insert(all.violations.end(), crep.violations.begin(), crep.violations.end());
    for (auto& [name, v] : m.bundles) {
        auto brep = validate_bundle(v);
        for (auto& viol : brep.violations) all.violations.push_back(name + ": " + viol);
    }
    for (auto& [name, k] : m.loops) {
        try {
            k.validate(*m.groupoid);
        } catch (const std::exception& e) {
            all.violations.push_back(name + ": " + e.what());
        }
    }
    return all;
}

}  // namespace orbitwist
