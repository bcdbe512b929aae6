#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ramify/differential.hpp"
#include "ramify/errors.hpp"
#include "ramify/json.hpp"
#include "ramify/matrixops.hpp"
#include "ramify/tower.hpp"

namespace ramify {

// --- K' attachment ----------------------------------------------------------

enum class attach_path {
    trivial,           // degree-1 recipe
    direct_eisenstein,
    direct_unramified,
    ramified_substitution, // uniformizer substitution alpha^a pi^b
    wild_eisenstein,       // unit-Kummer refinement ending ramified
    wild_unramified        // unit-Kummer refinement ending unramified
};

inline const char* attach_path_name(attach_path p) {
    switch (p) {
    case attach_path::trivial: return "trivial";
    case attach_path::direct_eisenstein: return "direct-eisenstein";
    case attach_path::direct_unramified: return "direct-unramified";
    case attach_path::ramified_substitution: return "ramified-substitution";
    case attach_path::wild_eisenstein: return "wild-eisenstein";
    case attach_path::wild_unramified: return "wild-unramified";
    }
    return "?";
}

template <class B>
struct attach_result {
    tower<B> extended;
    std::vector<attach_path> paths; // one entry per attached step group
};

namespace detail {

/// Companion matrix of x^r - c over the top level of t.
template <class B>
level_matrix<B> radical_companion(const tower<B>& t, unsigned long r, const elem<B>& c) {
    level_matrix<B> m(t, t.levels(), r, r);
    for (std::size_t i = 0; i + 1 < r; ++i) m.at(i + 1, i) = t.one();
    m.at(0, r - 1) = c;
    return m;
}

template <class B>
tower<B> extend_by_charpoly(const tower<B>& t, const level_matrix<B>& m, step_kind kind) {
    std::vector<elem<B>> cp = charpoly(m);
    exact_poly poly;
    poly.reserve(cp.size());
    for (const auto& c : cp) poly.push_back(c.to_exact());
    return t.extend(poly, kind);
}

/// Totally ramified radical adjunction: z = alpha^a pi^b is a uniformizer of
/// t(alpha) when a v(alpha) + b v(pi) = 1/(r e); its characteristic
/// polynomial is the Eisenstein presentation.
template <class B>
tower<B> attach_radical_ramified(const tower<B>& t, unsigned long r, const elem<B>& c,
                                 const mpz_class& vc_w) {
    mpz_class a, b, g;
    mpz_class rz(r);
    mpz_gcdext(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t(), vc_w.get_mpz_t(), rz.get_mpz_t());
    require(g == 1, errc::validation, "radical substitution needs gcd(w(c), r) = 1");
    while (a <= 0) {
        a += r;
        b -= vc_w;
    }
    while (a >= rz) {
        a -= r;
        b += vc_w;
    }
    level_matrix<B> ma = radical_companion(t, r, c);
    level_matrix<B> mz = level_matrix<B>::identity(t, t.levels(), r);
    for (mpz_class i = 0; i < a; ++i) mz = mz * ma;
    elem<B> pib = t.uniformizer().pow(b);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) mz.at(i, j) = mz.at(i, j) * pib;
    return extend_by_charpoly(t, mz, step_kind::eisenstein);
}

/// Unit-Kummer adjunction of a p-th root of the unit u (residue-1 after
/// normalization): greedy digit absorption until the break is coprime to p,
/// then either a uniformizer substitution (ramified) or a residue-irreducible
/// degree-p polynomial (unramified). A Hensel-visible root means the recipe
/// polynomial was reducible.
template <class B>
std::pair<tower<B>, attach_path> attach_unit_kummer(const tower<B>& t, elem<B> u) {
    unsigned long p = t.base().p;
    unsigned long e_abs = t.e();
    const ff_tower& rf = t.residue_field();
    std::size_t fl = rf.levels();
    mpq_class crit(p, p - 1); // v(u - 1) beyond this forces a Hensel root

    // Teichmueller normalization: make u = 1 mod pi
    {
        ff_elem r0 = u.residue();
        require(!r0.is_zero(), errc::validation, "unit-Kummer argument is not a unit");
        ff_elem croot = rf.pth_root(r0, fl);
        elem<B> cl = t.lift_residue(croot, fl);
        u = u * cl.inv().pow(p);
    }

    elem<B> pi = t.uniformizer();
    long iterations_left = static_cast<long>(4 * e_abs * p + 32);
    for (;;) {
        require(iterations_left-- > 0, errc::unsupported_recipe,
                "unit-Kummer refinement did not terminate");
        elem<B> delta = u - t.one();
        valuation_t vd = delta.valuation();
        if (!vd.exact || vd.value > crit)
            fail(errc::recipe_reducible,
                 "x^p - u has a root at working precision (unit too close to a p-th power)");
        mpq_class wq = vd.value * static_cast<long>(e_abs);
        require(wq.get_den() == 1, errc::validation, "break outside the value group");
        mpz_class w = wq.get_num();

        if (vd.value == crit) {
            // critical level: Z = (y-1)/pi^m satisfies a residue
            // Artin-Schreier-type equation; irreducible residue means an
            // unramified step, a residue root is absorbed and the loop
            // continues.
            mpz_class m = w / p; // w = p e /(p-1), m = e/(p-1)
            level_matrix<B> my = radical_companion(t, p, u);
            level_matrix<B> mzp(t, t.levels(), p, p);
            elem<B> pim_inv = pi.pow(m).inv();
            for (std::size_t i = 0; i < p; ++i) {
                for (std::size_t j = 0; j < p; ++j) {
                    elem<B> entry = my.at(i, j);
                    if (i == j) entry = entry - t.one();
                    mzp.at(i, j) = entry * pim_inv;
                }
            }
            std::vector<elem<B>> cp = charpoly(mzp);
            std::vector<ff_elem> rescp;
            bool integral = true;
            for (const auto& cc : cp) {
                valuation_t v = cc.valuation();
                if (v.value < 0) {
                    integral = false;
                    break;
                }
                rescp.push_back(cc.residue());
            }
            require(integral, errc::unsupported_recipe,
                    "critical-level polynomial failed to be integral");
            auto root = rf.find_root(rescp, fl);
            if (!root) {
                exact_poly poly;
                for (const auto& cc : cp) poly.push_back(cc.to_exact());
                return {t.extend(poly, step_kind::unramified), attach_path::wild_unramified};
            }
            // absorb the root and continue
            elem<B> shift = t.one() + t.lift_residue(*root, fl) * pi.pow(m);
            u = u * shift.inv().pow(p);
            continue;
        }

        if (mpz_class(w % p) != 0) {
            // ramified break: z = (y-1)^a pi^b with a w + b p = 1
            mpz_class a, b, g;
            mpz_class pz(p);
            mpz_gcdext(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t(), w.get_mpz_t(),
                       pz.get_mpz_t());
            while (a <= 0) {
                a += p;
                b -= w;
            }
            while (a >= pz) {
                a -= p;
                b += w;
            }
            level_matrix<B> my = radical_companion(t, p, u);
            level_matrix<B> ym1(t, t.levels(), p, p);
            for (std::size_t i = 0; i < p; ++i)
                for (std::size_t j = 0; j < p; ++j)
                    ym1.at(i, j) = i == j ? my.at(i, j) - t.one() : my.at(i, j);
            level_matrix<B> mz = level_matrix<B>::identity(t, t.levels(), p);
            for (mpz_class i = 0; i < a; ++i) mz = mz * ym1;
            elem<B> pib = pi.pow(b);
            for (std::size_t i = 0; i < p; ++i)
                for (std::size_t j = 0; j < p; ++j) mz.at(i, j) = mz.at(i, j) * pib;
            return {extend_by_charpoly(t, mz, step_kind::eisenstein),
                    attach_path::wild_eisenstein};
        }

        // p | w below the critical level: absorb the leading digit
        mpz_class mshift = w / p;
        elem<B> lead = delta * pi.pow(w).inv();
        ff_elem digit = lead.residue();
        ff_elem target = rf.pth_root(rf.neg(digit), fl);
        elem<B> adjust = t.one() + t.lift_residue(target, fl) * pi.pow(mshift);
        u = u * adjust.pow(p);
    }
}

/// Adjoins a root of x^r - c for prime r.
template <class B>
std::pair<tower<B>, attach_path> attach_prime_radical(const tower<B>& t, unsigned long r,
                                                      const elem<B>& c) {
    valuation_t vc = c.valuation();
    require(vc.exact, errc::precision_exhausted, "radical constant has no certified valuation");
    unsigned long e_abs = t.e();
    mpq_class vw = vc.value * static_cast<long>(e_abs);
    require(vw.get_den() == 1, errc::validation, "radical constant outside the value group");
    mpz_class vc_w = vw.get_num();

    if (mpz_class(vc_w % r) != 0)
        return {attach_radical_ramified(t, r, c, vc_w), attach_path::ramified_substitution};

    // v(alpha) lies in the value group: reduce to a unit adjunction
    mpz_class k = vc_w / r;
    elem<B> u = c * t.uniformizer().pow(k * r).inv();
    if (r == t.base().p) return attach_unit_kummer(t, u);

    // tame unit: unramified iff the residue is not an r-th power
    const ff_tower& rf = t.residue_field();
    std::size_t fl = rf.levels();
    std::vector<ff_elem> res(r + 1, rf.zero(fl));
    res[0] = rf.neg(u.residue());
    res[r] = rf.one(fl);
    if (rf.irreducible(res, fl)) {
        exact_poly poly;
        poly.push_back((-u).to_exact());
        for (unsigned long i = 1; i < r; ++i) poly.push_back(exact_elem::rational(0));
        poly.push_back(exact_elem::rational(1));
        return {t.extend(poly, step_kind::unramified), attach_path::direct_unramified};
    }
    if (rf.find_root(res, fl))
        fail(errc::recipe_reducible, "tame radical has a residue root: recipe is reducible");
    fail(errc::unsupported_recipe,
         "tame radical residue polynomial factors without a root; not supported");
}

} // namespace detail

/// Attaches the recipe polynomial g (monic, rational coefficients) to the top
/// of t: direct Eisenstein/unramified steps when the invariants hold, prime
/// radical chains through uniformizer substitution or unit-Kummer refinement,
/// and odd-p quadratics by completing the square.
template <class B>
attach_result<B> attach_recipe(const tower<B>& t, const exact_poly& g) {
    require(g.size() >= 2, errc::validation, "recipe must be nonconstant");
    std::size_t d = g.size() - 1;
    if (d == 1) return {t, {attach_path::trivial}};

    try {
        return {t.extend(g, step_kind::eisenstein), {attach_path::direct_eisenstein}};
    } catch (const error& e) {
        if (e.code() != errc::non_eisenstein) {
            if (e.code() != errc::not_unramified && e.code() != errc::validation) throw;
        }
    }
    try {
        return {t.extend(g, step_kind::unramified), {attach_path::direct_unramified}};
    } catch (const error& e) {
        if (e.code() != errc::not_unramified && e.code() != errc::validation) throw;
    }

    bool radical = true;
    for (std::size_t i = 1; i + 1 < g.size(); ++i)
        if (!(g[i] == exact_elem::rational(0))) radical = false;

    if (!radical && d == 2 && t.base().p != 2) {
        // complete the square: x^2 + bx + c adjoins sqrt(b^2/4 - c)
        require(g[0].is_leaf() && !g[0].leaf.is_tpoly && g[1].is_leaf() && !g[1].leaf.is_tpoly,
                errc::unsupported_recipe, "quadratic recipe needs rational coefficients");
        mpq_class b = g[1].leaf.rat, c = g[0].leaf.rat;
        mpq_class disc = b * b / 4 - c;
        require(disc != 0, errc::recipe_reducible, "quadratic recipe has a double root");
        auto [ext, path] = detail::attach_prime_radical(t, 2, t.from_rational(disc));
        return {std::move(ext), {path}};
    }
    require(radical, errc::unsupported_recipe,
            "recipe is neither a valid direct step nor a radical");

    // prime-radical chain for x^d - c
    elem<B> c = -t.from_exact(g[0]);
    tower<B> cur = t;
    std::vector<attach_path> paths;
    unsigned long rem = d;
    for (unsigned long q = 2; rem > 1; ++q) {
        while (rem % q == 0) {
            auto [ext, path] = detail::attach_prime_radical(cur, q, c);
            paths.push_back(path);
            rem /= q;
            if (rem > 1) {
                c = ext.top_generator();
                cur = ext;
            } else {
                cur = ext;
                break;
            }
        }
    }
    return {std::move(cur), std::move(paths)};
}

// --- tower families -----------------------------------------------------------

/// Built-in nested families F_n over Q_p.
struct tower_family {
    enum class kind { cyclotomic, p_radical, unramified, constant_field };

    kind k;
    unsigned long p;
    long precision;
    std::optional<json> constant_base; // tower document for constant families

    static tower_family cyclotomic(unsigned long p, long precision) {
        return {kind::cyclotomic, p, precision, std::nullopt};
    }
    static tower_family p_radical(unsigned long p, long precision) {
        return {kind::p_radical, p, precision, std::nullopt};
    }
    static tower_family unramified(unsigned long p, long precision) {
        return {kind::unramified, p, precision, std::nullopt};
    }
    static tower_family constant(json base_tower, unsigned long p, long precision) {
        return {kind::constant_field, p, precision, std::move(base_tower)};
    }

    padic_tower make(unsigned long n) const {
        switch (k) {
        case kind::cyclotomic: return make_cyclotomic(p, n, precision);
        case kind::p_radical: return make_p_radical(p, n, precision);
        case kind::unramified: return make_unramified(p, n, precision);
        case kind::constant_field: {
            if (!constant_base) return padic_tower(padic_base{p, precision});
            json doc = *constant_base;
            doc["base"]["precision"] = precision;
            any_tower t = load_tower(doc);
            auto* pt = std::get_if<padic_tower>(&t);
            require(pt != nullptr, errc::validation, "constant family base must be p-adic");
            return *pt;
        }
        }
        fail(errc::validation, "unknown family kind");
    }

    /// Whether a constant observed scan tail is backed by a registered
    /// stabilization argument for this family.
    bool stabilization_known() const {
        return k == kind::constant_field || k == kind::unramified;
    }

    const char* name() const {
        switch (k) {
        case kind::cyclotomic: return "cyclotomic";
        case kind::p_radical: return "p_radical";
        case kind::unramified: return "unramified";
        case kind::constant_field: return "constant";
        }
        return "?";
    }

    static tower_family from_name(const std::string& name, unsigned long p, long precision,
                                  std::optional<json> base = std::nullopt) {
        if (name == "cyclotomic") return cyclotomic(p, precision);
        if (name == "p_radical") return p_radical(p, precision);
        if (name == "unramified") return unramified(p, precision);
        if (name == "constant") return constant(base.value_or(json{{"base", {{"p", p}}}}), p, precision);
        fail(errc::validation, "unknown family '" + name + "'");
    }
};

/// K' recipe: a monic polynomial over the base field defining
/// F_n' = F_n(root), fixed across n.
struct kprime_recipe {
    exact_poly poly;
    unsigned long n0 = 0;

    static kprime_recipe from_json(const json& j) {
        kprime_recipe r;
        for (const auto& c : j.at("poly")) r.poly.push_back(exact_elem::from_json(c));
        if (j.contains("n0")) r.n0 = j["n0"].get<unsigned long>();
        return r;
    }

    static kprime_recipe radical(unsigned long r, const mpq_class& c) {
        kprime_recipe rec;
        rec.poly.push_back(exact_elem::rational(-c));
        for (unsigned long i = 1; i < r; ++i) rec.poly.push_back(exact_elem::rational(0));
        rec.poly.push_back(exact_elem::rational(1));
        return rec;
    }

    json to_json() const {
        json poly = json::array();
        for (const auto& c : this->poly) poly.push_back(c.to_json());
        return json{{"poly", poly}, {"n0", n0}};
    }
};

// --- scans --------------------------------------------------------------------

enum class scan_verdict { deeply_ramified_evidence, not_deeply_ramified, inconclusive };

inline const char* scan_verdict_name(scan_verdict v) {
    switch (v) {
    case scan_verdict::deeply_ramified_evidence: return "DeeplyRamifiedEvidence";
    case scan_verdict::not_deeply_ramified: return "NotDeeplyRamified";
    case scan_verdict::inconclusive: return "Inconclusive";
    }
    return "?";
}

struct scan_row {
    unsigned long n;
    std::optional<mpq_class> v_delta; // relative different v(delta(F_n'/F_n))
    bool cross_check_ok = true;
    std::vector<attach_path> paths;
    std::string error;
};

struct tower_scan {
    std::string family;
    unsigned long p = 0;
    std::vector<scan_row> rows;
    bool non_increasing = true;
    bool strictly_decreasing = true;
    scan_verdict verdict = scan_verdict::inconclusive;
    mpq_class threshold;
    unsigned long n_lo = 0, n_hi = 0;
    std::optional<std::string> closed_form;

    json to_json() const {
        json jrows = json::array();
        for (const auto& r : rows) {
            json row{{"n", r.n}};
            if (r.v_delta) {
                row["v_delta"] = rat_to_json(*r.v_delta);
                row["cross_check"] = r.cross_check_ok;
                json paths = json::array();
                for (auto p : r.paths) paths.push_back(attach_path_name(p));
                row["construction"] = paths;
            } else {
                row["error"] = r.error;
            }
            jrows.push_back(row);
        }
        json out{{"family", family},
                 {"p", p},
                 {"n", json::array({n_lo, n_hi})},
                 {"threshold", rat_to_json(threshold)},
                 {"rows", jrows},
                 {"monotone_non_increasing", non_increasing},
                 {"strictly_decreasing", strictly_decreasing},
                 {"verdict", scan_verdict_name(verdict)}};
        if (closed_form) out["closed_form"] = *closed_form;
        return out;
    }

    std::string to_csv() const {
        std::string s = "n,v_delta_num,v_delta_den,monotone,verdict\n";
        for (const auto& r : rows) {
            s += std::to_string(r.n) + ",";
            if (r.v_delta)
                s += r.v_delta->get_num().get_str() + "," + r.v_delta->get_den().get_str();
            else
                s += ",";
            s += std::string(",") + (non_increasing ? "true" : "false") + "," +
                 scan_verdict_name(verdict) + "\n";
        }
        return s;
    }
};

/// Relative different of the steps attached on top of a base prefix.
template <class B>
std::pair<mpq_class, bool> relative_different(const tower<B>& extended, std::size_t base_levels,
                                              bool cross_check) {
    mpq_class total(0);
    bool agree = true;
    for (std::size_t s = base_levels; s < extended.levels(); ++s) {
        different_entry e = different_step(extended, s, cross_check);
        total += e.value;
        if (!e.cross_check_agrees) agree = false;
    }
    return {total, agree};
}

/// Scan of v(delta(F_n'/F_n)) over a range of family levels. Verdicts are
/// finite evidence: a strictly decreasing sequence ending below the threshold
/// is DeeplyRamifiedEvidence; an eventually constant positive tail is
/// NotDeeplyRamified only for families with a registered stabilization
/// argument; anything else is Inconclusive.
inline tower_scan scan(const tower_family& family, const kprime_recipe& recipe,
                       unsigned long n_lo, unsigned long n_hi, const mpq_class& threshold,
                       bool cross_check = true) {
    require(n_lo >= 1 && n_hi >= n_lo, errc::validation, "bad scan range");
    require(n_lo >= std::max<unsigned long>(recipe.n0, 1), errc::validation,
            "scan range starts below the recipe's n0");
    tower_scan out;
    out.family = family.name();
    out.p = family.p;
    out.threshold = threshold;
    out.n_lo = n_lo;
    out.n_hi = n_hi;

    for (unsigned long n = n_lo; n <= n_hi; ++n) {
        scan_row row;
        row.n = n;
        try {
            padic_tower fn = family.make(n);
            attach_result<padic_base> att = attach_recipe(fn, recipe.poly);
            auto [total, agree] = relative_different(att.extended, fn.levels(), cross_check);
            row.v_delta = total;
            row.cross_check_ok = agree;
            row.paths = att.paths;
        } catch (const error& e) {
            row.error = e.what();
        }
        out.rows.push_back(std::move(row));
    }

    const mpq_class* prev = nullptr;
    bool have_all = true;
    for (const auto& r : out.rows) {
        if (!r.v_delta) {
            have_all = false;
            continue;
        }
        if (prev) {
            if (*r.v_delta > *prev) out.non_increasing = false;
            if (*r.v_delta >= *prev) out.strictly_decreasing = false;
        }
        prev = &*r.v_delta;
    }
    if (!have_all || out.rows.empty()) {
        out.verdict = scan_verdict::inconclusive;
        return out;
    }

    const mpq_class& last = *out.rows.back().v_delta;
    std::size_t tail = 1;
    for (std::size_t i = out.rows.size(); i-- > 1;) {
        if (*out.rows[i - 1].v_delta == last)
            ++tail;
        else
            break;
    }
    if (out.strictly_decreasing && last < threshold && last > 0)
        out.verdict = scan_verdict::deeply_ramified_evidence;
    else if (tail >= 2 && last > 0 && family.stabilization_known())
        out.verdict = scan_verdict::not_deeply_ramified;
    else
        out.verdict = scan_verdict::inconclusive;

    if (family.k == tower_family::kind::constant_field && out.rows.size() >= 1)
        out.closed_form = "constant family: v(delta_n) is independent of n";
    return out;
}

/// v(delta(F_n/Q_p)) with the registered closed form for cyclotomic
/// families.
struct absolute_different_report {
    unsigned long n;
    mpq_class value;
    std::optional<mpq_class> closed_form;
    bool closed_form_matches = true;

    json to_json() const {
        json j{{"n", n}, {"v_delta_abs", rat_to_json(value)}};
        if (closed_form) {
            j["closed_form"] = rat_to_json(*closed_form);
            j["closed_form_matches"] = closed_form_matches;
        }
        return j;
    }
};

inline absolute_different_report absolute_different(const tower_family& family,
                                                    unsigned long n, bool cross_check = false) {
    padic_tower fn = family.make(n);
    absolute_different_report rep;
    rep.n = n;
    rep.value = different_tower(fn, cross_check).total;
    if (family.k == tower_family::kind::cyclotomic) {
        rep.closed_form = mpq_class(n) - mpq_class(1, family.p - 1);
        rep.closed_form_matches = rep.value == *rep.closed_form;
    }
    return rep;
}

// --- Frobenius witness search ---------------------------------------------------

struct frobenius_witness {
    enum class status { found, budget_exhausted, level_exhausted };

    status result;
    unsigned long level = 0;          // level m of the witness
    std::optional<exact_elem> witness;
    mpz_class candidates_tried = 0;

    json to_json() const {
        json j{{"status", result == status::found
                              ? "found"
                              : result == status::budget_exhausted ? "BudgetExhausted"
                                                                   : "LevelExhausted"},
               {"candidates_tried", mpz_to_json(candidates_tried)}};
        if (result == status::found) {
            j["level"] = level;
            j["witness"] = witness->to_json();
        }
        return j;
    }
};

/// Deterministic brute-force search for y with y^p = x mod p, scanning the
/// residue systems of O_{F_m}/p in coefficient-lexicographic order for
/// m = n .. m_max. A returned witness is re-verified by direct
/// power-and-subtract.
inline frobenius_witness frobenius_search(const tower_family& family, unsigned long n,
                                          const elem<padic_base>& x, unsigned long m_max,
                                          const mpz_class& budget) {
    unsigned long p = family.p;
    frobenius_witness out;
    require(x.valuation().value >= 0, errc::validation, "witness target must be integral");
    for (unsigned long m = n; m <= m_max; ++m) {
        padic_tower fm = family.make(m);
        elem<padic_base> xm = fm.embed(x);
        mpz_class space = pow_ui(p, fm.degree());
        for (mpz_class idx = 0; idx < space; ++idx) {
            if (out.candidates_tried >= budget) {
                out.result = frobenius_witness::status::budget_exhausted;
                return out;
            }
            ++out.candidates_tried;
            elem<padic_base> y = fm.residue_system_rep(idx);
            elem<padic_base> diff = y.pow(p) - xm;
            if (diff.valuation().value >= 1) {
                // re-verify by direct power-and-subtract
                elem<padic_base> yy = fm.one();
                for (unsigned long k = 0; k < p; ++k) yy = yy * y;
                if ((yy - xm).valuation().value >= 1) {
                    out.result = frobenius_witness::status::found;
                    out.level = m;
                    out.witness = y.to_exact();
                    return out;
                }
            }
        }
    }
    out.result = frobenius_witness::status::level_exhausted;
    return out;
}

} // namespace ramify
