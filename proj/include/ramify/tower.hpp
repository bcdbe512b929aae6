#pragma once

#include <gmpxx.h>

#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ramify/errors.hpp"
#include "ramify/exact.hpp"
#include "ramify/json.hpp"
#include "ramify/rational.hpp"
#include "ramify/residue.hpp"
#include "ramify/scalar_laurent.hpp"
#include "ramify/scalar_padic.hpp"

namespace ramify {

enum class step_kind { eisenstein, unramified };

namespace detail {

/// Bare coefficient tree of a tower element: a base scalar at level 0, the
/// power-basis coefficient vector (entries one level down) above. Arithmetic
/// lives in free functions that receive the owning tower data.
template <class B>
struct raw_elem {
    typename B::scalar s;
    std::vector<raw_elem> c;
};

template <class B>
struct step_data {
    step_kind kind;
    exact_poly poly_exact;             // constant-first, monic; precision-independent
    std::vector<raw_elem<B>> poly;     // materialized at working precision
    std::size_t degree;
    mpq_class gen_valuation;           // v(theta) in the v(p)=1 normalization
    std::size_t ff_level;              // residue-tower level after this step
};

template <class B>
struct tower_data {
    B base;
    std::vector<step_data<B>> steps;
    ff_tower residue;
    unsigned long e = 1;
    unsigned long f = 1;

    explicit tower_data(B b) : base(std::move(b)), residue(base.p) {}

    std::size_t level_degree(std::size_t level) const { return steps.at(level - 1).degree; }
    unsigned long total_degree() const { return e * f; }
    std::size_t ff_level_at(std::size_t level) const {
        return level == 0 ? 0 : steps[level - 1].ff_level;
    }
    mpq_class uniformizer_valuation(std::size_t level) const {
        mpq_class v(1);
        unsigned long e_lvl = 1;
        for (std::size_t i = 0; i < level; ++i)
            if (steps[i].kind == step_kind::eisenstein)
                e_lvl *= static_cast<unsigned long>(steps[i].degree);
        return mpq_class(1, e_lvl);
    }
};

template <class B>
raw_elem<B> zero_raw(const tower_data<B>& td, std::size_t level) {
    if (level == 0) return {td.base.zero(), {}};
    std::vector<raw_elem<B>> c(td.level_degree(level), zero_raw(td, level - 1));
    return {typename B::scalar{}, std::move(c)};
}

template <class B>
raw_elem<B> embed_raw(const tower_data<B>& td, raw_elem<B> x, std::size_t from, std::size_t to) {
    for (std::size_t l = from + 1; l <= to; ++l) {
        raw_elem<B> up = zero_raw(td, l);
        up.c[0] = std::move(x);
        x = std::move(up);
    }
    return x;
}

template <class B>
raw_elem<B> from_exact_raw(const tower_data<B>& td, std::size_t level, const exact_elem& e) {
    if (e.is_leaf()) {
        raw_elem<B> leaf{td.base.from_exact(e.leaf), {}};
        return embed_raw(td, std::move(leaf), 0, level);
    }
    require(level > 0, errc::validation, "vector element at base level");
    require(e.coeffs.size() <= td.level_degree(level), errc::validation,
            "element has more coordinates than the step degree");
    raw_elem<B> r = zero_raw(td, level);
    for (std::size_t i = 0; i < e.coeffs.size(); ++i)
        r.c[i] = from_exact_raw(td, level - 1, e.coeffs[i]);
    return r;
}

template <class B>
exact_elem to_exact_raw(const raw_elem<B>& x) {
    if (x.c.empty()) return exact_elem::scalar(x.s.representative());
    std::vector<exact_elem> cs;
    cs.reserve(x.c.size());
    for (const auto& c : x.c) cs.push_back(to_exact_raw(c));
    return exact_elem::vec(std::move(cs));
}

template <class B>
raw_elem<B> add_raw(const tower_data<B>& td, std::size_t level, const raw_elem<B>& a,
                    const raw_elem<B>& b) {
    if (level == 0) return {a.s + b.s, {}};
    raw_elem<B> r = a;
    for (std::size_t i = 0; i < r.c.size(); ++i) r.c[i] = add_raw(td, level - 1, r.c[i], b.c[i]);
    return r;
}

template <class B>
raw_elem<B> neg_raw(const tower_data<B>& td, std::size_t level, const raw_elem<B>& a) {
    if (level == 0) return {-a.s, {}};
    raw_elem<B> r = a;
    for (auto& ci : r.c) ci = neg_raw(td, level - 1, ci);
    return r;
}

template <class B>
raw_elem<B> sub_raw(const tower_data<B>& td, std::size_t level, const raw_elem<B>& a,
                    const raw_elem<B>& b) {
    return add_raw(td, level, a, neg_raw(td, level, b));
}

template <class B>
raw_elem<B> mul_raw(const tower_data<B>& td, std::size_t level, const raw_elem<B>& a,
                    const raw_elem<B>& b) {
    if (level == 0) return {a.s * b.s, {}};
    std::size_t d = td.level_degree(level);
    if (d == 1) {
        raw_elem<B> r = zero_raw(td, level);
        r.c[0] = mul_raw(td, level - 1, a.c[0], b.c[0]);
        return r;
    }
    std::vector<raw_elem<B>> prod(2 * d - 1, zero_raw(td, level - 1));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            prod[i + j] = add_raw(td, level - 1, prod[i + j],
                                  mul_raw(td, level - 1, a.c[i], b.c[j]));
    // reduce modulo the (monic) defining polynomial
    const auto& f = td.steps[level - 1].poly;
    for (std::size_t i = prod.size(); i-- > d;) {
        raw_elem<B> lead = prod[i];
        for (std::size_t j = 0; j < d; ++j)
            prod[i - d + j] = sub_raw(td, level - 1, prod[i - d + j],
                                      mul_raw(td, level - 1, lead, f[j]));
    }
    raw_elem<B> r = zero_raw(td, level);
    for (std::size_t i = 0; i < d; ++i) r.c[i] = prod[i];
    return r;
}

template <class B>
raw_elem<B> one_raw(const tower_data<B>& td, std::size_t level) {
    raw_elem<B> o{td.base.one(), {}};
    return embed_raw(td, std::move(o), 0, level);
}

template <class B>
raw_elem<B> pow_raw(const tower_data<B>& td, std::size_t level, raw_elem<B> base, mpz_class e) {
    require(e >= 0, errc::validation, "pow_raw needs a nonnegative exponent");
    raw_elem<B> acc = one_raw(td, level);
    while (e > 0) {
        if (mpz_odd_p(e.get_mpz_t())) acc = mul_raw(td, level, acc, base);
        base = mul_raw(td, level, base, base);
        e >>= 1;
    }
    return acc;
}

template <class B>
valuation_t val_raw(const tower_data<B>& td, std::size_t level, const raw_elem<B>& x) {
    if (level == 0) return x.s.valuation();
    const auto& st = td.steps[level - 1];
    bool have_exact = false;
    mpq_class best_exact;
    bool have_bound = false;
    mpq_class best_bound;
    for (std::size_t i = 0; i < x.c.size(); ++i) {
        valuation_t v = val_raw(td, level - 1, x.c[i]);
        mpq_class shift = st.kind == step_kind::eisenstein
                              ? mpq_class(st.gen_valuation * static_cast<long>(i))
                              : mpq_class(0);
        mpq_class total = v.value + shift;
        if (v.exact) {
            if (!have_exact || total < best_exact) {
                have_exact = true;
                best_exact = total;
            }
        } else {
            if (!have_bound || total < best_bound) {
                have_bound = true;
                best_bound = total;
            }
        }
    }
    // Coordinates contribute independently: distinct generator-power shifts
    // for Eisenstein steps, residue independence for unramified ones, so the
    // minimum over exact coordinates is exact whenever it lies below every
    // unknown coordinate's bound.
    if (have_exact && (!have_bound || best_exact < best_bound)) return exact_val(best_exact);
    if (have_exact && have_bound) return bound_val(best_bound);
    if (have_bound) return bound_val(best_bound);
    return bound_val(best_exact); // all-empty cannot happen; defensive
}

template <class B>
bool zero_at_precision_raw(const tower_data<B>& td, std::size_t level, const raw_elem<B>& x) {
    return !val_raw(td, level, x).exact;
}

/// Residue of an integral element in the residue-field tower.
template <class B>
ff_elem residue_raw(const tower_data<B>& td, std::size_t level, const raw_elem<B>& x) {
    if (level == 0) {
        return ff_elem{static_cast<std::uint32_t>(x.s.residue()), {}};
    }
    const auto& st = td.steps[level - 1];
    if (st.kind == step_kind::eisenstein) {
        // v(theta) > 0: only the constant coordinate survives
        return residue_raw(td, level - 1, x.c[0]);
    }
    std::size_t fl = st.ff_level;
    ff_elem r = td.residue.zero(fl);
    ff_elem gen = td.residue.generator(fl);
    ff_elem genpow = td.residue.one(fl);
    for (std::size_t i = 0; i < x.c.size(); ++i) {
        ff_elem ci = td.residue.embed(residue_raw(td, level - 1, x.c[i]),
                                      td.ff_level_at(level - 1), fl);
        r = td.residue.add(r, td.residue.mul(ci, genpow, fl));
        if (i + 1 < x.c.size()) genpow = td.residue.mul(genpow, gen, fl);
    }
    return r;
}

/// Lift of a residue element back into the tower (integer digits, generator
/// monomials of the unramified steps).
template <class B>
raw_elem<B> lift_ff_raw(const tower_data<B>& td, std::size_t level, const ff_elem& x,
                        std::size_t ff_level) {
    require(td.ff_level_at(level) >= ff_level, errc::validation,
            "residue element lives above this tower level");
    if (ff_level == 0) {
        raw_elem<B> leaf{td.base.from_rational(mpq_class(x.digit)), {}};
        return embed_raw(td, std::move(leaf), 0, level);
    }
    // find the tower level whose step realizes ff level `ff_level`
    std::size_t tl = 0;
    for (std::size_t i = 1; i <= level; ++i)
        if (td.steps[i - 1].kind == step_kind::unramified && td.steps[i - 1].ff_level == ff_level) {
            tl = i;
            break;
        }
    require(tl > 0, errc::validation, "no unramified step matches the residue level");
    raw_elem<B> r = zero_raw(td, tl);
    for (std::size_t i = 0; i < x.coeffs.size(); ++i)
        r.c[i] = lift_ff_raw(td, tl - 1, x.coeffs[i], ff_level - 1);
    return embed_raw(td, std::move(r), tl, level);
}

/// Residue-system representative with the given counter index: digit j of the
/// index (base p) becomes the coefficient of the j-th power-basis monomial,
/// innermost step fastest. Enumerating indices 0..p^D-1 walks O/pO once.
template <class B>
raw_elem<B> residue_system_raw(const tower_data<B>& td, std::size_t level, mpz_class& counter) {
    if (level == 0) {
        mpz_class digit = counter % static_cast<unsigned long>(td.base.p);
        counter /= static_cast<unsigned long>(td.base.p);
        return {td.base.from_rational(mpq_class(digit)), {}};
    }
    raw_elem<B> r = zero_raw(td, level);
    for (std::size_t i = 0; i < r.c.size(); ++i)
        r.c[i] = residue_system_raw(td, level - 1, counter);
    return r;
}

/// Extended-euclid inverse in the quotient field of a level.
template <class B>
raw_elem<B> inv_raw(const tower_data<B>& td, std::size_t level, const raw_elem<B>& a);

template <class B>
using rpoly = std::vector<raw_elem<B>>; // constant-first, coefficients one level down

template <class B>
void rpoly_trim(const tower_data<B>& td, std::size_t level, rpoly<B>& v) {
    while (!v.empty() && zero_at_precision_raw(td, level, v.back())) v.pop_back();
}

template <class B>
rpoly<B> rpoly_mul(const tower_data<B>& td, std::size_t level, const rpoly<B>& a,
                   const rpoly<B>& b) {
    if (a.empty() || b.empty()) return {};
    rpoly<B> out(a.size() + b.size() - 1, zero_raw(td, level));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            out[i + j] = add_raw(td, level, out[i + j], mul_raw(td, level, a[i], b[j]));
    return out;
}

template <class B>
rpoly<B> rpoly_sub(const tower_data<B>& td, std::size_t level, const rpoly<B>& a,
                   const rpoly<B>& b) {
    rpoly<B> out(std::max(a.size(), b.size()), zero_raw(td, level));
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i) out[i] = sub_raw(td, level, out[i], b[i]);
    return out;
}

template <class B>
std::pair<rpoly<B>, rpoly<B>> rpoly_divmod(const tower_data<B>& td, std::size_t level,
                                           rpoly<B> num, const rpoly<B>& den) {
    rpoly<B> q(num.size() >= den.size() ? num.size() - den.size() + 1 : 0, zero_raw(td, level));
    raw_elem<B> dinv = inv_raw(td, level, den.back());
    while (num.size() >= den.size()) {
        if (zero_at_precision_raw(td, level, num.back())) {
            num.pop_back();
            continue;
        }
        raw_elem<B> c = mul_raw(td, level, num.back(), dinv);
        std::size_t shift = num.size() - den.size();
        q[shift] = c;
        for (std::size_t i = 0; i + 1 < den.size(); ++i)
            num[shift + i] = sub_raw(td, level, num[shift + i], mul_raw(td, level, c, den[i]));
        num.pop_back();
    }
    rpoly_trim(td, level, num);
    return {std::move(q), std::move(num)};
}

template <class B>
raw_elem<B> inv_raw(const tower_data<B>& td, std::size_t level, const raw_elem<B>& a) {
    if (level == 0) return {a.s.inv(), {}};
    require(!zero_at_precision_raw(td, level, a), errc::division_by_zero_at_precision,
            "inverse of an element indistinguishable from zero at working precision");
    std::size_t below = level - 1;
    const auto& st = td.steps[level - 1];
    rpoly<B> r0 = st.poly;                 // monic defining polynomial
    rpoly<B> r1(a.c.begin(), a.c.end());
    rpoly_trim(td, below, r1);
    rpoly<B> s0;                           // zero polynomial
    rpoly<B> s1{one_raw(td, below)};
    while (r1.size() > 1) {
        auto [q, rem] = rpoly_divmod(td, below, r0, r1);
        rpoly<B> s2 = rpoly_sub(td, below, s0, rpoly_mul(td, below, q, s1));
        r0 = std::move(r1);
        r1 = std::move(rem);
        s0 = std::move(s1);
        s1 = std::move(s2);
    }
    require(!r1.empty(), errc::division_by_zero_at_precision,
            "element shares a factor with the defining polynomial at precision");
    raw_elem<B> c = inv_raw(td, below, r1[0]);
    raw_elem<B> out = zero_raw(td, level);
    for (std::size_t i = 0; i < s1.size() && i < out.c.size(); ++i)
        out.c[i] = mul_raw(td, below, s1[i], c);
    return out;
}

} // namespace detail

template <class B>
class tower;

/// Element of a tower level. Immutable value type sharing the tower data.
template <class B>
class elem {
public:
    elem() = default;

    std::size_t level() const { return level_; }

    valuation_t valuation() const { return detail::val_raw(*d_, level_, raw_); }
    bool zero_at_precision() const { return !valuation().exact; }

    exact_elem to_exact() const { return detail::to_exact_raw(raw_); }

    elem lift_to(std::size_t level) const {
        require(level >= level_, errc::validation, "cannot lower an element's level");
        return elem(d_, level, detail::embed_raw(*d_, raw_, level_, level));
    }

    friend elem operator+(const elem& a, const elem& b) {
        a.check(b);
        return elem(a.d_, a.level_, detail::add_raw(*a.d_, a.level_, a.raw_, b.raw_));
    }
    friend elem operator-(const elem& a, const elem& b) {
        a.check(b);
        return elem(a.d_, a.level_, detail::sub_raw(*a.d_, a.level_, a.raw_, b.raw_));
    }
    elem operator-() const { return elem(d_, level_, detail::neg_raw(*d_, level_, raw_)); }
    friend elem operator*(const elem& a, const elem& b) {
        a.check(b);
        return elem(a.d_, a.level_, detail::mul_raw(*a.d_, a.level_, a.raw_, b.raw_));
    }
    elem inv() const { return elem(d_, level_, detail::inv_raw(*d_, level_, raw_)); }
    elem pow(const mpz_class& e) const {
        if (e < 0) return inv().pow(-e);
        return elem(d_, level_, detail::pow_raw(*d_, level_, raw_, e));
    }

    ff_elem residue() const { return detail::residue_raw(*d_, level_, raw_); }

    /// Coordinate i in the power basis of the enclosing step; one level down.
    elem coeff(std::size_t i) const {
        require(level_ >= 1, errc::validation, "base-level elements have no coordinates");
        return elem(d_, level_ - 1, raw_.c.at(i));
    }

    /// v(a - b) >= order, exactly or as a certified bound.
    friend bool congruent(const elem& a, const elem& b, const mpq_class& order) {
        return (a - b).valuation().value >= order;
    }

    const detail::raw_elem<B>& raw() const { return raw_; }
    const std::shared_ptr<const detail::tower_data<B>>& data() const { return d_; }

private:
    template <class>
    friend class tower;

    elem(std::shared_ptr<const detail::tower_data<B>> d, std::size_t level,
         detail::raw_elem<B> raw)
        : d_(std::move(d)), level_(level), raw_(std::move(raw)) {}

    void check(const elem& o) const {
        require(d_ == o.d_ && level_ == o.level_, errc::tower_mismatch,
                "elements of different towers or levels");
    }

    std::shared_ptr<const detail::tower_data<B>> d_;
    std::size_t level_ = 0;
    detail::raw_elem<B> raw_;
};

/// A chain of monogenic steps over Q_p or F_p((t)). Immutable; extension
/// returns a new tower sharing nothing mutable.
template <class B>
class tower {
public:
    explicit tower(B base) : d_(std::make_shared<detail::tower_data<B>>(std::move(base))) {}

    const B& base() const { return d_->base; }
    std::size_t levels() const { return d_->steps.size(); }
    unsigned long e() const { return d_->e; }
    unsigned long f() const { return d_->f; }
    unsigned long degree() const { return d_->total_degree(); }
    step_kind kind(std::size_t step) const { return d_->steps.at(step).kind; }
    std::size_t step_degree(std::size_t step) const { return d_->steps.at(step).degree; }
    const exact_poly& step_poly(std::size_t step) const { return d_->steps.at(step).poly_exact; }
    mpq_class generator_valuation(std::size_t step) const {
        return d_->steps.at(step).gen_valuation;
    }
    const ff_tower& residue_field() const { return d_->residue; }

    /// Normalized value group of the tower is (1/e)Z.
    mpq_class uniformizer_valuation() const { return d_->uniformizer_valuation(levels()); }

    // --- element factories -------------------------------------------------

    elem<B> zero(std::size_t level) const {
        return elem<B>(d_, level, detail::zero_raw(*d_, level));
    }
    elem<B> zero() const { return zero(levels()); }

    elem<B> from_rational(const mpq_class& q, std::size_t level) const {
        detail::raw_elem<B> leaf{d_->base.from_rational(q), {}};
        return elem<B>(d_, level, detail::embed_raw(*d_, std::move(leaf), 0, level));
    }
    elem<B> from_rational(const mpq_class& q) const { return from_rational(q, levels()); }
    elem<B> one() const { return from_rational(1); }

    elem<B> from_exact(const exact_elem& e, std::size_t level) const {
        return elem<B>(d_, level, detail::from_exact_raw(*d_, level, e));
    }
    elem<B> from_exact(const exact_elem& e) const { return from_exact(e, levels()); }

    /// Generator of step k (0-based), as an element of level k+1.
    elem<B> generator(std::size_t step) const {
        const auto& st = d_->steps.at(step);
        detail::raw_elem<B> r = detail::zero_raw(*d_, step + 1);
        if (st.degree == 1) {
            r.c[0] = detail::neg_raw(*d_, step, st.poly[0]);
        } else {
            detail::raw_elem<B> o{d_->base.one(), {}};
            r.c[1] = detail::embed_raw(*d_, std::move(o), 0, step);
        }
        return elem<B>(d_, step + 1, std::move(r));
    }

    elem<B> top_generator() const {
        require(levels() > 0, errc::validation, "base tower has no generator");
        return generator(levels() - 1);
    }

    /// Coefficient i of step k's defining polynomial, as an element of the
    /// step's base level k.
    elem<B> step_coeff(std::size_t step, std::size_t i) const {
        return elem<B>(d_, step, d_->steps.at(step).poly.at(i));
    }

    /// Uniformizer of a level: the generator of the top Eisenstein step at or
    /// below it, or the base uniformizer.
    elem<B> uniformizer(std::size_t level) const {
        for (std::size_t i = level; i-- > 0;)
            if (d_->steps[i].kind == step_kind::eisenstein)
                return generator(i).lift_to(level);
        detail::raw_elem<B> leaf{d_->base.uniformizer(), {}};
        return elem<B>(d_, level, detail::embed_raw(*d_, std::move(leaf), 0, level));
    }
    elem<B> uniformizer() const { return uniformizer(levels()); }

    elem<B> lift_residue(const ff_elem& x, std::size_t ff_level) const {
        return elem<B>(d_, levels(), detail::lift_ff_raw(*d_, levels(), x, ff_level));
    }

    /// Representative of the residue system O/pO with the given counter
    /// index; enumerating 0 .. p^degree - 1 is the deterministic
    /// coefficient-lexicographic walk used by witness searches.
    elem<B> residue_system_rep(const mpz_class& index) const {
        mpz_class c = index;
        return elem<B>(d_, levels(), detail::residue_system_raw(*d_, levels(), c));
    }

    // --- extension ----------------------------------------------------------

    /// Extends by a monic polynomial, constant-first, coefficients at the
    /// current top level. Validates the declared kind's invariant.
    tower extend(const exact_poly& poly, step_kind kind) const {
        require(poly.size() >= 2, errc::validation, "defining polynomial must be nonconstant");
        std::size_t d = poly.size() - 1;
        std::size_t top = levels();

        auto next = std::make_shared<detail::tower_data<B>>(*d_);
        detail::step_data<B> st;
        st.kind = kind;
        st.poly_exact = poly;
        st.degree = d;
        st.ff_level = d_->ff_level_at(top);
        for (const auto& ce : poly) st.poly.push_back(detail::from_exact_raw(*d_, top, ce));

        // monic: force the stored leading coefficient to exactly one
        {
            auto one_top = detail::one_raw(*d_, top);
            auto diff = detail::sub_raw(*d_, top, st.poly.back(), one_top);
            require(!detail::val_raw(*d_, top, diff).exact, errc::validation,
                    "defining polynomial must be monic");
            st.poly.back() = one_top;
            st.poly_exact.back() = exact_elem::rational(1);
        }

        mpq_class pival = d_->uniformizer_valuation(top);
        if (kind == step_kind::eisenstein) {
            valuation_t v0 = detail::val_raw(*d_, top, st.poly[0]);
            require(v0.exact, errc::precision_exhausted,
                    "cannot certify the constant term's valuation");
            require(v0.value == pival, errc::non_eisenstein,
                    "constant term does not have minimal positive value");
            for (std::size_t i = 1; i < d; ++i) {
                valuation_t vi = detail::val_raw(*d_, top, st.poly[i]);
                require(vi.value > 0, errc::non_eisenstein,
                        "lower coefficient " + std::to_string(i) + " is not of positive value");
            }
            st.gen_valuation = v0.value / static_cast<long>(d);
            next->e *= static_cast<unsigned long>(d);
        } else {
            std::vector<ff_elem> rpoly;
            for (const auto& c : st.poly) {
                valuation_t vc = detail::val_raw(*d_, top, c);
                require(vc.value >= 0, errc::not_unramified,
                        "unramified step has a non-integral coefficient");
                rpoly.push_back(detail::residue_raw(*next, top, c));
            }
            next->residue.push_level(std::move(rpoly)); // validates irreducibility
            st.gen_valuation = 0;
            st.ff_level = next->residue.levels();
            next->f *= static_cast<unsigned long>(d);
        }
        next->steps.push_back(std::move(st));
        return tower(std::move(next));
    }

    /// Rebuilds the tower at a different base precision from the exact step
    /// descriptions; certified digits never change.
    tower with_precision(long n) const {
        tower t(d_->base.with_precision(n));
        for (const auto& st : d_->steps) t = t.extend(st.poly_exact, st.kind);
        return t;
    }

    /// Whether `prefix` agrees with this tower's first steps; elements of a
    /// prefix then embed verbatim.
    bool has_prefix(const tower& prefix) const {
        if (prefix.levels() > levels()) return false;
        if (!(prefix.base() == base())) return false;
        for (std::size_t i = 0; i < prefix.levels(); ++i) {
            if (d_->steps[i].kind != prefix.d_->steps[i].kind) return false;
            if (!(d_->steps[i].poly_exact == prefix.d_->steps[i].poly_exact)) return false;
        }
        return true;
    }

    /// Embeds an element of a prefix-compatible tower (checked against this
    /// tower's step descriptions) and lifts it to the top level.
    elem<B> embed(const elem<B>& x) const {
        if (x.data() == d_) return x.lift_to(levels());
        require(x.level() <= levels(), errc::tower_mismatch,
                "element lives above this tower");
        require(x.data()->base == d_->base, errc::tower_mismatch,
                "element from a tower over a different base");
        for (std::size_t i = 0; i < x.level(); ++i)
            require(x.data()->steps[i].kind == d_->steps[i].kind &&
                        x.data()->steps[i].poly_exact == d_->steps[i].poly_exact,
                    errc::tower_mismatch, "element from a non-prefix tower");
        detail::raw_elem<B> r = x.raw();
        return elem<B>(d_, x.level(), std::move(r)).lift_to(levels());
    }

    json to_json() const {
        json steps = json::array();
        for (const auto& st : d_->steps) {
            json poly = json::array();
            for (const auto& c : st.poly_exact) poly.push_back(c.to_json());
            steps.push_back(json{
                {"kind", st.kind == step_kind::eisenstein ? "eisenstein" : "unramified"},
                {"poly", poly}});
        }
        return json{{"base", d_->base.to_json()}, {"steps", steps}};
    }

    const std::shared_ptr<const detail::tower_data<B>>& data() const { return d_; }

private:
    explicit tower(std::shared_ptr<detail::tower_data<B>> d) : d_(std::move(d)) {}
    explicit tower(std::shared_ptr<const detail::tower_data<B>> d) : d_(std::move(d)) {}

    std::shared_ptr<const detail::tower_data<B>> d_;
};

using padic_tower = tower<padic_base>;
using laurent_tower = tower<laurent_base>;
using any_tower = std::variant<padic_tower, laurent_tower>;

inline any_tower load_tower(const json& j) {
    require(j.contains("base"), errc::validation, "tower document needs a base");
    const json& b = j["base"];
    unsigned long p = b.at("p").get<unsigned long>();
    long prec = b.contains("precision") ? b["precision"].get<long>() : 32;
    require(prec >= 8, errc::validation, "precision must be at least 8");
    bool laurent = b.contains("laurent") && b["laurent"].get<bool>();

    auto build = [&](auto base) -> any_tower {
        tower t(base);
        if (j.contains("steps"))
            for (const auto& s : j["steps"]) {
                std::string kind = s.at("kind").get<std::string>();
                exact_poly poly;
                for (const auto& c : s.at("poly")) poly.push_back(exact_elem::from_json(c));
                if (kind == "eisenstein")
                    t = t.extend(poly, step_kind::eisenstein);
                else if (kind == "unramified")
                    t = t.extend(poly, step_kind::unramified);
                else
                    fail(errc::validation, "unknown step kind '" + kind + "'");
            }
        return t;
    };
    if (laurent) return build(laurent_base{p, prec});
    return build(padic_base{p, prec});
}

// --- built-in towers --------------------------------------------------------

namespace detail {

inline exact_elem neg_theta(std::size_t prev_degree) {
    // -theta as an exact coefficient vector at the previous level
    std::vector<exact_elem> c(prev_degree, exact_elem::rational(0));
    if (prev_degree >= 2)
        c[1] = exact_elem::rational(-1);
    return exact_elem::vec(std::move(c));
}

} // namespace detail

/// Q_p(zeta_{p^n}) as a chain of Eisenstein steps via shifted cyclotomic
/// polynomials; generator of step k is zeta_{p^k} - 1.
inline padic_tower make_cyclotomic(unsigned long p, unsigned long n, long precision) {
    padic_tower t(padic_base{p, precision});
    unsigned long first = p == 2 ? 2 : 1;
    for (unsigned long k = first; k <= n; ++k) {
        if ((p != 2 && k == 1) || (p == 2 && k == 2)) {
            // shifted Phi_p (resp. Phi_4): ((x+1)^p - 1)/x, resp. (x+1)^2 + 1
            exact_poly poly;
            if (p == 2) {
                poly = {exact_elem::rational(2), exact_elem::rational(2),
                        exact_elem::rational(1)};
            } else {
                for (unsigned long i = 1; i <= p; ++i) {
                    mpz_class c;
                    mpz_bin_uiui(c.get_mpz_t(), p, i);
                    poly.push_back(exact_elem::rational(mpq_class(c)));
                }
            }
            t = t.extend(poly, step_kind::eisenstein);
        } else {
            // (x+1)^p - (theta+1) over the previous level
            std::size_t prev_deg = t.step_degree(t.levels() - 1);
            exact_poly poly;
            std::vector<exact_elem> c0(prev_deg, exact_elem::rational(0));
            if (prev_deg >= 2) c0[1] = exact_elem::rational(-1);
            poly.push_back(exact_elem::vec(std::move(c0))); // -theta
            for (unsigned long i = 1; i <= p; ++i) {
                mpz_class c;
                mpz_bin_uiui(c.get_mpz_t(), p, i);
                poly.push_back(exact_elem::rational(mpq_class(c)));
            }
            t = t.extend(poly, step_kind::eisenstein);
        }
    }
    return t;
}

/// Q_p(p^(1/p^n)) as n Eisenstein steps x^p - (previous uniformizer).
inline padic_tower make_p_radical(unsigned long p, unsigned long n, long precision) {
    padic_tower t(padic_base{p, precision});
    for (unsigned long k = 1; k <= n; ++k) {
        exact_poly poly;
        if (k == 1)
            poly.push_back(exact_elem::rational(-static_cast<long>(p)));
        else
            poly.push_back(detail::neg_theta(p));
        for (unsigned long i = 1; i < p; ++i) poly.push_back(exact_elem::rational(0));
        poly.push_back(exact_elem::rational(1));
        t = t.extend(poly, step_kind::eisenstein);
    }
    return t;
}

/// Degree-2^n unramified tower: n quadratic unramified steps found by
/// residue-polynomial search.
inline padic_tower make_unramified(unsigned long p, unsigned long n, long precision) {
    padic_tower t(padic_base{p, precision});
    for (unsigned long k = 1; k <= n; ++k) {
        const ff_tower& rf = t.residue_field();
        std::size_t fl = rf.levels();
        mpz_class q = rf.order(fl);
        exact_poly found;
        for (mpz_class bi = 0; bi < q && found.empty(); ++bi) {
            for (mpz_class ai = 0; ai < q && found.empty(); ++ai) {
                std::vector<ff_elem> cand{rf.from_index(fl, bi), rf.from_index(fl, ai),
                                          rf.one(fl)};
                if (!rf.irreducible(cand, fl)) continue;
                exact_poly poly;
                poly.push_back(t.lift_residue(cand[0], fl).to_exact());
                poly.push_back(t.lift_residue(cand[1], fl).to_exact());
                poly.push_back(exact_elem::rational(1));
                found = std::move(poly);
            }
        }
        require(!found.empty(), errc::validation, "no irreducible quadratic found");
        t = t.extend(found, step_kind::unramified);
    }
    return t;
}

inline padic_tower make_constant(const padic_tower& base) { return base; }

} // namespace ramify
