#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ramify/errors.hpp"
#include "ramify/json.hpp"
#include "ramify/matrixops.hpp"
#include "ramify/snf.hpp"
#include "ramify/tower.hpp"

namespace ramify {

/// Trace-form data of one step: Gram matrix of t(x,y) = Tr(xy) on a basis of
/// integral elements, the dual basis, and the discriminant valuation.
template <class B>
struct trace_data {
    std::size_t step;
    std::vector<elem<B>> basis;      // elements of level step+1
    level_matrix<B> gram;            // over level step
    level_matrix<B> gram_inverse;    // over level step (fraction field)
    std::vector<elem<B>> dual_basis; // e_i^* = sum_k b_ki e_k
    mpq_class discriminant_valuation;
    bool orthogonality_certified;
    /// Minimal k with pi^k * e_i^* integral for all i (pi the uniformizer of
    /// the step's base level).
    long denominator_clearing_power;
};

template <class B>
std::vector<elem<B>> power_basis(const tower<B>& t, std::size_t step) {
    std::size_t d = t.step_degree(step);
    std::vector<elem<B>> basis;
    basis.reserve(d);
    elem<B> theta = t.generator(step);
    elem<B> pw = t.from_rational(1, step + 1);
    for (std::size_t i = 0; i < d; ++i) {
        basis.push_back(pw);
        if (i + 1 < d) pw = pw * theta;
    }
    return basis;
}

/// Builds the trace form, dual basis and discriminant of a step on the given
/// basis (power basis by default). The basis must consist of integral
/// elements spanning the step.
template <class B>
trace_data<B> make_trace_data(const tower<B>& t, std::size_t step,
                              std::vector<elem<B>> basis = {}) {
    if (basis.empty()) basis = power_basis(t, step);
    std::size_t d = t.step_degree(step);
    require(basis.size() == d, errc::validation, "basis size must equal the step degree");
    for (const auto& b : basis)
        require(b.valuation().value >= 0, errc::validation, "basis element is not integral");

    level_matrix<B> gram(t, step, d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i; j < d; ++j) {
            elem<B> tr = trace_step(t, step, basis[i] * basis[j]);
            gram.at(i, j) = tr;
            if (i != j) gram.at(j, i) = tr;
        }

    auto [ginv, det] = field_inverse_det(gram, errc::singular_gram);
    valuation_t dv = det.valuation();
    require(dv.exact, errc::singular_gram, "Gram determinant not certified nonzero at precision");

    std::vector<elem<B>> dual;
    dual.reserve(d);
    for (std::size_t i = 0; i < d; ++i) {
        elem<B> acc = t.zero(step + 1);
        for (std::size_t k = 0; k < d; ++k) acc = acc + basis[k] * ginv.at(k, i).lift_to(step + 1);
        dual.push_back(std::move(acc));
    }

    bool ortho = true;
    for (std::size_t i = 0; i < d && ortho; ++i)
        for (std::size_t j = 0; j < d && ortho; ++j) {
            elem<B> tr = trace_step(t, step, basis[i] * dual[j]);
            elem<B> expected = t.from_rational(i == j ? 1 : 0, step);
            if (!(tr - expected).zero_at_precision()) ortho = false;
        }

    mpq_class worst(0);
    for (const auto& e : dual) {
        valuation_t v = e.valuation();
        if (v.exact && v.value < worst) worst = v.value;
    }
    mpq_class piv = t.data()->uniformizer_valuation(step);
    mpq_class scaled = -worst / piv; // in units of the base uniformizer
    mpz_class clearing_z = (mpz_class(scaled.get_num()) + scaled.get_den() - 1) /
                           mpz_class(scaled.get_den());
    long clearing = static_cast<long>(clearing_z.get_si());

    return trace_data<B>{step,  std::move(basis),     std::move(gram), std::move(ginv),
                         std::move(dual), dv.value, ortho,           clearing};
}

/// f'(theta) for the step's defining polynomial, as an element of level
/// step+1.
template <class B>
elem<B> derivative_at_generator(const tower<B>& t, std::size_t step) {
    std::size_t d = t.step_degree(step);
    elem<B> theta = t.generator(step);
    elem<B> acc = t.zero(step + 1);
    elem<B> pw = t.from_rational(1, step + 1);
    for (std::size_t i = 1; i <= d; ++i) {
        elem<B> ci = i == d ? t.from_rational(1, step) : t.step_coeff(step, i);
        acc = acc + t.from_rational(i, step + 1) * ci.lift_to(step + 1) * pw;
        if (i < d) pw = pw * theta;
    }
    return acc;
}

enum class different_method { derivative, trace_dual };

struct different_entry {
    std::size_t step;
    mpq_class value; // normalized valuation of the step different
    std::vector<different_method> methods;
    bool cross_check_agrees = true;
};

template <class B>
mpq_class derivative_different(const tower<B>& t, std::size_t step) {
    valuation_t v = derivative_at_generator(t, step).valuation();
    if (!v.exact) {
        // one automatic precision doubling, then fail
        tower<B> t2 = t.with_precision(2 * t.base().precision);
        valuation_t v2 = derivative_at_generator(t2, step).valuation();
        require(v2.exact, errc::precision_exhausted,
                "cannot certify v(f'(theta)) after raising precision");
        return v2.value;
    }
    return v.value;
}

/// Trace-dual route: the quotient (trace-dual lattice)/O_L is presented over
/// the step's base level by the Gram matrix, so its Fitting F_0 valuation is
/// the discriminant valuation and v(delta) = F_0 / degree.
template <class B>
mpq_class trace_dual_different(const tower<B>& t, std::size_t step) {
    trace_data<B> td = make_trace_data(t, step);
    presented_module<B> quotient(td.gram);
    auto f = fitting_ideals(quotient);
    require(f[0].has_value(), errc::singular_gram, "dual lattice quotient is not torsion");
    mpq_class f0 = *f[0];
    return f0 / static_cast<long>(t.step_degree(step));
}

template <class B>
different_entry different_step(const tower<B>& t, std::size_t step, bool cross_check) {
    different_entry e;
    e.step = step;
    e.value = derivative_different(t, step);
    e.methods = {different_method::derivative};
    if (cross_check) {
        mpq_class td = trace_dual_different(t, step);
        e.methods.push_back(different_method::trace_dual);
        e.cross_check_agrees = td == e.value;
    }
    return e;
}

struct different_report {
    std::vector<different_entry> steps;
    mpq_class total; // sum of per-step normalized valuations
    bool cross_checked;
    bool all_agree;

    json to_json() const {
        json st = json::array();
        for (const auto& e : steps) {
            json methods = json::array();
            for (auto m : e.methods)
                methods.push_back(m == different_method::derivative ? "derivative" : "trace-dual");
            st.push_back(json{{"step", e.step},
                              {"v_delta", rat_to_json(e.value)},
                              {"methods", methods},
                              {"cross_check", e.cross_check_agrees}});
        }
        return json{{"total", rat_to_json(total)},
                    {"cross_checked", cross_checked},
                    {"all_agree", all_agree},
                    {"steps", st}};
    }
};

/// Tower different via the transitivity formula: total v(delta) is the sum of
/// the per-step values in the v(p)=1 normalization.
template <class B>
different_report different_tower(const tower<B>& t, bool cross_check = false) {
    different_report r;
    r.total = 0;
    r.cross_checked = cross_check;
    r.all_agree = true;
    for (std::size_t s = 0; s < t.levels(); ++s) {
        different_entry e = different_step(t, s, cross_check);
        r.total += e.value;
        if (!e.cross_check_agrees) r.all_agree = false;
        r.steps.push_back(std::move(e));
    }
    return r;
}

/// Kähler module of one step as the cyclic module O_L/(f'(theta)), presented
/// over the step's base level with SNF invariants.
template <class B>
struct omega_presentation {
    std::size_t step;
    mpq_class v_delta;
    module_invariants invariants;
    bool zero;

    json to_json() const {
        return json{{"step", step},
                    {"v_delta", rat_to_json(v_delta)},
                    {"invariants", invariants.to_json()},
                    {"zero", zero}};
    }
};

template <class B>
omega_presentation<B> omega_step(const tower<B>& t, std::size_t step, bool retried = false) {
    elem<B> delta = derivative_at_generator(t, step);
    valuation_t v = delta.valuation();
    if (!v.exact) {
        require(!retried, errc::precision_exhausted,
                "cannot certify v(f'(theta)) after raising precision");
        return omega_step(t.with_precision(2 * t.base().precision), step, true);
    }
    level_matrix<B> pres = mult_matrix(t, step, delta);
    presented_module<B> m(pres);
    return omega_presentation<B>{step, v.value, m.invariants(), v.value == 0};
}

struct omega_tower_report {
    std::vector<mpq_class> step_v_delta;
    mpq_class total;
    bool additivity_checked; // total equals the sum of the step contributions
};

template <class B>
std::pair<std::vector<omega_presentation<B>>, omega_tower_report>
omega_tower(const tower<B>& t) {
    std::vector<omega_presentation<B>> parts;
    omega_tower_report rep;
    rep.total = 0;
    for (std::size_t s = 0; s < t.levels(); ++s) {
        parts.push_back(omega_step(t, s));
        rep.step_v_delta.push_back(parts.back().v_delta);
        rep.total += parts.back().v_delta;
    }
    mpq_class direct = different_tower(t).total;
    rep.additivity_checked = direct == rep.total;
    return {std::move(parts), std::move(rep)};
}

/// B tensor_A B for a monogenic step, modeled as B[x]/(f): elements are
/// polynomial representatives of degree < deg f with coefficients in the
/// step's field; the multiplication map mu evaluates at theta and the
/// diagonal ideal is generated by x - theta.
template <class B>
class tensor_square {
public:
    using element = std::vector<elem<B>>; // degree < d, coefficients at level step+1

    tensor_square(const tower<B>& t, std::size_t step)
        : t_(t), step_(step), d_(t.step_degree(step)), theta_(t.generator(step)) {
        for (std::size_t i = 0; i <= d_; ++i) {
            elem<B> ci = i == d_ ? t_.from_rational(1, step_) : t_.step_coeff(step_, i);
            f_.push_back(ci.lift_to(step_ + 1));
        }
        // h = f / (x - theta) by exact synthetic division
        h_.assign(d_, t_.zero(step_ + 1));
        h_[d_ - 1] = t_.from_rational(1, step_ + 1);
        for (std::size_t i = d_ - 1; i >= 1; --i) h_[i - 1] = f_[i] + theta_ * h_[i];
        remainder_ = f_[0] + theta_ * h_[0];
        h_theta_ = eval(h_);
    }

    std::size_t degree() const { return d_; }
    const tower<B>& owner() const { return t_; }
    std::size_t step() const { return step_; }

    element zero() const { return element(d_, t_.zero(step_ + 1)); }
    element one() const {
        element e = zero();
        e[0] = t_.from_rational(1, step_ + 1);
        return e;
    }
    /// x - theta, the generator of the diagonal ideal J.
    element diagonal_generator() const {
        element e = zero();
        e[0] = -theta_;
        if (d_ >= 2)
            e[1] = t_.from_rational(1, step_ + 1);
        else
            e[0] = e[0] + theta_; // degree 1: x == theta in B[x]/(f)
        return e;
    }

    /// Cofactor polynomial h with f = (x - theta) h; h(theta) = f'(theta).
    const element& cofactor() const { return h_; }
    const elem<B>& cofactor_at_theta() const { return h_theta_; }
    /// Synthetic-division remainder f(theta); certifies the division.
    const elem<B>& division_remainder() const { return remainder_; }

    element add(const element& a, const element& b) const {
        element r = a;
        for (std::size_t i = 0; i < d_; ++i) r[i] = r[i] + b[i];
        return r;
    }

    element mul(const element& a, const element& b) const {
        std::vector<elem<B>> prod(2 * d_ - 1, t_.zero(step_ + 1));
        for (std::size_t i = 0; i < d_; ++i)
            for (std::size_t j = 0; j < d_; ++j) prod[i + j] = prod[i + j] + a[i] * b[j];
        for (std::size_t i = prod.size(); i-- > d_;) {
            elem<B> lead = prod[i];
            for (std::size_t j = 0; j < d_; ++j)
                prod[i - d_ + j] = prod[i - d_ + j] - lead * f_[j];
        }
        prod.resize(d_);
        return prod;
    }

    element scale(const element& a, const elem<B>& c) const {
        element r = a;
        for (auto& x : r) x = x * c;
        return r;
    }

    /// Multiplication map mu: B tensor B -> B, x -> theta.
    elem<B> mu(const element& a) const { return eval(a); }

    bool is_zero_at_precision(const element& a) const {
        for (const auto& c : a)
            if (!c.zero_at_precision()) return false;
        return true;
    }

    /// Whether every coefficient is integral (certified v >= 0).
    bool integral(const element& a) const {
        for (const auto& c : a)
            if (c.valuation().value < 0) return false;
        return true;
    }

private:
    elem<B> eval(const element& a) const {
        elem<B> acc = t_.zero(step_ + 1);
        for (std::size_t i = a.size(); i-- > 0;) acc = acc * theta_ + a[i];
        return acc;
    }

    tower<B> t_;
    std::size_t step_;
    std::size_t d_;
    elem<B> theta_;
    std::vector<elem<B>> f_; // defining polynomial lifted into the step field
    element h_;
    elem<B> h_theta_;
    elem<B> remainder_;
};

/// J/J^2 in the tensor-square model: the cyclic annihilator is h(theta) with
/// h from synthetic division, presented over the step's base level. The
/// cross-check against omega_step compares this against the directly
/// evaluated f'(theta).
template <class B>
module_invariants jj2_invariants(const tower<B>& t, std::size_t step) {
    tensor_square<B> ts(t, step);
    require(ts.division_remainder().zero_at_precision(), errc::precision_exhausted,
            "synthetic division does not certify f(theta) = 0");
    level_matrix<B> pres = mult_matrix(t, step, ts.cofactor_at_theta());
    return presented_module<B>(pres).invariants();
}

struct idempotent_threshold {
    mpq_class v_delta;          // the sharp integrality threshold
    mpq_class below_valuation;  // largest tested eps valuation that fails
    mpq_class at_valuation;     // smallest tested eps valuation that works
};

/// Exact idempotent data in the étale case; threshold report otherwise.
template <class B>
struct idempotent_report {
    bool etale;
    std::optional<typename tensor_square<B>::element> idempotent;
    bool laws_certified = false; // e^2 = e, mu(e) = 1, e (x - theta) = 0
    std::optional<idempotent_threshold> threshold;
};

/// Whether eps * h(x)/h(theta) has all coefficients integral; the sharp
/// monogenic threshold is v(eps) >= v(delta).
template <class B>
bool epsilon_idempotent_integral(const tensor_square<B>& ts, const elem<B>& eps) {
    auto scaled = ts.scale(ts.cofactor(), eps * ts.cofactor_at_theta().inv());
    return ts.integral(scaled);
}

template <class B>
idempotent_report<B> idempotent(const tower<B>& t, std::size_t step, bool retried = false) {
    tensor_square<B> ts(t, step);
    valuation_t vd = ts.cofactor_at_theta().valuation();
    if (!vd.exact) {
        require(!retried, errc::precision_exhausted,
                "cannot certify v(h(theta)) after raising precision");
        return idempotent(t.with_precision(2 * t.base().precision), step, true);
    }
    idempotent_report<B> rep;
    rep.etale = vd.value == 0;
    elem<B> one = t.from_rational(1, step + 1);
    if (rep.etale) {
        auto e = ts.scale(ts.cofactor(), ts.cofactor_at_theta().inv());
        bool ok = ts.is_zero_at_precision(ts.add(ts.mul(e, e), ts.scale(e, -one)));
        ok = ok && (ts.mu(e) - one).zero_at_precision();
        ok = ok && ts.is_zero_at_precision(ts.mul(e, ts.diagonal_generator()));
        rep.idempotent = std::move(e);
        rep.laws_certified = ok;
        return rep;
    }
    // ramified: scan eps valuations in the step field's (1/e)Z straddling the
    // threshold
    mpq_class piv = t.data()->uniformizer_valuation(step + 1);
    mpq_class steps_q = vd.value / piv;
    mpz_class k_at = steps_q.get_num() / steps_q.get_den();
    require(k_at * steps_q.get_den() == steps_q.get_num(), errc::validation,
            "v(delta) is not a multiple of the uniformizer valuation");
    elem<B> pi = t.uniformizer(step + 1);
    auto eps_at = [&](const mpz_class& k) { return pi.pow(k); };
    bool at_ok = epsilon_idempotent_integral(ts, eps_at(k_at));
    bool below_ok = k_at >= 1 ? epsilon_idempotent_integral(ts, eps_at(k_at - 1)) : true;
    require(at_ok && (k_at < 1 || !below_ok), errc::validation,
            "epsilon-idempotent threshold does not match v(delta)");
    rep.threshold = idempotent_threshold{vd.value, mpq_class(k_at - 1) * piv,
                                         mpq_class(k_at) * piv};
    return rep;
}

} // namespace ramify
