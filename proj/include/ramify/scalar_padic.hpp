#pragma once

#include <gmpxx.h>

#include <string>

#include "ramify/errors.hpp"
#include "ramify/exact.hpp"
#include "ramify/rational.hpp"

namespace ramify {

/// Element of Q_p known to an absolute precision: value = unit * p^exp with
/// unit coprime to p and reduced modulo p^(prec-exp). A scalar with empty
/// unit is indistinguishable from zero at its precision and reports its
/// valuation as a lower bound. Immutable value type.
class padic_scalar {
public:
    padic_scalar() = default;

    static padic_scalar zero_at(unsigned long p, long prec) {
        padic_scalar s;
        s.p_ = p;
        s.prec_ = prec;
        s.unit_ = 0;
        s.exp_ = 0;
        return s;
    }

    static padic_scalar make(unsigned long p, long prec, const mpz_class& mant, long exp) {
        padic_scalar s;
        s.p_ = p;
        s.prec_ = prec;
        s.unit_ = mant;
        s.exp_ = exp;
        s.normalize();
        return s;
    }

    static padic_scalar from_rational(unsigned long p, long prec, const mpq_class& q) {
        if (q == 0) return zero_at(p, prec);
        long vn = vp_z(q.get_num(), p);
        long vd = vp_z(q.get_den(), p);
        long v = vn - vd;
        if (v >= prec) return zero_at(p, prec);
        mpz_class nu = q.get_num() / pow_ui(p, static_cast<unsigned long>(vn));
        mpz_class du = q.get_den() / pow_ui(p, static_cast<unsigned long>(vd));
        mpz_class mod = pow_ui(p, static_cast<unsigned long>(prec - v));
        mpz_class dinv;
        int ok = mpz_invert(dinv.get_mpz_t(), du.get_mpz_t(), mod.get_mpz_t());
        require(ok != 0, errc::validation, "denominator not invertible mod p^k");
        padic_scalar s;
        s.p_ = p;
        s.prec_ = prec;
        s.exp_ = v;
        s.unit_ = (nu * dinv) % mod;
        if (s.unit_ < 0) s.unit_ += mod;
        s.normalize();
        return s;
    }

    static padic_scalar from_exact(unsigned long p, long prec, const exact_scalar& e) {
        require(!e.is_tpoly, errc::validation, "t-polynomial scalar over a p-adic base");
        return from_rational(p, prec, e.rat);
    }

    unsigned long p() const { return p_; }
    long precision() const { return prec_; }
    bool zero_at_precision() const { return unit_ == 0; }

    valuation_t valuation() const {
        if (zero_at_precision()) return bound_val(mpq_class(prec_));
        return exact_val(mpq_class(exp_));
    }

    /// Canonical exact rational representative (0 for zero-at-precision).
    exact_scalar representative() const {
        if (zero_at_precision()) return exact_scalar::rational(mpq_class(0));
        mpq_class q;
        if (exp_ >= 0)
            q = mpq_class(unit_ * pow_ui(p_, static_cast<unsigned long>(exp_)));
        else
            q = mpq_class(unit_, pow_ui(p_, static_cast<unsigned long>(-exp_)));
        q.canonicalize();
        return exact_scalar::rational(q);
    }

    friend padic_scalar operator+(const padic_scalar& a, const padic_scalar& b) {
        a.check_compatible(b);
        long n = std::min(a.prec_, b.prec_);
        if (a.zero_at_precision() && b.zero_at_precision())
            return zero_at(a.p_, std::min(a.prec_, b.prec_));
        if (a.zero_at_precision()) return make(b.p_, std::min(n, b.prec_), b.unit_, b.exp_);
        if (b.zero_at_precision()) return make(a.p_, std::min(n, a.prec_), a.unit_, a.exp_);
        long e = std::min(a.exp_, b.exp_);
        mpz_class m = a.unit_ * pow_ui(a.p_, static_cast<unsigned long>(a.exp_ - e)) +
                      b.unit_ * pow_ui(a.p_, static_cast<unsigned long>(b.exp_ - e));
        return make(a.p_, n, m, e);
    }

    padic_scalar operator-() const {
        if (zero_at_precision()) return *this;
        return make(p_, prec_, -unit_, exp_);
    }

    friend padic_scalar operator-(const padic_scalar& a, const padic_scalar& b) {
        return a + (-b);
    }

    friend padic_scalar operator*(const padic_scalar& a, const padic_scalar& b) {
        a.check_compatible(b);
        if (a.zero_at_precision() || b.zero_at_precision()) {
            long abound = a.zero_at_precision() ? a.prec_ : a.exp_;
            long bbound = b.zero_at_precision() ? b.prec_ : b.exp_;
            return zero_at(a.p_, abound + bbound);
        }
        long n = std::min(a.prec_ + b.exp_, b.prec_ + a.exp_);
        return make(a.p_, n, a.unit_ * b.unit_, a.exp_ + b.exp_);
    }

    padic_scalar inv() const {
        require(!zero_at_precision(), errc::division_by_zero_at_precision,
                "inverse of an element indistinguishable from zero at precision " +
                    std::to_string(prec_));
        long rel = prec_ - exp_;
        require(rel >= 1, errc::precision_exhausted, "inverse cannot be certified to 1 digit");
        mpz_class mod = pow_ui(p_, static_cast<unsigned long>(rel));
        mpz_class u;
        mpz_invert(u.get_mpz_t(), unit_.get_mpz_t(), mod.get_mpz_t());
        padic_scalar s;
        s.p_ = p_;
        s.prec_ = rel - exp_;
        s.exp_ = -exp_;
        s.unit_ = u;
        return s;
    }

    /// Residue in F_p of an integral scalar.
    unsigned long residue() const {
        if (zero_at_precision()) {
            require(prec_ >= 1, errc::precision_exhausted, "residue below precision");
            return 0;
        }
        require(exp_ >= 0, errc::validation, "residue of a non-integral scalar");
        if (exp_ > 0) return 0;
        mpz_class r = unit_ % static_cast<unsigned long>(p_);
        return r.get_ui();
    }

    /// Truncation to a lower absolute precision.
    padic_scalar truncated(long prec) const {
        if (zero_at_precision()) return zero_at(p_, std::min(prec_, prec));
        return make(p_, std::min(prec_, prec), unit_, exp_);
    }

    /// Whether a - b vanishes to order at least `order`.
    friend bool congruent(const padic_scalar& a, const padic_scalar& b, long order) {
        padic_scalar d = a - b;
        valuation_t v = d.valuation();
        return v.value >= order;
    }

    std::string str() const {
        if (zero_at_precision()) return "O(" + std::to_string(p_) + "^" + std::to_string(prec_) + ")";
        return representative().rat.get_str();
    }

private:
    void normalize() {
        if (unit_ == 0 || exp_ >= prec_) {
            if (unit_ == 0 && exp_ != 0) exp_ = 0;
            if (unit_ != 0) {
                unit_ = 0;
                exp_ = 0;
            }
            return;
        }
        mpz_class mod = pow_ui(p_, static_cast<unsigned long>(prec_ - exp_));
        unit_ %= mod;
        if (unit_ < 0) unit_ += mod;
        if (unit_ == 0) {
            exp_ = 0;
            return;
        }
        long v = vp_z(unit_, p_);
        if (v > 0) {
            mpz_divexact(unit_.get_mpz_t(), unit_.get_mpz_t(),
                         pow_ui(p_, static_cast<unsigned long>(v)).get_mpz_t());
            exp_ += v;
            if (exp_ >= prec_) {
                unit_ = 0;
                exp_ = 0;
            }
        }
    }

    void check_compatible(const padic_scalar& o) const {
        require(p_ == o.p_, errc::tower_mismatch, "mixing scalars over different primes");
    }

    unsigned long p_ = 0;
    long prec_ = 0;
    long exp_ = 0;
    mpz_class unit_ = 0;
};

/// Base-field description for towers over Q_p.
struct padic_base {
    using scalar = padic_scalar;

    unsigned long p;
    long precision;

    scalar zero() const { return padic_scalar::zero_at(p, precision); }
    scalar one() const { return padic_scalar::from_rational(p, precision, 1); }
    scalar from_rational(const mpq_class& q) const {
        return padic_scalar::from_rational(p, precision, q);
    }
    scalar from_exact(const exact_scalar& e) const {
        return padic_scalar::from_exact(p, precision, e);
    }
    scalar uniformizer() const { return from_rational(mpq_class(p)); }

    padic_base with_precision(long n) const { return {p, n}; }

    static constexpr const char* kind() { return "p-adic"; }

    json to_json() const { return json{{"p", p}, {"precision", precision}}; }

    bool operator==(const padic_base&) const = default;
};

} // namespace ramify
