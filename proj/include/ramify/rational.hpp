#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <utility>

#include "ramify/errors.hpp"

namespace ramify {

/// A valuation that is either exact or only a lower bound ("the element is
/// indistinguishable from zero below this value").
struct valuation_t {
    mpq_class value;
    bool exact = true;

    bool certified_nonnegative() const { return value >= 0; }
};

inline valuation_t exact_val(mpq_class v) { return {std::move(v), true}; }
inline valuation_t bound_val(mpq_class v) { return {std::move(v), false}; }

/// min that respects bounds: an inexact bound below an exact value poisons
/// exactness, an inexact bound above it does not.
inline valuation_t val_min(const valuation_t& a, const valuation_t& b) {
    if (a.exact && b.exact) return {a.value <= b.value ? a.value : b.value, true};
    if (a.exact && !b.exact) {
        if (a.value < b.value) return a;
        return {b.value, false};
    }
    if (!a.exact && b.exact) return val_min(b, a);
    return {a.value <= b.value ? a.value : b.value, false};
}

inline mpz_class pow_z(const mpz_class& b, unsigned long e) {
    mpz_class r;
    mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
    return r;
}

inline mpz_class pow_ui(unsigned long b, unsigned long e) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), b, e);
    return r;
}

/// p-adic valuation of a nonzero integer.
inline long vp_z(const mpz_class& n, unsigned long p) {
    require(n != 0, errc::validation, "vp of zero integer");
    mpz_class q = n, rem;
    long v = 0;
    mpz_class P(p);
    for (;;) {
        mpz_class quo;
        mpz_fdiv_qr(quo.get_mpz_t(), rem.get_mpz_t(), q.get_mpz_t(), P.get_mpz_t());
        if (rem != 0) break;
        q = quo;
        ++v;
    }
    return v;
}

/// p-adic valuation of a nonzero rational.
inline long vp_q(const mpq_class& r, unsigned long p) {
    require(r != 0, errc::validation, "vp of zero rational");
    return vp_z(r.get_num(), p) - vp_z(r.get_den(), p);
}

inline mpq_class mpq_from_pair(const mpz_class& num, const mpz_class& den) {
    require(den != 0, errc::validation, "rational with zero denominator");
    mpq_class q(num, den);
    q.canonicalize();
    return q;
}

/// Parses "a", "a/b" or "[a,b]"-free forms used by CLI flags like --threshold.
inline mpq_class parse_rational(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return mpq_class(mpz_class(s), 1);
        return mpq_from_pair(mpz_class(s.substr(0, slash)), mpz_class(s.substr(slash + 1)));
    } catch (const std::invalid_argument&) {
        fail(errc::validation, "cannot parse rational '" + s + "'");
    }
}

} // namespace ramify
