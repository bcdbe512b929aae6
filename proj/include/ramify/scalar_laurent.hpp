#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ramify/errors.hpp"
#include "ramify/exact.hpp"
#include "ramify/rational.hpp"

namespace ramify {

/// Element of F_p((t)) known modulo t^prec: value = t^exp * (c_0 + c_1 t + ...)
/// with c_0 != 0 and coefficients in F_p. Same precision contract as the
/// p-adic scalar; t plays the role of the uniformizer with v(t) = 1.
class laurent_scalar {
public:
    laurent_scalar() = default;

    static laurent_scalar zero_at(unsigned long p, long prec) {
        laurent_scalar s;
        s.p_ = p;
        s.prec_ = prec;
        return s;
    }

    static laurent_scalar make(unsigned long p, long prec, std::vector<std::uint32_t> coeffs,
                               long exp) {
        laurent_scalar s;
        s.p_ = p;
        s.prec_ = prec;
        s.c_ = std::move(coeffs);
        s.exp_ = exp;
        s.normalize();
        return s;
    }

    /// Rationals embed through F_p; the denominator must be a unit mod p.
    static laurent_scalar from_rational(unsigned long p, long prec, const mpq_class& q) {
        mpz_class num = q.get_num() % static_cast<unsigned long>(p);
        mpz_class den = q.get_den() % static_cast<unsigned long>(p);
        require(den != 0, errc::validation,
                "rational with denominator divisible by p over a Laurent base");
        if (num < 0) num += p;
        unsigned long n = num.get_ui(), d = den.get_ui();
        unsigned long v = mul_mod(n, inv_mod(d, p), p);
        return make(p, prec, {static_cast<std::uint32_t>(v)}, 0);
    }

    static laurent_scalar from_exact(unsigned long p, long prec, const exact_scalar& e) {
        if (!e.is_tpoly) return from_rational(p, prec, e.rat);
        long minexp = 0;
        for (const auto& [c, ex] : e.tpoly) minexp = std::min(minexp, ex);
        long maxexp = minexp;
        for (const auto& [c, ex] : e.tpoly) maxexp = std::max(maxexp, ex);
        std::vector<std::uint32_t> coeffs(static_cast<std::size_t>(maxexp - minexp + 1), 0);
        for (const auto& [c, ex] : e.tpoly) {
            long cc = c % static_cast<long>(p);
            if (cc < 0) cc += p;
            std::size_t i = static_cast<std::size_t>(ex - minexp);
            coeffs[i] = static_cast<std::uint32_t>((coeffs[i] + cc) % p);
        }
        return make(p, prec, std::move(coeffs), minexp);
    }

    unsigned long p() const { return p_; }
    long precision() const { return prec_; }
    bool zero_at_precision() const { return c_.empty(); }

    valuation_t valuation() const {
        if (zero_at_precision()) return bound_val(mpq_class(prec_));
        return exact_val(mpq_class(exp_));
    }

    exact_scalar representative() const {
        std::vector<std::pair<long, long>> terms;
        for (std::size_t i = 0; i < c_.size(); ++i)
            if (c_[i] != 0) terms.emplace_back(static_cast<long>(c_[i]), exp_ + static_cast<long>(i));
        return exact_scalar::t_terms(std::move(terms));
    }

    friend laurent_scalar operator+(const laurent_scalar& a, const laurent_scalar& b) {
        a.check_compatible(b);
        long n = std::min(a.prec_, b.prec_);
        if (a.zero_at_precision() && b.zero_at_precision()) return zero_at(a.p_, n);
        if (a.zero_at_precision()) return make(b.p_, n, b.c_, b.exp_);
        if (b.zero_at_precision()) return make(a.p_, n, a.c_, a.exp_);
        long e = std::min(a.exp_, b.exp_);
        long top = std::max(a.exp_ + static_cast<long>(a.c_.size()),
                            b.exp_ + static_cast<long>(b.c_.size()));
        std::vector<std::uint32_t> out(static_cast<std::size_t>(top - e), 0);
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            out[static_cast<std::size_t>(a.exp_ - e) + i] = a.c_[i];
        for (std::size_t i = 0; i < b.c_.size(); ++i) {
            auto& slot = out[static_cast<std::size_t>(b.exp_ - e) + i];
            slot = static_cast<std::uint32_t>((slot + b.c_[i]) % a.p_);
        }
        return make(a.p_, n, std::move(out), e);
    }

    laurent_scalar operator-() const {
        if (zero_at_precision()) return *this;
        std::vector<std::uint32_t> out(c_.size());
        for (std::size_t i = 0; i < c_.size(); ++i)
            out[i] = c_[i] == 0 ? 0 : static_cast<std::uint32_t>(p_ - c_[i]);
        return make(p_, prec_, std::move(out), exp_);
    }

    friend laurent_scalar operator-(const laurent_scalar& a, const laurent_scalar& b) {
        return a + (-b);
    }

    friend laurent_scalar operator*(const laurent_scalar& a, const laurent_scalar& b) {
        a.check_compatible(b);
        if (a.zero_at_precision() || b.zero_at_precision()) {
            long abound = a.zero_at_precision() ? a.prec_ : a.exp_;
            long bbound = b.zero_at_precision() ? b.prec_ : b.exp_;
            return zero_at(a.p_, abound + bbound);
        }
        long n = std::min(a.prec_ + b.exp_, b.prec_ + a.exp_);
        long rel = n - (a.exp_ + b.exp_);
        std::size_t len = static_cast<std::size_t>(std::max<long>(rel, 0));
        std::vector<std::uint32_t> out(std::min<std::size_t>(len, a.c_.size() + b.c_.size() - 1), 0);
        for (std::size_t i = 0; i < a.c_.size() && i < out.size(); ++i) {
            if (a.c_[i] == 0) continue;
            for (std::size_t j = 0; j < b.c_.size() && i + j < out.size(); ++j) {
                std::uint64_t acc = out[i + j];
                acc += static_cast<std::uint64_t>(a.c_[i]) * b.c_[j] % a.p_;
                out[i + j] = static_cast<std::uint32_t>(acc % a.p_);
            }
        }
        return make(a.p_, n, std::move(out), a.exp_ + b.exp_);
    }

    laurent_scalar inv() const {
        require(!zero_at_precision(), errc::division_by_zero_at_precision,
                "inverse of an element indistinguishable from zero at precision " +
                    std::to_string(prec_));
        long rel = prec_ - exp_;
        require(rel >= 1, errc::precision_exhausted, "inverse cannot be certified to 1 digit");
        std::size_t len = static_cast<std::size_t>(rel);
        std::vector<std::uint32_t> out(len, 0);
        unsigned long c0 = inv_mod(c_[0], p_);
        out[0] = static_cast<std::uint32_t>(c0);
        for (std::size_t k = 1; k < len; ++k) {
            std::uint64_t acc = 0;
            for (std::size_t i = 1; i <= k && i < c_.size(); ++i)
                acc = (acc + static_cast<std::uint64_t>(c_[i]) * out[k - i]) % p_;
            out[k] = static_cast<std::uint32_t>(acc == 0 ? 0 : (p_ - acc) * c0 % p_);
        }
        laurent_scalar s;
        s.p_ = p_;
        s.prec_ = rel - exp_;
        s.exp_ = -exp_;
        s.c_ = std::move(out);
        s.normalize();
        return s;
    }

    unsigned long residue() const {
        if (zero_at_precision()) {
            require(prec_ >= 1, errc::precision_exhausted, "residue below precision");
            return 0;
        }
        require(exp_ >= 0, errc::validation, "residue of a non-integral scalar");
        if (exp_ > 0) return 0;
        return c_[0];
    }

    laurent_scalar truncated(long prec) const {
        if (zero_at_precision()) return zero_at(p_, std::min(prec_, prec));
        return make(p_, std::min(prec_, prec), c_, exp_);
    }

    friend bool congruent(const laurent_scalar& a, const laurent_scalar& b, long order) {
        laurent_scalar d = a - b;
        return d.valuation().value >= order;
    }

    std::string str() const {
        if (zero_at_precision()) return "O(t^" + std::to_string(prec_) + ")";
        std::string s;
        for (std::size_t i = 0; i < c_.size(); ++i) {
            if (c_[i] == 0) continue;
            if (!s.empty()) s += " + ";
            s += std::to_string(c_[i]) + "*t^" + std::to_string(exp_ + static_cast<long>(i));
        }
        return s;
    }

    static unsigned long inv_mod(unsigned long a, unsigned long p) {
        long t = 0, newt = 1;
        long r = static_cast<long>(p), newr = static_cast<long>(a % p);
        while (newr != 0) {
            long q = r / newr;
            t -= q * newt;
            std::swap(t, newt);
            r -= q * newr;
            std::swap(r, newr);
        }
        require(r == 1, errc::validation, "not invertible mod p");
        long res = t % static_cast<long>(p);
        if (res < 0) res += p;
        return static_cast<unsigned long>(res);
    }

private:
    static unsigned long mul_mod(unsigned long a, unsigned long b, unsigned long p) {
        return static_cast<unsigned long>(
            static_cast<std::uint64_t>(a % p) * (b % p) % p);
    }

    void normalize() {
        if (prec_ <= exp_) {
            c_.clear();
            exp_ = 0;
            return;
        }
        std::size_t lead = 0;
        while (lead < c_.size() && c_[lead] == 0) ++lead;
        if (lead > 0) {
            c_.erase(c_.begin(), c_.begin() + static_cast<long>(lead));
            exp_ += static_cast<long>(lead);
        }
        if (exp_ >= prec_) {
            c_.clear();
            exp_ = 0;
            return;
        }
        std::size_t maxlen = static_cast<std::size_t>(prec_ - exp_);
        if (c_.size() > maxlen) c_.resize(maxlen);
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
        if (c_.empty()) exp_ = 0;
    }

    void check_compatible(const laurent_scalar& o) const {
        require(p_ == o.p_, errc::tower_mismatch, "mixing scalars over different primes");
    }

    unsigned long p_ = 0;
    long prec_ = 0;
    long exp_ = 0;
    std::vector<std::uint32_t> c_;
};

/// Base-field description for towers over F_p((t)).
struct laurent_base {
    using scalar = laurent_scalar;

    unsigned long p;
    long precision;

    scalar zero() const { return laurent_scalar::zero_at(p, precision); }
    scalar one() const { return laurent_scalar::from_rational(p, precision, 1); }
    scalar from_rational(const mpq_class& q) const {
        return laurent_scalar::from_rational(p, precision, q);
    }
    scalar from_exact(const exact_scalar& e) const {
        return laurent_scalar::from_exact(p, precision, e);
    }
    scalar uniformizer() const {
        return laurent_scalar::make(p, precision, {1}, 1);
    }

    laurent_base with_precision(long n) const { return {p, n}; }

    static constexpr const char* kind() { return "laurent"; }

    json to_json() const { return json{{"laurent", true}, {"p", p}, {"precision", precision}}; }

    bool operator==(const laurent_base&) const = default;
};

} // namespace ramify
