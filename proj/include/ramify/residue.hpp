#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ramify/errors.hpp"
#include "ramify/rational.hpp"

namespace ramify {

/// Element of a finite-field tower level: a digit of F_p at level 0, a
/// coefficient vector over the previous level above. Plain recursive data;
/// all operations live on ff_tower, which knows the defining polynomials.
struct ff_elem {
    std::uint32_t digit = 0;
    std::vector<ff_elem> coeffs; // empty at level 0

    bool is_zero() const {
        if (coeffs.empty()) return digit == 0;
        for (const auto& c : coeffs)
            if (!c.is_zero()) return false;
        return true;
    }

    bool operator==(const ff_elem&) const = default;
};

/// Residue-field tower F_p = L_0 < L_1 < ... mirroring the unramified steps
/// of a local-field tower. Each level is defined by a monic polynomial,
/// irreducible over the previous level, stored constant-first.
class ff_tower {
public:
    explicit ff_tower(unsigned long p) : p_(p) {
        require(p >= 2, errc::validation, "residue characteristic must be >= 2");
    }

    unsigned long p() const { return p_; }
    std::size_t levels() const { return defs_.size(); }

    std::size_t degree(std::size_t level) const { return defs_.at(level - 1).size() - 1; }

    /// Cardinality exponent: [L_level : F_p].
    unsigned long abs_degree(std::size_t level) const {
        unsigned long d = 1;
        for (std::size_t i = 1; i <= level; ++i) d *= degree(i);
        return d;
    }

    mpz_class order(std::size_t level) const { return pow_ui(p_, abs_degree(level)); }

    // --- element constructors -------------------------------------------

    ff_elem zero(std::size_t level) const {
        if (level == 0) return {};
        return ff_elem{0, std::vector<ff_elem>(degree(level), zero(level - 1))};
    }

    ff_elem from_digit(std::size_t level, unsigned long d) const {
        if (level == 0) return ff_elem{static_cast<std::uint32_t>(d % p_), {}};
        ff_elem e = zero(level);
        e.coeffs[0] = from_digit(level - 1, d);
        return e;
    }

    ff_elem one(std::size_t level) const { return from_digit(level, 1); }

    ff_elem generator(std::size_t level) const {
        require(level >= 1, errc::validation, "level 0 has no generator");
        ff_elem e = zero(level);
        e.coeffs[1] = one(level - 1);
        return e;
    }

    ff_elem embed(const ff_elem& x, std::size_t from, std::size_t to) const {
        ff_elem e = x;
        for (std::size_t l = from + 1; l <= to; ++l) {
            ff_elem up = zero(l);
            up.coeffs[0] = e;
            e = up;
        }
        return e;
    }

    /// index -> element bijection onto L_level, digits of the index in base p
    /// filling the full F_p-basis in coefficient-lexicographic order.
    ff_elem from_index(std::size_t level, const mpz_class& index) const {
        mpz_class i = index;
        return from_index_rec(level, i);
    }

    // --- arithmetic -------------------------------------------------------

    ff_elem add(const ff_elem& a, const ff_elem& b) const {
        if (a.coeffs.empty())
            return ff_elem{static_cast<std::uint32_t>((a.digit + b.digit) % p_), {}};
        ff_elem r = a;
        for (std::size_t i = 0; i < r.coeffs.size(); ++i) r.coeffs[i] = add(r.coeffs[i], b.coeffs[i]);
        return r;
    }

    ff_elem neg(const ff_elem& a) const {
        if (a.coeffs.empty())
            return ff_elem{a.digit == 0 ? 0u : static_cast<std::uint32_t>(p_ - a.digit), {}};
        ff_elem r = a;
        for (auto& c : r.coeffs) c = neg(c);
        return r;
    }

    ff_elem sub(const ff_elem& a, const ff_elem& b) const { return add(a, neg(b)); }

    ff_elem mul(const ff_elem& a, const ff_elem& b, std::size_t level) const {
        if (level == 0)
            return ff_elem{static_cast<std::uint32_t>(
                               static_cast<std::uint64_t>(a.digit) * b.digit % p_),
                           {}};
        std::size_t d = degree(level);
        std::vector<ff_elem> prod(2 * d - 1, zero(level - 1));
        for (std::size_t i = 0; i < d; ++i) {
            if (a.coeffs[i].is_zero()) continue;
            for (std::size_t j = 0; j < d; ++j)
                prod[i + j] = add(prod[i + j], mul(a.coeffs[i], b.coeffs[j], level - 1));
        }
        reduce(prod, level);
        ff_elem r = zero(level);
        for (std::size_t i = 0; i < d && i < prod.size(); ++i) r.coeffs[i] = prod[i];
        return r;
    }

    ff_elem pow(const ff_elem& a, mpz_class e, std::size_t level) const {
        ff_elem base = a, acc = one(level);
        while (e > 0) {
            if (mpz_odd_p(e.get_mpz_t())) acc = mul(acc, base, level);
            base = mul(base, base, level);
            e >>= 1;
        }
        return acc;
    }

    ff_elem inv(const ff_elem& a, std::size_t level) const {
        require(!a.is_zero(), errc::validation, "inverse of zero in residue field");
        if (level == 0) {
            return ff_elem{static_cast<std::uint32_t>(laurent_inv_mod(a.digit, p_)), {}};
        }
        // extended euclid of a (as a poly over level-1) against the defining poly
        std::vector<ff_elem> r0 = defs_[level - 1];
        std::vector<ff_elem> r1(a.coeffs.begin(), a.coeffs.end());
        trim(r1);
        std::vector<ff_elem> s0{}, s1{one(level - 1)};
        while (!r1.empty() && r1.size() > 1) {
            auto [q, rem] = poldivmod(r0, r1, level - 1);
            std::vector<ff_elem> s2 = polsub(s0, polmul(q, s1, level - 1), level - 1);
            r0 = std::move(r1);
            r1 = std::move(rem);
            s0 = std::move(s1);
            s1 = std::move(s2);
        }
        require(!r1.empty(), errc::validation, "element not invertible (reducible modulus?)");
        ff_elem c = inv(r1[0], level - 1);
        std::vector<ff_elem> out;
        out.reserve(s1.size());
        for (const auto& t : s1) out.push_back(mul(t, c, level - 1));
        ff_elem r = zero(level);
        for (std::size_t i = 0; i < out.size(); ++i) r.coeffs[i] = out[i];
        return r;
    }

    /// Frobenius preimage: the unique p-th root in a finite field.
    ff_elem pth_root(const ff_elem& a, std::size_t level) const {
        unsigned long f = abs_degree(level);
        if (f == 1) return a; // x -> x^p is the identity on F_p
        mpz_class e = pow_ui(p_, f - 1);
        return pow(a, e, level);
    }

    // --- polynomials over a level ----------------------------------------

    ff_elem eval(const std::vector<ff_elem>& poly, const ff_elem& x, std::size_t level) const {
        ff_elem acc = zero(level);
        for (std::size_t i = poly.size(); i-- > 0;) acc = add(mul(acc, x, level), poly[i]);
        return acc;
    }

    std::optional<ff_elem> find_root(const std::vector<ff_elem>& poly, std::size_t level) const {
        mpz_class q = order(level);
        for (mpz_class i = 0; i < q; ++i) {
            ff_elem x = from_index(level, i);
            if (eval(poly, x, level).is_zero()) return x;
        }
        return std::nullopt;
    }

    /// Irreducibility of a monic polynomial over L_level: g is irreducible of
    /// degree d iff gcd(x^(q^i) - x, g) is constant for i = 1..d/2.
    bool irreducible(const std::vector<ff_elem>& g, std::size_t level) const {
        std::vector<ff_elem> mod = g;
        trim(mod);
        require(mod.size() >= 2, errc::validation, "irreducibility of a constant");
        std::size_t d = mod.size() - 1;
        if (d == 1) return true;
        unsigned long f = abs_degree(level);
        std::vector<ff_elem> x{zero(level), one(level)};
        std::vector<ff_elem> h = x;
        for (std::size_t i = 1; 2 * i <= d; ++i) {
            for (unsigned long k = 0; k < f; ++k) h = polpowp(h, mod, level);
            std::vector<ff_elem> diff = polsub(h, x, level);
            std::vector<ff_elem> gg = polgcd(mod, diff, level);
            if (gg.size() != 1) return false;
        }
        return true;
    }

    /// Extends the tower by a monic polynomial, validated irreducible.
    void push_level(std::vector<ff_elem> poly) {
        trim(poly);
        std::size_t level = defs_.size();
        require(poly.size() >= 2, errc::validation, "defining polynomial must be nonconstant");
        require(sub(poly.back(), one(level)).is_zero(), errc::validation,
                "defining polynomial must be monic");
        require(irreducible(poly, level), errc::not_unramified,
                "residue polynomial is not irreducible");
        defs_.push_back(std::move(poly));
    }

    const std::vector<ff_elem>& defining(std::size_t level) const { return defs_.at(level - 1); }

private:
    static unsigned long laurent_inv_mod(unsigned long a, unsigned long p) {
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

    ff_elem from_index_rec(std::size_t level, mpz_class& i) const {
        if (level == 0) {
            mpz_class d = i % static_cast<unsigned long>(p_);
            i /= static_cast<unsigned long>(p_);
            return ff_elem{static_cast<std::uint32_t>(d.get_ui()), {}};
        }
        ff_elem e = zero(level);
        for (std::size_t k = 0; k < degree(level); ++k) e.coeffs[k] = from_index_rec(level - 1, i);
        return e;
    }

    static void trim(std::vector<ff_elem>& v) {
        while (!v.empty() && v.back().is_zero()) v.pop_back();
    }

    void reduce(std::vector<ff_elem>& poly, std::size_t level) const {
        const auto& f = defs_[level - 1];
        std::size_t d = f.size() - 1;
        for (std::size_t i = poly.size(); i-- > d;) {
            ff_elem lead = poly[i];
            if (lead.is_zero()) continue;
            for (std::size_t j = 0; j < d; ++j)
                poly[i - d + j] = sub(poly[i - d + j], mul(lead, f[j], level - 1));
            poly[i] = zero(level - 1);
        }
        poly.resize(std::min(poly.size(), d));
    }

    std::vector<ff_elem> polmul(const std::vector<ff_elem>& a, const std::vector<ff_elem>& b,
                                std::size_t level) const {
        if (a.empty() || b.empty()) return {};
        std::vector<ff_elem> out(a.size() + b.size() - 1, zero(level));
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i].is_zero()) continue;
            for (std::size_t j = 0; j < b.size(); ++j)
                out[i + j] = add(out[i + j], mul(a[i], b[j], level));
        }
        trim(out);
        return out;
    }

    std::vector<ff_elem> polsub(const std::vector<ff_elem>& a, const std::vector<ff_elem>& b,
                                std::size_t level) const {
        std::vector<ff_elem> out(std::max(a.size(), b.size()), zero(level));
        for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i];
        for (std::size_t i = 0; i < b.size(); ++i) out[i] = sub(out[i], b[i]);
        trim(out);
        return out;
    }

    std::pair<std::vector<ff_elem>, std::vector<ff_elem>>
    poldivmod(std::vector<ff_elem> num, const std::vector<ff_elem>& den, std::size_t level) const {
        trim(num);
        std::vector<ff_elem> q(num.size() >= den.size() ? num.size() - den.size() + 1 : 0,
                               zero(level));
        ff_elem dinv = inv(den.back(), level);
        while (num.size() >= den.size()) {
            if (num.back().is_zero()) {
                num.pop_back();
                continue;
            }
            ff_elem c = mul(num.back(), dinv, level);
            std::size_t shift = num.size() - den.size();
            q[shift] = c;
            for (std::size_t i = 0; i < den.size(); ++i)
                num[shift + i] = sub(num[shift + i], mul(c, den[i], level));
            num.pop_back();
        }
        trim(num);
        return {std::move(q), std::move(num)};
    }

    std::vector<ff_elem> polgcd(std::vector<ff_elem> a, std::vector<ff_elem> b,
                                std::size_t level) const {
        trim(a);
        trim(b);
        while (!b.empty()) {
            auto [q, r] = poldivmod(a, b, level);
            a = std::move(b);
            b = std::move(r);
        }
        if (!a.empty()) {
            ff_elem lc = inv(a.back(), level);
            for (auto& c : a) c = mul(c, lc, level);
        }
        return a;
    }

    /// h -> h^p mod f, by square and multiply on polynomials.
    std::vector<ff_elem> polpowp(const std::vector<ff_elem>& h, const std::vector<ff_elem>& f,
                                 std::size_t level) const {
        std::vector<ff_elem> acc{one(level)};
        std::vector<ff_elem> base = h;
        unsigned long e = p_;
        while (e > 0) {
            if (e & 1) acc = polmod(polmul(acc, base, level), f, level);
            base = polmod(polmul(base, base, level), f, level);
            e >>= 1;
        }
        return acc;
    }

    std::vector<ff_elem> polmod(std::vector<ff_elem> a, const std::vector<ff_elem>& f,
                                std::size_t level) const {
        auto [q, r] = poldivmod(std::move(a), f, level);
        return r;
    }

    unsigned long p_;
    std::vector<std::vector<ff_elem>> defs_;
};

} // namespace ramify
