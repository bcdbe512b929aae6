#pragma once

#include <gmpxx.h>

#include <optional>
#include <utility>
#include <vector>

#include "ramify/errors.hpp"
#include "ramify/json.hpp"
#include "ramify/tower.hpp"

namespace ramify {

/// Dense matrix over one level of a tower. Row-major, value semantics.
template <class B>
class level_matrix {
public:
    level_matrix(const tower<B>& t, std::size_t level, std::size_t rows, std::size_t cols)
        : t_(t), level_(level), rows_(rows), cols_(cols), a_(rows * cols, t.zero(level)) {}

    static level_matrix identity(const tower<B>& t, std::size_t level, std::size_t n) {
        level_matrix m(t, level, n, n);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = t.from_rational(1, level);
        return m;
    }

    static level_matrix from_exact(const tower<B>& t, std::size_t level,
                                   const std::vector<std::vector<exact_elem>>& rows) {
        require(!rows.empty(), errc::validation, "matrix needs at least one row");
        level_matrix m(t, level, rows.size(), rows[0].size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            require(rows[i].size() == m.cols_, errc::validation, "ragged matrix");
            for (std::size_t j = 0; j < m.cols_; ++j) m.at(i, j) = t.from_exact(rows[i][j], level);
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t level() const { return level_; }
    const tower<B>& owner() const { return t_; }

    elem<B>& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const elem<B>& at(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    friend level_matrix operator*(const level_matrix& x, const level_matrix& y) {
        require(x.cols_ == y.rows_, errc::validation, "matrix shape mismatch");
        level_matrix r(x.t_, x.level_, x.rows_, y.cols_);
        for (std::size_t i = 0; i < x.rows_; ++i)
            for (std::size_t k = 0; k < x.cols_; ++k)
                for (std::size_t j = 0; j < y.cols_; ++j)
                    r.at(i, j) = r.at(i, j) + x.at(i, k) * y.at(k, j);
        return r;
    }

    void swap_rows(std::size_t i, std::size_t j) {
        for (std::size_t k = 0; k < cols_; ++k) std::swap(at(i, k), at(j, k));
    }
    void swap_cols(std::size_t i, std::size_t j) {
        for (std::size_t k = 0; k < rows_; ++k) std::swap(at(k, i), at(k, j));
    }

private:
    tower<B> t_;
    std::size_t level_;
    std::size_t rows_, cols_;
    std::vector<elem<B>> a_;
};

struct snf_options {
    /// Entries indistinguishable from zero above this valuation are treated
    /// as zero; below it the pivot search fails loudly.
    std::optional<mpq_class> guard;
};

/// Diagonalization certificate: u * input * v = d with u, v products of
/// elementary (unimodular) operations.
template <class B>
struct snf_result {
    std::vector<mpq_class> diag_valuations; // nondecreasing, one per pivot
    std::size_t rank = 0;
    level_matrix<B> d, u, v;
};

/// Smith normal form over a valuation-ring level: valuation-minimal pivoting
/// with exact unit inversion, ties broken by lowest row then column index.
template <class B>
snf_result<B> smith_normal_form(level_matrix<B> a, const snf_options& opt = {}) {
    const tower<B>& t = a.owner();
    std::size_t level = a.level();
    mpq_class guard = opt.guard.value_or(mpq_class(t.base().precision, 2));

    auto u = level_matrix<B>::identity(t, level, a.rows());
    auto v = level_matrix<B>::identity(t, level, a.cols());

    enum class entry_state { nonzero, zero, uncertified };
    auto classify = [&](const elem<B>& x, mpq_class& val) {
        valuation_t w = x.valuation();
        val = w.value;
        if (w.exact) return entry_state::nonzero;
        return w.value >= guard ? entry_state::zero : entry_state::uncertified;
    };

    std::vector<mpq_class> diag;
    std::size_t s = 0;
    std::size_t bound = std::min(a.rows(), a.cols());
    while (s < bound) {
        bool found = false;
        std::size_t pi = s, pj = s;
        mpq_class pval;
        for (std::size_t i = s; i < a.rows(); ++i)
            for (std::size_t j = s; j < a.cols(); ++j) {
                mpq_class val;
                entry_state st = classify(a.at(i, j), val);
                require(st != entry_state::uncertified, errc::precision_exhausted,
                        "matrix entry valuation cannot be certified at the working guard");
                if (st == entry_state::zero) continue;
                if (!found || val < pval) {
                    found = true;
                    pi = i;
                    pj = j;
                    pval = val;
                }
            }
        if (!found) break;
        if (pi != s) {
            a.swap_rows(s, pi);
            u.swap_rows(s, pi);
        }
        if (pj != s) {
            a.swap_cols(s, pj);
            v.swap_cols(s, pj);
        }
        elem<B> pinv = a.at(s, s).inv();
        for (std::size_t i = s + 1; i < a.rows(); ++i) {
            mpq_class val;
            if (classify(a.at(i, s), val) != entry_state::nonzero) continue;
            elem<B> factor = a.at(i, s) * pinv;
            for (std::size_t k = 0; k < a.cols(); ++k)
                a.at(i, k) = a.at(i, k) - factor * a.at(s, k);
            for (std::size_t k = 0; k < u.cols(); ++k)
                u.at(i, k) = u.at(i, k) - factor * u.at(s, k);
        }
        for (std::size_t j = s + 1; j < a.cols(); ++j) {
            mpq_class val;
            if (classify(a.at(s, j), val) != entry_state::nonzero) continue;
            elem<B> factor = a.at(s, j) * pinv;
            for (std::size_t k = 0; k < a.rows(); ++k)
                a.at(k, j) = a.at(k, j) - factor * a.at(k, s);
            for (std::size_t k = 0; k < v.rows(); ++k)
                v.at(k, j) = v.at(k, j) - factor * v.at(k, s);
        }
        diag.push_back(pval);
        ++s;
    }
    return snf_result<B>{std::move(diag), s, std::move(a), std::move(u), std::move(v)};
}

/// Invariant data of a finitely presented module: sorted finite invariant
/// valuations plus the number of free summands.
struct module_invariants {
    std::vector<mpq_class> finite; // nondecreasing
    std::size_t free_rank = 0;

    /// Length in uniformizer-of-the-base units: the sum of finite invariants.
    mpq_class length() const {
        mpq_class s(0);
        for (const auto& d : finite) s += d;
        return s;
    }

    json to_json() const {
        json inv = json::array();
        for (const auto& d : finite) inv.push_back(rat_to_json(d));
        for (std::size_t i = 0; i < free_rank; ++i) inv.push_back(nullptr);
        return inv;
    }

    bool operator==(const module_invariants&) const = default;
};

/// Finitely presented module over a tower level: generators O^rows modulo the
/// column span of the presentation matrix.
template <class B>
class presented_module {
public:
    explicit presented_module(level_matrix<B> presentation, const snf_options& opt = {})
        : presentation_(std::move(presentation)), snf_(smith_normal_form(presentation_, opt)) {
        inv_.finite = snf_.diag_valuations;
        inv_.free_rank = presentation_.rows() - snf_.rank;
    }

    const level_matrix<B>& presentation() const { return presentation_; }
    const snf_result<B>& snf() const { return snf_; }
    const module_invariants& invariants() const { return inv_; }
    bool is_zero() const {
        if (inv_.free_rank > 0) return false;
        for (const auto& d : inv_.finite)
            if (d != 0) return false;
        return true;
    }

private:
    level_matrix<B> presentation_;
    snf_result<B> snf_;
    module_invariants inv_;
};

/// Fitting-ideal valuations F_0..F_n of a module with invariant data `inv`
/// over n = #invariants generators: F_i is generated by the (n-i)-minors, so
/// its valuation is the sum of the n-i smallest invariants; nullopt encodes
/// the zero ideal (a free summand inside the minors).
inline std::vector<std::optional<mpq_class>> fitting_ideals(const module_invariants& inv) {
    std::size_t n = inv.finite.size() + inv.free_rank;
    std::vector<std::optional<mpq_class>> out;
    out.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        std::size_t take = n - i;
        if (take > inv.finite.size()) {
            out.push_back(std::nullopt);
            continue;
        }
        mpq_class s(0);
        for (std::size_t k = 0; k < take; ++k) s += inv.finite[k];
        out.push_back(s);
    }
    return out;
}

template <class B>
std::vector<std::optional<mpq_class>> fitting_ideals(const presented_module<B>& m) {
    return fitting_ideals(m.invariants());
}

} // namespace ramify
