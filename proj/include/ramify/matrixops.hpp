#pragma once

#include <utility>
#include <vector>

#include "ramify/errors.hpp"
#include "ramify/snf.hpp"

namespace ramify {

/// Gauss-Jordan inverse with valuation-minimal pivoting over the fraction
/// field of a level. Fails with `code` when a pivot column has no entry with
/// a certified valuation.
template <class B>
std::pair<level_matrix<B>, elem<B>> field_inverse_det(level_matrix<B> a,
                                                      errc code = errc::singular_gram) {
    require(a.rows() == a.cols(), errc::validation, "inverse of a non-square matrix");
    const tower<B>& t = a.owner();
    std::size_t level = a.level();
    std::size_t n = a.rows();
    auto inv = level_matrix<B>::identity(t, level, n);
    elem<B> det = t.from_rational(1, level);
    for (std::size_t col = 0; col < n; ++col) {
        bool found = false;
        std::size_t pr = col;
        mpq_class best;
        for (std::size_t i = col; i < n; ++i) {
            valuation_t v = a.at(i, col).valuation();
            if (!v.exact) continue;
            if (!found || v.value < best) {
                found = true;
                pr = i;
                best = v.value;
            }
        }
        require(found, code, "matrix has no certified pivot; singular at working precision");
        if (pr != col) {
            a.swap_rows(col, pr);
            inv.swap_rows(col, pr);
            det = -det;
        }
        elem<B> piv = a.at(col, col);
        det = det * piv;
        elem<B> pinv = piv.inv();
        for (std::size_t j = 0; j < n; ++j) {
            a.at(col, j) = a.at(col, j) * pinv;
            inv.at(col, j) = inv.at(col, j) * pinv;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == col) continue;
            valuation_t v = a.at(i, col).valuation();
            if (!v.exact) continue;
            elem<B> f = a.at(i, col);
            for (std::size_t j = 0; j < n; ++j) {
                a.at(i, j) = a.at(i, j) - f * a.at(col, j);
                inv.at(i, j) = inv.at(i, j) - f * inv.at(col, j);
            }
        }
    }
    return {std::move(inv), std::move(det)};
}

/// Solves A x = b over the fraction field of a level.
template <class B>
std::vector<elem<B>> solve_linear(const level_matrix<B>& a, const std::vector<elem<B>>& b,
                                  errc code = errc::precision_exhausted) {
    auto [inv, det] = field_inverse_det(a, code);
    std::vector<elem<B>> x;
    x.reserve(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        elem<B> acc = a.owner().zero(a.level());
        for (std::size_t j = 0; j < a.cols(); ++j) acc = acc + inv.at(i, j) * b[j];
        x.push_back(std::move(acc));
    }
    return x;
}

namespace detail {

/// Characteristic polynomial det(x I - M) by cofactor expansion on the
/// polynomial matrix; entries are degree <= 1 polynomials over the level.
/// Exponential in n, used only for the small substitution matrices.
template <class B>
std::vector<elem<B>> charpoly_minor(const tower<B>& t, std::size_t level,
                                    const std::vector<std::vector<std::vector<elem<B>>>>& m,
                                    std::vector<std::size_t> rows, std::size_t col) {
    auto polmul = [&](const std::vector<elem<B>>& a, const std::vector<elem<B>>& b) {
        std::vector<elem<B>> out(a.size() + b.size() - 1, t.zero(level));
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < b.size(); ++j) out[i + j] = out[i + j] + a[i] * b[j];
        return out;
    };
    auto poladd = [&](std::vector<elem<B>> a, const std::vector<elem<B>>& b, bool negate) {
        if (a.size() < b.size()) a.resize(b.size(), t.zero(level));
        for (std::size_t i = 0; i < b.size(); ++i) a[i] = negate ? a[i] - b[i] : a[i] + b[i];
        return a;
    };
    if (rows.size() == 1) return m[rows[0]][col];
    std::vector<elem<B>> acc{t.zero(level)};
    for (std::size_t k = 0; k < rows.size(); ++k) {
        std::vector<std::size_t> rest;
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (i != k) rest.push_back(rows[i]);
        std::vector<elem<B>> sub = charpoly_minor(t, level, m, rest, col + 1);
        acc = poladd(std::move(acc), polmul(m[rows[k]][col], sub), k % 2 == 1);
    }
    return acc;
}

} // namespace detail

/// Characteristic polynomial of a square matrix over a level, constant-first,
/// monic of degree n.
template <class B>
std::vector<elem<B>> charpoly(const level_matrix<B>& a) {
    const tower<B>& t = a.owner();
    std::size_t level = a.level();
    std::size_t n = a.rows();
    require(n == a.cols() && n >= 1, errc::validation, "charpoly needs a square matrix");
    // entries of x I - M as degree <= 1 polynomials
    std::vector<std::vector<std::vector<elem<B>>>> m(
        n, std::vector<std::vector<elem<B>>>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            std::vector<elem<B>> cell{-a.at(i, j), i == j ? t.from_rational(1, level)
                                                          : t.zero(level)};
            m[i][j] = std::move(cell);
        }
    std::vector<std::size_t> rows(n);
    for (std::size_t i = 0; i < n; ++i) rows[i] = i;
    std::vector<elem<B>> c = detail::charpoly_minor(t, level, m, rows, 0);
    c.resize(n + 1, t.zero(level));
    return c;
}

/// Multiplication-by-x matrix of an element of level `step+1` with respect to
/// the power basis of that step; entries live one level down.
template <class B>
level_matrix<B> mult_matrix(const tower<B>& t, std::size_t step, const elem<B>& x) {
    std::size_t d = t.step_degree(step);
    level_matrix<B> m(t, step, d, d);
    elem<B> theta = t.generator(step);
    elem<B> pw = t.from_rational(1, step + 1);
    for (std::size_t j = 0; j < d; ++j) {
        elem<B> col = x * pw;
        for (std::size_t i = 0; i < d; ++i) m.at(i, j) = col.coeff(i);
        if (j + 1 < d) pw = pw * theta;
    }
    return m;
}

/// Trace of the multiplication map of x (an element of level step+1) down to
/// level step.
template <class B>
elem<B> trace_step(const tower<B>& t, std::size_t step, const elem<B>& x) {
    level_matrix<B> m = mult_matrix(t, step, x);
    elem<B> acc = t.zero(step);
    for (std::size_t i = 0; i < m.rows(); ++i) acc = acc + m.at(i, i);
    return acc;
}

} // namespace ramify
