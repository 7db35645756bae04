#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "fluxon/multidouble.hpp"

namespace fluxon {

namespace lu_detail {
inline double abs1(std::complex<double> z) { return std::abs(z.real()) + std::abs(z.imag()); }
using dd::abs1;
inline std::complex<double> conj(std::complex<double> z) { return std::conj(z); }
using dd::conj;
inline std::complex<double> to_std(std::complex<double> z) { return z; }
inline std::complex<double> to_std(const dd::cplx& z) { return z.to_std(); }
}  // namespace lu_detail

// Dense LU with partial pivoting over std::complex<double> or dd::cplx,
// row-major, with a Hager-Higham estimate of the 1-norm condition number.
template <class T>
class DenseLU {
public:
    DenseLU(std::vector<T> a, std::size_t n) : n_(n), a_(std::move(a)), piv_(n) {
        using lu_detail::abs1;
        anorm_ = 0.0;
        for (std::size_t j = 0; j < n_; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < n_; ++i) s += abs1(at(i, j));
            anorm_ = std::max(anorm_, s);
        }
        for (std::size_t k = 0; k < n_; ++k) {
            std::size_t p = k;
            for (std::size_t i = k + 1; i < n_; ++i)
                if (abs1(at(i, k)) > abs1(at(p, k))) p = i;
            piv_[k] = p;
            if (p != k)
                for (std::size_t j = 0; j < n_; ++j) std::swap(at(k, j), at(p, j));
            if (abs1(at(k, k)) == 0.0) {
                singular_ = true;
                continue;
            }
            const T inv = T(1.0) / at(k, k);
            for (std::size_t i = k + 1; i < n_; ++i) {
                const T f = at(i, k) * inv;
                at(i, k) = f;
                for (std::size_t j = k + 1; j < n_; ++j) at(i, j) -= f * at(k, j);
            }
        }
    }

    bool singular() const { return singular_; }

    // Overwrites b with A^{-1} b.
    void solve(std::vector<T>& b) const {
        for (std::size_t k = 0; k < n_; ++k) std::swap(b[k], b[piv_[k]]);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < i; ++j) b[i] -= at(i, j) * b[j];
        for (std::size_t i = n_; i-- > 0;) {
            for (std::size_t j = i + 1; j < n_; ++j) b[i] -= at(i, j) * b[j];
            b[i] = b[i] / at(i, i);
        }
    }

    // Overwrites b with A^{-H} b.
    void solve_adjoint(std::vector<T>& b) const {
        using lu_detail::conj;
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = 0; j < i; ++j) b[i] -= conj(at(j, i)) * b[j];
            b[i] = b[i] / conj(at(i, i));
        }
        for (std::size_t i = n_; i-- > 0;)
            for (std::size_t j = i + 1; j < n_; ++j) b[i] -= conj(at(j, i)) * b[j];
        for (std::size_t k = n_; k-- > 0;) std::swap(b[k], b[piv_[k]]);
    }

    // Reciprocal 1-norm condition estimate; 0 when the factorization broke down.
    double rcond() const {
        if (singular_ || n_ == 0) return singular_ ? 0.0 : 1.0;
        using lu_detail::to_std;
        std::vector<T> x(n_, T(1.0 / static_cast<double>(n_)));
        double est = 0.0;
        std::size_t last = n_;
        for (int it = 0; it < 5; ++it) {
            solve(x);
            double norm1 = 0.0;
            std::vector<T> xi(n_);
            for (std::size_t i = 0; i < n_; ++i) {
                const std::complex<double> y = to_std(x[i]);
                norm1 += std::abs(y);
                xi[i] = T(std::abs(y) > 0.0 ? y / std::abs(y) : std::complex<double>(1.0));
            }
            if (!std::isfinite(norm1)) return 0.0;
            if (it > 0 && norm1 <= est) break;
            est = norm1;
            solve_adjoint(xi);
            std::size_t j = 0;
            for (std::size_t i = 1; i < n_; ++i)
                if (std::abs(to_std(xi[i])) > std::abs(to_std(xi[j]))) j = i;
            if (j == last) break;
            last = j;
            std::fill(x.begin(), x.end(), T(0.0));
            x[j] = T(1.0);
        }
        return est > 0.0 ? 1.0 / (anorm_ * est) : 0.0;
    }

private:
    T& at(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    const T& at(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

    std::size_t n_;
    std::vector<T> a_;
    std::vector<std::size_t> piv_;
    double anorm_ = 0.0;
    bool singular_ = false;
};

}  // namespace fluxon
