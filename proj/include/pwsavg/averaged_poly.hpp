#pragma once

#include "pwsavg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace pwsavg {

// psi_n(r, z0) = r * sum_{i+j <= n-1} C_ij r^i z0^j
//
// The structural factor r is kept outside the stored grid; C is stored
// densely (n x n, entries with i + j > n - 1 pinned to zero).
class AveragedPoly {
public:
    explicit AveragedPoly(int degree = 1) : degree_(degree) {
        if (degree < 1) throw DomainError("AveragedPoly: degree must be >= 1");
        coeffs_.assign(static_cast<std::size_t>(degree) * degree, 0.0);
    }

    int degree() const noexcept { return degree_; }

    static bool in_support(int degree, int i, int j) noexcept { return i >= 0 && j >= 0 && i + j <= degree - 1; }

    double coeff(int i, int j) const {
        check(i, j);
        return coeffs_[index(i, j)];
    }

    double& at(int i, int j) {
        check(i, j);
        return coeffs_[index(i, j)];
    }

    AveragedPoly& set(int i, int j, double value) {
        at(i, j) = value;
        return *this;
    }

    // Coefficients of psi/r as a polynomial in r for fixed z0:
    // result[i] = sum_j C_ij z0^j.
    std::vector<double> slice(double z0) const {
        std::vector<double> b(static_cast<std::size_t>(degree_), 0.0);
        for (int i = 0; i < degree_; ++i) {
            double acc = 0.0;
            for (int j = degree_ - 1 - i; j >= 0; --j) acc = acc * z0 + coeffs_[index(i, j)];
            b[static_cast<std::size_t>(i)] = acc;
        }
        return b;
    }

    // psi / r, defined for every real r.
    double reduced(double r, double z0) const {
        const auto b = slice(z0);
        double acc = 0.0;
        for (auto it = b.rbegin(); it != b.rend(); ++it) acc = acc * r + *it;
        return acc;
    }

    double value(double r, double z0) const { return r * reduced(r, z0); }

    // d psi / dr = sum C_ij (i + 1) r^i z0^j.
    double derivative_r(double r, double z0) const {
        const auto b = slice(z0);
        double acc = 0.0;
        for (int i = degree_ - 1; i >= 0; --i) acc = acc * r + (i + 1) * b[static_cast<std::size_t>(i)];
        return acc;
    }

    double max_abs_coeff() const {
        double m = 0.0;
        for (double c : coeffs_) m = std::max(m, std::abs(c));
        return m;
    }

    bool is_zero() const { return max_abs_coeff() == 0.0; }

    AveragedPoly& operator*=(double f) {
        for (double& c : coeffs_) c *= f;
        return *this;
    }

    friend AveragedPoly operator*(double f, AveragedPoly p) { return p *= f; }

    // Max |C_ij - D_ij| over the union of supports (missing entries are zero).
    friend double max_abs_diff(const AveragedPoly& a, const AveragedPoly& b) {
        const int n = std::max(a.degree_, b.degree_);
        double m = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; i + j <= n - 1; ++j) {
                const double ca = in_support(a.degree_, i, j) ? a.coeff(i, j) : 0.0;
                const double cb = in_support(b.degree_, i, j) ? b.coeff(i, j) : 0.0;
                m = std::max(m, std::abs(ca - cb));
            }
        return m;
    }

private:
    std::size_t index(int i, int j) const noexcept { return static_cast<std::size_t>(i) * degree_ + j; }

    void check(int i, int j) const {
        if (!in_support(degree_, i, j))
            throw DomainError("AveragedPoly: index (" + std::to_string(i) + "," + std::to_string(j) +
                              ") outside i + j <= " + std::to_string(degree_ - 1));
    }

    int degree_;
    std::vector<double> coeffs_;
};

inline double eval_psi(const AveragedPoly& poly, double r, double z0) {
    if (!(r > 0.0)) throw DomainError("eval_psi: r must be > 0");
    return poly.value(r, z0);
}

inline double eval_dpsi_dr(const AveragedPoly& poly, double r, double z0) {
    if (!(r > 0.0)) throw DomainError("eval_dpsi_dr: r must be > 0");
    return poly.derivative_r(r, z0);
}

}  // namespace pwsavg
