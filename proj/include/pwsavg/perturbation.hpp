#pragma once

#include "pwsavg/circle_profile.hpp"
#include "pwsavg/errors.hpp"

#include <compare>
#include <map>
#include <string>

namespace pwsavg {

// Which half-space of the switching plane y = 0 a vector field acts on.
enum class Side { plus, minus };

inline int side_sign(Side s) noexcept { return s == Side::plus ? 1 : -1; }

// Exponents of x^i y^j z^k.
struct MonomialKey {
    int i = 0;
    int j = 0;
    int k = 0;

    int total() const noexcept { return i + j + k; }
    auto operator<=>(const MonomialKey&) const = default;
};

// Radial cylindrical perturbation of degree n:
//
//   g^{+/-}(x, y, z) = (x Psi^{+/-}, y Psi^{+/-}, 0),
//   Psi^{+/-} = sum_{i+j+k <= n-1} a^{+/-}_{ijk} x^i y^j z^k.
//
// Only the two coefficient families are stored; zero entries are dropped.
class PerturbationSpec {
public:
    using CoeffMap = std::map<MonomialKey, double>;

    explicit PerturbationSpec(int degree = 1) : degree_(degree) {
        if (degree < 1) throw DomainError("PerturbationSpec: degree must be >= 1");
    }

    int degree() const noexcept { return degree_; }

    const CoeffMap& coeffs(Side s) const noexcept { return s == Side::plus ? plus_ : minus_; }

    double coeff(Side s, int i, int j, int k) const {
        const auto& m = coeffs(s);
        auto it = m.find({i, j, k});
        return it == m.end() ? 0.0 : it->second;
    }

    PerturbationSpec& set(Side s, int i, int j, int k, double a) {
        check_key({i, j, k});
        auto& m = mutable_coeffs(s);
        if (a == 0.0)
            m.erase({i, j, k});
        else
            m[{i, j, k}] = a;
        return *this;
    }

    PerturbationSpec& add(Side s, int i, int j, int k, double a) { return set(s, i, j, k, coeff(s, i, j, k) + a); }

    // Psi^{+/-}(x, y, z).
    double psi(Side s, double x, double y, double z) const {
        double sum = 0.0;
        for (const auto& [key, a] : coeffs(s)) sum += a * ipow(x, key.i) * ipow(y, key.j) * ipow(z, key.k);
        return sum;
    }

    bool empty() const noexcept { return plus_.empty() && minus_.empty(); }

    PerturbationSpec& operator+=(const PerturbationSpec& other) {
        if (other.degree_ > degree_) degree_ = other.degree_;
        for (Side s : {Side::plus, Side::minus})
            for (const auto& [key, a] : other.coeffs(s)) add(s, key.i, key.j, key.k, a);
        return *this;
    }

    PerturbationSpec& operator*=(double factor) {
        for (Side s : {Side::plus, Side::minus}) {
            auto& m = mutable_coeffs(s);
            if (factor == 0.0) {
                m.clear();
                continue;
            }
            for (auto& kv : m) kv.second *= factor;
        }
        return *this;
    }

    friend PerturbationSpec operator+(PerturbationSpec a, const PerturbationSpec& b) { return a += b; }
    friend PerturbationSpec operator*(double f, PerturbationSpec p) { return p *= f; }

private:
    void check_key(const MonomialKey& key) const {
        if (key.i < 0 || key.j < 0 || key.k < 0 || key.total() > degree_ - 1)
            throw DomainError("PerturbationSpec: monomial (" + std::to_string(key.i) + "," + std::to_string(key.j) +
                              "," + std::to_string(key.k) + ") outside 0 <= i+j+k <= " +
                              std::to_string(degree_ - 1));
    }

    CoeffMap& mutable_coeffs(Side s) noexcept { return s == Side::plus ? plus_ : minus_; }

    int degree_;
    CoeffMap plus_;
    CoeffMap minus_;
};

}  // namespace pwsavg
