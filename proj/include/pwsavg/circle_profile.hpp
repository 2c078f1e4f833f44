#pragma once

#include "pwsavg/errors.hpp"
#include "pwsavg/quadrature.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/binomial.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <utility>
#include <vector>

namespace pwsavg {

inline constexpr double kPi = boost::math::constants::pi<double>();
inline constexpr double kTwoPi = boost::math::constants::two_pi<double>();

inline double ipow(double base, int exponent) {
    double result = 1.0;
    for (int e = 0; e < exponent; ++e) result *= base;
    return result;
}

inline double binomial(int n, int k) {
    return boost::math::binomial_coefficient<double>(static_cast<unsigned>(n), static_cast<unsigned>(k));
}

// One term coeff * cos^p(theta) * sin^q(theta).
struct TrigTerm {
    int cos_power = 0;
    int sin_power = 0;
    double coeff = 0.0;
};

// The nonlinearity h of z' = h(x, y) restricted to the unit circle.
//
// Since h does not depend on the radius, h(r cos t, r sin t) = h(cos t, sin t)
// and this finite trig polynomial describes h completely. The running
// integral I_h is tabulated at construction on a uniform grid over one turn;
// off-grid values add a single Gauss panel from the nearest node below.
// Instances are immutable and cheap to copy (the table is shared).
class CircleProfile {
public:
    static constexpr std::size_t kDefaultGridPoints = 4096;

    CircleProfile() : CircleProfile(std::vector<TrigTerm>{}) {}

    explicit CircleProfile(const std::vector<TrigTerm>& terms,
                           std::size_t grid_points = kDefaultGridPoints) {
        if (grid_points < 1) throw DomainError("CircleProfile: grid needs at least one panel");
        for (const auto& t : terms) {
            if (t.cos_power < 0 || t.sin_power < 0)
                throw DomainError("CircleProfile: exponents must be non-negative");
            terms_[{t.cos_power, t.sin_power}] += t.coeff;
        }
        build_table(grid_points);
    }

    static CircleProfile zero() { return CircleProfile{}; }
    // h(x, y) = x / sqrt(x^2 + y^2), i.e. cos(theta) on the circle.
    static CircleProfile cosine() { return CircleProfile({{1, 0, 1.0}}); }
    static CircleProfile constant(double k) { return CircleProfile({{0, 0, k}}); }

    const std::map<std::pair<int, int>, double>& terms() const noexcept { return terms_; }
    std::vector<TrigTerm> term_list() const {
        std::vector<TrigTerm> out;
        for (const auto& [pq, c] : terms_) out.push_back({pq.first, pq.second, c});
        return out;
    }

    bool is_zero() const noexcept {
        return std::all_of(terms_.begin(), terms_.end(), [](const auto& kv) { return kv.second == 0.0; });
    }

    double h(double theta) const {
        if (terms_.empty()) return 0.0;
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        double sum = 0.0;
        for (const auto& [pq, coeff] : terms_) sum += coeff * ipow(c, pq.first) * ipow(s, pq.second);
        return sum;
    }

    // I_h(theta) = integral of h(cos s, sin s) over [0, theta]; exact 0 at 0.
    double running_integral(double theta) const {
        if (terms_.empty()) return 0.0;
        const auto& grid = *table_;
        const std::size_t n = grid.size() - 1;
        const double turns = std::floor(theta / kTwoPi);
        double phase = theta - turns * kTwoPi;
        if (phase < 0.0) phase = 0.0;
        const double width = kTwoPi / static_cast<double>(n);
        const auto node = std::min(static_cast<std::size_t>(phase / width), n - 1);
        const double node_theta = width * static_cast<double>(node);
        const double local = gauss_panel([this](double s) { return h(s); }, node_theta, phase);
        return turns * grid[n] + grid[node] + local;
    }

    double full_turn_integral() const { return terms_.empty() ? 0.0 : (*table_)[table_->size() - 1]; }

    std::size_t grid_points() const noexcept { return table_ ? table_->size() - 1 : 0; }

private:
    void build_table(std::size_t n) {
        auto grid = std::make_shared<std::vector<double>>(n + 1, 0.0);
        if (!terms_.empty()) {
            const double width = kTwoPi / static_cast<double>(n);
            double sum = 0.0;
            double carry = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                const double lo = width * static_cast<double>(k);
                const double hi = (k + 1 == n) ? kTwoPi : width * static_cast<double>(k + 1);
                const double y = gauss_panel([this](double s) { return h(s); }, lo, hi) - carry;
                const double t = sum + y;
                carry = (t - sum) - y;
                sum = t;
                (*grid)[k + 1] = sum;
            }
        }
        table_ = std::move(grid);
    }

    std::map<std::pair<int, int>, double> terms_;
    std::shared_ptr<const std::vector<double>> table_;
};

inline double eval_h(const CircleProfile& profile, double theta) { return profile.h(theta); }

inline double integral_I_h(const CircleProfile& profile, double theta) { return profile.running_integral(theta); }

inline constexpr double kPeriodicityTolerance = 1e-9;

inline bool validate_periodic(const CircleProfile& profile, double tol = kPeriodicityTolerance) {
    return std::abs(profile.full_turn_integral()) <= tol;
}

inline void require_periodic(const CircleProfile& profile, double tol = kPeriodicityTolerance) {
    if (!validate_periodic(profile, tol)) throw NonPeriodicProfile(profile.full_turn_integral());
}

// Half-turn moments of I_h. Index pattern: cK_AB with K the power/weight
// family, first half (0, pi) vs second half (pi, 2 pi).
struct CConstantTable {
    double c0_10 = 0.0;  // int_0^pi      I
    double c0_01 = 0.0;  // int_pi^{2pi}  I
    double c1_11 = 0.0;  // int_0^pi      I cos
    double c1_12 = 0.0;  // int_pi^{2pi}  I cos
    double c1_21 = 0.0;  // int_0^pi      I sin
    double c1_22 = 0.0;  // int_pi^{2pi}  I sin
    double c2_10 = 0.0;  // int_0^pi      I^2
    double c2_01 = 0.0;  // int_pi^{2pi}  I^2
};

inline CConstantTable c_constants(const CircleProfile& profile, const QuadratureOptions& opts = {}) {
    require_periodic(profile);
    CConstantTable c;
    if (profile.is_zero()) return c;
    const auto I = [&](double t) { return profile.running_integral(t); };
    const auto first = [&](auto&& f) { return integrate(f, 0.0, kPi, opts); };
    const auto second = [&](auto&& f) { return integrate(f, kPi, kTwoPi, opts); };
    const auto plain = [&](double t) { return I(t); };
    const auto with_cos = [&](double t) { return I(t) * std::cos(t); };
    const auto with_sin = [&](double t) { return I(t) * std::sin(t); };
    const auto squared = [&](double t) { const double v = I(t); return v * v; };
    c.c0_10 = first(plain);
    c.c0_01 = second(plain);
    c.c1_11 = first(with_cos);
    c.c1_12 = second(with_cos);
    c.c1_21 = first(with_sin);
    c.c1_22 = second(with_sin);
    c.c2_10 = first(squared);
    c.c2_01 = second(squared);
    return c;
}

// binom(n-1-i, j) * int_0^pi sin^i(t) I_h(t)^(n-1-i-j) dt
//
// This is the averaged contribution to C_{i,j} of the monomial y^i z^(n-1-i)
// placed on the y > 0 side; realization peels coefficients with it.
inline double delta(const CircleProfile& profile, int n, int i, int j, const QuadratureOptions& opts = {}) {
    if (n < 1 || i < 0 || j < 0 || i + j > n - 1)
        throw DomainError("delta: need 0 <= i, 0 <= j, i + j <= n - 1");
    const int top = n - 1 - i;
    const int power = top - j;
    const double moment = integrate(
        [&](double t) {
            const double s = ipow(std::sin(t), i);
            return power == 0 ? s : s * ipow(profile.running_integral(t), power);
        },
        0.0, kPi, opts);
    return binomial(top, j) * moment;
}

}  // namespace pwsavg
