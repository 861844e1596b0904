#include "rsfbl/fbl.hpp"

#include <cmath>
#include <limits>

namespace rsfbl::fbl {

namespace {
constexpr double kLog2E = 1.4426950408889634074;  // log2(e)
constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double gauss_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }
}  // namespace

double q_tail(double x) { return 0.5 * std::erfc(x / kSqrt2); }

double q_inv(double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw std::domain_error("q_inv: epsilon must lie in (0, 1)");
    }
    if (epsilon == 0.5) return 0.0;

    // Bracket the root of Q(z) - epsilon. Q is strictly decreasing.
    double lo = -40.0, hi = 40.0;
    for (int i = 0; i < 60; ++i) {
        double mid = 0.5 * (lo + hi);
        if (q_tail(mid) > epsilon) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Newton polish; Q'(z) = -phi(z).
    double z = 0.5 * (lo + hi);
    for (int i = 0; i < 8; ++i) {
        double f = q_tail(z) - epsilon;
        if (std::abs(f) <= 1e-15 * epsilon) break;
        double d = gauss_pdf(z);
        if (d <= std::numeric_limits<double>::min()) break;
        z += f / d;
    }
    return z;
}

double dispersion(double gamma) {
    if (gamma < 0.0) throw std::domain_error("dispersion: gamma must be >= 0");
    double g = 1.0 + gamma;
    return 1.0 - 1.0 / (g * g);
}

double penalty_constant(double epsilon) { return q_inv(epsilon) * kLog2E; }

double fbl_rate(double gamma, const FblParams& params) {
    if (gamma < 0.0) throw std::domain_error("fbl_rate: gamma must be >= 0");
    if (params.blocklength < 1) throw std::domain_error("fbl_rate: blocklength must be >= 1");
    if (!(params.time_fraction > 0.0 && params.time_fraction <= 1.0)) {
        throw std::domain_error("fbl_rate: time_fraction must lie in (0, 1]");
    }
    double shannon = std::log2(1.0 + gamma);
    if (params.infinite) return params.time_fraction * shannon;
    double pen = std::sqrt(dispersion(gamma) / static_cast<double>(params.blocklength)) *
                 penalty_constant(params.epsilon);
    return params.time_fraction * (shannon - pen);
}

}  // namespace rsfbl::fbl
