#pragma once

#include <stdexcept>

namespace rsfbl::fbl {

/// Parameters of the normal-approximation rate for one transmission phase.
struct FblParams {
    double epsilon = 1e-5;     // target block error rate, in (0, 0.5)
    long blocklength = 100;    // channel uses assigned to the phase
    double time_fraction = 1.0;  // fraction of the total block, in (0, 1]
    bool infinite = false;     // Shannon rate, no dispersion penalty
};

/// Inverse Gaussian tail: returns z with Q(z) = epsilon.
/// Bracketing bisection refined by Newton; |Q(z) - epsilon| <= 1e-14 * epsilon.
double q_inv(double epsilon);

/// Standard Gaussian tail Q(x) = P(N(0,1) > x).
double q_tail(double x);

/// Channel dispersion V(gamma) = 1 - (1 + gamma)^-2, in [0, 1).
double dispersion(double gamma);

/// Normal-approximation achievable rate in bits per channel use:
///   time_fraction * [log2(1+gamma) - sqrt(V(gamma)/l) * Q^-1(eps) * log2(e)].
/// May be negative; callers clamp when reporting. Infinite mode drops the
/// penalty term.
double fbl_rate(double gamma, const FblParams& params);

/// The penalty constant B = Q^-1(epsilon) * log2(e).
double penalty_constant(double epsilon);

}  // namespace rsfbl::fbl
