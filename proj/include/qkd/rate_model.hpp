#pragma once

#include <stdexcept>

#include "qkd/types.hpp"

namespace qkd::model {

// Steady-state probability that both detectors of a basis are alive on a
// given slot, for per-detector sift probability p and dead time k slots.
// Exactly 1 when p = 0 or k = 0.
double p00(double p, int k);

// Steady state of the noisy recovery chain.  Per-detector firing probability
// is taken as f = 2p + eps (additive convention); simultaneous firing of both
// detectors of a basis, probability q = 2*p*eps + eps^2, sends the basis to
// the state (k, k) from which it recovers deterministically along the
// diagonal.  Reduces to p00(p, k) bit-for-bit at eps = 0.
double p00_noisy(const LinkParams& params);

// Distribution of detection-sequence lengths T_1..T_nmax for the noiseless
// chain.  nmax is limited to 6: sequences longer than six events sift a bit
// with probability within 2^-7 of one, so the residual mass needs no
// per-length resolution.
SeqLenDist seq_len_dist(double p, int k, int nmax = 6);

// Probability of sifting a bit from a detection sequence that started with
// both detectors alive: sum of (1 - 2^-N) T_N plus the residual mass at
// weight 1.  The unit residual weight over-counts by at most
// residual * 2^-(nmax+1).
double sift_prob(double p, int k, int nmax = 6);

// Sifted bits per transmission slot, 8p * p00 * S.  Multiply by the
// transmission rate (k / tau) to obtain a physical sifted-bit rate.
double sbr_norm(double p, int k);

struct RateModelPoint {
    int k = 0;
    double p = 0.0;
    double p00 = 1.0;
    double s = 0.5;
    double sbr_norm = 0.0;
};

RateModelPoint eval_point(double p, int k);

struct OptimumResult {
    int k_opt = 0;
    double sbr_norm_opt = 0.0;
    // k_opt * sbr_norm_opt: sifted bits per dead time at the optimum.
    double bits_per_dead_time = 0.0;
};

// Raised when the scan maximum sits at kmax, i.e. kmax was too small to
// bracket the true optimum.
struct BoundaryMaximumError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Integer argmax over k in [0, kmax] of the sifted-bit rate at fixed dead
// time, i.e. of k * sbr_norm(p, k).  Ties break toward smaller k.  Physical
// conversions: SBR_max = sbr_norm_opt * k_opt / tau, rho_max = k_opt / tau.
OptimumResult find_optimum(double p, int kmax);

}  // namespace qkd::model
