#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qkd::analysis {

// Fraction of adjacent bit pairs that differ: (1/(N-1)) * sum of
// bit[i] XOR bit[i+1].  Requires at least two bits.
double transition_probability(std::span<const std::uint8_t> bits);

// Exact rational, normalized with a positive denominator.
struct Rational {
    long long num = 0;
    long long den = 1;

    static Rational make(long long num, long long den);
    Rational plus(const Rational& other) const;
    Rational times(long long factor) const;
    Rational over(long long divisor) const;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const;
    bool operator==(const Rational&) const = default;
};

// Cyclic firing order of the four detectors at saturation, always starting
// with detector 1.  Detectors 1 and 3 encode bit '1', detectors 2 and 4
// encode bit '0'.
struct DetectorOrder {
    std::array<int, 4> cycle{1, 2, 3, 4};

    static DetectorOrder parse(const std::string& text);  // e.g. "1-3-4-2"
    static int bit_value(int detector) {
        return (detector == 1 || detector == 3) ? 1 : 0;
    }
    std::string str() const;
};

// The six firing orders that can follow detector 1.
std::array<DetectorOrder, 6> all_detector_orders();

// Probability that the sifted bit after detector 1's differs in value, for a
// fixed cyclic firing order: each event is sifted with probability 1/2, so
// the detector at cyclic offset j supplies the next sifted bit with
// probability sum_n (1/2)^(j+4n), and the geometric tail closes to 16/15 in
// exact integer arithmetic.
Rational asymptotic_ptrans(const DetectorOrder& order);

// Mean over the six equally likely firing orders (28/45).
Rational asymptotic_ptrans_avg();

// Brute-force check of the same quantity, independent of the geometric-series
// closed form: draw a uniform firing order per event, walk the cycle flipping
// fair sift coins until a bit is kept, and tally how often it differs.
double mc_ptrans_firing_order(std::uint64_t n_events, std::uint64_t seed);

struct OptimumSample {
    double p = 0.0;
    int k_opt = 0;
    double sbr_norm_opt = 0.0;
};

struct FitResult {
    double c_sbr = 0.0;  // sbr_norm_opt * k_opt ~= c_sbr / 2
    double c_rho = 0.0;  // k_opt ~= c_rho / (8 p)
    double residual_norm_sbr = 0.0;
    double residual_norm_rho = 0.0;
    std::vector<double> rel_dev_sbr;
    std::vector<double> rel_dev_rho;
};

// Least-squares constant fits in normalized (tau-free) form, with per-point
// relative deviations.
FitResult fit_constants(std::span<const OptimumSample> samples);

}  // namespace qkd::analysis
