#include "qkd/transition_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "qkd/rng.hpp"

namespace qkd::analysis {

double transition_probability(std::span<const std::uint8_t> bits) {
    if (bits.size() < 2) {
        throw std::invalid_argument(
            "transition_probability: need at least two bits");
    }
    std::uint64_t transitions = 0;
    for (std::size_t i = 0; i + 1 < bits.size(); ++i) {
        transitions += (bits[i] ^ bits[i + 1]) & 1u;
    }
    return static_cast<double>(transitions) /
           static_cast<double>(bits.size() - 1);
}

Rational Rational::make(long long num, long long den) {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    return Rational{num, den};
}

Rational Rational::plus(const Rational& other) const {
    return make(num * other.den + other.num * den, den * other.den);
}

Rational Rational::times(long long factor) const {
    return make(num * factor, den);
}

Rational Rational::over(long long divisor) const {
    return make(num, den * divisor);
}

std::string Rational::str() const {
    return std::to_string(num) + "/" + std::to_string(den);
}

DetectorOrder DetectorOrder::parse(const std::string& text) {
    DetectorOrder order;
    std::array<bool, 5> seen{};
    std::size_t pos = 0;
    for (int i = 0; i < 4; ++i) {
        if (i > 0) {
            if (pos >= text.size() || text[pos] != '-') {
                throw std::invalid_argument(
                    "DetectorOrder: expected digits separated by '-'");
            }
            ++pos;
        }
        if (pos >= text.size() || text[pos] < '1' || text[pos] > '4') {
            throw std::invalid_argument(
                "DetectorOrder: detectors must be 1..4");
        }
        const int det = text[pos] - '0';
        if (seen[det]) {
            throw std::invalid_argument("DetectorOrder: not a permutation");
        }
        seen[det] = true;
        order.cycle[i] = det;
        ++pos;
    }
    if (pos != text.size()) {
        throw std::invalid_argument("DetectorOrder: trailing characters");
    }
    if (order.cycle[0] != 1) {
        throw std::invalid_argument("DetectorOrder: cycle must start with detector 1");
    }
    return order;
}

std::string DetectorOrder::str() const {
    std::string out;
    for (int i = 0; i < 4; ++i) {
        if (i > 0) out += '-';
        out += static_cast<char>('0' + cycle[i]);
    }
    return out;
}

std::array<DetectorOrder, 6> all_detector_orders() {
    std::array<DetectorOrder, 6> orders;
    std::array<int, 3> rest{2, 3, 4};
    int idx = 0;
    do {
        orders[idx].cycle = {1, rest[0], rest[1], rest[2]};
        ++idx;
    } while (std::next_permutation(rest.begin(), rest.end()));
    return orders;
}

Rational asymptotic_ptrans(const DetectorOrder& order) {
    if (order.cycle[0] != 1) {
        throw std::invalid_argument("asymptotic_ptrans: cycle must start with detector 1");
    }
    const int first_bit = DetectorOrder::bit_value(order.cycle[0]);
    // sum over offsets j = 1..4 of 2^(4-j) when the detector's bit differs,
    // all over 16; the cyclic repetition contributes the exact factor 16/15.
    long long numerator16 = 0;
    for (int j = 1; j <= 4; ++j) {
        const int det = order.cycle[j % 4];
        if (DetectorOrder::bit_value(det) != first_bit) {
            numerator16 += 1LL << (4 - j);
        }
    }
    return Rational::make(numerator16, 15);
}

Rational asymptotic_ptrans_avg() {
    Rational sum{0, 1};
    for (const DetectorOrder& order : all_detector_orders()) {
        sum = sum.plus(asymptotic_ptrans(order));
    }
    return sum.over(6);
}

double mc_ptrans_firing_order(std::uint64_t n_events, std::uint64_t seed) {
    if (n_events == 0) {
        throw std::invalid_argument("mc_ptrans_firing_order: no events");
    }
    const auto orders = all_detector_orders();
    Xoshiro256ss rng(seed);
    std::uint64_t differing = 0;
    for (std::uint64_t e = 0; e < n_events; ++e) {
        // Uniform order draw by rejection to avoid modulo bias.
        std::uint64_t r;
        do {
            r = rng.next();
        } while (r >= 18446744073709551612ULL);  // largest multiple of 6 below 2^64
        const DetectorOrder& order = orders[r % 6];
        // Walk the cycle from detector 1 until an event survives the fair
        // sift coin.
        int offset = 0;
        do {
            ++offset;
        } while ((rng.next() & 1u) == 0);
        const int det = order.cycle[offset % 4];
        differing += DetectorOrder::bit_value(det) !=
                     DetectorOrder::bit_value(order.cycle[0]);
    }
    return static_cast<double>(differing) / static_cast<double>(n_events);
}

FitResult fit_constants(std::span<const OptimumSample> samples) {
    if (samples.empty()) {
        throw std::invalid_argument("fit_constants: degenerate fit, no samples");
    }
    FitResult fit;
    // Constant least squares on the transformed samples: the minimizer of
    // sum (y_i - c)^2 is the mean.
    double sum_sbr = 0.0, sum_rho = 0.0;
    for (const OptimumSample& s : samples) {
        sum_sbr += 2.0 * s.sbr_norm_opt * static_cast<double>(s.k_opt);
        sum_rho += 8.0 * s.p * static_cast<double>(s.k_opt);
    }
    const double n = static_cast<double>(samples.size());
    fit.c_sbr = sum_sbr / n;
    fit.c_rho = sum_rho / n;

    fit.rel_dev_sbr.reserve(samples.size());
    fit.rel_dev_rho.reserve(samples.size());
    double ss_sbr = 0.0, ss_rho = 0.0;
    for (const OptimumSample& s : samples) {
        const double y_sbr = 2.0 * s.sbr_norm_opt * static_cast<double>(s.k_opt);
        const double y_rho = 8.0 * s.p * static_cast<double>(s.k_opt);
        const double d_sbr = (y_sbr - fit.c_sbr) / fit.c_sbr;
        const double d_rho = (y_rho - fit.c_rho) / fit.c_rho;
        fit.rel_dev_sbr.push_back(d_sbr);
        fit.rel_dev_rho.push_back(d_rho);
        ss_sbr += d_sbr * d_sbr;
        ss_rho += d_rho * d_rho;
    }
    fit.residual_norm_sbr = std::sqrt(ss_sbr / n);
    fit.residual_norm_rho = std::sqrt(ss_rho / n);
    return fit;
}

}  // namespace qkd::analysis
