#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace qkd {

// Normalized per-slot description of a BB84 link as seen by one receiver
// basis.  p is the probability that one specific detector produces a sifted
// bit in a given slot (p = L/8 for end-to-end detection probability L), k is
// the detector dead time measured in transmission slots, eps is the
// per-detector per-slot noise-click probability.
struct LinkParams {
    double p = 0.0;
    int k = 0;
    double eps = 0.0;

    void validate() const;
};

inline void LinkParams::validate() const {
    if (!(p >= 0.0) || p > 0.125) {
        throw std::domain_error("LinkParams: p must lie in [0, 1/8]");
    }
    if (k < 0) {
        throw std::domain_error("LinkParams: k must be a non-negative integer");
    }
    if (!(eps >= 0.0) || eps >= 1.0) {
        throw std::domain_error("LinkParams: eps must lie in [0, 1)");
    }
    if (2.0 * p + eps >= 0.5) {
        throw std::domain_error("LinkParams: 2p + eps must stay below 1/2");
    }
}

// Distribution of detection-sequence lengths.  t[i] is the probability that
// a sequence consists of exactly i+1 detection events; residual is the mass
// of sequences longer than t.size(), defined by subtraction and clamped at 0
// so that the total is exactly 1.
struct SeqLenDist {
    std::vector<double> t;
    double residual = 0.0;

    int nmax() const { return static_cast<int>(t.size()); }
    double total() const {
        double s = residual;
        for (double v : t) s += v;
        return s;
    }
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

}  // namespace qkd
