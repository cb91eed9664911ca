#pragma once

#include <cstdint>
#include <vector>

#include "qkd/types.hpp"

namespace qkd::oracle {

// Per-detector firing probability used by the recovery chain.  `additive`
// substitutes f = 2p + eps; `exact_union` uses f = 2p + eps - 2p*eps, the
// union of independent signal and noise events.  Both route simultaneous
// firings, probability q = 2p*eps + eps^2 from the both-alive state, to the
// corner (k, k).
enum class FiringConvention { additive, exact_union };

// Recovery state of one measurement basis: slots until each detector is
// alive again, a and b in [0, k].
struct BasisState {
    int a = 0;
    int b = 0;
};

// Probability table over the (k+1)^2 basis states.
class StateDist {
public:
    StateDist(int k, std::vector<double> prob)
        : k_(k), prob_(std::move(prob)) {}

    int k() const { return k_; }
    int size() const { return (k_ + 1) * (k_ + 1); }
    double at(int a, int b) const { return prob_[a * (k_ + 1) + b]; }
    const std::vector<double>& table() const { return prob_; }
    double total() const;
    double max_abs_diff(const StateDist& other) const;

private:
    int k_;
    std::vector<double> prob_;
};

struct SolveOptions {
    // States beyond this cap are refused; oracles validate, they do not
    // chase production sizes.
    int max_states = 1100 * 1100;
    // Dense GTH state reduction below this size, excursion accumulation
    // above it.
    int direct_solve_max_states = 441;
    // The excursion accumulation stops once the unabsorbed mass of one
    // regeneration cycle falls below this.
    double tail_mass = 1e-17;
    long max_iterations = 2'000'000;
    // The returned distribution must satisfy ||pi P - pi||_1 below this.
    double residual_limit = 1e-12;
};

// Stationary distribution of the per-basis recovery chain.  Small chains are
// solved by GTH state reduction (no subtractions, numerically exact).
// Larger ones use the regenerative structure anchored at (0, 0): the
// stationary mass is proportional to the expected visit count per excursion,
// obtained by accumulating the Neumann series of the chain absorbed at
// (0, 0); excursions are short, so the series converges geometrically.
StateDist steady_state(const LinkParams& params,
                       FiringConvention convention = FiringConvention::additive,
                       const SolveOptions& opts = {});

enum class FirstClick { detector_a, detector_b };

// Exact distribution of the number of clicks between leaving the both-alive
// state via a click and first returning to it, by absorbing-chain dynamic
// programming with click counting capped at nmax.  Noiseless by definition.
// The live support per step stays O(k) wide, so a run costs O(k^2 * nmax).
SeqLenDist seq_dp(double p, int k, int nmax = 6,
                  FirstClick first = FirstClick::detector_b);

// Occupancy distribution after `horizon` slots starting from (0, 0),
// obtained by summing probability over all transition paths (forward
// induction, no stationarity assumption).  Tiny k only; this is the
// brute-force validator for steady_state convergence.
StateDist enumerate_paths(double p, int k, int horizon);

}  // namespace qkd::oracle
