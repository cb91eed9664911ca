#include "qkd/markov_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace qkd::oracle {

namespace {

struct ChainParams {
    double f = 0.0;  // per-detector firing probability when alive
    double q = 0.0;  // simultaneous both-fire probability from (0, 0)
    int k = 0;
};

ChainParams chain_params(const LinkParams& lp, FiringConvention convention) {
    ChainParams cp;
    cp.k = lp.k;
    cp.f = (convention == FiringConvention::additive)
               ? 2.0 * lp.p + lp.eps
               : 2.0 * lp.p + lp.eps - 2.0 * lp.p * lp.eps;
    cp.q = 2.0 * lp.p * lp.eps + lp.eps * lp.eps;
    return cp;
}

// Applies fn(target_id, probability, fired) for every outgoing transition of
// state (a, b).  Dead detectors move one slot closer to recovery; an alive
// detector fires with probability f and jumps to k; from (0, 0) singles
// carry f - q each and simultaneous firings carry q.
template <typename Fn>
void for_each_transition(int a, int b, const ChainParams& cp, Fn&& fn) {
    const int n1 = cp.k + 1;
    auto id = [n1](int x, int y) { return x * n1 + y; };

    if (a > 0 && b > 0) {
        fn(id(a - 1, b - 1), 1.0, false);
        return;
    }
    if (a == 0 && b > 0) {
        fn(id(cp.k, b - 1), cp.f, true);
        fn(id(0, b - 1), 1.0 - cp.f, false);
        return;
    }
    if (a > 0 && b == 0) {
        fn(id(a - 1, cp.k), cp.f, true);
        fn(id(a - 1, 0), 1.0 - cp.f, false);
        return;
    }
    // (0, 0)
    if (cp.q > 0.0) fn(id(cp.k, cp.k), cp.q, true);
    fn(id(cp.k, 0), cp.f - cp.q, true);
    fn(id(0, cp.k), cp.f - cp.q, true);
    fn(id(0, 0), 1.0 - 2.0 * cp.f + cp.q, false);
}

double kahan_sum(const std::vector<double>& values) {
    double sum = 0.0, carry = 0.0;
    for (double v : values) {
        const double y = v - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    return sum;
}

// ||pi P - pi||_1 against the original chain (self-loops included).
double stationarity_residual(const std::vector<double>& pi,
                             const ChainParams& cp) {
    const int n1 = cp.k + 1;
    std::vector<double> next(pi.size(), 0.0);
    for (int a = 0; a < n1; ++a) {
        for (int b = 0; b < n1; ++b) {
            const double mass = pi[a * n1 + b];
            if (mass == 0.0) continue;
            for_each_transition(a, b, cp,
                                [&](int tgt, double pr, bool /*fired*/) {
                                    next[tgt] += mass * pr;
                                });
        }
    }
    std::vector<double> diff(pi.size());
    for (std::size_t i = 0; i < pi.size(); ++i) {
        diff[i] = std::fabs(next[i] - pi[i]);
    }
    return kahan_sum(diff);
}

// GTH state reduction: censor states from the highest index down, using only
// additions and multiplications, then rebuild the stationary vector.
std::vector<double> solve_gth(const ChainParams& cp) {
    const int n1 = cp.k + 1;
    const int n = n1 * n1;
    std::vector<double> mat(static_cast<std::size_t>(n) * n, 0.0);
    for (int a = 0; a < n1; ++a) {
        for (int b = 0; b < n1; ++b) {
            const int src = a * n1 + b;
            for_each_transition(a, b, cp,
                                [&](int tgt, double pr, bool /*fired*/) {
                                    mat[src * static_cast<std::size_t>(n) + tgt] += pr;
                                });
        }
    }

    std::vector<double> scale(n, 0.0);
    for (int s = n - 1; s >= 1; --s) {
        double out = 0.0;
        for (int j = 0; j < s; ++j) out += mat[s * static_cast<std::size_t>(n) + j];
        scale[s] = out;
        if (out == 0.0) continue;  // state unreachable from below; drops out
        const double inv = 1.0 / out;
        for (int i = 0; i < s; ++i) {
            const double into_s = mat[i * static_cast<std::size_t>(n) + s];
            if (into_s == 0.0) continue;
            const double w = into_s * inv;
            for (int j = 0; j < s; ++j) {
                mat[i * static_cast<std::size_t>(n) + j] +=
                    w * mat[s * static_cast<std::size_t>(n) + j];
            }
        }
    }

    std::vector<double> pi(n, 0.0);
    pi[0] = 1.0;
    for (int s = 1; s < n; ++s) {
        if (scale[s] == 0.0) continue;
        double inflow = 0.0;
        for (int i = 0; i < s; ++i) {
            inflow += pi[i] * mat[i * static_cast<std::size_t>(n) + s];
        }
        pi[s] = inflow / scale[s];
    }

    const double total = kahan_sum(pi);
    for (double& v : pi) v /= total;
    return pi;
}

// Regenerative solve: the chain visits (0, 0) once per excursion, so the
// stationary probability of a state is proportional to its expected visit
// count per excursion (with the (0, 0) sojourn 1/outflow).  Visit counts are
// the Neumann series of the chain absorbed at (0, 0), accumulated over a
// sparse active set; the unabsorbed mass shrinks geometrically on the
// excursion-length scale.
std::vector<double> solve_excursion(const ChainParams& cp,
                                    const SolveOptions& opts) {
    const int n1 = cp.k + 1;
    const int n = n1 * n1;
    const double outflow00 = 2.0 * (cp.f - cp.q) + cp.q;

    std::vector<double> visits(n, 0.0), mass(n, 0.0), next(n, 0.0);
    std::vector<int> active, next_active;
    std::vector<std::int64_t> stamped(n, -1);

    auto seed = [&](int state, double m) {
        if (m <= 0.0) return;
        mass[state] = m;
        active.push_back(state);
    };
    // First state after leaving (0, 0), conditioned on leaving.
    seed(cp.k * n1, (cp.f - cp.q) / outflow00);        // (k, 0)
    seed(cp.k, (cp.f - cp.q) / outflow00);             // (0, k)
    if (cp.q > 0.0) seed(cp.k * n1 + cp.k, cp.q / outflow00);  // (k, k)

    long step = 0;
    double remaining = 1.0;
    while (remaining > opts.tail_mass) {
        if (++step > opts.max_iterations) {
            throw std::runtime_error(
                "steady_state: excursion accumulation did not absorb within " +
                std::to_string(opts.max_iterations) + " steps");
        }
        next_active.clear();
        remaining = 0.0;
        for (int state : active) {
            const double m = mass[state];
            mass[state] = 0.0;
            if (m == 0.0) continue;
            visits[state] += m;
            const int a = state / n1;
            const int b = state - a * n1;
            for_each_transition(a, b, cp, [&](int tgt, double pr, bool /*fired*/) {
                if (tgt == 0 || pr == 0.0) return;  // home: excursion over
                if (stamped[tgt] != step) {
                    stamped[tgt] = step;
                    next_active.push_back(tgt);
                    next[tgt] = 0.0;
                }
                next[tgt] += m * pr;
            });
        }
        for (int state : next_active) {
            mass[state] = next[state];
            remaining += next[state];
            next[state] = 0.0;
        }
        active.swap(next_active);
    }

    // Expected slots spent at (0, 0) per excursion.
    visits[0] = 1.0 / outflow00;
    const double total = kahan_sum(visits);
    for (double& x : visits) x /= total;
    return visits;
}

}  // namespace

double StateDist::total() const { return kahan_sum(prob_); }

double StateDist::max_abs_diff(const StateDist& other) const {
    double worst = 0.0;
    for (std::size_t i = 0; i < prob_.size(); ++i) {
        worst = std::max(worst, std::fabs(prob_[i] - other.prob_[i]));
    }
    return worst;
}

StateDist steady_state(const LinkParams& params, FiringConvention convention,
                       const SolveOptions& opts) {
    params.validate();
    const int n1 = params.k + 1;
    const long n = static_cast<long>(n1) * n1;
    if (n > opts.max_states) {
        throw std::length_error("steady_state: state space exceeds the size cap");
    }

    const ChainParams cp = chain_params(params, convention);

    std::vector<double> pi;
    if (params.k == 0 || cp.f <= 0.0) {
        // Nothing ever fires, or the dead time fits inside one slot: all the
        // stationary mass sits on (0, 0).
        pi.assign(n, 0.0);
        pi[0] = 1.0;
    } else if (n <= opts.direct_solve_max_states) {
        pi = solve_gth(cp);
    } else {
        pi = solve_excursion(cp, opts);
    }

    const double residual = stationarity_residual(pi, cp);
    if (residual > opts.residual_limit) {
        throw std::runtime_error(
            "steady_state: stationarity residual " + std::to_string(residual) +
            " above limit");
    }
    return StateDist(params.k, std::move(pi));
}

SeqLenDist seq_dp(double p, int k, int nmax, FirstClick first) {
    LinkParams{p, k, 0.0}.validate();
    if (nmax < 1 || nmax > 30) {
        throw std::domain_error("seq_dp: nmax must lie in [1, 30]");
    }
    if (k > 600) {
        throw std::length_error("seq_dp: k above the validator cap of 600");
    }

    SeqLenDist dist;
    dist.t.assign(nmax, 0.0);

    if (k == 0) {
        // The struck detector is already alive next slot; every sequence is a
        // single event.
        dist.t[0] = 1.0;
        dist.residual = 0.0;
        return dist;
    }

    const ChainParams cp{2.0 * p, 0.0, k};
    const int n1 = k + 1;
    const int n_states = n1 * n1;
    const int n_buckets = nmax + 1;  // click counts 1..nmax, plus overflow
    const int cells = n_states * n_buckets;

    // mass[bucket * n_states + state]; bucket i holds click count i+1 and the
    // last bucket holds every count above nmax.
    std::vector<double> mass(cells, 0.0), next(cells, 0.0);
    std::vector<int> active, next_active;
    std::vector<std::int32_t> stamped(cells, -1);

    const int start_state =
        (first == FirstClick::detector_b) ? k /* (0, k) */ : k * n1 /* (k, 0) */;
    mass[start_state] = 1.0;
    active.push_back(start_state);

    // All absorptions with at most nmax clicks happen within this horizon:
    // click N occurs no later than slot (N-1)k and the walk is home k+1
    // slots later.
    const long horizon = static_cast<long>(nmax) * (k + 1) + k + 2;

    for (long step = 0; step < horizon && !active.empty(); ++step) {
        next_active.clear();
        for (int cell : active) {
            const double m = mass[cell];
            mass[cell] = 0.0;
            if (m == 0.0) continue;
            const int bucket = cell / n_states;
            const int state = cell - bucket * n_states;
            const int a = state / n1;
            const int b = state - a * n1;
            for_each_transition(a, b, cp, [&](int tgt, double pr, bool fired) {
                if (pr == 0.0) return;
                if (tgt == 0) {
                    // Home: both detectors alive again.  A firing transition
                    // never lands on (0, 0) because it parks one counter at k.
                    // Mass home with more than nmax clicks stays in the
                    // residual, which is defined by subtraction.
                    if (bucket < nmax) dist.t[bucket] += m * pr;
                    return;
                }
                const int tgt_bucket = fired ? std::min(bucket + 1, nmax) : bucket;
                const int tgt_cell = tgt_bucket * n_states + tgt;
                if (stamped[tgt_cell] != static_cast<std::int32_t>(step)) {
                    stamped[tgt_cell] = static_cast<std::int32_t>(step);
                    next_active.push_back(tgt_cell);
                    next[tgt_cell] = 0.0;
                }
                next[tgt_cell] += m * pr;
            });
        }
        for (int cell : next_active) {
            mass[cell] = next[cell];
            next[cell] = 0.0;
        }
        active.swap(next_active);
    }

    double sum = 0.0;
    for (double v : dist.t) sum += v;
    dist.residual = std::max(0.0, 1.0 - sum);
    return dist;
}

StateDist enumerate_paths(double p, int k, int horizon) {
    LinkParams{p, k, 0.0}.validate();
    if (k > 4) {
        throw std::domain_error("enumerate_paths: k must be at most 4");
    }
    if (horizon < 0 || horizon > 10'000'000) {
        throw std::domain_error("enumerate_paths: horizon must lie in [0, 1e7]");
    }

    const ChainParams cp{2.0 * p, 0.0, k};
    const int n1 = k + 1;
    const int n = n1 * n1;
    std::vector<double> dist(n, 0.0), next(n, 0.0);
    dist[0] = 1.0;

    for (int step = 0; step < horizon; ++step) {
        std::fill(next.begin(), next.end(), 0.0);
        for (int a = 0; a < n1; ++a) {
            for (int b = 0; b < n1; ++b) {
                const double m = dist[a * n1 + b];
                if (m == 0.0) continue;
                for_each_transition(a, b, cp,
                                    [&](int tgt, double pr, bool /*fired*/) {
                                        next[tgt] += m * pr;
                                    });
            }
        }
        dist.swap(next);
    }
    return StateDist(k, std::move(dist));
}

}  // namespace qkd::oracle
