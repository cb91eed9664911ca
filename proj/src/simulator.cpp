#include "qkd/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "qkd/rng.hpp"

namespace qkd::sim {

const char* sift_mode_name(SiftMode mode) {
    switch (mode) {
        case SiftMode::naive: return "naive";
        case SiftMode::secure: return "secure";
        case SiftMode::self_disabling: return "self_disabling";
    }
    return "?";
}

std::optional<SiftMode> sift_mode_from_name(const std::string& name) {
    if (name == "naive") return SiftMode::naive;
    if (name == "secure") return SiftMode::secure;
    if (name == "self_disabling" || name == "self-disabling") {
        return SiftMode::self_disabling;
    }
    return std::nullopt;
}

void SimConfig::validate() const {
    params.validate();
    if (!(loss >= 0.0) || loss > 1.0) {
        throw std::invalid_argument("SimConfig: loss must lie in [0, 1]");
    }
    if (std::fabs(loss - 8.0 * params.p) > 1e-15) {
        throw std::invalid_argument("SimConfig: loss must equal 8p");
    }
    if (n_slots < 1 || n_slots > 1'000'000'000'000'000ULL) {
        throw std::invalid_argument("SimConfig: n_slots must lie in [1, 1e15]");
    }
}

SimConfig make_config(double loss, int k, double eps, std::uint64_t n_slots,
                      std::uint64_t seed, SiftMode mode) {
    SimConfig cfg;
    cfg.loss = loss;
    cfg.params = LinkParams{loss / 8.0, k, eps};
    cfg.n_slots = n_slots;
    cfg.seed = seed;
    cfg.mode = mode;
    return cfg;
}

namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

inline void fnv_mix(std::uint64_t& hash, std::uint64_t value) {
    hash ^= value;
    hash *= kFnvPrime;
}

struct BitTally {
    SimResult* r;
    bool record_bits;
    int prev_bit = -1;

    void take(int bit, int alice_bit) {
        ++r->sifted;
        if (prev_bit >= 0) {
            ++r->bit_pairs;
            r->bit_transitions += (bit != prev_bit);
        }
        prev_bit = bit;
        if (bit != alice_bit) ++r->sifted_bit_errors;
        if (record_bits) r->sifted_bits.push_back(static_cast<std::uint8_t>(bit));
    }
};

void finalize(SimResult& r, const SimConfig& cfg) {
    r.sifted_per_slot =
        static_cast<double>(r.sifted) / static_cast<double>(cfg.n_slots);
    r.p_trans = r.bit_pairs > 0
                    ? static_cast<double>(r.bit_transitions) /
                          static_cast<double>(r.bit_pairs)
                    : std::numeric_limits<double>::quiet_NaN();
}

void record_click(SimResult& r, const SimConfig& cfg, std::uint64_t slot,
                  int basis, int det_bit, bool matched,
                  ClickEvent::Origin origin) {
    ++r.clicks;
    fnv_mix(r.click_stream_hash, slot);
    fnv_mix(r.click_stream_hash,
            static_cast<std::uint64_t>(basis * 2 + det_bit) |
                (origin == ClickEvent::Origin::noise ? 4u : 0u));
    if (r.recorded_clicks.size() < cfg.max_recorded_clicks) {
        r.recorded_clicks.push_back(ClickEvent{
            slot, static_cast<std::uint8_t>(basis),
            static_cast<std::uint8_t>(det_bit), matched,
            origin});
    }
}

void bump_seq_histogram(SimResult& r, std::uint64_t clicks_in_seq) {
    const std::size_t bucket =
        std::min<std::uint64_t>(clicks_in_seq, kSeqLenBuckets) - 1;
    ++r.seq_len_counts[bucket];
    ++r.seq_len_total;
}

// Four free-running detectors (one per bit value per basis), naive or secure
// sifting.  Sifting consumes no randomness, so both modes see the identical
// click stream for a given seed.
//
// Per-slot draw order: one word for the photon Bernoulli; one auxiliary word
// when a photon arrived or noise is enabled (bit 0 Alice basis, bit 1 Alice
// bit, bit 2 Bob basis, bit 3 stray detector bit); with noise enabled, one
// word per detector in index order.
SimResult run_four_detector(const SimConfig& cfg) {
    SimResult r;
    r.seed = cfg.seed;
    r.n_slots = cfg.n_slots;

    Xoshiro256ss rng(cfg.seed);
    const std::uint64_t photon_thr = probability_threshold(cfg.loss);
    const std::uint64_t eps_thr = probability_threshold(cfg.params.eps);
    const std::int64_t k = cfg.params.k;
    const std::int64_t n = static_cast<std::int64_t>(cfg.n_slots);
    const bool secure = cfg.mode == SiftMode::secure;

    std::int64_t dead_until[4] = {-1, -1, -1, -1};
    std::int64_t busy_until[2] = {-1, -1};
    bool seq_open[2] = {false, false};
    std::uint64_t seq_clicks[2] = {0, 0};
    bool seq_taken[2] = {false, false};

    BitTally tally{&r, cfg.record_bits};

    struct SlotClick {
        int det;
        bool matched;
        ClickEvent::Origin origin;
    };

    for (std::int64_t t = 0; t < n; ++t) {
        const bool have_photon = rng.next() < photon_thr;
        std::uint64_t aux = 0;
        if (have_photon || eps_thr != 0) aux = rng.next();

        const int alice_basis = static_cast<int>(aux & 1u);
        const int alice_bit = static_cast<int>((aux >> 1) & 1u);

        SlotClick clicks[4];
        int n_clicks = 0;

        if (have_photon) {
            const int bob_basis = static_cast<int>((aux >> 2) & 1u);
            const int det_bit = (bob_basis == alice_basis)
                                    ? alice_bit
                                    : static_cast<int>((aux >> 3) & 1u);
            ++r.signal_arrivals;
            if (t > busy_until[bob_basis]) ++r.signal_arrivals_basis_ready;
            const int d = bob_basis * 2 + det_bit;
            if (t > dead_until[d]) {
                clicks[n_clicks++] = {d, bob_basis == alice_basis,
                                      ClickEvent::Origin::signal};
            }
            // else: the photon is absorbed by a recovering detector
        }

        if (eps_thr != 0) {
            for (int d = 0; d < 4; ++d) {
                const bool fires = rng.next() < eps_thr;
                if (!fires || t <= dead_until[d]) continue;
                bool already = false;
                for (int i = 0; i < n_clicks; ++i) {
                    if (clicks[i].det == d) already = true;
                }
                if (already) continue;  // one avalanche per detector per slot
                clicks[n_clicks++] = {d, (d >> 1) == alice_basis,
                                      ClickEvent::Origin::noise};
            }
        }

        if (n_clicks == 0) continue;

        if (n_clicks >= 2) ++r.discarded_double;

        for (int i = 0; i < n_clicks; ++i) {
            // A dead detector never clicks.
            if (t <= dead_until[clicks[i].det]) {
                throw std::logic_error("simulator: click on a dead detector");
            }
            record_click(r, cfg, static_cast<std::uint64_t>(t),
                         clicks[i].det >> 1, clicks[i].det & 1,
                         clicks[i].matched, clicks[i].origin);
        }

        // Per-basis sequence bookkeeping against the pre-slot recovery state.
        for (int basis = 0; basis < 2; ++basis) {
            int cnt = 0;
            int only = -1;
            for (int i = 0; i < n_clicks; ++i) {
                if ((clicks[i].det >> 1) == basis) {
                    ++cnt;
                    only = i;
                }
            }
            if (cnt == 0) continue;
            const bool ready = t > busy_until[basis];
            if (ready) {
                if (seq_open[basis]) bump_seq_histogram(r, seq_clicks[basis]);
                seq_open[basis] = true;
                ++r.sequences;
                seq_clicks[basis] = 0;
                seq_taken[basis] = false;
            }
            seq_clicks[basis] += static_cast<std::uint64_t>(cnt);
            if (secure) {
                // Both detectors firing at once is only possible at a
                // sequence start (both alive) and yields no secure bit.  A
                // lone click is the candidate; only the first matched click
                // of the sequence is kept.
                if (cnt == 1 && !seq_taken[basis] && clicks[only].matched) {
                    tally.take(clicks[only].det & 1, alice_bit);
                    seq_taken[basis] = true;
                }
            }
        }

        if (cfg.mode == SiftMode::naive && n_clicks == 1 && clicks[0].matched) {
            tally.take(clicks[0].det & 1, alice_bit);
        }

        for (int i = 0; i < n_clicks; ++i) {
            dead_until[clicks[i].det] = t + k;
        }
        busy_until[0] = std::max(dead_until[0], dead_until[1]);
        busy_until[1] = std::max(dead_until[2], dead_until[3]);
    }

    for (int basis = 0; basis < 2; ++basis) {
        // Close a trailing sequence only if the basis actually returned to
        // the both-alive state inside the run.
        if (seq_open[basis] && busy_until[basis] < n - 1) {
            bump_seq_histogram(r, seq_clicks[basis]);
        }
    }

    finalize(r, cfg);
    return r;
}

// One logical detector per basis; a click resolves the bit directly and the
// entire basis is dead for k slots afterwards, so every sequence is a single
// event.  Draw order: photon word, then (when a photon arrived or noise is
// enabled) the auxiliary word, then one noise word per basis.  Auxiliary
// bits 4 and 5 supply the observed bit of a noise click per basis.
SimResult run_self_disabling(const SimConfig& cfg) {
    SimResult r;
    r.seed = cfg.seed;
    r.n_slots = cfg.n_slots;

    Xoshiro256ss rng(cfg.seed);
    const std::uint64_t photon_thr = probability_threshold(cfg.loss);
    const std::uint64_t eps_thr = probability_threshold(cfg.params.eps);
    const std::int64_t k = cfg.params.k;
    const std::int64_t n = static_cast<std::int64_t>(cfg.n_slots);

    std::int64_t basis_dead_until[2] = {-1, -1};
    BitTally tally{&r, cfg.record_bits};

    for (std::int64_t t = 0; t < n; ++t) {
        const bool have_photon = rng.next() < photon_thr;
        std::uint64_t aux = 0;
        if (have_photon || eps_thr != 0) aux = rng.next();

        const int alice_basis = static_cast<int>(aux & 1u);
        const int alice_bit = static_cast<int>((aux >> 1) & 1u);

        int clicked[2] = {0, 0};
        int click_bit[2] = {0, 0};
        ClickEvent::Origin origin[2] = {ClickEvent::Origin::signal,
                                        ClickEvent::Origin::signal};

        if (have_photon) {
            const int bob_basis = static_cast<int>((aux >> 2) & 1u);
            ++r.signal_arrivals;
            if (t > basis_dead_until[bob_basis]) {
                ++r.signal_arrivals_basis_ready;
                clicked[bob_basis] = 1;
                click_bit[bob_basis] = (bob_basis == alice_basis)
                                           ? alice_bit
                                           : static_cast<int>((aux >> 3) & 1u);
            }
        }

        if (eps_thr != 0) {
            for (int basis = 0; basis < 2; ++basis) {
                const bool fires = rng.next() < eps_thr;
                if (!fires || t <= basis_dead_until[basis] || clicked[basis]) {
                    continue;
                }
                clicked[basis] = 1;
                click_bit[basis] = static_cast<int>((aux >> (4 + basis)) & 1u);
                origin[basis] = ClickEvent::Origin::noise;
            }
        }

        const int total = clicked[0] + clicked[1];
        if (total == 0) continue;
        if (total >= 2) ++r.discarded_double;

        for (int basis = 0; basis < 2; ++basis) {
            if (!clicked[basis]) continue;
            const bool matched = basis == alice_basis;
            record_click(r, cfg, static_cast<std::uint64_t>(t), basis,
                         click_bit[basis], matched, origin[basis]);
            ++r.sequences;
            bump_seq_histogram(r, 1);
            if (matched) tally.take(click_bit[basis], alice_bit);
            basis_dead_until[basis] = t + k;
        }
    }

    finalize(r, cfg);
    return r;
}

}  // namespace

SimResult run(const SimConfig& config) {
    config.validate();
    if (config.mode == SiftMode::self_disabling) {
        return run_self_disabling(config);
    }
    return run_four_detector(config);
}

SweepOutcome run_sweep(const std::vector<SimConfig>& cells,
                       std::uint64_t master_seed, unsigned jobs) {
    if (cells.empty()) {
        throw std::invalid_argument("run_sweep: empty grid");
    }

    SweepOutcome outcome;
    outcome.results.resize(cells.size());
    std::vector<std::string> cell_errors(cells.size());

    auto run_cell = [&](std::size_t i) {
        SimConfig cfg = cells[i];
        cfg.seed = derive_cell_seed(master_seed, i);
        try {
            outcome.results[i] = run(cfg);
        } catch (const std::exception& e) {
            cell_errors[i] = e.what();
        }
    };

    const unsigned workers =
        std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(cells.size())));
    if (workers <= 1) {
        for (std::size_t i = 0; i < cells.size(); ++i) run_cell(i);
    } else {
        std::atomic<std::size_t> next_cell{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t i = next_cell.fetch_add(1);
                    if (i >= cells.size()) return;
                    run_cell(i);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (!outcome.results[i].has_value()) {
            outcome.errors.emplace_back(i, "cell " + std::to_string(i) + ": " +
                                               cell_errors[i]);
        }
    }
    return outcome;
}

}  // namespace qkd::sim
