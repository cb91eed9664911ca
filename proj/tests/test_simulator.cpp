#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>

#include "qkd/markov_oracle.hpp"
#include "qkd/rate_model.hpp"
#include "qkd/rng.hpp"
#include "qkd/simulator.hpp"
#include "qkd/transition_stats.hpp"

using namespace qkd;
using sim::SiftMode;
using sim::SimConfig;
using sim::SimResult;

namespace {

bool same_result(const SimResult& a, const SimResult& b) {
    return a.clicks == b.clicks && a.sequences == b.sequences &&
           a.sifted == b.sifted && a.discarded_double == b.discarded_double &&
           a.sifted_bit_errors == b.sifted_bit_errors &&
           a.signal_arrivals == b.signal_arrivals &&
           a.signal_arrivals_basis_ready == b.signal_arrivals_basis_ready &&
           a.seq_len_counts == b.seq_len_counts &&
           a.seq_len_total == b.seq_len_total &&
           a.bit_transitions == b.bit_transitions &&
           a.bit_pairs == b.bit_pairs &&
           a.click_stream_hash == b.click_stream_hash &&
           a.sifted_bits == b.sifted_bits;
}

}  // namespace

TEST_CASE("identical configs give bit-identical results") {
    for (SiftMode mode :
         {SiftMode::naive, SiftMode::secure, SiftMode::self_disabling}) {
        SimConfig cfg = sim::make_config(0.1, 25, 1e-4, 300'000, 123456, mode);
        cfg.record_bits = true;
        const SimResult a = sim::run(cfg);
        const SimResult b = sim::run(cfg);
        CHECK(same_result(a, b));
        SimConfig other = cfg;
        other.seed = 31;
        CHECK_FALSE(same_result(a, sim::run(other)));
    }
}

TEST_CASE("config validation") {
    CHECK_THROWS_AS(sim::run(sim::make_config(0.1, 10, 0.0, 0, 1, SiftMode::naive)),
                    std::invalid_argument);
    SimConfig bad = sim::make_config(0.1, 10, 0.0, 100, 1, SiftMode::naive);
    bad.loss = 0.2;  // no longer equals 8p
    CHECK_THROWS_AS(sim::run(bad), std::invalid_argument);
    CHECK_THROWS_AS(
        sim::run(sim::make_config(0.1, 10, 0.0, 2'000'000'000'000'000ULL, 1,
                                  SiftMode::naive)),
        std::invalid_argument);
}

TEST_CASE("no dead time sifts half of the detected photons") {
    const SimResult r =
        sim::run(sim::make_config(0.1, 0, 0.0, 10'000'000, 42, SiftMode::naive));
    const double sigma = std::sqrt(0.05 * 0.95 / 1e7);
    CHECK(std::fabs(r.sifted_per_slot - 0.05) <= 5.0 * sigma);
}

TEST_CASE("naive and secure sifting see the identical click stream") {
    const SimConfig naive_cfg =
        sim::make_config(0.1, 40, 0.0, 1'000'000, 777, SiftMode::naive);
    SimConfig secure_cfg = naive_cfg;
    secure_cfg.mode = SiftMode::secure;
    const SimResult naive = sim::run(naive_cfg);
    const SimResult secure = sim::run(secure_cfg);
    CHECK(naive.click_stream_hash == secure.click_stream_hash);
    CHECK(naive.clicks == secure.clicks);
    CHECK(naive.sequences == secure.sequences);
    CHECK(naive.signal_arrivals == secure.signal_arrivals);
    CHECK(naive.seq_len_counts == secure.seq_len_counts);
    CHECK(secure.sifted <= naive.sifted);
}

TEST_CASE("counter invariants hold") {
    for (SiftMode mode : {SiftMode::naive, SiftMode::secure}) {
        const SimResult r =
            sim::run(sim::make_config(0.08, 15, 5e-4, 400'000, 5, mode));
        CHECK(r.sifted <= r.clicks);
        CHECK(r.sifted_per_slot ==
              doctest::Approx(static_cast<double>(r.sifted) / 400'000.0));
        if (mode == SiftMode::secure) CHECK(r.sifted <= r.sequences);
    }
}

TEST_CASE("without noise a basis never fires twice in one slot") {
    const SimResult r =
        sim::run(sim::make_config(0.12, 9, 0.0, 2'000'000, 9, SiftMode::secure));
    CHECK(r.discarded_double == 0);
}

TEST_CASE("recorded clicks respect the dead time") {
    SimConfig cfg = sim::make_config(0.1, 12, 1e-4, 400'000, 2024, SiftMode::secure);
    cfg.max_recorded_clicks = 2000;
    const SimResult r = sim::run(cfg);
    REQUIRE(r.recorded_clicks.size() > 100);
    std::int64_t last_click[4] = {-1000, -1000, -1000, -1000};
    for (const auto& click : r.recorded_clicks) {
        const int det = click.basis * 2 + click.detector_bit;
        const auto slot = static_cast<std::int64_t>(click.slot);
        CHECK(slot - last_click[det] > 12);
        last_click[det] = slot;
    }
}

TEST_CASE("sequence-length histogram follows the analytic distribution") {
    const double p = 0.0125;
    const int k = 30;
    const SimResult r = sim::run(
        sim::make_config(8.0 * p, k, 0.0, 4'000'000, 31337, SiftMode::secure));
    const SeqLenDist expect = model::seq_len_dist(p, k, 6);
    REQUIRE(r.seq_len_total > 50'000);
    const double n = static_cast<double>(r.seq_len_total);
    for (int len = 1; len <= 4; ++len) {
        const double expected = expect.t[len - 1];
        const double observed =
            static_cast<double>(r.seq_len_counts[len - 1]) / n;
        const double sigma = std::sqrt(expected * (1.0 - expected) / n);
        CHECK(std::fabs(observed - expected) <= 3.0 * sigma);
    }
}

TEST_CASE("photon arrivals find the basis ready at rate p00") {
    const double p = 0.0125;
    const int k = 30;
    const SimResult r = sim::run(
        sim::make_config(8.0 * p, k, 0.0, 4'000'000, 8888, SiftMode::secure));
    const double expected = model::p00(p, k);
    const double n = static_cast<double>(r.signal_arrivals);
    const double observed =
        static_cast<double>(r.signal_arrivals_basis_ready) / n;
    const double sigma = std::sqrt(expected * (1.0 - expected) / n);
    CHECK(std::fabs(observed - expected) <= 3.0 * sigma);
}

TEST_CASE("secure sifted rate tracks the analytic rate") {
    const double p = 0.0125;
    for (int k : {50, 100}) {
        const SimResult r = sim::run(sim::make_config(8.0 * p, k, 0.0,
                                                      20'000'000, 60601 + k,
                                                      SiftMode::secure));
        const double expected = model::sbr_norm(p, k);
        CHECK(std::fabs(r.sifted_per_slot - expected) / expected <= 0.02);
    }
}

TEST_CASE("secure sifted bits are uncorrelated") {
    const SimResult r = sim::run(
        sim::make_config(0.1, 50, 0.0, 8'000'000, 24, SiftMode::secure));
    REQUIRE(r.bit_pairs > 100'000);
    const double sigma = 0.5 / std::sqrt(static_cast<double>(r.bit_pairs));
    CHECK(std::fabs(r.p_trans - 0.5) <= 4.0 * sigma);
}

TEST_CASE("recorded bit string reproduces the streaming transition count") {
    SimConfig cfg = sim::make_config(0.1, 20, 0.0, 500'000, 77, SiftMode::naive);
    cfg.record_bits = true;
    const SimResult r = sim::run(cfg);
    REQUIRE(r.sifted_bits.size() == r.sifted);
    CHECK(analysis::transition_probability(r.sifted_bits) ==
          doctest::Approx(r.p_trans).epsilon(1e-15));
}

TEST_CASE("self-disabling receiver caps at one bit per dead time") {
    const int k = 50;
    const SimResult r = sim::run(
        sim::make_config(1.0, k, 0.0, 4'000'000, 11, SiftMode::self_disabling));
    CHECK(r.sifted_per_slot <= 1.0 / k);
    CHECK(r.sifted_per_slot >= 0.8 / k);
    CHECK(r.sequences == r.clicks);
    CHECK(r.seq_len_counts[0] == r.seq_len_total);
    const double sigma = 0.5 / std::sqrt(static_cast<double>(r.bit_pairs));
    CHECK(std::fabs(r.p_trans - 0.5) <= 4.0 * sigma);
}

TEST_CASE("a silent link produces nothing") {
    const SimResult r =
        sim::run(sim::make_config(0.0, 8, 0.0, 200'000, 1, SiftMode::secure));
    CHECK(r.clicks == 0);
    CHECK(r.sifted == 0);
    CHECK(r.sequences == 0);
    CHECK(std::isnan(r.p_trans));
}

TEST_CASE("naive sifting discards multi-click slots") {
    // Signal off, heavy noise, no dead time: the four detectors fire
    // independently at eps each slot, so the slot click count is binomial.
    const double eps = 0.2;
    const std::uint64_t slots = 2'000'000;
    const SimResult r =
        sim::run(sim::make_config(0.0, 0, eps, slots, 515, SiftMode::naive));

    const double p_none = std::pow(1.0 - eps, 4);
    const double p_single = 4.0 * eps * std::pow(1.0 - eps, 3);
    const double p_multi = 1.0 - p_none - p_single;

    const double n = static_cast<double>(slots);
    const double multi_rate = static_cast<double>(r.discarded_double) / n;
    double sigma = std::sqrt(p_multi * (1.0 - p_multi) / n);
    CHECK(std::fabs(multi_rate - p_multi) <= 5.0 * sigma);

    // Only the matched half of single-click slots yields a bit.
    const double sift_expect = 0.5 * p_single;
    sigma = std::sqrt(sift_expect * (1.0 - sift_expect) / n);
    CHECK(std::fabs(r.sifted_per_slot - sift_expect) <= 5.0 * sigma);
}

TEST_CASE("noise clicks sift with half of them wrong") {
    // Signal off: every sifted bit is a noise click against a fresh Alice bit.
    const SimResult r = sim::run(
        sim::make_config(0.0, 10, 2e-3, 3'000'000, 4242, SiftMode::naive));
    REQUIRE(r.sifted > 1000);
    const double frac =
        static_cast<double>(r.sifted_bit_errors) / static_cast<double>(r.sifted);
    const double sigma = 0.5 / std::sqrt(static_cast<double>(r.sifted));
    CHECK(std::fabs(frac - 0.5) <= 4.0 * sigma);
    CHECK(r.clicks > 0);
}

TEST_CASE("run_sweep is deterministic, ordered, and annotates failures") {
    std::vector<SimConfig> cells;
    for (int k : {0, 10, 25}) {
        cells.push_back(sim::make_config(0.1, k, 0.0, 150'000, 0, SiftMode::secure));
    }
    const auto once = sim::run_sweep(cells, 99, 1);
    const auto again = sim::run_sweep(cells, 99, 3);
    REQUIRE(once.ok());
    REQUIRE(again.ok());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        CHECK(same_result(*once.results[i], *again.results[i]));
    }

    // A one-cell sweep equals a direct run at the derived seed.
    SimConfig solo = cells[1];
    solo.seed = derive_cell_seed(99, 1);
    CHECK(same_result(*once.results[1], sim::run(solo)));

    // Invalid cells are reported by index; the rest still complete.
    std::vector<SimConfig> mixed = cells;
    mixed[1].n_slots = 0;
    const auto outcome = sim::run_sweep(mixed, 99, 2);
    CHECK_FALSE(outcome.ok());
    REQUIRE(outcome.errors.size() == 1);
    CHECK(outcome.errors[0].first == 1);
    CHECK(outcome.results[0].has_value());
    CHECK(outcome.results[2].has_value());
    CHECK(same_result(*outcome.results[2], *once.results[2]));

    CHECK_THROWS_AS(sim::run_sweep({}, 1, 1), std::invalid_argument);
}
