#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qkd/types.hpp"

namespace qkd::sim {

enum class SiftMode { naive, secure, self_disabling };

const char* sift_mode_name(SiftMode mode);
std::optional<SiftMode> sift_mode_from_name(const std::string& name);

struct SimConfig {
    LinkParams params;          // p = loss / 8
    double loss = 0.0;          // end-to-end detection probability L
    std::uint64_t n_slots = 0;
    std::uint64_t seed = 0;
    SiftMode mode = SiftMode::secure;
    bool record_bits = false;
    std::uint32_t max_recorded_clicks = 0;  // debug/test aid

    void validate() const;
};

SimConfig make_config(double loss, int k, double eps, std::uint64_t n_slots,
                      std::uint64_t seed, SiftMode mode);

struct ClickEvent {
    enum class Origin : std::uint8_t { signal, noise };

    std::uint64_t slot = 0;
    std::uint8_t basis = 0;         // 0 = Z, 1 = X
    std::uint8_t detector_bit = 0;  // bit value the struck detector encodes
    bool matched = false;           // Alice's basis equals the click basis
    Origin origin = Origin::signal;
};

// Sequence-length histogram capacity; the last bucket collects everything
// longer.
inline constexpr int kSeqLenBuckets = 16;

struct SimResult {
    std::uint64_t clicks = 0;
    std::uint64_t sequences = 0;
    std::uint64_t sifted = 0;
    double sifted_per_slot = 0.0;
    double p_trans = 0.0;  // NaN when fewer than two sifted bits
    std::uint64_t discarded_double = 0;  // slots with more than one click
    std::uint64_t sifted_bit_errors = 0; // sifted bit != Alice's slot bit

    // Empirical counters behind the steady-state checks: photon arrivals at
    // the receiver and those finding both detectors of the target basis alive.
    std::uint64_t signal_arrivals = 0;
    std::uint64_t signal_arrivals_basis_ready = 0;

    // Completed detection sequences by click count (index i = i+1 clicks).
    std::array<std::uint64_t, kSeqLenBuckets> seq_len_counts{};
    std::uint64_t seq_len_total = 0;

    std::uint64_t bit_transitions = 0;
    std::uint64_t bit_pairs = 0;

    // FNV-1a over (slot, detector, origin) of every click; identical across
    // sifting modes that share the click physics.
    std::uint64_t click_stream_hash = 0;

    std::vector<std::uint8_t> sifted_bits;     // filled when record_bits
    std::vector<ClickEvent> recorded_clicks;   // first max_recorded_clicks

    std::string generator = "xoshiro256**";
    std::uint64_t seed = 0;
    std::uint64_t n_slots = 0;
};

// Runs one deterministic slot-based BB84 simulation.  Identical configs
// (including the seed) produce bit-identical results; naive and secure runs
// with the same seed observe the identical click stream.
SimResult run(const SimConfig& config);

struct SweepOutcome {
    std::vector<std::optional<SimResult>> results;          // by cell index
    std::vector<std::pair<std::size_t, std::string>> errors;  // (cell, message)

    bool ok() const { return errors.empty(); }
};

// Runs one simulation per cell, each seeded with
// derive_cell_seed(master_seed, cell_index).  Cells may execute concurrently
// (up to `jobs` workers); results are stored by cell index regardless of
// completion order, and per-cell failures are reported with their index.
SweepOutcome run_sweep(const std::vector<SimConfig>& cells,
                       std::uint64_t master_seed, unsigned jobs);

}  // namespace qkd::sim
