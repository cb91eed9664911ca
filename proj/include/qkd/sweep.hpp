#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qkd/simulator.hpp"
#include "qkd/types.hpp"

namespace qkd::sweep {

// One CSV record of a sweep.  Numeric cells are printed as the shortest
// decimal that round-trips (std::to_chars); absent optional cells stay empty.
struct SweepRow {
    double loss_linear = 0.0;
    double loss_db = 0.0;
    int k = 0;
    double p = 0.0;
    double eps = 0.0;
    std::string mode = "model";

    double p00_model = 1.0;
    double s_model = 0.5;
    double sbr_norm_model = 0.0;

    std::optional<double> sbr_norm_mc;
    std::optional<double> mc_stderr;
    std::optional<double> ptrans_mc;
    std::optional<std::uint64_t> sifted_count;
    std::optional<std::uint64_t> n_slots;
    std::optional<std::uint64_t> seed;

    std::optional<std::array<double, 6>> t_model;
};

std::string format_double(double value);
std::string csv_header(bool with_t_columns);
std::string csv_line(const SweepRow& row, bool with_t_columns);

// Grid of simulation/model cells: the cell index runs loss-major, k-minor.
struct SweepSpec {
    std::vector<double> losses_linear;
    std::vector<int> ks;
    double eps = 0.0;
    // Sifting mode for Monte-Carlo cells; model-only sweeps leave this empty.
    std::optional<sim::SiftMode> mode;
    std::uint64_t master_seed = 1;
    bool with_t_columns = false;

    // Slot sizing for MC cells: enough slots for target_sifted_bits at the
    // model rate estimate, never below min_slots nor above max_slots, unless
    // fixed_slots pins the count directly.
    std::uint64_t fixed_slots = 0;
    std::uint64_t min_slots = 10'000'000;
    std::uint64_t max_slots = 4'000'000'000;
    std::uint64_t target_sifted_bits = 200'000;

    std::size_t cell_count() const { return losses_linear.size() * ks.size(); }
};

// Log-spaced k grid between k_lo and k_hi, rounded to integers and
// deduplicated; values below 1 round to 0 or 1.
std::vector<int> log_k_grid(double k_lo, double k_hi, int points);

// Model-estimated sifted rate used to size MC cells.
double sift_rate_estimate(sim::SiftMode mode, double p, int k);

// Slots for one cell under the sizing policy above.
std::uint64_t auto_slots(const SweepSpec& spec, double p, int k);

// Named grids reproducing the figure data sets.
//   fig1: naive-mode p_trans curves, L in {-10, -20} dB, k from 0.1 to 1e3.
//   fig3: model p00 roll-off, L in {-10, -13, -20} dB, k from 0.1 to 1e4.
//   fig4: model sequence-length terms at L = -20 dB (adds t1..t6 columns).
//   fig5: secure-mode rate vs model, L in {-10, -13, -20} dB, 12 log-spaced
//         k in [1, 1e3], at least 1e7 slots per cell.
SweepSpec preset(const std::string& name);

// Expands the grid into simulator configs, cell index = loss-major order.
std::vector<sim::SimConfig> expand_cells(const SweepSpec& spec);

// Builds the CSV row for one cell (model columns always; MC columns when a
// result is supplied).
SweepRow make_row(const SweepSpec& spec, double loss_linear, int k,
                  const sim::SimResult* mc);

}  // namespace qkd::sweep
