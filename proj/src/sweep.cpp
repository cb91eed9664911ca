#include "qkd/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "qkd/rate_model.hpp"

namespace qkd::sweep {

std::string format_double(double value) {
    std::array<char, 32> buf;
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), res.ptr);
}

namespace {

const char* kBaseHeader =
    "L_linear,loss_db,k,p,eps,mode,p00_model,s_model,sbr_norm_model,"
    "sbr_norm_mc,mc_stderr,ptrans_mc,sifted_count,n_slots,seed";

void append_opt(std::string& out, const std::optional<double>& v) {
    out += ',';
    if (v) out += format_double(*v);
}

void append_opt(std::string& out, const std::optional<std::uint64_t>& v) {
    out += ',';
    if (v) out += std::to_string(*v);
}

}  // namespace

std::string csv_header(bool with_t_columns) {
    std::string header = kBaseHeader;
    if (with_t_columns) {
        for (int n = 1; n <= 6; ++n) {
            header += ",t" + std::to_string(n) + "_model";
        }
    }
    return header;
}

std::string csv_line(const SweepRow& row, bool with_t_columns) {
    std::string out;
    out += format_double(row.loss_linear);
    out += ',';
    out += format_double(row.loss_db);
    out += ',';
    out += std::to_string(row.k);
    out += ',';
    out += format_double(row.p);
    out += ',';
    out += format_double(row.eps);
    out += ',';
    out += row.mode;
    out += ',';
    out += format_double(row.p00_model);
    out += ',';
    out += format_double(row.s_model);
    out += ',';
    out += format_double(row.sbr_norm_model);
    append_opt(out, row.sbr_norm_mc);
    append_opt(out, row.mc_stderr);
    append_opt(out, row.ptrans_mc);
    append_opt(out, row.sifted_count);
    append_opt(out, row.n_slots);
    append_opt(out, row.seed);
    if (with_t_columns) {
        for (int n = 0; n < 6; ++n) {
            out += ',';
            if (row.t_model) out += format_double((*row.t_model)[n]);
        }
    }
    return out;
}

std::vector<int> log_k_grid(double k_lo, double k_hi, int points) {
    if (!(k_lo > 0.0) || !(k_hi >= k_lo) || points < 2) {
        throw std::invalid_argument("log_k_grid: bad grid parameters");
    }
    std::vector<int> ks;
    const double lo = std::log10(k_lo);
    const double hi = std::log10(k_hi);
    for (int i = 0; i < points; ++i) {
        const double x =
            std::pow(10.0, lo + (hi - lo) * i / static_cast<double>(points - 1));
        ks.push_back(static_cast<int>(std::llround(x)));
    }
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    return ks;
}

double sift_rate_estimate(sim::SiftMode mode, double p, int k) {
    switch (mode) {
        case sim::SiftMode::secure:
            return model::sbr_norm(p, k);
        case sim::SiftMode::naive:
            // Each detector cycles through k dead slots plus a mean firing
            // wait of 1/(2p); half of all clicks are basis-matched.
            return 4.0 * p / (1.0 + 2.0 * p * k);
        case sim::SiftMode::self_disabling:
            return 8.0 * p / (2.0 + 8.0 * p * (k + 1));
    }
    return 0.0;
}

std::uint64_t auto_slots(const SweepSpec& spec, double p, int k) {
    if (spec.fixed_slots > 0) return spec.fixed_slots;
    if (!spec.mode) return 0;
    const double rate = std::max(sift_rate_estimate(*spec.mode, p, k), 1e-12);
    const double wanted =
        static_cast<double>(spec.target_sifted_bits) / rate;
    const double clamped = std::min(
        static_cast<double>(spec.max_slots),
        std::max(static_cast<double>(spec.min_slots), std::ceil(wanted)));
    return static_cast<std::uint64_t>(clamped);
}

SweepSpec preset(const std::string& name) {
    SweepSpec spec;
    if (name == "fig1") {
        spec.losses_linear = {db_to_linear(-10.0), db_to_linear(-20.0)};
        spec.ks = log_k_grid(0.1, 1000.0, 25);
        spec.mode = sim::SiftMode::naive;
        spec.target_sifted_bits = 200'000;
        spec.min_slots = 1'000'000;
        return spec;
    }
    if (name == "fig3") {
        spec.losses_linear = {db_to_linear(-10.0), db_to_linear(-13.0),
                              db_to_linear(-20.0)};
        spec.ks = log_k_grid(0.1, 10'000.0, 41);
        return spec;
    }
    if (name == "fig4") {
        spec.losses_linear = {db_to_linear(-20.0)};
        spec.ks = log_k_grid(0.1, 10'000.0, 41);
        spec.with_t_columns = true;
        return spec;
    }
    if (name == "fig5") {
        spec.losses_linear = {db_to_linear(-10.0), db_to_linear(-13.0),
                              db_to_linear(-20.0)};
        spec.ks = log_k_grid(1.0, 1000.0, 12);
        spec.mode = sim::SiftMode::secure;
        spec.target_sifted_bits = 40'000;
        spec.min_slots = 10'000'000;
        return spec;
    }
    throw std::invalid_argument("unknown preset: " + name);
}

std::vector<sim::SimConfig> expand_cells(const SweepSpec& spec) {
    if (spec.losses_linear.empty() || spec.ks.empty()) {
        throw std::invalid_argument("sweep: empty grid");
    }
    if (!spec.mode) return {};
    std::vector<sim::SimConfig> cells;
    cells.reserve(spec.cell_count());
    for (double loss : spec.losses_linear) {
        for (int k : spec.ks) {
            const double p = loss / 8.0;
            cells.push_back(sim::make_config(loss, k, spec.eps,
                                             auto_slots(spec, p, k), 0,
                                             *spec.mode));
        }
    }
    return cells;
}

SweepRow make_row(const SweepSpec& spec, double loss_linear, int k,
                  const sim::SimResult* mc) {
    SweepRow row;
    row.loss_linear = loss_linear;
    row.loss_db = linear_to_db(loss_linear);
    row.k = k;
    row.p = loss_linear / 8.0;
    row.eps = spec.eps;
    row.mode = spec.mode ? sim::sift_mode_name(*spec.mode) : "model";

    const model::RateModelPoint pt = model::eval_point(row.p, k);
    row.p00_model = pt.p00;
    row.s_model = pt.s;
    row.sbr_norm_model = pt.sbr_norm;

    if (spec.with_t_columns) {
        const SeqLenDist dist = model::seq_len_dist(row.p, k, 6);
        std::array<double, 6> t{};
        for (int n = 0; n < 6; ++n) t[n] = dist.t[n];
        row.t_model = t;
    }

    if (mc != nullptr) {
        row.sbr_norm_mc = mc->sifted_per_slot;
        // Poisson standard error on the sifted count.
        row.mc_stderr = std::sqrt(static_cast<double>(mc->sifted)) /
                        static_cast<double>(mc->n_slots);
        row.ptrans_mc = mc->p_trans;
        row.sifted_count = mc->sifted;
        row.n_slots = mc->n_slots;
        row.seed = mc->seed;
    }
    return row;
}

}  // namespace qkd::sweep
