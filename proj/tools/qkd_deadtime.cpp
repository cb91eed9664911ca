// Command-line interface: single-point model queries, Monte-Carlo runs,
// figure-reproduction sweeps, optimum finding, and exact transition-
// probability asymptotics.  Normalized (p, k, eps) is the internal currency;
// dB, nanoseconds and hertz exist only at this boundary.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "qkd/bitfile.hpp"
#include "qkd/rate_model.hpp"
#include "qkd/rng.hpp"
#include "qkd/simulator.hpp"
#include "qkd/sweep.hpp"
#include "qkd/transition_stats.hpp"
#include "qkd/types.hpp"

namespace {

using qkd::sweep::format_double;

// Parses "v", "v1,v2,..." or "start:stop:step" (inclusive) into a list.
std::vector<double> parse_value_list(const std::string& text) {
    std::vector<double> values;
    auto parse_one = [](const std::string& s) {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) {
            throw CLI::ValidationError("cannot parse number: " + s);
        }
        return v;
    };

    // A range has two ':' separators that are not part of a number.
    std::vector<std::string> colon_parts;
    std::string cur;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == ':') {
            colon_parts.push_back(cur);
            cur.clear();
        } else {
            cur += text[i];
        }
    }
    colon_parts.push_back(cur);

    if (colon_parts.size() == 3) {
        const double start = parse_one(colon_parts[0]);
        const double stop = parse_one(colon_parts[1]);
        const double step = parse_one(colon_parts[2]);
        if (step == 0.0 || (stop - start) * step < 0.0) {
            throw CLI::ValidationError("bad range: " + text);
        }
        const double dir = step > 0.0 ? 1.0 : -1.0;
        for (double v = start; dir * (v - stop) <= 1e-9 * std::fabs(step);
             v += step) {
            values.push_back(v);
        }
        return values;
    }
    if (colon_parts.size() != 1) {
        throw CLI::ValidationError("bad list/range: " + text);
    }

    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = text.find(',', pos);
        const std::string item =
            text.substr(pos, comma == std::string::npos ? comma : comma - pos);
        if (item.empty()) throw CLI::ValidationError("bad list: " + text);
        values.push_back(parse_one(item));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return values;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    for (double v : parse_value_list(text)) {
        out.push_back(static_cast<int>(std::llround(v)));
    }
    return out;
}

double loss_from_db(double db) {
    if (db > 0.0) {
        throw CLI::ValidationError("loss in dB must be <= 0");
    }
    return qkd::db_to_linear(db);
}

void note_self_disabling_rate_budget() {
    std::fprintf(stderr,
                 "note: a self-disabling receiver resolves each transmission "
                 "in two time bins, so its timing-resolution-limited "
                 "transmission rate is half that of the four-detector "
                 "receiver; this derating is not part of the simulated "
                 "slot dynamics\n");
}

// k = round(tau * rho); the applied rounding is reported on stderr.
int k_from_physical(double dead_time_ns, double rate_hz) {
    const double exact = dead_time_ns * 1e-9 * rate_hz;
    const int k = static_cast<int>(std::llround(exact));
    std::fprintf(stderr, "note: k = round(dead_time * rate) = %d (dead_time * rate = %s)\n",
                 k, format_double(exact).c_str());
    return k;
}

struct PointArgs {
    std::optional<double> loss_db;
    std::optional<double> loss_linear;
    std::optional<int> k;
    std::optional<double> dead_time_ns;
    std::optional<double> rate_hz;
    double eps = 0.0;

    void add_options(CLI::App* cmd) {
        cmd->add_option("--loss-db", loss_db, "End-to-end loss in dB (<= 0)");
        cmd->add_option("--loss", loss_linear, "End-to-end loss, linear (0, 1]");
        cmd->add_option("--k", k, "Dead time in transmission slots");
        cmd->add_option("--dead-time-ns", dead_time_ns, "Detector dead time tau in ns");
        cmd->add_option("--rate-hz", rate_hz, "Transmission rate rho_TX in Hz");
        cmd->add_option("--noise", eps, "Per-detector per-slot noise probability")
            ->check(CLI::Range(0.0, 1.0));
    }

    double loss() const {
        if (loss_db && loss_linear) {
            throw CLI::ValidationError("give either --loss-db or --loss, not both");
        }
        if (loss_db) return loss_from_db(*loss_db);
        if (loss_linear) return *loss_linear;
        throw CLI::ValidationError("missing --loss-db or --loss");
    }

    int slots_k() const {
        if (k && (dead_time_ns || rate_hz)) {
            throw CLI::ValidationError(
                "give either --k or --dead-time-ns with --rate-hz, not both");
        }
        if (k) return *k;
        if (dead_time_ns && rate_hz) return k_from_physical(*dead_time_ns, *rate_hz);
        throw CLI::ValidationError("missing --k (or --dead-time-ns with --rate-hz)");
    }
};

void write_text(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << body;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

// Plain `key = value` config file; '#' starts a comment.  Keys are the long
// option names without the leading dashes.
std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("cannot read config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const std::size_t eq = body.find('=');
        if (eq == std::string::npos) {
            throw CLI::ValidationError("config line " + std::to_string(lineno) +
                                       " is not `key = value`: " + body);
        }
        kv[trim(body.substr(0, eq))] = trim(body.substr(eq + 1));
    }
    return kv;
}

// ---------------------------------------------------------------- model ----

int cmd_model(const PointArgs& args) {
    const double loss = args.loss();
    const int k = args.slots_k();
    const double p = loss / 8.0;
    qkd::LinkParams params{p, k, args.eps};
    params.validate();

    const qkd::model::RateModelPoint pt = qkd::model::eval_point(p, k);
    const qkd::SeqLenDist dist = qkd::model::seq_len_dist(p, k, 6);

    std::string out;
    out += "loss_linear = " + format_double(loss) + "\n";
    out += "loss_db = " + format_double(qkd::linear_to_db(loss)) + "\n";
    out += "p = " + format_double(p) + "\n";
    out += "k = " + std::to_string(k) + "\n";
    out += "eps = " + format_double(args.eps) + "\n";
    out += "p00 = " + format_double(pt.p00) + "\n";
    if (args.eps > 0.0) {
        out += "p00_noisy = " + format_double(qkd::model::p00_noisy(params)) + "\n";
    }
    for (int n = 1; n <= 6; ++n) {
        out += "t" + std::to_string(n) + " = " + format_double(dist.t[n - 1]) + "\n";
    }
    out += "seq_residual = " + format_double(dist.residual) + "\n";
    out += "s = " + format_double(pt.s) + "\n";
    out += "sbr_norm = " + format_double(pt.sbr_norm) + "\n";
    if (args.dead_time_ns) {
        const double tau_s = *args.dead_time_ns * 1e-9;
        const double rate_hz = static_cast<double>(k) / tau_s;
        out += "rate_hz = " + format_double(rate_hz) + "\n";
        out += "sbr_per_s = " + format_double(pt.sbr_norm * rate_hz) + "\n";
    }
    std::fputs(out.c_str(), stdout);
    return 0;
}

// ------------------------------------------------------------- simulate ----

int cmd_simulate(const PointArgs& args, const std::string& mode_name,
                 double slots, std::uint64_t seed, const std::string& emit_bits,
                 const std::string& out_path) {
    const auto mode = qkd::sim::sift_mode_from_name(mode_name);
    if (!mode) throw CLI::ValidationError("unknown mode: " + mode_name);
    if (!(slots >= 1.0)) throw CLI::ValidationError("--slots must be >= 1");
    if (*mode == qkd::sim::SiftMode::self_disabling) {
        note_self_disabling_rate_budget();
    }

    qkd::sim::SimConfig cfg = qkd::sim::make_config(
        args.loss(), args.slots_k(), args.eps,
        static_cast<std::uint64_t>(slots), seed, *mode);
    cfg.record_bits = !emit_bits.empty();

    const qkd::sim::SimResult res = qkd::sim::run(cfg);

    if (!emit_bits.empty()) {
        qkd::write_packed_bits(emit_bits, res.sifted_bits);
        std::fprintf(stderr, "note: wrote %zu sifted bits to %s\n",
                     res.sifted_bits.size(), emit_bits.c_str());
    }

    qkd::sweep::SweepSpec spec;
    spec.eps = args.eps;
    spec.mode = *mode;
    qkd::sweep::SweepRow row = qkd::sweep::make_row(spec, cfg.loss, cfg.params.k, &res);

    std::string body = qkd::sweep::csv_header(false) + "\n" +
                       qkd::sweep::csv_line(row, false) + "\n";
    if (out_path.empty()) {
        std::fputs(body.c_str(), stdout);
    } else {
        write_text(out_path, body);
    }
    return 0;
}

// ---------------------------------------------------------------- sweep ----

struct SweepArgs {
    std::string preset;
    std::string loss_db_list;
    std::string loss_list;
    std::string k_list;
    std::string dead_time_list;
    std::string rate_list;
    std::string mode_name;
    double eps = 0.0;
    double fixed_slots = 0.0;
    double target_bits = 0.0;
    double min_slots = 0.0;
    std::uint64_t master_seed = 1;
    unsigned jobs = 0;
    bool t_columns = false;
    std::string out_path;
    std::string config_path;
};

int cmd_sweep(SweepArgs args, const CLI::App* cmd) {
    // Config-file values fill in options the command line left unset.
    std::map<std::string, std::string> file_kv;
    if (!args.config_path.empty()) file_kv = read_config_file(args.config_path);

    const char* known_keys[] = {"preset",    "loss-db",    "loss",
                                "k",         "dead-time-ns", "rate-hz",
                                "mode",      "noise",      "slots",
                                "target-bits", "min-slots", "seed",
                                "jobs",      "t-columns",  "out"};
    for (const auto& [key, value] : file_kv) {
        bool known = false;
        for (const char* k : known_keys) known = known || key == k;
        if (!known) throw CLI::ValidationError("unknown config key: " + key);
    }

    // True when the option was given on the command line or in the file; the
    // command line wins, so the file only fills empty slots.
    auto given_str = [&](const char* flag, const char* key, std::string& slot) {
        if (cmd->count(flag)) return true;
        const auto it = file_kv.find(key);
        if (it == file_kv.end()) return false;
        slot = it->second;
        return true;
    };
    auto given_num = [&](const char* flag, const char* key, auto& slot) {
        if (cmd->count(flag)) return true;
        const auto it = file_kv.find(key);
        if (it == file_kv.end()) return false;
        slot = static_cast<std::remove_reference_t<decltype(slot)>>(
            std::stod(it->second));
        return true;
    };

    qkd::sweep::SweepSpec spec;
    if (given_str("--preset", "preset", args.preset)) {
        spec = qkd::sweep::preset(args.preset);
    }

    const bool have_loss_db = given_str("--loss-db", "loss-db", args.loss_db_list);
    const bool have_loss = given_str("--loss", "loss", args.loss_list);
    if (have_loss_db && have_loss) {
        throw CLI::ValidationError("give either --loss-db or --loss, not both");
    }
    if (have_loss_db) {
        spec.losses_linear.clear();
        for (double db : parse_value_list(args.loss_db_list)) {
            spec.losses_linear.push_back(loss_from_db(db));
        }
    } else if (have_loss) {
        spec.losses_linear = parse_value_list(args.loss_list);
    }

    const bool k_direct = given_str("--k", "k", args.k_list);
    const bool have_tau = given_str("--dead-time-ns", "dead-time-ns", args.dead_time_list);
    const bool have_rate = given_str("--rate-hz", "rate-hz", args.rate_list);
    if (k_direct && (have_tau || have_rate)) {
        throw CLI::ValidationError(
            "give either --k or --dead-time-ns with --rate-hz, not both");
    }
    if (k_direct) {
        spec.ks = parse_int_list(args.k_list);
    } else if (have_tau || have_rate) {
        if (!have_tau || !have_rate) {
            throw CLI::ValidationError("--dead-time-ns and --rate-hz go together");
        }
        spec.ks.clear();
        for (double tau : parse_value_list(args.dead_time_list)) {
            for (double rate : parse_value_list(args.rate_list)) {
                spec.ks.push_back(k_from_physical(tau, rate));
            }
        }
    }

    if (given_str("--mode", "mode", args.mode_name)) {
        if (args.mode_name == "model") {
            spec.mode.reset();
        } else {
            const auto mode = qkd::sim::sift_mode_from_name(args.mode_name);
            if (!mode) throw CLI::ValidationError("unknown mode: " + args.mode_name);
            spec.mode = mode;
        }
    }
    if (given_num("--noise", "noise", args.eps)) spec.eps = args.eps;
    if (given_num("--slots", "slots", args.fixed_slots)) {
        spec.fixed_slots = static_cast<std::uint64_t>(args.fixed_slots);
    }
    if (given_num("--target-bits", "target-bits", args.target_bits)) {
        spec.target_sifted_bits = static_cast<std::uint64_t>(args.target_bits);
    }
    if (given_num("--min-slots", "min-slots", args.min_slots)) {
        spec.min_slots = static_cast<std::uint64_t>(args.min_slots);
    }
    if (given_num("--seed", "seed", args.master_seed)) {
        spec.master_seed = args.master_seed;
    }
    given_num("--jobs", "jobs", args.jobs);
    if (!args.t_columns) {
        std::string flag_text;
        if (given_str("--t-columns", "t-columns", flag_text) && !flag_text.empty()) {
            args.t_columns = flag_text == "1" || flag_text == "true";
        }
    }
    if (args.t_columns) spec.with_t_columns = true;
    given_str("--out", "out", args.out_path);

    if (spec.losses_linear.empty() || spec.ks.empty()) {
        throw CLI::ValidationError("sweep: empty grid (need losses and k values)");
    }
    for (double loss : spec.losses_linear) {
        qkd::LinkParams{loss / 8.0, 0, spec.eps}.validate();
    }
    if (spec.mode == qkd::sim::SiftMode::self_disabling) {
        note_self_disabling_rate_budget();
    }

    // Run MC cells (when a sifting mode is set), then assemble rows in cell
    // order: loss-major, k-minor.
    qkd::sim::SweepOutcome outcome;
    const bool with_mc = spec.mode.has_value();
    if (with_mc) {
        const auto cells = qkd::sweep::expand_cells(spec);
        const unsigned jobs =
            args.jobs > 0 ? args.jobs
                          : std::max(1u, std::thread::hardware_concurrency());
        outcome = qkd::sim::run_sweep(cells, spec.master_seed, jobs);
    }

    std::string body = qkd::sweep::csv_header(spec.with_t_columns) + "\n";
    std::size_t cell = 0;
    for (double loss : spec.losses_linear) {
        for (int k : spec.ks) {
            const qkd::sim::SimResult* mc = nullptr;
            if (with_mc && outcome.results[cell].has_value()) {
                mc = &*outcome.results[cell];
            }
            body += qkd::sweep::csv_line(
                qkd::sweep::make_row(spec, loss, k, mc), spec.with_t_columns);
            body += '\n';
            ++cell;
        }
    }

    if (args.out_path.empty()) {
        std::fputs(body.c_str(), stdout);
    } else {
        write_text(args.out_path, body);
    }

    if (with_mc && !outcome.ok()) {
        for (const auto& [index, message] : outcome.errors) {
            std::fprintf(stderr, "error: %s\n", message.c_str());
        }
        return 2;
    }
    return 0;
}

// -------------------------------------------------------------- optimum ----

int cmd_optimum(const std::string& loss_db_list, const std::string& loss_list,
                int kmax_override, bool fit, std::optional<double> dead_time_ns,
                const CLI::App* cmd) {
    std::vector<double> losses;
    if (cmd->count("--loss-db")) {
        for (double db : parse_value_list(loss_db_list)) {
            losses.push_back(loss_from_db(db));
        }
    }
    if (cmd->count("--loss")) {
        if (!losses.empty()) {
            throw CLI::ValidationError("give either --loss-db or --loss, not both");
        }
        for (double v : parse_value_list(loss_list)) losses.push_back(v);
    }
    if (losses.empty()) throw CLI::ValidationError("missing --loss-db or --loss");

    std::vector<qkd::analysis::OptimumSample> samples;
    std::string out;
    for (double loss : losses) {
        const double p = loss / 8.0;
        qkd::LinkParams{p, 0, 0.0}.validate();
        // Default scan bound: a few times the expected optimum scale 1/(8p).
        const int kmax = kmax_override > 0
                             ? kmax_override
                             : std::max(64, static_cast<int>(std::ceil(24.0 / (8.0 * p))));
        const qkd::model::OptimumResult opt = qkd::model::find_optimum(p, kmax);
        samples.push_back({p, opt.k_opt, opt.sbr_norm_opt});

        out += "loss_db=" + format_double(qkd::linear_to_db(loss));
        out += " L=" + format_double(loss);
        out += " p=" + format_double(p);
        out += " k_opt=" + std::to_string(opt.k_opt);
        out += " sbr_norm_opt=" + format_double(opt.sbr_norm_opt);
        out += " bits_per_dead_time=" + format_double(opt.bits_per_dead_time);
        if (dead_time_ns) {
            const double tau_s = *dead_time_ns * 1e-9;
            out += " rho_max_hz=" + format_double(opt.k_opt / tau_s);
            out += " sbr_max_per_s=" +
                   format_double(opt.sbr_norm_opt * opt.k_opt / tau_s);
        }
        out += "\n";
    }

    if (fit) {
        const qkd::analysis::FitResult f = qkd::analysis::fit_constants(samples);
        char line[256];
        std::snprintf(line, sizeof(line),
                      "fit: c_sbr=%.6f (reference 1.433, dev %+.3f%%)  "
                      "c_rho=%.6f (reference 5.92, dev %+.3f%%)\n",
                      f.c_sbr, 100.0 * (f.c_sbr - 1.433) / 1.433, f.c_rho,
                      100.0 * (f.c_rho - 5.92) / 5.92);
        out += line;
        out += "fit: rel deviations per point:";
        for (std::size_t i = 0; i < samples.size(); ++i) {
            char cell[64];
            std::snprintf(cell, sizeof(cell), " (%+.3f%%, %+.3f%%)",
                          100.0 * f.rel_dev_sbr[i], 100.0 * f.rel_dev_rho[i]);
            out += cell;
        }
        out += "\n";
    }
    std::fputs(out.c_str(), stdout);
    return 0;
}

// --------------------------------------------------------------- ptrans ----

int cmd_ptrans(const std::string& order_text) {
    std::string out;
    if (!order_text.empty()) {
        qkd::analysis::DetectorOrder order;
        try {
            order = qkd::analysis::DetectorOrder::parse(order_text);
        } catch (const std::invalid_argument& e) {
            throw CLI::ValidationError(e.what());
        }
        const qkd::analysis::Rational r = qkd::analysis::asymptotic_ptrans(order);
        char line[96];
        std::snprintf(line, sizeof(line), "%s (%.4g)\n", r.str().c_str(), r.value());
        out += line;
    } else {
        for (const auto& order : qkd::analysis::all_detector_orders()) {
            const qkd::analysis::Rational r = qkd::analysis::asymptotic_ptrans(order);
            char line[96];
            std::snprintf(line, sizeof(line), "%s  %s (%.4g)\n",
                          order.str().c_str(), r.str().c_str(), r.value());
            out += line;
        }
        const qkd::analysis::Rational avg = qkd::analysis::asymptotic_ptrans_avg();
        char line[96];
        std::snprintf(line, sizeof(line), "average  %s (%.4g)\n", avg.str().c_str(),
                      avg.value());
        out += line;
    }
    std::fputs(out.c_str(), stdout);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"BB84 dead-time rate model and Monte-Carlo simulator"};
    app.require_subcommand(1);

    // model
    auto* model_cmd = app.add_subcommand(
        "model", "Closed-form quantities: p00, T_1..T_6, S, sbr_norm");
    PointArgs model_args;
    model_args.add_options(model_cmd);

    // simulate
    auto* sim_cmd =
        app.add_subcommand("simulate", "One Monte-Carlo run, one CSV row");
    PointArgs sim_args;
    sim_args.add_options(sim_cmd);
    std::string sim_mode = "secure";
    double sim_slots = 1e7;
    std::uint64_t sim_seed = 1;
    std::string sim_emit_bits, sim_out;
    sim_cmd->add_option("--mode", sim_mode,
                        "Sifting mode: naive | secure | self_disabling");
    sim_cmd->add_option("--slots", sim_slots, "Number of transmission slots");
    sim_cmd->add_option("--seed", sim_seed, "64-bit RNG seed");
    sim_cmd->add_option("--emit-bits", sim_emit_bits,
                        "Write the sifted bits to this file (packed, 16-byte header)");
    sim_cmd->add_option("--out", sim_out, "Write the CSV to this file");

    // sweep
    auto* sweep_cmd = app.add_subcommand(
        "sweep", "Grid of model/MC cells over (loss, k), CSV output");
    SweepArgs sweep_args;
    sweep_cmd->add_option("--preset", sweep_args.preset,
                          "Named grid: fig1 | fig3 | fig4 | fig5");
    sweep_cmd->add_option("--loss-db", sweep_args.loss_db_list,
                          "Loss list/range in dB, e.g. -10,-13 or -30:-10:2");
    sweep_cmd->add_option("--loss", sweep_args.loss_list, "Linear loss list/range");
    sweep_cmd->add_option("--k", sweep_args.k_list, "k list/range, e.g. 1,10,100");
    sweep_cmd->add_option("--dead-time-ns", sweep_args.dead_time_list,
                          "Dead time list (ns); pairs with --rate-hz");
    sweep_cmd->add_option("--rate-hz", sweep_args.rate_list,
                          "Transmission rate list (Hz); pairs with --dead-time-ns");
    sweep_cmd->add_option("--mode", sweep_args.mode_name,
                          "model | naive | secure | self_disabling");
    sweep_cmd->add_option("--noise", sweep_args.eps,
                          "Per-detector per-slot noise probability");
    sweep_cmd->add_option("--slots", sweep_args.fixed_slots,
                          "Fixed slots per cell (overrides auto sizing)");
    sweep_cmd->add_option("--target-bits", sweep_args.target_bits,
                          "Sifted bits per cell targeted by auto sizing");
    sweep_cmd->add_option("--min-slots", sweep_args.min_slots,
                          "Lower bound for auto-sized slots");
    sweep_cmd->add_option("--seed", sweep_args.master_seed,
                          "Master seed; cell seeds derive from (seed, index)");
    sweep_cmd->add_option("--jobs", sweep_args.jobs,
                          "Concurrent cells (default: hardware threads)");
    sweep_cmd->add_flag("--t-columns", sweep_args.t_columns,
                        "Append t1..t6 model columns");
    sweep_cmd->add_option("--out", sweep_args.out_path, "Write the CSV to this file");
    sweep_cmd->add_option("--config", sweep_args.config_path,
                          "Config file of key = value lines; flags override");

    // optimum
    auto* opt_cmd = app.add_subcommand(
        "optimum", "Transmission-rate optimum per loss, optional constant refit");
    std::string opt_loss_db, opt_loss;
    int opt_kmax = 0;
    bool opt_fit = false;
    std::optional<double> opt_tau;
    opt_cmd->add_option("--loss-db", opt_loss_db, "Loss list/range in dB");
    opt_cmd->add_option("--loss", opt_loss, "Linear loss list/range");
    opt_cmd->add_option("--kmax", opt_kmax, "Scan bound override");
    opt_cmd->add_flag("--fit", opt_fit, "Refit the rate-optimum constants");
    opt_cmd->add_option("--dead-time-ns", opt_tau, "Dead time for physical units");

    // ptrans
    auto* pt_cmd = app.add_subcommand(
        "ptrans", "Exact high-rate transition-probability asymptotics");
    std::string pt_order;
    pt_cmd->add_option("--order", pt_order, "Detector cycle, e.g. 1-3-4-2");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (model_cmd->parsed()) return cmd_model(model_args);
        if (sim_cmd->parsed()) {
            return cmd_simulate(sim_args, sim_mode, sim_slots, sim_seed,
                                sim_emit_bits, sim_out);
        }
        if (sweep_cmd->parsed()) return cmd_sweep(sweep_args, sweep_cmd);
        if (opt_cmd->parsed()) {
            return cmd_optimum(opt_loss_db, opt_loss, opt_kmax, opt_fit, opt_tau,
                               opt_cmd);
        }
        if (pt_cmd->parsed()) return cmd_ptrans(pt_order);
    } catch (const CLI::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
