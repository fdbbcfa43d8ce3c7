#include "pascs_qkd/cli.hpp"

#include "pascs_qkd/errors.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <stdexcept>

#include <CLI11.hpp>
#include <fmt/format.h>

namespace pascs::cli {

namespace {

struct Flags {
    std::string protocol = "pascs";
    std::string convention = "standard";
    std::string mi_convention = "standard";
    std::string format = "csv";
    std::optional<std::size_t> truncation;
};

void add_common(CLI::App& sub, RunConfig& cfg, Flags& flags) {
    sub.add_option("--format", flags.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    sub.add_option("--output,-o", cfg.output_path, "Write results to this file instead of stdout");
    sub.add_option("--convention", flags.convention, "Excess-noise sign convention")
        ->check(CLI::IsMember({"standard", "paper-literal"}))
        ->capture_default_str();
    sub.add_option("--mi-convention", flags.mi_convention, "Mutual-information numerator (1+V_A or V_A)")
        ->check(CLI::IsMember({"standard", "paper-literal"}))
        ->capture_default_str();
    sub.add_option("--truncation", flags.truncation, "Fixed photon-number cutoff (disables auto-escalation)")
        ->check(CLI::Range(std::size_t{1}, std::size_t{4096}));
}

void add_channel(CLI::App& sub, RunConfig& cfg) {
    sub.add_option("--beta", cfg.beta, "Reconciliation efficiency")->capture_default_str();
    sub.add_option("--eta-det", cfg.eta_det, "Detector efficiency (folded into the loss)")->capture_default_str();
    sub.add_option("--loss", cfg.loss_db_per_km, "Fiber loss in dB/km")->capture_default_str();
}

void add_protocol(CLI::App& sub, Flags& flags) {
    sub.add_option("--protocol", flags.protocol, "Signal family")
        ->check(CLI::IsMember({"pascs", "coherent"}))
        ->capture_default_str();
}

std::optional<std::size_t> truncation_from_env() {
    const char* raw = std::getenv(kTruncationEnv);
    if (raw == nullptr || *raw == '\0') return std::nullopt;
    const std::string text = raw;
    std::size_t used = 0;
    long long value = 0;
    try {
        value = std::stoll(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || value < 1 || value > 4096) {
        throw std::invalid_argument(fmt::format("{} must be an integer in [1, 4096], got '{}'", kTruncationEnv, text));
    }
    return static_cast<std::size_t>(value);
}

void write_artifact(const RunConfig& cfg, const std::string& text, std::ostream& out) {
    if (!cfg.output_path) {
        out << text;
        return;
    }
    std::ofstream file(*cfg.output_path, std::ios::binary);
    if (!file) throw std::runtime_error(fmt::format("cannot open '{}' for writing", *cfg.output_path));
    file << text;
    if (!file) throw std::runtime_error(fmt::format("failed writing '{}'", *cfg.output_path));
}

std::string dump(const nlohmann::json& j) {
    return j.dump(2) + "\n";
}

double single_distance(const RunConfig& cfg) {
    const auto grid = DistanceGrid::parse(cfg.distance);
    if (grid.start != grid.stop) {
        throw std::invalid_argument(fmt::format("expected a single distance, got '{}'", cfg.distance));
    }
    return grid.start;
}

double single_xi(const RunConfig& cfg) {
    if (cfg.excess_noise.size() != 1) throw std::invalid_argument("this subcommand takes exactly one --xi value");
    return cfg.excess_noise.front();
}

SweepSpec sweep_spec(const RunConfig& cfg) {
    SweepSpec spec;
    spec.protocols = {ProtocolSpec{cfg.family, cfg.resolved_alpha()}};
    spec.distances = DistanceGrid::parse(cfg.distance);
    spec.excess_noise = cfg.excess_noise;
    spec.beta = cfg.beta;
    spec.eta_det = cfg.eta_det;
    spec.loss_db_per_km = cfg.loss_db_per_km;
    spec.k_min = cfg.k_min;
    spec.conventions = cfg.conventions;
    spec.truncation = cfg.truncation;
    spec.reoptimize_at_km = cfg.reoptimize_at_km;
    return spec;
}

int run_rate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    ChannelParams ch;
    if (cfg.transmissivity) {
        ch.transmissivity = *cfg.transmissivity;
        ch.excess_noise = single_xi(cfg);
        ch.validate();
    } else {
        ch = ChannelParams::from_distance(single_distance(cfg), single_xi(cfg), cfg.loss_db_per_km);
    }
    const auto point = key_rate(cfg.resolved_alpha(), cfg.family, ch, {cfg.beta, cfg.eta_det}, cfg.conventions,
                                cfg.truncation);
    if (point.i_ab < 0.0) {
        err << fmt::format("warning: I_AB = {} < 0 under the {} mutual-information convention\n",
                           format_number(point.i_ab), to_string(cfg.conventions.mi));
    }
    if (cfg.format == OutputFormat::csv) {
        write_artifact(cfg, std::string(kCsvHeader) + "\n" + csv_row(point) + "\n", out);
    } else {
        nlohmann::json j;
        j["metadata"] = metadata_json(cfg);
        j["metadata"]["protocol"] = to_string(cfg.family);
        j["records"] = nlohmann::json::array({record_json(point)});
        write_artifact(cfg, dump(j), out);
    }
    return kExitOk;
}

int run_optimize(const RunConfig& cfg, std::ostream& out) {
    const auto ch = ChannelParams::from_distance(single_distance(cfg), single_xi(cfg), cfg.loss_db_per_km);
    OptimizeOptions options;
    options.lower = cfg.alpha_lower;
    options.upper = cfg.alpha_upper;
    const auto r = optimize_alpha(cfg.family, ch, {cfg.beta, cfg.eta_det}, options, cfg.conventions, cfg.truncation);
    if (cfg.format == OutputFormat::csv) {
        write_artifact(cfg,
                       fmt::format("protocol,distance_km,excess_noise,alpha_opt,key_rate_bits,unimodal\n{},{},{},{},{},{}\n",
                                   to_string(cfg.family), format_number(*ch.fiber_length_km),
                                   format_number(ch.excess_noise), format_number(r.alpha), format_number(r.key_rate),
                                   r.unimodal ? 1 : 0),
                       out);
    } else {
        nlohmann::json j;
        j["metadata"] = metadata_json(cfg);
        j["metadata"]["protocol"] = to_string(cfg.family);
        j["result"] = {{"distance_km", *ch.fiber_length_km}, {"excess_noise", ch.excess_noise},
                       {"alpha_opt", r.alpha},           {"key_rate_bits", r.key_rate},
                       {"unimodal", r.unimodal}};
        write_artifact(cfg, dump(j), out);
    }
    return kExitOk;
}

int run_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto result = sweep_distance(sweep_spec(cfg));
    int status = kExitOk;
    for (const auto& curve : result.curves) {
        if (!curve.ok()) {
            err << fmt::format("error: curve xi={} failed: {}\n", format_number(curve.excess_noise), *curve.diagnostic);
            status = kExitInternal;
        }
    }
    if (cfg.format == OutputFormat::csv) {
        write_artifact(cfg, sweep_csv(result), out);
    } else {
        auto j = sweep_json(result, cfg);
        j["metadata"]["protocol"] = to_string(cfg.family);
        write_artifact(cfg, dump(j), out);
    }
    return status;
}

int run_compare(const RunConfig& cfg, std::ostream& out) {
    auto spec = sweep_spec(cfg);
    const auto cmp = compare_protocols(spec, {StateFamily::pascs, cfg.alpha_pascs},
                                       {StateFamily::coherent, cfg.alpha_coherent});
    out << comparison_summary(cmp);
    if (cfg.output_path) {
        if (cfg.format == OutputFormat::csv) {
            write_artifact(cfg, comparison_csv(cmp), out);
        } else {
            auto j = sweep_json(cmp.sweep, cfg);
            j["dominance"] = {{"all_points", cmp.all_dominant}, {"violations", cmp.violations}};
            write_artifact(cfg, dump(j), out);
        }
    }
    return kExitOk;
}

}  // namespace

void RunConfig::validate() const {
    if (alpha && !(*alpha > 0.0)) throw std::invalid_argument("--alpha must be > 0");
    if (!(alpha_pascs > 0.0) || !(alpha_coherent > 0.0)) throw std::invalid_argument("amplitudes must be > 0");
    DetectionParams{beta, eta_det}.validate();
    if (!(loss_db_per_km > 0.0)) throw std::invalid_argument("--loss must be > 0");
    if (!(k_min > 0.0)) throw std::invalid_argument("--k-min must be > 0");
    if (excess_noise.empty()) throw std::invalid_argument("--xi needs at least one value");
    for (double xi : excess_noise)
        if (!(xi >= 0.0)) throw std::invalid_argument("--xi values must be >= 0");
    if (transmissivity && !(*transmissivity > 0.0 && *transmissivity <= 1.0)) {
        throw std::invalid_argument("--transmissivity must lie in (0, 1]");
    }
    if (reoptimize_at_km && !(*reoptimize_at_km >= 0.0)) throw std::invalid_argument("--reoptimize-at must be >= 0");
    DistanceGrid::parse(distance);
}

std::variant<RunConfig, int> parse_command_line(int argc, const char* const* argv, std::ostream& out,
                                                std::ostream& err) {
    RunConfig cfg;
    Flags flags;
    std::string xi_default = "0.002";

    CLI::App app{"Key rates of four-state discrete-modulated CV-QKD with PASCS and coherent signals", "pascs_qkd"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1, 1);

    auto* rate = app.add_subcommand("rate", "Key rate at one operating point");
    add_protocol(*rate, flags);
    rate->add_option("--alpha", cfg.alpha, "Signal amplitude (default: 0.13 pascs, 0.25 coherent)");
    rate->add_option("--distance", cfg.distance, "Fiber length in km")->capture_default_str();
    rate->add_option("--transmissivity", cfg.transmissivity, "Channel transmissivity (instead of --distance)");
    rate->add_option("--xi", cfg.excess_noise, "Excess noise (shot-noise units)")->delimiter(',');
    add_channel(*rate, cfg);
    add_common(*rate, cfg, flags);

    auto* optimize = app.add_subcommand("optimize", "Amplitude that maximizes the key rate");
    add_protocol(*optimize, flags);
    optimize->add_option("--distance", cfg.distance, "Fiber length in km");
    optimize->add_option("--xi", cfg.excess_noise, "Excess noise")->delimiter(',');
    optimize->add_option("--alpha-min", cfg.alpha_lower, "Lower amplitude bound")->capture_default_str();
    optimize->add_option("--alpha-max", cfg.alpha_upper, "Upper amplitude bound")->capture_default_str();
    add_channel(*optimize, cfg);
    add_common(*optimize, cfg, flags);

    auto* sweep = app.add_subcommand("sweep", "Key rate versus distance");
    add_protocol(*sweep, flags);
    sweep->add_option("--alpha", cfg.alpha, "Signal amplitude");
    sweep->add_option("--distance", cfg.distance, "Distance grid start:stop:step in km");
    sweep->add_option("--xi", cfg.excess_noise, "Comma-separated excess-noise values")->delimiter(',');
    sweep->add_option("--k-min", cfg.k_min, "Rate floor for the threshold cutoff")->capture_default_str();
    sweep->add_option("--reoptimize-at", cfg.reoptimize_at_km, "Re-optimize alpha per xi at this distance (km)");
    add_channel(*sweep, cfg);
    add_common(*sweep, cfg, flags);

    auto* compare = app.add_subcommand("compare", "PASCS versus coherent four-state protocol");
    compare->add_option("--alpha-pascs", cfg.alpha_pascs, "PASCS amplitude")->capture_default_str();
    compare->add_option("--alpha-coherent", cfg.alpha_coherent, "Coherent amplitude")->capture_default_str();
    compare->add_option("--distance", cfg.distance, "Distance grid start:stop:step in km");
    compare->add_option("--xi", cfg.excess_noise, "Comma-separated excess-noise values")->delimiter(',');
    compare->add_option("--k-min", cfg.k_min, "Rate floor for the threshold cutoff")->capture_default_str();
    add_channel(*compare, cfg);
    add_common(*compare, cfg, flags);

    auto* self = app.add_subcommand("selftest", "Cross-check closed forms against numeric oracles");
    self->add_option("--alpha", cfg.alpha, "Run the amplitude-dependent checks at this amplitude only");
    add_common(*self, cfg, flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInvalidFlags;
    }

    const std::map<CLI::App*, std::pair<Subcommand, const char*>> defaults{
        {rate, {Subcommand::rate, "0"}},           {optimize, {Subcommand::optimize, "100"}},
        {sweep, {Subcommand::sweep, "0:450:1"}},   {compare, {Subcommand::compare, "0:300:1"}},
        {self, {Subcommand::selftest, "0"}},
    };
    CLI::App* chosen = app.get_subcommands().front();
    cfg.subcommand = defaults.at(chosen).first;
    if (chosen == self || chosen->count("--distance") == 0) cfg.distance = defaults.at(chosen).second;
    if (cfg.subcommand == Subcommand::compare && chosen->count("--xi") == 0) cfg.excess_noise = {0.002, 0.01};

    cfg.family = flags.protocol == "coherent" ? StateFamily::coherent : StateFamily::pascs;
    cfg.format = flags.format == "json" ? OutputFormat::json : OutputFormat::csv;
    cfg.conventions.sign = flags.convention == "paper-literal" ? SignConvention::paper_literal : SignConvention::standard;
    cfg.conventions.mi = flags.mi_convention == "paper-literal" ? MiConvention::paper_literal : MiConvention::standard;

    try {
        if (flags.truncation) {
            cfg.truncation = TruncationPolicy::fixed(*flags.truncation);
            cfg.truncation_source = "flag";
        } else if (const auto env = truncation_from_env()) {
            cfg.truncation.initial = *env;
            cfg.truncation.cap = std::max(cfg.truncation.cap, *env);
            cfg.truncation_source = "env";
        }
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalidFlags;
    }
    return cfg;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        config.validate();
        switch (config.subcommand) {
            case Subcommand::rate: return run_rate(config, out, err);
            case Subcommand::optimize: return run_optimize(config, out);
            case Subcommand::sweep: return run_sweep(config, out, err);
            case Subcommand::compare: return run_compare(config, out);
            case Subcommand::selftest: return selftest(config, out, err);
        }
    } catch (const NoSecureOperatingPoint& e) {
        err << "no secure operating point: " << e.what() << "\n";
        return kExitNoSecurePoint;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalidFlags;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitInternal;
}

}  // namespace pascs::cli
