#pragma once

#include "pascs_qkd/analysis.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace pascs::cli {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kTruncationEnv = "PASCS_QKD_TRUNCATION";

enum class Subcommand { rate, optimize, sweep, compare, selftest };
enum class OutputFormat { csv, json };

enum ExitStatus : int {
    kExitOk = 0,
    kExitInternal = 1,
    kExitInvalidFlags = 2,
    kExitNoSecurePoint = 3,
};

struct RunConfig {
    Subcommand subcommand = Subcommand::rate;
    StateFamily family = StateFamily::pascs;
    std::optional<double> alpha;           // rate / optimize / sweep
    double alpha_pascs = 0.13;             // compare
    double alpha_coherent = 0.25;          // compare
    std::string distance = "0";            // "L" or "start:stop:step"
    std::optional<double> transmissivity;  // rate only; overrides distance
    std::vector<double> excess_noise{0.002};
    double beta = 1.0;
    double eta_det = 1.0;
    double loss_db_per_km = kDefaultLossDbPerKm;
    double k_min = 1e-10;
    double alpha_lower = 0.01;
    double alpha_upper = 1.0;
    std::optional<double> reoptimize_at_km;
    OutputFormat format = OutputFormat::csv;
    std::optional<std::string> output_path;
    Conventions conventions{};
    TruncationPolicy truncation{};
    std::string truncation_source = "default";  // default | env | flag

    double resolved_alpha() const { return alpha.value_or(default_alpha(family)); }
    void validate() const;
};

/// Parses argv. Returns the exit status instead of a config for --help / bad flags.
std::variant<RunConfig, int> parse_command_line(int argc, const char* const* argv, std::ostream& out,
                                                std::ostream& err);

/// Executes one subcommand. Diagnostics go to err only.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

int selftest(const RunConfig& config, std::ostream& out, std::ostream& err);

// Serialization, exposed for tests.
inline constexpr const char* kCsvHeader =
    "distance_km,transmissivity,excess_noise,alpha,v_a,z,i_ab_bits,s_be_bits,key_rate_bits";

std::string format_number(double value);
std::string csv_row(const RatePoint& point);
std::string sweep_csv(const SweepResult& result);
nlohmann::json metadata_json(const RunConfig& config);
nlohmann::json record_json(const RatePoint& point);
nlohmann::json sweep_json(const SweepResult& result, const RunConfig& config);
std::string comparison_csv(const ProtocolComparison& cmp);
std::string comparison_summary(const ProtocolComparison& cmp);

}  // namespace pascs::cli
