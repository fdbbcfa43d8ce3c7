#include "pascs_qkd/cli.hpp"

#include <sstream>

#include <fmt/format.h>

namespace pascs::cli {

namespace {

nlohmann::json cutoff_json(const Cutoff& c) {
    nlohmann::json j;
    j["distance_km"] = c.distance_km ? nlohmann::json(*c.distance_km) : nlohmann::json(nullptr);
    j["censored"] = c.censored;
    return j;
}

std::string cutoff_text(const Cutoff& c) {
    if (!c.distance_km) return "none";
    return fmt::format("{}{} km", c.censored ? ">= " : "", format_number(*c.distance_km));
}

}  // namespace

// 12 significant digits, '.' decimal separator regardless of locale.
std::string format_number(double value) {
    return fmt::format("{:.12g}", value);
}

std::string csv_row(const RatePoint& p) {
    const std::string distance = p.channel.fiber_length_km ? format_number(*p.channel.fiber_length_km) : "";
    return fmt::format("{},{},{},{},{},{},{},{},{}", distance, format_number(p.channel.transmissivity),
                       format_number(p.channel.excess_noise), format_number(p.alpha), format_number(p.v_a),
                       format_number(p.z), format_number(p.i_ab), format_number(p.s_be), format_number(p.key_rate));
}

std::string sweep_csv(const SweepResult& result) {
    std::string out = kCsvHeader;
    out += '\n';
    for (const auto& curve : result.curves) {
        for (const auto& p : curve.points) {
            out += csv_row(p);
            out += '\n';
        }
    }
    return out;
}

nlohmann::json metadata_json(const RunConfig& config) {
    static constexpr const char* kNames[] = {"rate", "optimize", "sweep", "compare", "selftest"};
    nlohmann::json m;
    m["tool"] = "pascs_qkd";
    m["version"] = kVersion;
    m["subcommand"] = kNames[static_cast<int>(config.subcommand)];
    m["sign_convention"] = to_string(config.conventions.sign);
    m["mi_convention"] = to_string(config.conventions.mi);
    m["truncation"] = {{"initial", config.truncation.initial},
                       {"cap", config.truncation.cap},
                       {"escalate", config.truncation.escalate},
                       {"source", config.truncation_source}};
    m["beta"] = config.beta;
    m["eta_det"] = config.eta_det;
    m["loss_db_per_km"] = config.loss_db_per_km;
    m["k_min"] = config.k_min;
    return m;
}

nlohmann::json record_json(const RatePoint& p) {
    nlohmann::json r;
    r["distance_km"] = p.channel.fiber_length_km ? nlohmann::json(*p.channel.fiber_length_km) : nlohmann::json(nullptr);
    r["transmissivity"] = p.channel.transmissivity;
    r["excess_noise"] = p.channel.excess_noise;
    r["alpha"] = p.alpha;
    r["v_a"] = p.v_a;
    r["z"] = p.z;
    r["i_ab_bits"] = p.i_ab;
    r["s_be_bits"] = p.s_be;
    r["key_rate_bits"] = p.key_rate;
    return r;
}

nlohmann::json sweep_json(const SweepResult& result, const RunConfig& config) {
    nlohmann::json j;
    j["metadata"] = metadata_json(config);
    j["records"] = nlohmann::json::array();
    j["curves"] = nlohmann::json::array();
    for (const auto& curve : result.curves) {
        for (const auto& p : curve.points) j["records"].push_back(record_json(p));
        nlohmann::json c;
        c["protocol"] = to_string(curve.protocol.family);
        c["alpha"] = curve.protocol.alpha;
        c["excess_noise"] = curve.excess_noise;
        c["positive_cutoff"] = cutoff_json(curve.positive_cutoff);
        c["threshold_cutoff"] = cutoff_json(curve.threshold_cutoff);
        c["diagnostic"] = curve.diagnostic ? nlohmann::json(*curve.diagnostic) : nlohmann::json(nullptr);
        j["curves"].push_back(std::move(c));
    }
    return j;
}

std::string comparison_csv(const ProtocolComparison& cmp) {
    std::string out = fmt::format("distance_km,excess_noise,k_{}_bits,k_{}_bits,{}_dominates\n",
                                  to_string(cmp.first.family), to_string(cmp.second.family),
                                  to_string(cmp.first.family));
    for (const auto& row : cmp.rows) {
        out += fmt::format("{},{},{},{},{}\n", format_number(row.distance_km), format_number(row.excess_noise),
                           format_number(row.k_first), format_number(row.k_second), row.first_dominates ? 1 : 0);
    }
    return out;
}

std::string comparison_summary(const ProtocolComparison& cmp) {
    const std::string a = to_string(cmp.first.family);
    const std::string b = to_string(cmp.second.family);
    std::ostringstream os;
    os << fmt::format("compare: {} (alpha={}) vs {} (alpha={}); beta={}, eta_det={}, loss={} dB/km\n", a,
                      format_number(cmp.first.alpha), b, format_number(cmp.second.alpha),
                      format_number(cmp.sweep.spec.beta), format_number(cmp.sweep.spec.eta_det),
                      format_number(cmp.sweep.spec.loss_db_per_km));
    for (const auto& g : cmp.gaps) {
        os << fmt::format("xi={}: K>0 cutoff {} {}, {} {}", format_number(g.excess_noise), a,
                          cutoff_text(g.first_positive), b, cutoff_text(g.second_positive));
        if (g.positive_gap_km) os << fmt::format(" (gap {} km)", format_number(*g.positive_gap_km));
        os << fmt::format("; K>={} cutoff {} {}, {} {}", format_number(cmp.sweep.spec.k_min), a,
                          cutoff_text(g.first_threshold), b, cutoff_text(g.second_threshold));
        if (g.threshold_gap_km) os << fmt::format(" (gap {} km)", format_number(*g.threshold_gap_km));
        os << '\n';
    }
    const std::string upper_a = a == "pascs" ? "PASCS" : a;
    if (cmp.all_dominant) {
        os << fmt::format("verdict: {} ≥ {} at all points\n", upper_a, b);
    } else {
        os << fmt::format("verdict: {} < {} at {} of {} points\n", upper_a, b, cmp.violations, cmp.rows.size());
    }
    return os.str();
}

}  // namespace pascs::cli
