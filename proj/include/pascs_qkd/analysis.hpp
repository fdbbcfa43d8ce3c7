#pragma once

#include "pascs_qkd/keyrate.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pascs {

/// Amplitudes used when none is given: the reported optima of each family.
double default_alpha(StateFamily family);

struct ProtocolSpec {
    StateFamily family = StateFamily::pascs;
    double alpha = 0.13;

    static ProtocolSpec with_default_alpha(StateFamily family) { return {family, default_alpha(family)}; }
};

struct DistanceGrid {
    double start = 0.0;
    double stop = 450.0;
    double step = 1.0;

    /// Parses "start:stop:step" (or a single number).
    static DistanceGrid parse(const std::string& text);
    std::vector<double> points() const;
    void validate() const;
};

struct SweepSpec {
    std::vector<ProtocolSpec> protocols{ProtocolSpec{}};
    DistanceGrid distances{};
    std::vector<double> excess_noise{0.002};
    double beta = 1.0;
    double eta_det = 1.0;
    double loss_db_per_km = kDefaultLossDbPerKm;
    double k_min = 1e-10;
    Conventions conventions{};
    TruncationPolicy truncation{};
    /// Re-run optimize_alpha per excess-noise value at this distance instead of
    /// using the protocol's fixed amplitude.
    std::optional<double> reoptimize_at_km;

    DetectionParams detection() const { return {beta, eta_det}; }
    void validate() const;
};

/// Largest distance before the rate first violates a cutoff rule.
struct Cutoff {
    std::optional<double> distance_km;  // empty: rule violated at the first grid point
    bool censored = false;              // rule never violated on the grid
};

struct Curve {
    ProtocolSpec protocol;
    double excess_noise = 0.0;
    std::vector<RatePoint> points;  // ordered by distance
    std::vector<double> distances_km;
    Cutoff positive_cutoff;   // K > 0
    Cutoff threshold_cutoff;  // K >= k_min
    std::optional<std::string> diagnostic;

    bool ok() const { return !diagnostic.has_value(); }
};

struct SweepResult {
    SweepSpec spec;
    std::vector<Curve> curves;  // protocol-major, then excess noise in spec order
};

Cutoff find_cutoff(const std::vector<double>& distances_km, const std::vector<RatePoint>& points,
                   double threshold, bool strict);

SweepResult sweep_distance(const SweepSpec& spec);

struct OptimizeOptions {
    double lower = 0.01;
    double upper = 1.0;
    double tol = 1e-3;
    int prescan_points = 50;
};

struct OptimizeResult {
    double alpha = 0.0;
    double key_rate = 0.0;
    bool unimodal = true;
    std::vector<double> prescan_alpha;
    std::vector<double> prescan_rate;
};

/// Maximizes K over alpha. Throws NoSecureOperatingPoint if the best K is not above 1e-14 (rounding level).
OptimizeResult optimize_alpha(StateFamily family, const ChannelParams& ch, const DetectionParams& det,
                              const OptimizeOptions& options = {}, const Conventions& conventions = {},
                              const TruncationPolicy& truncation = {});

struct DominanceRow {
    double distance_km = 0.0;
    double excess_noise = 0.0;
    double k_first = 0.0;
    double k_second = 0.0;
    bool first_dominates = false;
};

struct CutoffGap {
    double excess_noise = 0.0;
    Cutoff first_positive, second_positive;
    Cutoff first_threshold, second_threshold;
    std::optional<double> positive_gap_km;   // first - second
    std::optional<double> threshold_gap_km;
};

struct ProtocolComparison {
    ProtocolSpec first;
    ProtocolSpec second;
    SweepResult sweep;  // curves for first, then second
    std::vector<DominanceRow> rows;
    std::vector<CutoffGap> gaps;
    bool all_dominant = true;
    std::size_t violations = 0;
};

inline constexpr double kDominanceSlack = 1e-12;

/// Sweeps both protocols over the same grid and reports K_first >= K_second - 1e-12 per point.
ProtocolComparison compare_protocols(const SweepSpec& spec, const ProtocolSpec& first, const ProtocolSpec& second);

}  // namespace pascs
