#pragma once

#include <optional>

#include <Eigen/Core>

namespace pascs {

inline constexpr double kDefaultLossDbPerKm = 0.2;

/// How excess noise enters Bob's variance.
///   standard:      gamma_B = T V_A + 1 + T xi  (noise adds variance)
///   paper_literal: gamma_B = T V_A + 1 - T xi  (kept for comparison only; can go unphysical)
enum class SignConvention { standard, paper_literal };

const char* to_string(SignConvention convention);

double transmittance_from_distance(double length_km, double loss_db_per_km = kDefaultLossDbPerKm);

struct ChannelParams {
    double transmissivity = 1.0;
    double excess_noise = 0.0;
    std::optional<double> fiber_length_km;
    double loss_db_per_km = kDefaultLossDbPerKm;

    static ChannelParams from_distance(double length_km, double excess_noise,
                                       double loss_db_per_km = kDefaultLossDbPerKm);

    void validate() const;
};

struct DetectionParams {
    double reconciliation_efficiency = 1.0;
    double detector_efficiency = 1.0;

    void validate() const;
};

/// Detector inefficiency treated as additional channel loss.
inline double effective_transmissivity(const ChannelParams& ch, const DetectionParams& det) {
    return det.detector_efficiency * ch.transmissivity;
}

/// Two-mode covariance matrix in 2x2 blocks, shot-noise units.
struct CovarianceMatrix {
    Eigen::Matrix2d gamma_a;
    Eigen::Matrix2d gamma_b;
    Eigen::Matrix2d sigma_ab;

    Eigen::Matrix4d full() const;
};

/// Covariance matrix shared by Alice and Bob after the channel.
CovarianceMatrix propagate(double v_a, double z, const ChannelParams& ch, const DetectionParams& det,
                           SignConvention convention = SignConvention::standard);

/// Alice's block after Bob homodynes the first quadrature:
/// gamma_A - sigma_AB (X gamma_B X)^+ sigma_AB^T with X = diag(1, 0).
Eigen::Matrix2d condition_on_homodyne(const CovarianceMatrix& cm);

}  // namespace pascs
