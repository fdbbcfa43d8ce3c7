#include "pascs_qkd/channel.hpp"

#include "pascs_qkd/errors.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace pascs {

const char* to_string(SignConvention convention) {
    return convention == SignConvention::standard ? "standard" : "paper-literal";
}

double transmittance_from_distance(double length_km, double loss_db_per_km) {
    if (!std::isfinite(length_km) || length_km < 0.0) {
        throw std::invalid_argument(fmt::format("fiber length must be >= 0 km, got {}", length_km));
    }
    if (!std::isfinite(loss_db_per_km) || loss_db_per_km <= 0.0) {
        throw std::invalid_argument(fmt::format("loss rate must be > 0 dB/km, got {}", loss_db_per_km));
    }
    return std::pow(10.0, -loss_db_per_km * length_km / 10.0);
}

ChannelParams ChannelParams::from_distance(double length_km, double excess_noise, double loss_db_per_km) {
    ChannelParams ch;
    ch.transmissivity = transmittance_from_distance(length_km, loss_db_per_km);
    ch.excess_noise = excess_noise;
    ch.fiber_length_km = length_km;
    ch.loss_db_per_km = loss_db_per_km;
    ch.validate();
    return ch;
}

void ChannelParams::validate() const {
    if (!(transmissivity > 0.0 && transmissivity <= 1.0)) {
        throw std::invalid_argument(fmt::format("transmissivity must lie in (0, 1], got {}", transmissivity));
    }
    if (!(excess_noise >= 0.0) || !std::isfinite(excess_noise)) {
        throw std::invalid_argument(fmt::format("excess noise must be >= 0, got {}", excess_noise));
    }
}

void DetectionParams::validate() const {
    if (!(reconciliation_efficiency >= 0.0 && reconciliation_efficiency <= 1.0)) {
        throw std::invalid_argument(
            fmt::format("reconciliation efficiency must lie in [0, 1], got {}", reconciliation_efficiency));
    }
    if (!(detector_efficiency > 0.0 && detector_efficiency <= 1.0)) {
        throw std::invalid_argument(
            fmt::format("detector efficiency must lie in (0, 1], got {}", detector_efficiency));
    }
}

Eigen::Matrix4d CovarianceMatrix::full() const {
    Eigen::Matrix4d m;
    m << gamma_a, sigma_ab, sigma_ab.transpose(), gamma_b;
    return m;
}

CovarianceMatrix propagate(double v_a, double z, const ChannelParams& ch, const DetectionParams& det,
                           SignConvention convention) {
    ch.validate();
    det.validate();
    if (!(v_a >= 0.0)) throw std::invalid_argument("modulation variance must be non-negative");
    if (!std::isfinite(z)) throw std::invalid_argument("correlation must be finite");

    const double t = effective_transmissivity(ch, det);
    const double noise = (convention == SignConvention::standard ? 1.0 : -1.0) * t * ch.excess_noise;
    const Eigen::Matrix2d id = Eigen::Matrix2d::Identity();
    const Eigen::Matrix2d sigma_z = Eigen::Vector2d(1.0, -1.0).asDiagonal();

    return {(1.0 + v_a) * id, (t * v_a + 1.0 + noise) * id, std::sqrt(t) * z * sigma_z};
}

Eigen::Matrix2d condition_on_homodyne(const CovarianceMatrix& cm) {
    // X gamma_B X keeps only the measured quadrature; its pseudo-inverse is
    // diag(1/gamma_B[0,0], 0).
    const double measured = cm.gamma_b(0, 0);
    if (!(measured > 0.0)) {
        throw UnphysicalError(fmt::format("measured quadrature variance must be positive, got {}", measured));
    }
    Eigen::Matrix2d pinv = Eigen::Matrix2d::Zero();
    pinv(0, 0) = 1.0 / measured;
    return cm.gamma_a - cm.sigma_ab * pinv * cm.sigma_ab.transpose();
}

}  // namespace pascs
