#include "pascs_qkd/keyrate.hpp"

#include "pascs_qkd/errors.hpp"
#include "pascs_qkd/modulation.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

namespace pascs {

namespace {

constexpr double kPhysicalTolerance = 1e-9;

double symplectic_to_entropy_arg(double nu) {
    return std::max(0.0, 0.5 * (nu - 1.0));
}

}  // namespace

const char* to_string(MiConvention convention) {
    return convention == MiConvention::standard ? "standard" : "paper-literal";
}

// (x+1) log(x+1) - x log x = log(1+x) + x log(1 + 1/x)
double bosonic_entropy(double x) {
    if (x < -kPhysicalTolerance || !std::isfinite(x)) {
        throw std::invalid_argument(fmt::format("entropy argument must be >= 0, got {}", x));
    }
    if (x <= 0.0) return 0.0;
    return (std::log1p(x) + x * std::log1p(1.0 / x)) / std::numbers::ln2;
}

double mutual_information(double v_a, double v_a_given_b, MiConvention convention) {
    if (!(v_a > 0.0) || !(v_a_given_b > 0.0)) {
        throw std::invalid_argument(fmt::format(
            "mutual information needs positive variances (V_A={}, V_A|B={})", v_a, v_a_given_b));
    }
    const double numerator = convention == MiConvention::standard ? 1.0 + v_a : v_a;
    return 0.5 * std::log2(numerator / v_a_given_b);
}

HolevoResult holevo_bound(double v_a, double z, double t_eff, double xi) {
    if (!(v_a >= 0.0) || !std::isfinite(z) || !(t_eff > 0.0 && t_eff <= 1.0) || !(xi >= 0.0)) {
        throw std::invalid_argument(
            fmt::format("invalid Holevo inputs (V_A={}, Z={}, T={}, xi={})", v_a, z, t_eff, xi));
    }
    const double t = t_eff;
    const double v = 1.0 + v_a;
    const double z2 = z * z;

    HolevoResult r;
    r.delta_sum = xi * xi * t * t + (t * t + 1.0) * v_a * v_a + 2.0 * v_a * (xi * t * t + t + 1.0) +
                  2.0 * xi * t - 2.0 * t * z2 + 2.0;
    const double root_det = t * v_a * v_a + v_a * (xi * t + t + 1.0) + t * (xi - z2) + 1.0;
    r.delta_product = root_det * root_det;

    const double disc = r.delta_sum * r.delta_sum - 4.0 * r.delta_product;
    if (disc < -kPhysicalTolerance * r.delta_sum * r.delta_sum) {
        throw UnphysicalError(fmt::format("Delta^2 - 4 delta = {:.3e} < 0", disc));
    }
    const double nu1 = std::sqrt(0.5 * (r.delta_sum + std::sqrt(std::max(disc, 0.0))));
    // nu1 nu2 = sqrt(delta); avoids the cancellation in (Delta - sqrt(...)) / 2
    const double nu2 = std::abs(root_det) / nu1;
    const double bob = xi * t + t * v_a + 1.0;
    const double nu3 = std::sqrt(v * (v - t * z2 / bob));
    r.nu = {nu1, nu2, nu3};
    for (double nu : r.nu) {
        if (!(nu >= 1.0 - kPhysicalTolerance)) {
            throw UnphysicalError(fmt::format(
                "symplectic eigenvalue {:.12g} below 1 (V_A={}, Z={}, T={}, xi={})", nu, v_a, z, t, xi));
        }
    }
    r.s_be = bosonic_entropy(symplectic_to_entropy_arg(nu1)) + bosonic_entropy(symplectic_to_entropy_arg(nu2)) -
             bosonic_entropy(symplectic_to_entropy_arg(nu3));
    return r;
}

SignalMoments signal_moments(StateFamily family, double alpha, const TruncationPolicy& truncation) {
    const ModulationEnsemble ensemble{family, alpha, 4, truncation};
    ensemble.validate();
    SignalMoments m;
    m.v_a = modulation_variance(ensemble);
    if (family == StateFamily::pascs) {
        m.z = correlation_z4_closed(alpha);
    } else {
        m.z = correlation_numeric(spectral_numeric(ensemble));
    }
    return m;
}

RatePoint key_rate(const SignalMoments& moments, double alpha, StateFamily family, const ChannelParams& ch,
                   const DetectionParams& det, const Conventions& conventions) {
    RatePoint p;
    p.alpha = alpha;
    p.family = family;
    p.channel = ch;
    p.detection = det;
    p.v_a = moments.v_a;
    p.z = moments.z;

    const auto cm = propagate(moments.v_a, moments.z, ch, det, conventions.sign);
    p.v_a_given_b = condition_on_homodyne(cm)(0, 0);
    p.i_ab = mutual_information(moments.v_a, p.v_a_given_b, conventions.mi);

    const auto h = holevo_bound(moments.v_a, moments.z, effective_transmissivity(ch, det), ch.excess_noise);
    p.s_be = h.s_be;
    p.nu = h.nu;
    p.delta_sum = h.delta_sum;
    p.delta_product = h.delta_product;
    p.key_rate = det.reconciliation_efficiency * p.i_ab - p.s_be;
    return p;
}

RatePoint key_rate(double alpha, StateFamily family, const ChannelParams& ch, const DetectionParams& det,
                   const Conventions& conventions, const TruncationPolicy& truncation) {
    return key_rate(signal_moments(family, alpha, truncation), alpha, family, ch, det, conventions);
}

}  // namespace pascs
