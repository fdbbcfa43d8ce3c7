#pragma once

#include "pascs_qkd/channel.hpp"
#include "pascs_qkd/fock.hpp"

#include <array>

namespace pascs {

/// Which variance goes in the numerator of the mutual-information ratio.
///   standard:      I_AB = 1/2 log2((1 + V_A) / V_{A|B})
///   paper_literal: I_AB = 1/2 log2(V_A / V_{A|B})  (negative for realistic V_A)
enum class MiConvention { standard, paper_literal };

const char* to_string(MiConvention convention);

struct Conventions {
    SignConvention sign = SignConvention::standard;
    MiConvention mi = MiConvention::standard;
};

/// G(x) = (x+1) log2(x+1) - x log2 x, G(0) = 0.
double bosonic_entropy(double x);

double mutual_information(double v_a, double v_a_given_b, MiConvention convention = MiConvention::standard);

struct HolevoResult {
    double s_be = 0.0;
    std::array<double, 3> nu{1.0, 1.0, 1.0};
    double delta_sum = 2.0;      // Delta = nu1^2 + nu2^2
    double delta_product = 1.0;  // delta = (nu1 nu2)^2
};

/// Holevo bound on Eve's information about Bob's homodyne data, evaluated with
/// the Gaussian-modulation formulas. t_eff already includes detector loss.
HolevoResult holevo_bound(double v_a, double z, double t_eff, double xi);

struct SignalMoments {
    double v_a = 0.0;
    double z = 0.0;
};

/// V_A and the four-state correlation for one signal family.
SignalMoments signal_moments(StateFamily family, double alpha, const TruncationPolicy& truncation = {});

struct RatePoint {
    double alpha = 0.0;
    StateFamily family = StateFamily::pascs;
    ChannelParams channel;
    DetectionParams detection;
    double v_a = 0.0;
    double z = 0.0;
    double v_a_given_b = 0.0;
    double i_ab = 0.0;
    double s_be = 0.0;
    double key_rate = 0.0;
    std::array<double, 3> nu{};
    double delta_sum = 0.0;
    double delta_product = 0.0;
};

RatePoint key_rate(double alpha, StateFamily family, const ChannelParams& ch, const DetectionParams& det,
                   const Conventions& conventions = {}, const TruncationPolicy& truncation = {});

/// Same, with V_A and Z already computed (sweeps reuse them across distances).
RatePoint key_rate(const SignalMoments& moments, double alpha, StateFamily family, const ChannelParams& ch,
                   const DetectionParams& det, const Conventions& conventions = {});

}  // namespace pascs
