#pragma once

#include "pascs_qkd/fock.hpp"

#include <array>
#include <cstddef>
#include <vector>

namespace pascs {

/// Equiprobable signal set {|s(alpha * w^j)>}, w = exp(2 pi i / m), m = 2 or 4.
/// For m = 4 this is {|+alpha>, |+i alpha>, |-alpha>, |-i alpha>}.
struct ModulationEnsemble {
    StateFamily family = StateFamily::pascs;
    double amplitude = 0.13;
    int num_states = 4;
    TruncationPolicy truncation{};

    double probability() const { return 1.0 / num_states; }
    std::vector<Complex> phases() const;
    std::vector<FockVector> signal_states() const;
    void validate() const;
};

/// Eigenpairs of the ensemble density operator, indexed by residue class k = n mod m.
struct SpectralDecomposition {
    std::vector<double> eigenvalues;
    std::vector<FockVector> eigenvectors;
    int block_period = 4;

    double trace() const;
};

/// Four-state PASCS eigenvalues lambda_0..lambda_3 in closed form. Below alpha = 0.05
/// the positive-term Fock series is used instead.
std::array<double, 4> eigenvalues_closed(double alpha);

/// lambda_k = sum_n |c_{4n+k}|^2 as a cancellation-free series (PASCS).
std::array<double, 4> eigenvalues_series(double alpha);

/// Intermediate terms of the closed-form four-state PASCS correlation.
struct CorrelationTerms {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
};

CorrelationTerms correlation_terms(double alpha);

/// Builds rho from the signal states and diagonalizes each residue-class block.
SpectralDecomposition spectral_numeric(const ModulationEnsemble& ensemble);

/// V_A = 2 <n> of the base signal state (shot-noise units).
double modulation_variance(const ModulationEnsemble& ensemble);

/// Closed-form V_A for the PASCS family.
double modulation_variance_pascs_closed(double alpha);

/// Closed-form four-state PASCS correlation <X_A X_B>.
double correlation_z4_closed(double alpha);

/// <Phi|(ab + a^dagger b^dagger)|Phi> for the purification built from decomp.
double correlation_numeric(const SpectralDecomposition& decomp);

/// Correlation for Gaussian modulation with the same variance.
double correlation_gauss(double v_a);

inline constexpr double kSmallAlphaThreshold = 0.05;

}  // namespace pascs
