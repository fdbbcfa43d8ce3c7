#include "doctest.h"

#include "oracles.hpp"
#include "pascs_qkd/errors.hpp"
#include "pascs_qkd/modulation.hpp"

#include <algorithm>
#include <cmath>

using namespace pascs;

namespace {

double rel(double a, double b) {
    const double s = std::max(std::abs(a), std::abs(b));
    return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

std::vector<double> grid(double lo, double hi, int n) {
    std::vector<double> out;
    for (int i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * i / (n - 1));
    return out;
}

}  // namespace

TEST_CASE("eigenvalues_closed edge values") {
    const auto l0 = eigenvalues_closed(0.0);
    CHECK(l0[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(l0[1] == 0.0);
    CHECK(l0[2] == 0.0);
    CHECK(l0[3] == 0.0);

    const auto l = eigenvalues_closed(0.13);
    CHECK(std::abs(l[0] + l[1] + l[2] + l[3] - 1.0) <= 1e-12);

    CHECK_THROWS_AS(eigenvalues_closed(std::nan("")), std::invalid_argument);
    CHECK_THROWS_AS(eigenvalues_closed(-0.1), std::invalid_argument);
}

TEST_CASE("closed-form eigenvalues agree with the positive-term series") {
    for (double a : {0.05, 0.13, 0.3, 0.5, 0.8, 1.0, 1.4}) {
        CAPTURE(a);
        const auto closed = eigenvalues_closed(a);
        const auto series = eigenvalues_series(a);
        for (std::size_t k = 0; k < 4; ++k) CHECK(rel(closed[k], series[k]) <= 1e-10);
    }
}

TEST_CASE("rearranged closed form equals the literal transcription where the latter is accurate") {
    for (double a : {0.4, 0.5, 0.7, 1.0}) {
        CAPTURE(a);
        const auto mine = eigenvalues_closed(a);
        const auto literal = oracles::pascs_eigenvalues_literal(a);
        for (std::size_t k = 0; k < 4; ++k) CHECK(rel(mine[k], literal[k]) <= 1e-11);
    }
}

TEST_CASE("eigenvalues agree with diagonalization of the signal-state Gram matrix") {
    for (double a : {0.3, 0.5, 1.0}) {
        CAPTURE(a);
        auto gram = oracles::mixture_spectrum_from_gram(a, 4, oracles::pascs_overlap);
        auto closed = eigenvalues_closed(a);
        std::vector<double> sorted(closed.begin(), closed.end());
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(sorted[k] - gram[k]) <= 1e-13);
    }
}

TEST_CASE("spectral_numeric for coherent states") {
    const double a = 0.25;
    const auto dec = spectral_numeric({StateFamily::coherent, a, 4, {}});
    const auto expected = oracles::coherent_eigenvalues(a);
    for (std::size_t k = 0; k < 4; ++k) CHECK(rel(dec.eigenvalues[k], expected[k]) <= 1e-10);

    // the textbook expressions themselves, re-derived from the Gram matrix
    auto gram = oracles::mixture_spectrum_from_gram(a, 4, oracles::coherent_overlap);
    std::vector<double> sorted(expected.begin(), expected.end());
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(sorted[k] - gram[k]) <= 1e-14);
}

TEST_CASE("spectral_numeric for PASCS") {
    const double a = 0.13;
    const auto dec = spectral_numeric({StateFamily::pascs, a, 4, {}});
    const auto closed = eigenvalues_closed(a);
    CHECK(dec.block_period == 4);
    for (std::size_t k = 0; k < 4; ++k) {
        CAPTURE(k);
        CHECK(rel(dec.eigenvalues[k], closed[k]) <= 1e-10);
        const auto& phi = dec.eigenvectors[k];
        CHECK(phi.is_normalized(1e-10));
        for (std::size_t n = 0; n < phi.size(); ++n) {
            if (n % 4 != k) CHECK(std::norm(phi[n]) <= 1e-12);
        }
    }
}

TEST_CASE("two-state ensemble splits into even and odd photon numbers") {
    const auto dec = spectral_numeric({StateFamily::pascs, 0.3, 2, {}});
    REQUIRE(dec.eigenvalues.size() == 2);
    CHECK(std::abs(dec.trace() - 1.0) <= 1e-10);
    auto gram = oracles::mixture_spectrum_from_gram(0.3, 2, oracles::pascs_overlap);
    CHECK(rel(std::min(dec.eigenvalues[0], dec.eigenvalues[1]), gram[0]) <= 1e-10);
    CHECK(rel(std::max(dec.eigenvalues[0], dec.eigenvalues[1]), gram[1]) <= 1e-10);
}

TEST_CASE("ensemble validation") {
    CHECK_THROWS_AS(ModulationEnsemble({StateFamily::pascs, 0.1, 3, {}}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(spectral_numeric({StateFamily::pascs, 1.0, 4, TruncationPolicy::fixed(5)}), TruncationError);
    const ModulationEnsemble e{StateFamily::pascs, 0.2, 4, {}};
    double total = 0.0;
    for (int i = 0; i < e.num_states; ++i) total += e.probability();
    CHECK(total == doctest::Approx(1.0));
    const auto ph = e.phases();
    CHECK(ph[1] == Complex{0.0, 1.0});
    CHECK(ph[2] == Complex{-1.0, 0.0});
}

TEST_CASE("modulation variance") {
    CHECK(modulation_variance({StateFamily::pascs, 0.0, 4, {}}) == 0.0);
    CHECK(std::abs(modulation_variance({StateFamily::coherent, 0.25, 4, {}}) - 0.125) <= 1e-12);
    for (double a : {0.13, 0.5, 1.0}) {
        CAPTURE(a);
        CHECK(std::abs(modulation_variance({StateFamily::pascs, a, 4, {}}) - modulation_variance_pascs_closed(a)) <=
              1e-10);
    }
}

TEST_CASE("correlation_gauss") {
    CHECK(correlation_gauss(0.0) == 0.0);
    CHECK(correlation_gauss(3.0) == doctest::Approx(std::sqrt(15.0)).epsilon(1e-15));
    CHECK_THROWS_AS(correlation_gauss(-0.1), std::invalid_argument);
    const double a = 0.05;
    const double zg = correlation_gauss(modulation_variance_pascs_closed(a));
    // next term is -689/32 a^5
    CHECK(std::abs(zg - (4.0 * a + 4.5 * a * a * a)) <= 25.0 * std::pow(a, 5));
}

TEST_CASE("correlation_z4_closed") {
    CHECK(correlation_z4_closed(0.0) == 0.0);

    const double a = 0.05;
    const double series = 4.0 * a + 4.0 * (3.0 * std::sqrt(2.0) - 4.0) * a * a * a;
    CHECK(std::abs(correlation_z4_closed(a) - series) <= 10.0 * std::pow(a, 5));

    const double zg = correlation_gauss(modulation_variance_pascs_closed(0.2));
    CHECK(std::abs((zg - correlation_z4_closed(0.2)) / zg - 0.03) <= 0.01);

    // the closed-form terms are sums of non-negative series terms
    for (double x : grid(0.0, 1.5, 31)) {
        const auto t = correlation_terms(x);
        CHECK(t.a >= 0.0);
        CHECK(t.b >= 0.0);
        CHECK(t.c >= 0.0);
        CHECK(t.d >= 0.0);
    }
}

TEST_CASE("correlation_numeric") {
    const double a = 0.13;
    const auto dec = spectral_numeric({StateFamily::pascs, a, 4, {}});
    const double z_numeric = correlation_numeric(dec);
    CHECK(rel(z_numeric, correlation_z4_closed(a)) <= 1e-8);

    const double zg = correlation_gauss(modulation_variance_pascs_closed(a));
    CHECK(std::abs((zg - z_numeric) / zg - 0.013) <= 0.005);

    const double z2 = correlation_numeric(spectral_numeric({StateFamily::pascs, 0.3, 2, {}}));
    const double z4 = correlation_z4_closed(0.3);
    CHECK(z2 < z4);
    CHECK(z4 < correlation_gauss(modulation_variance_pascs_closed(0.3)));
}

TEST_CASE("block contraction matches the dense two-mode purification") {
    for (auto family : {StateFamily::pascs, StateFamily::coherent}) {
        for (int m : {2, 4}) {
            const double a = 0.4;
            CAPTURE(m);
            const ModulationEnsemble e{family, a, m, TruncationPolicy::fixed(24)};
            std::vector<Eigen::VectorXcd> states;
            for (const auto& s : e.signal_states()) {
                states.push_back(Eigen::Map<const Eigen::VectorXcd>(s.coeffs().data(), static_cast<Eigen::Index>(s.size())));
            }
            const double brute = oracles::two_mode_correlation_bruteforce(states);
            // the dense oracle takes square roots of eigenvalues near 1e-16
            CHECK(rel(correlation_numeric(spectral_numeric(e)), brute) <= 1e-7);
        }
    }
}

TEST_CASE("property: unit trace and non-negativity on an alpha grid") {
    for (double a : grid(0.0, 1.0, 41)) {
        CAPTURE(a);
        const auto closed = eigenvalues_closed(a);
        CHECK(std::abs(closed[0] + closed[1] + closed[2] + closed[3] - 1.0) <= 1e-10);
        for (double l : closed) CHECK(l >= -1e-12);
        const auto dec = spectral_numeric({StateFamily::pascs, a, 4, {}});
        CHECK(std::abs(dec.trace() - 1.0) <= 1e-10);
    }
}

TEST_CASE("property: cross-path equivalence for alpha in [0.05, 1]") {
    for (double a : grid(0.05, 1.0, 20)) {
        CAPTURE(a);
        const auto dec = spectral_numeric({StateFamily::pascs, a, 4, {}});
        const auto closed = eigenvalues_closed(a);
        for (std::size_t k = 0; k < 4; ++k) CHECK(rel(dec.eigenvalues[k], closed[k]) <= 1e-10);
        CHECK(rel(correlation_numeric(dec), correlation_z4_closed(a)) <= 1e-8);
    }
}

TEST_CASE("property: Z2 <= Z4 <= Z_Gauss on (0, 1]") {
    for (double a : grid(0.02, 1.0, 50)) {
        CAPTURE(a);
        const double z2 = correlation_numeric(spectral_numeric({StateFamily::pascs, a, 2, {}}));
        const double z4 = correlation_z4_closed(a);
        const double zg = correlation_gauss(modulation_variance_pascs_closed(a));
        CHECK(0.0 <= z2);
        CHECK(z2 <= z4);
        CHECK(z4 <= zg);
    }
}

TEST_CASE("small-alpha asymptotics of the correlation gap") {
    const double a = 0.02;
    const double zg = correlation_gauss(modulation_variance_pascs_closed(a));
    const double ratio = (zg - correlation_z4_closed(a)) / (a * a * a);
    const double limit = 4.5 - 4.0 * (3.0 * std::sqrt(2.0) - 4.0);
    CHECK(std::abs(ratio - limit) <= 0.05 * limit);
}
