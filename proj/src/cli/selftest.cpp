#include "pascs_qkd/cli.hpp"

#include "pascs_qkd/gaussian_oracle.hpp"
#include "pascs_qkd/modulation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <random>

#include <Eigen/Dense>
#include <fmt/format.h>

namespace pascs::cli {

namespace {

enum class Status { pass, fail, flag };

struct CheckResult {
    Status status = Status::pass;
    std::string detail;
};

double rel_diff(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

std::vector<double> alpha_grid(const RunConfig& cfg) {
    if (cfg.alpha) return {*cfg.alpha};
    return {0.05, 0.13, 0.25, 0.5, 0.75, 1.0};
}

CheckResult check_truncation(const RunConfig& cfg) {
    for (double a : alpha_grid(cfg)) {
        for (auto family : {StateFamily::pascs, StateFamily::coherent}) {
            const auto n = adequate_truncation(family, a, cfg.truncation);
            (void)n;
        }
    }
    return {Status::pass, fmt::format("tail weight <= 1e-14 for alpha in grid (policy N={}{})",
                                      cfg.truncation.initial, cfg.truncation.escalate ? ", escalating" : ", fixed")};
}

CheckResult check_eigenvalues(const RunConfig& cfg) {
    double worst = 0.0;
    for (double a : alpha_grid(cfg)) {
        const auto closed = eigenvalues_closed(a);
        const auto numeric = spectral_numeric({StateFamily::pascs, a, 4, cfg.truncation});
        for (std::size_t k = 0; k < 4; ++k) worst = std::max(worst, rel_diff(closed[k], numeric.eigenvalues[k]));
    }
    return {worst <= 1e-10 ? Status::pass : Status::fail, fmt::format("max relative difference {:.2e} (tol 1e-10)", worst)};
}

CheckResult check_trace_and_support(const RunConfig& cfg) {
    double worst_trace = 0.0;
    double worst_leak = 0.0;
    for (double a : alpha_grid(cfg)) {
        const auto closed = eigenvalues_closed(a);
        worst_trace = std::max(worst_trace, std::abs(closed[0] + closed[1] + closed[2] + closed[3] - 1.0));
        const auto numeric = spectral_numeric({StateFamily::pascs, a, 4, cfg.truncation});
        worst_trace = std::max(worst_trace, std::abs(numeric.trace() - 1.0));
        for (std::size_t k = 0; k < 4; ++k) {
            const auto& phi = numeric.eigenvectors[k];
            for (std::size_t n = 0; n < phi.size(); ++n) {
                if (n % 4 != k) worst_leak = std::max(worst_leak, std::norm(phi[n]));
            }
        }
    }
    const bool ok = worst_trace <= 1e-10 && worst_leak <= 1e-12;
    return {ok ? Status::pass : Status::fail,
            fmt::format("|sum lambda - 1| {:.2e}, off-class weight {:.2e}", worst_trace, worst_leak)};
}

CheckResult check_correlation(const RunConfig& cfg) {
    double worst = 0.0;
    for (double a : alpha_grid(cfg)) {
        const double closed = correlation_z4_closed(a);
        const double numeric = correlation_numeric(spectral_numeric({StateFamily::pascs, a, 4, cfg.truncation}));
        worst = std::max(worst, rel_diff(closed, numeric));
    }
    return {worst <= 1e-8 ? Status::pass : Status::fail, fmt::format("max relative difference {:.2e} (tol 1e-8)", worst)};
}

CheckResult check_ordering(const RunConfig& cfg) {
    for (double a : alpha_grid(cfg)) {
        const double z2 = correlation_numeric(spectral_numeric({StateFamily::pascs, a, 2, cfg.truncation}));
        const double z4 = correlation_z4_closed(a);
        const double zg = correlation_gauss(modulation_variance_pascs_closed(a));
        if (!(z2 <= z4 && z4 <= zg)) {
            return {Status::fail, fmt::format("alpha={}: Z2={} Z4={} ZG={}", a, z2, z4, zg)};
        }
    }
    return {Status::pass, "Z2 <= Z4 <= Z_Gauss"};
}

CheckResult check_holevo(const RunConfig&) {
    std::mt19937_64 rng(20240617);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double worst = 0.0;
    const int samples = 200;
    for (int i = 0; i < samples; ++i) {
        const double v_a = 0.01 + 4.0 * u01(rng);
        const double t = 1e-4 + (1.0 - 1e-4) * u01(rng);
        const double xi = 0.1 * u01(rng);
        const double z = correlation_gauss(v_a) * u01(rng);
        const auto closed = holevo_bound(v_a, z, t, xi);
        const Eigen::Matrix4d gamma = oracle::two_mode_covariance(v_a, z, t, xi);
        const auto spectrum = oracle::symplectic_spectrum(gamma);
        const double nu3 = std::sqrt(oracle::condition_on_quadrature(gamma, 2).determinant());
        worst = std::max({worst, rel_diff(closed.nu[0], spectrum[1]), rel_diff(closed.nu[1], spectrum[0]),
                          rel_diff(closed.nu[2], nu3),
                          std::abs(closed.s_be - oracle::holevo_information(gamma))});
    }
    return {worst <= 1e-8 ? Status::pass : Status::fail,
            fmt::format("{} random states, max deviation {:.2e} (tol 1e-8)", samples, worst)};
}

CheckResult check_ideal_channel(const RunConfig&) {
    double worst = 0.0;
    for (double v_a : {0.05, 0.13, 0.5, 2.0}) {
        worst = std::max(worst, std::abs(holevo_bound(v_a, correlation_gauss(v_a), 1.0, 0.0).s_be));
    }
    return {worst <= 1e-9 ? Status::pass : Status::fail, fmt::format("|S_BE| {:.2e} at T=1, xi=0, Z=Z_Gauss", worst)};
}

CheckResult check_sign_convention(const RunConfig& cfg) {
    // gamma_B = T V_A + 1 -/+ T xi drops below the vacuum floor iff the literal
    // minus sign is used and xi > V_A.
    const double v_a = modulation_variance_pascs_closed(cfg.alpha.value_or(0.13));
    if (cfg.conventions.sign == SignConvention::standard) {
        for (double t : {1e-6, 0.01, 0.5, 1.0}) {
            for (double xi : {0.0, 0.01, 0.5}) {
                ChannelParams ch;
                ch.transmissivity = t;
                ch.excess_noise = xi;
                const auto cm = propagate(v_a, 0.0, ch, {1.0, 1.0}, SignConvention::standard);
                if (cm.gamma_b(0, 0) < 1.0) return {Status::fail, "gamma_B below vacuum floor"};
            }
        }
        return {Status::pass, "gamma_B >= 1 on the test grid"};
    }
    return {Status::flag, fmt::format("paper-literal signs: gamma_B < 1 (unphysical) whenever xi > V_A = {:.6g}, "
                                      "for every T > 0",
                                      v_a)};
}

}  // namespace

int selftest(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const std::vector<std::pair<std::string, std::function<CheckResult(const RunConfig&)>>> checks{
        {"truncation-adequacy", check_truncation},
        {"eigenvalues-closed-vs-numeric", check_eigenvalues},
        {"unit-trace-and-mod4-support", check_trace_and_support},
        {"z4-closed-vs-purification", check_correlation},
        {"correlation-ordering", check_ordering},
        {"holevo-vs-symplectic-oracle", check_holevo},
        {"ideal-channel-no-leak", check_ideal_channel},
        {"sign-convention", check_sign_convention},
    };

    std::vector<std::string> failed;
    out << fmt::format("{:<32} {:<6} {}\n", "check", "status", "detail");
    for (const auto& [name, fn] : checks) {
        CheckResult r;
        try {
            r = fn(cfg);
        } catch (const std::exception& e) {
            r = {Status::fail, e.what()};
        }
        const char* label = r.status == Status::pass ? "PASS" : (r.status == Status::fail ? "FAIL" : "FLAG");
        out << fmt::format("{:<32} {:<6} {}\n", name, label, r.detail);
        if (r.status == Status::fail) failed.push_back(name);
    }
    if (!failed.empty()) {
        for (const auto& name : failed) err << "selftest failed: " << name << "\n";
        return kExitInternal;
    }
    return kExitOk;
}

}  // namespace pascs::cli
