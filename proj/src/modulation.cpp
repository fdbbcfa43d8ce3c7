#include "pascs_qkd/modulation.hpp"

#include "pascs_qkd/errors.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>
#include <fmt/format.h>

namespace pascs {

namespace {

void require_alpha(double alpha) {
    if (!std::isfinite(alpha)) throw std::invalid_argument("alpha must be finite");
    if (alpha < 0.0) throw std::invalid_argument("alpha must be non-negative");
}

// cosh x - cos x and sinh x - sin x lose all digits for small x if evaluated
// directly; their Taylor series have only positive terms.
double cosh_minus_cos(double x) {
    if (x >= 1.0) return std::cosh(x) - std::cos(x);
    double term = x * x / 2.0;  // x^2/2!
    double sum = 0.0;
    for (int m = 2; term > 1e-20 * sum || sum == 0.0; m += 4) {
        sum += term;
        term *= x * x * x * x / ((m + 1.0) * (m + 2.0) * (m + 3.0) * (m + 4.0));
        if (term == 0.0) break;
    }
    return 2.0 * sum;
}

double sinh_minus_sin(double x) {
    if (x >= 1.0) return std::sinh(x) - std::sin(x);
    double term = x * x * x / 6.0;  // x^3/3!
    double sum = 0.0;
    for (int m = 3; term > 1e-20 * sum || sum == 0.0; m += 4) {
        sum += term;
        term *= x * x * x * x / ((m + 1.0) * (m + 2.0) * (m + 3.0) * (m + 4.0));
        if (term == 0.0) break;
    }
    return 2.0 * sum;
}

struct TrigCombos {
    double cp, cm, sp, sm;
};

TrigCombos trig_combos(double x) {
    return {std::cosh(x) + std::cos(x), cosh_minus_cos(x), std::sinh(x) + std::sin(x),
            sinh_minus_sin(x)};
}

double pascs_norm(double x) { return 1.0 + 3.0 * x + x * x; }

}  // namespace

std::vector<Complex> ModulationEnsemble::phases() const {
    std::vector<Complex> out;
    out.reserve(static_cast<std::size_t>(num_states));
    for (int j = 0; j < num_states; ++j) {
        if (num_states == 4) {
            // exact i^j, no rounding in the phase factor
            static constexpr std::array<Complex, 4> kQuarter{Complex{1, 0}, Complex{0, 1},
                                                             Complex{-1, 0}, Complex{0, -1}};
            out.push_back(kQuarter[static_cast<std::size_t>(j)]);
        } else if (num_states == 2) {
            out.push_back(j == 0 ? Complex{1, 0} : Complex{-1, 0});
        } else {
            out.push_back(std::polar(1.0, 2.0 * std::numbers::pi * j / num_states));
        }
    }
    return out;
}

void ModulationEnsemble::validate() const {
    require_alpha(amplitude);
    if (num_states != 2 && num_states != 4) {
        throw std::invalid_argument(fmt::format("num_states must be 2 or 4, got {}", num_states));
    }
}

std::vector<FockVector> ModulationEnsemble::signal_states() const {
    validate();
    const std::size_t n = adequate_truncation(family, amplitude, truncation);
    const auto fixed = TruncationPolicy::fixed(n);
    std::vector<FockVector> out;
    for (const auto& phase : phases()) {
        out.push_back(signal_state(family, amplitude * phase, fixed));
    }
    return out;
}

double SpectralDecomposition::trace() const {
    double s = 0.0;
    for (double l : eigenvalues) s += l;
    return s;
}

std::array<double, 4> eigenvalues_series(double alpha) {
    require_alpha(alpha);
    const double x = alpha * alpha;
    std::array<double, 4> lambda{};
    // t_j = e^{-x}/norm * x^j ((j+1)!)^2 / (j!)^3
    double term = std::exp(-x) / pascs_norm(x);
    double total = 0.0;
    for (int j = 0; j < 4000; ++j) {
        lambda[static_cast<std::size_t>(j % 4)] += term;
        total += term;
        const double jj = j;
        term *= x * (jj + 2.0) * (jj + 2.0) / ((jj + 1.0) * (jj + 1.0) * (jj + 1.0));
        if (term == 0.0 || (j > 8 && term < 1e-19 * total)) break;
    }
    return lambda;
}

std::array<double, 4> eigenvalues_closed(double alpha) {
    require_alpha(alpha);
    if (alpha < kSmallAlphaThreshold) return eigenvalues_series(alpha);
    const double x = alpha * alpha;
    const double x2 = x * x;
    const auto [cp, cm, sp, sm] = trig_combos(x);
    const double pre = std::exp(-x) / (2.0 * pascs_norm(x));
    return {
        pre * (3.0 * x * sm + cp + x2 * cm),
        pre * (3.0 * x * cp + sp + x2 * sm),
        pre * (3.0 * x * sp + cm + x2 * cp),
        pre * (3.0 * x * cm + sm + x2 * sp),
    };
}

CorrelationTerms correlation_terms(double alpha) {
    require_alpha(alpha);
    const double x = alpha * alpha;
    const double x2 = x * x;
    const auto [cp, cm, sp, sm] = trig_combos(x);
    return {
        x2 * cm + 2.0 * cp + 4.0 * x * sm,
        4.0 * x * cp + x2 * sm + 2.0 * sp,
        x2 * cp + 2.0 * cm + 4.0 * x * sp,
        4.0 * x * cm + x2 * sp + 2.0 * sm,
    };
}

SpectralDecomposition spectral_numeric(const ModulationEnsemble& ensemble) {
    const auto states = ensemble.signal_states();
    const std::size_t dim = states.front().size();
    const int m = ensemble.num_states;

    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim),
                                                  static_cast<Eigen::Index>(dim));
    for (const auto& s : states) {
        Eigen::Map<const Eigen::VectorXcd> v(s.coeffs().data(), static_cast<Eigen::Index>(dim));
        rho += ensemble.probability() * (v * v.adjoint());
    }

    // Phase averaging over the m-th roots of unity kills every element that
    // couples different residue classes.
    double off_block = 0.0;
    for (Eigen::Index i = 0; i < rho.rows(); ++i) {
        for (Eigen::Index j = 0; j < rho.cols(); ++j) {
            if ((i - j) % m != 0) off_block = std::max(off_block, std::abs(rho(i, j)));
        }
    }
    if (off_block > 1e-12) {
        throw NumericalError(fmt::format("density operator not block diagonal (|off-block| = {:.3e})", off_block));
    }

    SpectralDecomposition out;
    out.block_period = m;
    for (int k = 0; k < m; ++k) {
        std::vector<Eigen::Index> idx;
        for (auto n = static_cast<Eigen::Index>(k); n < static_cast<Eigen::Index>(dim); n += m) idx.push_back(n);
        FockVector phi(dim - 1);
        if (idx.empty()) {
            out.eigenvalues.push_back(0.0);
            out.eigenvectors.push_back(phi);
            continue;
        }
        const auto b = static_cast<Eigen::Index>(idx.size());
        Eigen::MatrixXcd block(b, b);
        for (Eigen::Index r = 0; r < b; ++r)
            for (Eigen::Index c = 0; c < b; ++c) block(r, c) = rho(idx[r], idx[c]);

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(block);
        if (solver.info() != Eigen::Success) {
            throw NumericalError(fmt::format("eigensolver did not converge for residue class {}", k));
        }
        // ascending order: the dominant (and, up to rounding, only) eigenpair is last
        const double lambda = std::max(solver.eigenvalues()(b - 1), 0.0);
        const Eigen::VectorXcd vec = solver.eigenvectors().col(b - 1);
        for (Eigen::Index r = 0; r < b; ++r) phi[static_cast<std::size_t>(idx[r])] = vec(r);
        out.eigenvalues.push_back(lambda);
        out.eigenvectors.push_back(std::move(phi));
    }
    return out;
}

double modulation_variance(const ModulationEnsemble& ensemble) {
    ensemble.validate();
    return 2.0 * signal_state(ensemble.family, ensemble.amplitude, ensemble.truncation).mean_photon_number();
}

double modulation_variance_pascs_closed(double alpha) {
    require_alpha(alpha);
    const double x = alpha * alpha;
    return 2.0 * x * (x * x + 5.0 * x + 4.0) / pascs_norm(x);
}

double correlation_z4_closed(double alpha) {
    require_alpha(alpha);
    if (alpha == 0.0) return 0.0;
    if (alpha < kSmallAlphaThreshold) {
        return correlation_numeric(spectral_numeric({StateFamily::pascs, alpha, 4, {}}));
    }
    const double x = alpha * alpha;
    const auto l = eigenvalues_closed(alpha);
    const auto t = correlation_terms(alpha);
    const double n = pascs_norm(x);
    const double pre = std::exp(-2.0 * x) * x / (2.0 * n * n);
    return pre * (t.a * t.a / std::sqrt(l[0] * l[1]) + t.b * t.b / std::sqrt(l[1] * l[2]) +
                  t.c * t.c / std::sqrt(l[2] * l[3]) + t.d * t.d / std::sqrt(l[3] * l[0]));
}

// Z = 2 sum_k sqrt(lambda_{k-1} lambda_k) |<phi_{k-1}| a |phi_k>|^2 ; the ladder
// operator lowers the residue class by one, so no other pairs contribute.
double correlation_numeric(const SpectralDecomposition& decomp) {
    const int m = decomp.block_period;
    double z = 0.0;
    for (int k = 0; k < m; ++k) {
        const int prev = (k + m - 1) % m;
        const auto lk = decomp.eigenvalues[static_cast<std::size_t>(k)];
        const auto lp = decomp.eigenvalues[static_cast<std::size_t>(prev)];
        if (lk <= 0.0 || lp <= 0.0) continue;
        const Complex amp = inner_product(decomp.eigenvectors[static_cast<std::size_t>(prev)],
                                          apply_annihilation(decomp.eigenvectors[static_cast<std::size_t>(k)]));
        z += std::sqrt(lk * lp) * std::norm(amp);
    }
    return 2.0 * z;
}

double correlation_gauss(double v_a) {
    if (!(v_a >= 0.0)) throw std::invalid_argument("modulation variance must be non-negative");
    return std::sqrt(v_a * (v_a + 2.0));
}

}  // namespace pascs
