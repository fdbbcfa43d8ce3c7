#include "pascs_qkd/fock.hpp"

#include "pascs_qkd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace pascs {

namespace {

void require_finite(Complex eta) {
    if (!std::isfinite(eta.real()) || !std::isfinite(eta.imag())) {
        throw std::invalid_argument("amplitude must be finite");
    }
}

void require_converged(const FockVector& v, Complex eta) {
    if (!v.is_converged()) {
        throw TruncationError(fmt::format(
            "cutoff N={} too small for |eta|={:.6g}: tail fraction {:.3e} exceeds {:.0e}",
            v.truncation(), std::abs(eta), v.tail_fraction(), kTailTolerance));
    }
}

}  // namespace

FockVector::FockVector(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) {
        throw std::invalid_argument("FockVector needs at least the vacuum component");
    }
}

double FockVector::norm_squared() const {
    double s = 0.0;
    for (const auto& c : coeffs_) s += std::norm(c);
    return s;
}

double FockVector::mean_photon_number() const {
    double s = 0.0;
    for (std::size_t k = 1; k < coeffs_.size(); ++k) s += static_cast<double>(k) * std::norm(coeffs_[k]);
    return s;
}

double FockVector::tail_fraction() const {
    const double total = norm_squared();
    if (total == 0.0) return 0.0;
    return std::norm(coeffs_.back()) / total;
}

bool FockVector::is_normalized(double tol) const {
    return std::abs(norm_squared() - 1.0) <= tol;
}

bool FockVector::is_converged() const {
    return tail_fraction() <= kTailTolerance;
}

FockVector FockVector::normalized() const {
    const double n = std::sqrt(norm_squared());
    if (n == 0.0) throw std::domain_error("cannot normalize the zero vector");
    FockVector out = *this;
    for (auto& c : out.coeffs_) c /= n;
    return out;
}

Complex inner_product(const FockVector& bra, const FockVector& ket) {
    const std::size_t n = std::min(bra.size(), ket.size());
    Complex s{0.0, 0.0};
    for (std::size_t k = 0; k < n; ++k) s += std::conj(bra[k]) * ket[k];
    return s;
}

const char* to_string(StateFamily family) {
    switch (family) {
        case StateFamily::pascs: return "pascs";
        case StateFamily::coherent: return "coherent";
    }
    return "unknown";
}

// c_{k+1}/c_k = eta (k+2) / (k+1)^{3/2}
FockVector pascs_coefficients(Complex eta, std::size_t truncation) {
    require_finite(eta);
    const double r2 = std::norm(eta);
    FockVector v(truncation);
    v[0] = std::exp(-0.5 * r2) / std::sqrt(1.0 + 3.0 * r2 + r2 * r2);
    for (std::size_t k = 0; k < truncation; ++k) {
        const double kk = static_cast<double>(k);
        v[k + 1] = v[k] * eta * ((kk + 2.0) / ((kk + 1.0) * std::sqrt(kk + 1.0)));
    }
    require_converged(v, eta);
    return v;
}

// c_{k+1}/c_k = eta / sqrt(k+1)
FockVector coherent_coefficients(Complex eta, std::size_t truncation) {
    require_finite(eta);
    FockVector v(truncation);
    v[0] = std::exp(-0.5 * std::norm(eta));
    for (std::size_t k = 0; k < truncation; ++k) {
        v[k + 1] = v[k] * eta / std::sqrt(static_cast<double>(k + 1));
    }
    require_converged(v, eta);
    return v;
}

FockVector signal_state(StateFamily family, Complex eta, const TruncationPolicy& policy) {
    std::size_t n = policy.initial;
    for (;;) {
        try {
            return family == StateFamily::pascs ? pascs_coefficients(eta, n)
                                                : coherent_coefficients(eta, n);
        } catch (const TruncationError&) {
            if (!policy.escalate || n >= policy.cap) throw;
            n = std::min(2 * std::max<std::size_t>(n, 1), policy.cap);
        }
    }
}

std::size_t adequate_truncation(StateFamily family, Complex eta, const TruncationPolicy& policy) {
    return signal_state(family, eta, policy).truncation();
}

FockVector apply_annihilation(const FockVector& v) {
    FockVector out(v.truncation());
    for (std::size_t k = 0; k + 1 < v.size(); ++k) {
        out[k] = std::sqrt(static_cast<double>(k + 1)) * v[k + 1];
    }
    return out;
}

FockVector apply_creation(const FockVector& v) {
    const std::size_t n = v.truncation();
    const double lost = static_cast<double>(n + 1) * std::norm(v[n]);
    if (lost > kTailTolerance * std::max(v.norm_squared(), 1e-300)) {
        throw TruncationError(fmt::format(
            "creation operator pushes weight {:.3e} past cutoff N={}", lost, n));
    }
    FockVector out(n);
    for (std::size_t k = 1; k <= n; ++k) {
        out[k] = std::sqrt(static_cast<double>(k)) * v[k - 1];
    }
    return out;
}

double number_expectation(const FockVector& v) {
    const FockVector lowered = apply_annihilation(v);
    return inner_product(lowered, lowered).real();
}

}  // namespace pascs
