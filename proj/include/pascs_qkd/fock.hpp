#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace pascs {

using Complex = std::complex<double>;

/// Single-mode state truncated to photon numbers 0..N.
class FockVector {
public:
    FockVector() = default;
    explicit FockVector(std::size_t truncation) : coeffs_(truncation + 1) {}
    explicit FockVector(std::vector<Complex> coeffs);

    std::size_t truncation() const { return coeffs_.size() - 1; }
    std::size_t size() const { return coeffs_.size(); }

    const Complex& operator[](std::size_t k) const { return coeffs_[k]; }
    Complex& operator[](std::size_t k) { return coeffs_[k]; }

    const std::vector<Complex>& coeffs() const { return coeffs_; }

    double norm_squared() const;
    double mean_photon_number() const;
    /// |c_N|^2 / sum |c_k|^2, zero for the null vector.
    double tail_fraction() const;

    bool is_normalized(double tol = 1e-10) const;
    /// Tail criterion for a converged expansion: |c_N|^2 <= 1e-14 * sum |c_k|^2.
    bool is_converged() const;

    FockVector normalized() const;

private:
    std::vector<Complex> coeffs_;
};

Complex inner_product(const FockVector& bra, const FockVector& ket);

enum class StateFamily { pascs, coherent };

const char* to_string(StateFamily family);

struct TruncationPolicy {
    std::size_t initial = 60;
    std::size_t cap = 512;
    bool escalate = true;

    static TruncationPolicy fixed(std::size_t n) { return {n, n, false}; }
};

inline constexpr double kTailTolerance = 1e-14;

/// Coefficients of a a^dagger |eta>, normalized. Throws TruncationError when the
/// top coefficient carries more than kTailTolerance of the weight.
FockVector pascs_coefficients(Complex eta, std::size_t truncation);

FockVector coherent_coefficients(Complex eta, std::size_t truncation);

/// Same as the *_coefficients builders, but starts at policy.initial and doubles N
/// until the tail criterion holds or the cap is reached.
FockVector signal_state(StateFamily family, Complex eta, const TruncationPolicy& policy = {});

/// Smallest power-of-two escalation of policy.initial that resolves |eta| for the family.
std::size_t adequate_truncation(StateFamily family, Complex eta, const TruncationPolicy& policy = {});

FockVector apply_annihilation(const FockVector& v);

/// a^dagger acting on v; the component pushed past N is dropped, and
/// TruncationError is thrown if it is not negligible.
FockVector apply_creation(const FockVector& v);

/// <v| a^dagger a |v>
double number_expectation(const FockVector& v);

}  // namespace pascs
