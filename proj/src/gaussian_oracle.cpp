#include "pascs_qkd/gaussian_oracle.hpp"

#include "pascs_qkd/errors.hpp"
#include "pascs_qkd/keyrate.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace pascs::oracle {

std::vector<double> symplectic_spectrum(const Eigen::MatrixXd& gamma) {
    const Eigen::Index dim = gamma.rows();
    if (dim % 2 != 0 || gamma.cols() != dim) throw std::invalid_argument("covariance matrix must be 2n x 2n");
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; i += 2) {
        omega(i, i + 1) = 1.0;
        omega(i + 1, i) = -1.0;
    }
    // eigenvalues of Omega gamma come in pairs +-i nu
    Eigen::EigenSolver<Eigen::MatrixXd> solver(omega * gamma, false);
    if (solver.info() != Eigen::Success) throw NumericalError("symplectic eigensolve failed");
    std::vector<double> moduli;
    for (Eigen::Index i = 0; i < dim; ++i) moduli.push_back(std::abs(solver.eigenvalues()(i)));
    std::sort(moduli.begin(), moduli.end());
    std::vector<double> out;
    for (std::size_t i = 0; i < moduli.size(); i += 2) out.push_back(0.5 * (moduli[i] + moduli[i + 1]));
    return out;
}

double von_neumann_entropy(const Eigen::MatrixXd& gamma) {
    double s = 0.0;
    for (double nu : symplectic_spectrum(gamma)) s += bosonic_entropy(std::max(0.0, 0.5 * (nu - 1.0)));
    return s;
}

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& m) {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(m);
    return cod.pseudoInverse();
}

Eigen::MatrixXd condition_on_quadrature(const Eigen::MatrixXd& gamma, Eigen::Index measured) {
    const Eigen::Index dim = gamma.rows();
    Eigen::MatrixXd proj = Eigen::MatrixXd::Zero(dim, dim);
    proj(measured, measured) = 1.0;
    const Eigen::MatrixXd cond = gamma - gamma * proj * pseudo_inverse(proj * gamma * proj) * proj * gamma;

    // drop the measured mode (both of its quadratures)
    const Eigen::Index mode = measured / 2;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < dim; ++i)
        if (i / 2 != mode) keep.push_back(i);
    Eigen::MatrixXd out(static_cast<Eigen::Index>(keep.size()), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t r = 0; r < keep.size(); ++r)
        for (std::size_t c = 0; c < keep.size(); ++c)
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = cond(keep[r], keep[c]);
    return out;
}

double holevo_information(const Eigen::Matrix4d& gamma_ab) {
    return von_neumann_entropy(gamma_ab) - von_neumann_entropy(condition_on_quadrature(gamma_ab, 2));
}

Eigen::Matrix4d two_mode_covariance(double v_a, double z, double t, double xi) {
    const double v = 1.0 + v_a;
    const double b = t * v_a + 1.0 + t * xi;
    const double c = std::sqrt(t) * z;
    Eigen::Matrix4d m;
    m << v, 0, c, 0,
         0, v, 0, -c,
         c, 0, b, 0,
         0, -c, 0, b;
    return m;
}

}  // namespace pascs::oracle
