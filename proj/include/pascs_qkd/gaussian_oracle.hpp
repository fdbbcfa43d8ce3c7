#pragma once

// General-purpose Gaussian-state routines. They know nothing about the
// four-state protocol and serve as an independent check on the closed forms.

#include "pascs_qkd/channel.hpp"

#include <vector>

#include <Eigen/Core>

namespace pascs::oracle {

/// Symplectic eigenvalues (ascending) of a 2n x 2n covariance matrix ordered
/// (x1, p1, x2, p2, ...): the moduli of the eigenvalues of i Omega gamma.
std::vector<double> symplectic_spectrum(const Eigen::MatrixXd& gamma);

double von_neumann_entropy(const Eigen::MatrixXd& gamma);

/// Moore-Penrose pseudo-inverse via complete orthogonal decomposition.
Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& m);

/// Covariance of the remaining modes after homodyning quadrature `measured`:
/// gamma - gamma P (P gamma P)^+ P gamma, with the measured mode removed.
Eigen::MatrixXd condition_on_quadrature(const Eigen::MatrixXd& gamma, Eigen::Index measured);

/// S(AB) - S(A | x_B) for a two-mode state with Bob's x quadrature measured.
double holevo_information(const Eigen::Matrix4d& gamma_ab);

/// Explicit covariance matrix for (V_A, Z) sent through a channel with
/// transmissivity t and input-referred excess noise xi (excess noise adds).
Eigen::Matrix4d two_mode_covariance(double v_a, double z, double t, double xi);

}  // namespace pascs::oracle
