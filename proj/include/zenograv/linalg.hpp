#pragma once

#include <Eigen/Dense>

namespace zenograv {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// Matrix exponential by scaling and squaring with diagonal Pade
// approximants of degree 3..13 (Higham 2005 backward-error thresholds).
CMatrix expm(const CMatrix& a);

// Kronecker product a (x) b, with b's index running fastest.
CMatrix kron(const CMatrix& a, const CMatrix& b);

// Largest singular value.
double operator_norm(const CMatrix& a);

// 1/2 sum |eig(a - b)| for Hermitian a, b.
double trace_distance(const CMatrix& a, const CMatrix& b);

bool is_hermitian(const CMatrix& a, double rel_tol = 1e-12);

}  // namespace zenograv
