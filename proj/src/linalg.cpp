#include "zenograv/linalg.hpp"

#include <array>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace zenograv {
namespace {

using Complex = std::complex<double>;

template <std::size_t M>
CMatrix pade(const CMatrix& a, const std::array<double, M + 1>& b) {
  const auto n = a.rows();
  const CMatrix id = CMatrix::Identity(n, n);
  const CMatrix a2 = a * a;
  CMatrix u_even = b[1] * id;
  CMatrix v = b[0] * id;
  CMatrix power = id;
  for (std::size_t k = 2; k <= M; k += 2) {
    power = power * a2;
    u_even += b[k + 1] * power;
    v += b[k] * power;
  }
  const CMatrix u = a * u_even;
  return (v - u).partialPivLu().solve(v + u);
}

CMatrix pade13(const CMatrix& a) {
  static constexpr std::array<double, 14> b = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
      1187353796428800.0,  129060195264000.0,   10559470521600.0,
      670442572800.0,      33522128640.0,       1323241920.0,
      40840800.0,          960960.0,            16380.0,
      182.0,               1.0};
  const auto n = a.rows();
  const CMatrix id = CMatrix::Identity(n, n);
  const CMatrix a2 = a * a;
  const CMatrix a4 = a2 * a2;
  const CMatrix a6 = a4 * a2;
  const CMatrix u =
      a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 +
           b[5] * a4 + b[3] * a2 + b[1] * id);
  const CMatrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 +
                    b[4] * a4 + b[2] * a2 + b[0] * id;
  return (v - u).partialPivLu().solve(v + u);
}

}  // namespace

CMatrix expm(const CMatrix& a) {
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  if (norm1 <= 1.495585217958292e-2) {
    return pade<3>(a, {120.0, 60.0, 12.0, 1.0});
  }
  if (norm1 <= 2.539398330063230e-1) {
    return pade<5>(a, {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0});
  }
  if (norm1 <= 9.504178996162932e-1) {
    return pade<7>(a, {17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0,
                       1512.0, 56.0, 1.0});
  }
  if (norm1 <= 2.097847961257068) {
    return pade<9>(a, {17643225600.0, 8821612800.0, 2075673600.0,
                       302702400.0, 30270240.0, 2162160.0, 110880.0, 3960.0,
                       90.0, 1.0});
  }
  constexpr double theta13 = 5.371920351148152;
  int squarings = 0;
  if (norm1 > theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
  }
  CMatrix r = pade13(a / std::ldexp(1.0, squarings));
  for (int i = 0; i < squarings; ++i) r = r * r;
  return r;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

double operator_norm(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(a);
  return svd.singularValues()(0);
}

double trace_distance(const CMatrix& a, const CMatrix& b) {
  const CMatrix diff = a - b;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (diff + diff.adjoint()),
                                            Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

bool is_hermitian(const CMatrix& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  const double scale = std::max(operator_norm(a), 1e-300);
  return operator_norm(a - a.adjoint()) <= rel_tol * scale;
}

}  // namespace zenograv
