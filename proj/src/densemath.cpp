// Copyright 2026 The dissiprep Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dissiprep/densemath.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include <lapacke.h>

namespace dissiprep {

namespace {

bool all_finite(const ComplexMatrix& m) {
  return m.allFinite();
}

double one_norm(const ComplexMatrix& m) {
  return m.cwiseAbs().colwise().sum().maxCoeff();
}

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw DimensionError(std::string(what) + ": matrix must be square, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(ComplexMatrix m) : mat_(std::move(m)) {
  require_square(mat_, "DensityMatrix");
  if (mat_.size() == 0) throw DimensionError("DensityMatrix: empty matrix");
  if (!all_finite(mat_)) throw DomainError("DensityMatrix: non-finite entries");
  const double herm = hermiticity_defect(mat_);
  if (herm > tol::kHermitian) {
    throw DomainError("DensityMatrix: not Hermitian (defect " + std::to_string(herm) + ")");
  }
  const Complex tr = mat_.trace();
  if (std::abs(tr - 1.0) > tol::kTrace) {
    throw DomainError("DensityMatrix: trace " + std::to_string(tr.real()) + " != 1");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(mat_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < tol::kPsdFloor) {
    throw DomainError("DensityMatrix: negative eigenvalue " +
                      std::to_string(es.eigenvalues().minCoeff()));
  }
}

DensityMatrix DensityMatrix::pure(const ComplexVector& psi) {
  const double n = psi.norm();
  if (!(n > 0.0)) throw DomainError("DensityMatrix::pure: zero vector");
  const ComplexVector u = psi / n;
  ComplexMatrix rho = u * u.adjoint();
  return DensityMatrix(hermitian_part(rho), Unchecked{});
}

DensityMatrix DensityMatrix::basis_state(Index dim, Index k) {
  if (k < 0 || k >= dim) throw DimensionError("basis_state: index out of range");
  ComplexMatrix rho = ComplexMatrix::Zero(dim, dim);
  rho(k, k) = 1.0;
  return DensityMatrix(std::move(rho), Unchecked{});
}

DensityMatrix DensityMatrix::maximally_mixed(Index dim) {
  if (dim <= 0) throw DimensionError("maximally_mixed: dimension must be positive");
  return DensityMatrix(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim), Unchecked{});
}

DensityMatrix DensityMatrix::project(const ComplexMatrix& m) {
  require_square(m, "DensityMatrix::project");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(m));
  RealVector w = es.eigenvalues().cwiseMax(0.0);
  const double s = w.sum();
  if (!(s > 0.0)) throw DomainError("DensityMatrix::project: no positive spectral weight");
  w /= s;
  ComplexMatrix rho = es.eigenvectors() * w.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
  return DensityMatrix(hermitian_part(rho), Unchecked{});
}

DensityMatrix DensityMatrix::normalized(const ComplexMatrix& m) {
  require_square(m, "DensityMatrix::normalized");
  ComplexMatrix h = hermitian_part(m);
  const double tr = h.trace().real();
  if (!(tr > 0.0)) throw DomainError("DensityMatrix::normalized: nonpositive trace");
  h /= tr;
  return DensityMatrix(std::move(h), Unchecked{});
}

// ---------------------------------------------------------------------------
// Tensor operations

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b, std::size_t entry_cap) {
  const auto rows = static_cast<std::size_t>(a.rows()) * static_cast<std::size_t>(b.rows());
  const auto cols = static_cast<std::size_t>(a.cols()) * static_cast<std::size_t>(b.cols());
  if (rows != 0 && cols > entry_cap / rows) {
    throw DimensionError("kron: result of " + std::to_string(rows) + "x" + std::to_string(cols) +
                         " exceeds the entry cap");
  }
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, std::span<const int> dims,
                            std::span<const int> keep) {
  require_square(m, "partial_trace");
  const int n = static_cast<int>(dims.size());
  Index total = 1;
  for (int d : dims) {
    if (d <= 0) throw DimensionError("partial_trace: subsystem dimensions must be positive");
    total *= d;
  }
  if (total != m.rows()) {
    throw DimensionError("partial_trace: product of dims " + std::to_string(total) +
                         " does not match matrix dimension " + std::to_string(m.rows()));
  }
  std::vector<bool> kept(n, false);
  int prev = -1;
  for (int k : keep) {
    if (k < 0 || k >= n || k <= prev) {
      throw DimensionError("partial_trace: keep indices must be ascending and in range");
    }
    kept[k] = true;
    prev = k;
  }

  // Stride of subsystem s in the flat index (subsystem 0 most significant).
  std::vector<Index> stride(n, 1);
  for (int s = n - 2; s >= 0; --s) stride[s] = stride[s + 1] * dims[s + 1];

  auto offsets = [&](bool want_kept) {
    std::vector<Index> offs{0};
    for (int s = 0; s < n; ++s) {
      if (kept[s] != want_kept) continue;
      std::vector<Index> next;
      next.reserve(offs.size() * dims[s]);
      for (Index base : offs) {
        for (int digit = 0; digit < dims[s]; ++digit) next.push_back(base + digit * stride[s]);
      }
      offs = std::move(next);
    }
    return offs;
  };
  const std::vector<Index> keep_off = offsets(true);
  const std::vector<Index> trace_off = offsets(false);

  const auto dk = static_cast<Index>(keep_off.size());
  ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
  for (Index c = 0; c < dk; ++c) {
    for (Index r = 0; r < dk; ++r) {
      Complex acc = 0.0;
      for (Index t : trace_off) acc += m(keep_off[r] + t, keep_off[c] + t);
      out(r, c) = acc;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Decompositions

EigenDecomposition eig_hermitian(const ComplexMatrix& h) {
  require_square(h, "eig_hermitian");
  if (!all_finite(h)) throw DomainError("eig_hermitian: non-finite entries");
  const double scale = std::max(1.0, max_abs(h));
  if (hermiticity_defect(h) > tol::kHermitianInput * scale) {
    throw DomainError("eig_hermitian: input is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(h));
  if (es.info() != Eigen::Success) throw DomainError("eig_hermitian: solver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

SVDResult svd(const ComplexMatrix& t) {
  if (!all_finite(t)) throw DomainError("svd: non-finite entries");
  Eigen::BDCSVD<ComplexMatrix> s(t, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return {s.singularValues(), s.matrixU(), s.matrixV()};
}

GeneralEigen eig_general(const ComplexMatrix& m, bool vectors) {
  require_square(m, "eig_general");
  if (!all_finite(m)) throw DomainError("eig_general: non-finite entries");
  const auto n = static_cast<lapack_int>(m.rows());
  ComplexMatrix work = m;
  GeneralEigen out;
  out.eigenvalues.resize(n);
  if (vectors) out.right_vectors.resize(n, n);
  auto* a = reinterpret_cast<lapack_complex_double*>(work.data());
  auto* w = reinterpret_cast<lapack_complex_double*>(out.eigenvalues.data());
  auto* vr = vectors ? reinterpret_cast<lapack_complex_double*>(out.right_vectors.data()) : nullptr;
  const lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', vectors ? 'V' : 'N', n, a, n, w,
                                        nullptr, 1, vr, vectors ? n : 1);
  if (info != 0) throw DomainError("eig_general: zgeev failed with info " + std::to_string(info));
  return out;
}

// ---------------------------------------------------------------------------
// Matrix exponential

namespace {

constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};

// Low-degree approximants: degree m uses coefficients b_0..b_m.
constexpr std::array<double, 4> kPade3 = {120.0, 60.0, 12.0, 1.0};
constexpr std::array<double, 6> kPade5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr std::array<double, 8> kPade7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                          25200.0,    1512.0,    56.0,      1.0};
constexpr std::array<double, 10> kPade9 = {17643225600.0, 8821612800.0, 2075673600.0,
                                           302702400.0,   30270240.0,   2162160.0,
                                           110880.0,      3960.0,       90.0,
                                           1.0};

constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068e0;
constexpr double kTheta13 = 5.371920351148152e0;

template <std::size_t N>
ComplexMatrix pade_low(const ComplexMatrix& a, const std::array<double, N>& b) {
  const Index n = a.rows();
  const ComplexMatrix ident = ComplexMatrix::Identity(n, n);
  const ComplexMatrix a2 = a * a;
  ComplexMatrix power = ident;
  ComplexMatrix u_inner = ComplexMatrix::Zero(n, n);
  ComplexMatrix v = ComplexMatrix::Zero(n, n);
  for (std::size_t k = 0; k + 1 < N; k += 2) {
    v += b[k] * power;
    u_inner += b[k + 1] * power;
    power = power * a2;
  }
  ComplexMatrix u = a * u_inner;
  ComplexMatrix q = v - u;
  v += u;
  return q.partialPivLu().solve(v);
}

ComplexMatrix pade13(const ComplexMatrix& a) {
  const Index n = a.rows();
  const auto& b = kPade13;
  ComplexMatrix a2(n, n), a4(n, n), a6(n, n);
  a2.noalias() = a * a;
  a4.noalias() = a2 * a2;
  a6.noalias() = a4 * a2;

  ComplexMatrix tmp = b[13] * a6 + b[11] * a4 + b[9] * a2;
  ComplexMatrix inner(n, n);
  inner.noalias() = a6 * tmp;
  inner += b[7] * a6 + b[5] * a4 + b[3] * a2;
  inner.diagonal().array() += b[1];
  ComplexMatrix u(n, n);
  u.noalias() = a * inner;

  tmp = b[12] * a6 + b[10] * a4 + b[8] * a2;
  ComplexMatrix v(n, n);
  v.noalias() = a6 * tmp;
  v += b[6] * a6 + b[4] * a4 + b[2] * a2;
  v.diagonal().array() += b[0];

  a2.resize(0, 0);
  a4.resize(0, 0);
  a6.resize(0, 0);
  tmp.resize(0, 0);
  inner.resize(0, 0);

  ComplexMatrix q = v - u;
  v += u;
  u.resize(0, 0);
  return q.partialPivLu().solve(v);
}

}  // namespace

ComplexMatrix expm(const ComplexMatrix& m) {
  require_square(m, "expm");
  if (!all_finite(m)) throw DomainError("expm: non-finite entries");
  const Index n = m.rows();
  if (n == 0) return m;
  const double norm = one_norm(m);
  if (norm == 0.0) return ComplexMatrix::Identity(n, n);
  if (norm <= kTheta3) return pade_low(m, kPade3);
  if (norm <= kTheta5) return pade_low(m, kPade5);
  if (norm <= kTheta7) return pade_low(m, kPade7);
  if (norm <= kTheta9) return pade_low(m, kPade9);

  int squarings = 0;
  if (norm > kTheta13) squarings = static_cast<int>(std::ceil(std::log2(norm / kTheta13)));
  ComplexMatrix r = pade13(m / std::ldexp(1.0, squarings));
  ComplexMatrix tmp(n, n);
  for (int k = 0; k < squarings; ++k) {
    tmp.noalias() = r * r;
    r.swap(tmp);
  }
  return r;
}

ComplexMatrix expm_hermitian(const EigenDecomposition& eig, Complex scale) {
  const ComplexVector phases =
      (eig.eigenvalues.cast<Complex>() * scale).array().exp().matrix();
  return eig.eigenvectors * phases.asDiagonal() * eig.eigenvectors.adjoint();
}

ComplexMatrix expm_hermitian(const ComplexMatrix& h, Complex scale) {
  return expm_hermitian(eig_hermitian(h), scale);
}

// ---------------------------------------------------------------------------
// Norms and state metrics

double operator_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<ComplexMatrix> s(m);
  return s.singularValues()(0);
}

double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double hermiticity_defect(const ComplexMatrix& m) {
  return max_abs(m - m.adjoint());
}

ComplexMatrix hermitian_part(const ComplexMatrix& m) {
  return 0.5 * (m + m.adjoint());
}

ComplexMatrix sqrt_psd(const ComplexMatrix& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(h));
  const RealVector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

double trace_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  const double scale = std::max(1.0, max_abs(m));
  if (m.rows() == m.cols() && hermiticity_defect(m) <= 1e-13 * scale) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
  }
  Eigen::BDCSVD<ComplexMatrix> s(m);
  return s.singularValues().sum();
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionError("trace_distance: dimension mismatch");
  return trace_norm(a.matrix() - b.matrix());
}

double fidelity(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionError("fidelity: dimension mismatch");
  const ComplexMatrix root_a = sqrt_psd(a.matrix());
  const ComplexMatrix inner = hermitian_part(root_a * b.matrix() * root_a);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(inner, Eigen::EigenvaluesOnly);
  const double s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return s * s;
}

double fidelity_pure(const ComplexMatrix& rho, const ComplexVector& psi) {
  const ComplexVector u = psi / psi.norm();
  return (u.adjoint() * rho * u)(0, 0).real();
}

ComplexVector vectorize(const ComplexMatrix& m) {
  return Eigen::Map<const ComplexVector>(m.data(), m.size());
}

ComplexMatrix unvectorize(const ComplexVector& v) {
  const auto d = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (d * d != v.size()) {
    throw DimensionError("unvectorize: length " + std::to_string(v.size()) +
                         " is not a perfect square");
  }
  return Eigen::Map<const ComplexMatrix>(v.data(), d, d);
}

}  // namespace dissiprep
