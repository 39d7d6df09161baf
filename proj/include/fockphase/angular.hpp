#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fockphase/errors.hpp"

namespace fockphase {

// One angular-momentum sector: j = N/2 for N particles, dimension 2j+1.
// Only integer j is supported (even total particle number).
struct Representation {
  int j;
  explicit Representation(int j_in) : j(j_in) {
    if (j < 0) throw std::invalid_argument("Representation: j must be a non-negative integer");
  }
  int dim() const { return 2 * j + 1; }
};

// Matrix of exp(i phi Jy) in the |j,m> basis. Real and orthogonal in this
// convention; indexed d(m_out + j, m_in + j).
struct RotationKernel {
  int j = 0;
  double phi = 0.0;
  Eigen::MatrixXd d;

  double at(int m_out, int m_in) const {
    if (std::abs(m_out) > j || std::abs(m_in) > j)
      throw std::invalid_argument("RotationKernel::at: |m| must be <= j");
    return d(m_out + j, m_in + j);
  }
};

namespace detail {

// Conjugating Jy with diag(i^m) yields the real symmetric tridiagonal matrix
// B with zero diagonal and B(m+1,m) = sqrt(j(j+1) - m(m+1))/2. With the
// eigendecomposition B = Q M Q^T,
//   exp(i phi Jy) = diag(i^{-m'}) Q exp(i phi M) Q^T diag(i^m),
// and the i^(m-m') phase selects the cosine part for even m-m' and the
// (signed) sine part for odd m-m', so every entry comes out real.
// Orthogonality of the kernel rests on Q alone, which keeps the defect at
// machine level for large j where factorial-based closed forms overflow.
class JyEigensystem {
 public:
  explicit JyEigensystem(int j) : j_(j) {
    const int n = 2 * j + 1;
    if (n == 1) {
      q_ = Eigen::MatrixXd::Identity(1, 1);
      mu_ = Eigen::VectorXd::Zero(1);
      return;
    }
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd sub(n - 1);
    for (int i = 0; i + 1 < n; ++i) {
      const double m = static_cast<double>(i - j);
      sub(i) = 0.5 * std::sqrt(static_cast<double>(j) * (j + 1) - m * (m + 1));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success)
      throw numerical_contract_error("JyEigensystem: tridiagonal eigensolver failed");
    q_ = solver.eigenvectors();
    mu_ = solver.eigenvalues();
  }

  int j() const { return j_; }
  int dim() const { return 2 * j_ + 1; }

  Eigen::MatrixXd kernel(double phi) const {
    const int n = dim();
    if (phi == 0.0) return Eigen::MatrixXd::Identity(n, n);
    const Eigen::ArrayXd arg = phi * mu_.array();
    const Eigen::VectorXd c = arg.cos().matrix();
    const Eigen::VectorXd s = arg.sin().matrix();
    const Eigen::MatrixXd wc = q_ * c.asDiagonal() * q_.transpose();
    const Eigen::MatrixXd ws = q_ * s.asDiagonal() * q_.transpose();
    Eigen::MatrixXd d(n, n);
    for (int col = 0; col < n; ++col) {
      for (int row = 0; row < n; ++row) {
        switch (((col - row) % 4 + 4) % 4) {
          case 0: d(row, col) = wc(row, col); break;
          case 1: d(row, col) = -ws(row, col); break;
          case 2: d(row, col) = -wc(row, col); break;
          default: d(row, col) = ws(row, col); break;
        }
      }
    }
    return d;
  }

  // Squared entries D(m', m0)^2 of the input column m0 for a batch of
  // angles; row m'+j, one column per angle. The i^(m-m') signs square away,
  // so only the cosine/sine parity split survives.
  Eigen::MatrixXd squared_columns(int m0, const std::vector<double>& phis) const {
    const int n = dim();
    const int nphi = static_cast<int>(phis.size());
    const Eigen::ArrayXd g = q_.row(m0 + j_).transpose().array();
    Eigen::MatrixXd cm(n, nphi), sm(n, nphi);
    for (int i = 0; i < nphi; ++i) {
      const Eigen::ArrayXd arg = phis[i] * mu_.array();
      cm.col(i) = (arg.cos() * g).matrix();
      sm.col(i) = (arg.sin() * g).matrix();
    }
    const Eigen::MatrixXd c = q_ * cm;
    const Eigen::MatrixXd s = q_ * sm;
    Eigen::MatrixXd sq(n, nphi);
    for (int i = 0; i < nphi; ++i) {
      if (phis[i] == 0.0) {
        sq.col(i).setZero();
        sq(m0 + j_, i) = 1.0;
        continue;
      }
      for (int row = 0; row < n; ++row) {
        const double v = (((m0 + j_ - row) & 1) == 0) ? c(row, i) : s(row, i);
        sq(row, i) = v * v;
      }
    }
    return sq;
  }

 private:
  int j_;
  Eigen::MatrixXd q_;
  Eigen::VectorXd mu_;
};

// Process-wide eigensystem cache; construction per j happens once.
inline std::shared_ptr<const JyEigensystem> eigensystem(int j) {
  if (j < 0) throw std::invalid_argument("eigensystem: j must be >= 0");
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const JyEigensystem>> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(j);
    if (it != cache.end()) return it->second;
  }
  auto fresh = std::make_shared<const JyEigensystem>(j);
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(j, std::move(fresh)).first->second;
}

}  // namespace detail

inline RotationKernel rotation_kernel(int j, double phi) {
  if (j < 0) throw std::invalid_argument("rotation_kernel: j must be a non-negative integer");
  if (!std::isfinite(phi)) throw std::invalid_argument("rotation_kernel: phi must be finite");
  return RotationKernel{j, phi, detail::eigensystem(j)->kernel(phi)};
}

// Independent small-j ground truth: builds i*phi*Jy from the ladder-operator
// matrix elements and exponentiates it by scaling-and-squaring of the plain
// power series. Shares no code with the eigendecomposition route.
inline RotationKernel matrix_exponential_oracle(int j, double phi) {
  if (j < 0) throw std::invalid_argument("matrix_exponential_oracle: j must be >= 0");
  if (j > 8) throw std::invalid_argument("matrix_exponential_oracle: accuracy only guaranteed for j <= 8");
  if (!std::isfinite(phi)) throw std::invalid_argument("matrix_exponential_oracle: phi must be finite");
  const int n = 2 * j + 1;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    const double m = static_cast<double>(i - j);
    const double c = std::sqrt(static_cast<double>(j) * (j + 1) - m * (m + 1));
    a(i + 1, i) = 0.5 * phi * c;
    a(i, i + 1) = -0.5 * phi * c;
  }
  int squarings = 0;
  double norm = n > 0 ? a.cwiseAbs().colwise().sum().maxCoeff() : 0.0;
  while (norm > 0.5) {
    norm *= 0.5;
    ++squarings;
  }
  const Eigen::MatrixXd t = a / std::ldexp(1.0, squarings);
  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
  for (int k = 1; k <= 40; ++k) {
    term = (term * t / static_cast<double>(k)).eval();
    result += term;
    if (term.cwiseAbs().maxCoeff() < 1e-22) break;
  }
  for (int k = 0; k < squarings; ++k) result = (result * result).eval();
  return RotationKernel{j, phi, std::move(result)};
}

// P(m | phi) for the pure input |j,m0>: the squared kernel entry.
inline double pure_cond_prob(int j, int m0, int m, double phi) {
  if (j < 0) throw std::invalid_argument("pure_cond_prob: j must be >= 0");
  if (std::abs(m0) > j || std::abs(m) > j)
    throw std::invalid_argument("pure_cond_prob: |m0| and |m| must be <= j");
  if (!std::isfinite(phi)) throw std::invalid_argument("pure_cond_prob: phi must be finite");
  const auto sys = detail::eigensystem(j);
  return sys->squared_columns(m0, {phi})(m + j, 0);
}

// Small-angle approximation J^2_{m0-m}(j*phi). Validation only; the
// inference path always uses the exact kernel.
inline double bessel_approx_cond_prob(int j, int m0, int m, double phi) {
  if (j < 0) throw std::invalid_argument("bessel_approx_cond_prob: j must be >= 0");
  if (std::abs(m0) > j || std::abs(m) > j)
    throw std::invalid_argument("bessel_approx_cond_prob: |m0| and |m| must be <= j");
  if (!std::isfinite(phi)) throw std::invalid_argument("bessel_approx_cond_prob: phi must be finite");
  const double order = static_cast<double>(std::abs(m0 - m));
  const double x = std::abs(static_cast<double>(j) * phi);
  const double b = std::cyl_bessel_j(order, x);
  return b * b;
}

}  // namespace fockphase
