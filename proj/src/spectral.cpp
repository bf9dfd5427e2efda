#include "gmf/spectral.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace gmf {

namespace {

constexpr double kResidualTolerance = 1e-8;
constexpr double kIllConditioned = 1e12;

// Flip each column so its largest-magnitude entry (lowest index on ties) is
// positive; mirror the flip into the corresponding row of the inverse.
void apply_sign_convention(Matrix& u, Matrix& u_inv) {
  for (Eigen::Index k = 0; k < u.cols(); ++k) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < u.rows(); ++i)
      if (std::abs(u(i, k)) > std::abs(u(best, k))) best = i;
    if (u(best, k) < 0.0) {
      u.col(k) = -u.col(k);
      u_inv.row(k) = -u_inv.row(k);
    }
  }
}

void check_residuals(const ShiftOperator& op, const SpectralBasis& basis) {
  const double scale = op.matrix.norm();
  for (int k = 0; k < basis.size(); ++k) {
    const double residual =
        (op.matrix * basis.eigenvectors.col(k) - basis.eigenvalues(k) * basis.eigenvectors.col(k))
            .norm();
    if (residual > kResidualTolerance * scale)
      throw NotDiagonalizable("eigenpair " + std::to_string(k + 1) + " residual " +
                              std::to_string(residual) + " exceeds tolerance for " +
                              shift_kind_name(op.kind));
  }
}

}  // namespace

SpectralBasis eigendecompose(const ShiftOperator& op) {
  const int n = op.size();
  SpectralBasis basis;
  basis.kind = op.kind;

  if (is_symmetric_kind(op.kind)) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(op.matrix);
    if (solver.info() != Eigen::Success)
      throw NotDiagonalizable(std::string("eigensolver failed for ") + shift_kind_name(op.kind));
    basis.eigenvalues = solver.eigenvalues();
    basis.eigenvectors = solver.eigenvectors();
    basis.inverse = basis.eigenvectors.transpose();
  } else {
    // The random walk D^{-1} W is similar to the symmetric D^{-1/2} W D^{-1/2}
    // via D^{1/2}, so its spectrum is real and the symmetric solve carries over.
    // Recover the symmetrizing diagonal from detailed balance,
    // d_i S(i,j) = d_j S(j,i), one BFS per connected component.
    Vector degrees = Vector::Zero(n);
    std::vector<int> queue;
    for (int seed = 0; seed < n; ++seed) {
      if (degrees(seed) > 0.0) continue;
      degrees(seed) = 1.0;
      queue.assign(1, seed);
      while (!queue.empty()) {
        const int i = queue.back();
        queue.pop_back();
        for (int j = 0; j < n; ++j) {
          if (i == j || op.matrix(i, j) == 0.0) continue;
          if (op.matrix(j, i) <= 0.0 || op.matrix(i, j) < 0.0)
            throw NotDiagonalizable("random-walk operator is not similar to a symmetric matrix");
          const double dj = degrees(i) * op.matrix(i, j) / op.matrix(j, i);
          if (degrees(j) == 0.0) {
            degrees(j) = dj;
            queue.push_back(j);
          }
        }
      }
    }

    const Vector sqrt_d = degrees.array().sqrt();
    const Vector inv_sqrt_d = degrees.array().rsqrt();
    const Matrix sym = sqrt_d.asDiagonal() * op.matrix * inv_sqrt_d.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Matrix> solver((sym + sym.transpose()) / 2.0);
    if (solver.info() != Eigen::Success)
      throw NotDiagonalizable("eigensolver failed for random-walk operator");
    basis.eigenvalues = solver.eigenvalues();
    Matrix u = inv_sqrt_d.asDiagonal() * solver.eigenvectors();
    Matrix u_inv = solver.eigenvectors().transpose() * sqrt_d.asDiagonal();
    for (int k = 0; k < n; ++k) {
      const double norm = u.col(k).norm();
      u.col(k) /= norm;
      u_inv.row(k) *= norm;
    }
    basis.eigenvectors = u;
    basis.inverse = u_inv;
  }

  apply_sign_convention(basis.eigenvectors, basis.inverse);
  check_residuals(op, basis);
  return basis;
}

Vector gft(const GraphSignal& x, const SpectralBasis& basis) {
  if (x.size() != basis.size())
    throw DimensionMismatch("signal length does not match basis size");
  return basis.inverse * x;
}

GraphSignal igft(const Vector& spectrum, const SpectralBasis& basis) {
  if (spectrum.size() != basis.size())
    throw DimensionMismatch("spectrum length does not match basis size");
  return basis.eigenvectors * spectrum;
}

GraphSignal filter_spectral(const GraphSignal& x, const SpectralFilter& f,
                            const SpectralBasis& basis) {
  if (f.gains.size() != basis.size())
    throw DimensionMismatch("gain vector length does not match basis size");
  return igft(f.gains.cwiseProduct(gft(x, basis)), basis);
}

LsPolynomialFit fit_polynomial_ls(const SpectralFilter& gains, const SpectralBasis& basis,
                                  int order) {
  const int n = basis.size();
  if (order < 1 || order > n) throw Error("polynomial order must be in [1, N]");
  if (gains.gains.size() != n) throw DimensionMismatch("gains length does not match basis");

  Matrix vandermonde(n, order);
  for (int k = 0; k < n; ++k) {
    double power = 1.0;
    for (int m = 0; m < order; ++m) {
      vandermonde(k, m) = power;
      power *= basis.eigenvalues(k);
    }
  }
  const Vector h = vandermonde.colPivHouseholderQr().solve(gains.gains);

  const auto singular = vandermonde.jacobiSvd().singularValues();
  const double smallest = singular(singular.size() - 1);
  const double condition = smallest > 0.0 ? singular(0) / smallest
                                          : std::numeric_limits<double>::infinity();
  return {PolynomialFilter{h, basis.kind}, condition, condition > kIllConditioned};
}

ChebyshevFilter fit_chebyshev(const std::function<double(double)>& g, double lambda_max,
                              int order) {
  if (lambda_max <= 0.0) throw Error("lambda_max must be positive");
  if (order < 1) throw Error("chebyshev order must be >= 1");
  Vector samples(order);
  for (int j = 0; j < order; ++j) {
    const double t = std::cos(M_PI * (j + 0.5) / order);
    samples(j) = g((t + 1.0) * lambda_max / 2.0);
  }
  Vector coeffs(order);
  for (int m = 0; m < order; ++m) {
    double acc = 0.0;
    for (int j = 0; j < order; ++j) acc += samples(j) * std::cos(m * M_PI * (j + 0.5) / order);
    coeffs(m) = (m == 0 ? 1.0 : 2.0) * acc / order;
  }
  return {coeffs, lambda_max};
}

GraphSignal filter_vertex(const GraphSignal& x, const PolynomialFilter& h,
                          const ShiftOperator& op) {
  if (h.kind != op.kind)
    throw OperatorKindMismatch(std::string("filter built for ") + shift_kind_name(h.kind) +
                               " applied with " + shift_kind_name(op.kind));
  if (x.size() != op.size()) throw DimensionMismatch("signal length does not match operator");
  GraphSignal shifted = x;
  GraphSignal y = h.coeffs(0) * x;
  for (int m = 1; m < h.order(); ++m) {
    shifted = apply_shift(op, shifted);
    y += h.coeffs(m) * shifted;
  }
  return y;
}

GraphSignal filter_chebyshev_vertex(const GraphSignal& x, const ChebyshevFilter& c,
                                    const ShiftOperator& op) {
  if (x.size() != op.size()) throw DimensionMismatch("signal length does not match operator");
  const double scale = 2.0 / c.lambda_max;
  const auto shifted_apply = [&](const GraphSignal& v) -> GraphSignal {
    return scale * (op.matrix * v) - v;
  };
  const int m_max = static_cast<int>(c.coeffs.size());
  GraphSignal t_prev = x;
  GraphSignal y = c.coeffs(0) * x;
  if (m_max == 1) return y;
  GraphSignal t_curr = shifted_apply(x);
  y += c.coeffs(1) * t_curr;
  for (int m = 2; m < m_max; ++m) {
    GraphSignal t_next = 2.0 * shifted_apply(t_curr) - t_prev;
    y += c.coeffs(m) * t_next;
    t_prev = std::move(t_curr);
    t_curr = std::move(t_next);
  }
  return y;
}

double evaluate_chebyshev(const ChebyshevFilter& c, double lambda) {
  const double t = 2.0 * lambda / c.lambda_max - 1.0;
  double t_prev = 1.0, t_curr = t;
  double y = c.coeffs(0);
  if (c.coeffs.size() > 1) y += c.coeffs(1) * t_curr;
  for (Eigen::Index m = 2; m < c.coeffs.size(); ++m) {
    const double t_next = 2.0 * t * t_curr - t_prev;
    y += c.coeffs(m) * t_next;
    t_prev = t_curr;
    t_curr = t_next;
  }
  return y;
}

SpectralFilter polynomial_gains(const PolynomialFilter& h, const SpectralBasis& basis) {
  Vector gains(basis.size());
  for (int k = 0; k < basis.size(); ++k) {
    double acc = 0.0, power = 1.0;
    for (int m = 0; m < h.order(); ++m) {
      acc += h.coeffs(m) * power;
      power *= basis.eigenvalues(k);
    }
    gains(k) = acc;
  }
  return {gains};
}

FilterComparison compare_filtering(const GraphSignal& x, const std::function<double(double)>& g,
                                   int order, const ShiftOperator& op,
                                   const SpectralBasis& basis) {
  if (basis.kind != op.kind)
    throw OperatorKindMismatch("basis and operator kinds differ");
  using Clock = std::chrono::steady_clock;
  const auto timed = [](const auto& fn) {
    const auto start = Clock::now();
    GraphSignal out = fn();
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return std::pair<GraphSignal, double>(std::move(out), seconds);
  };

  SpectralFilter gains{basis.eigenvalues.unaryExpr([&](double l) { return g(l); })};
  auto [ya, ta] = timed([&] { return filter_spectral(x, gains, basis); });
  auto [yb, tb] = timed([&] {
    return filter_vertex(x, fit_polynomial_ls(gains, basis, order).filter, op);
  });
  const double lambda_max = std::max(basis.eigenvalues.maxCoeff(), 1e-12);
  auto [yc, tc] = timed([&] {
    return filter_chebyshev_vertex(x, fit_chebyshev(g, lambda_max, order), op);
  });

  FilterComparison report;
  report.rows.push_back({"a:spectral", ya, 0.0, ta});
  report.rows.push_back({"b:ls-polynomial", yb, (yb - ya).cwiseAbs().maxCoeff(), tb});
  report.rows.push_back({"c:chebyshev", yc, (yc - ya).cwiseAbs().maxCoeff(), tc});
  return report;
}

}  // namespace gmf
