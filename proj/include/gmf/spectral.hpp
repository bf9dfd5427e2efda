#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gmf/graph.hpp"

namespace gmf {

/// Eigendecomposition S = U diag(lambda) U^{-1} of a shift operator.
/// Eigenvalues are sorted ascending; each eigenvector has unit norm and is
/// flipped so its largest-magnitude entry is positive (ties broken by lowest
/// vertex index), which makes the transform deterministic across eigensolvers.
struct SpectralBasis {
  ShiftKind kind;
  Vector eigenvalues;
  Matrix eigenvectors;  // k-th column is u_k
  Matrix inverse;       // U^{-1}; equals U^T for symmetric kinds

  int size() const { return static_cast<int>(eigenvalues.size()); }
};

/// Per-eigenvalue transfer-function gains G(lambda_k).
struct SpectralFilter {
  Vector gains;
};

/// Monomial-basis polynomial h_0 + h_1 S + ... + h_{M-1} S^{M-1} in the
/// tagged shift operator.
struct PolynomialFilter {
  Vector coeffs;
  ShiftKind kind;

  int order() const { return static_cast<int>(coeffs.size()); }
};

/// Chebyshev-basis series on [0, lambda_max].
struct ChebyshevFilter {
  Vector coeffs;
  double lambda_max;
};

struct LsPolynomialFit {
  PolynomialFilter filter;
  double condition;      // Vandermonde condition estimate
  bool ill_conditioned;  // condition > 1e12; a warning, not an error
};

SpectralBasis eigendecompose(const ShiftOperator& op);

/// X = U^{-1} x
Vector gft(const GraphSignal& x, const SpectralBasis& basis);
/// x = U X
GraphSignal igft(const Vector& spectrum, const SpectralBasis& basis);

/// y = U diag(G(lambda)) U^{-1} x
GraphSignal filter_spectral(const GraphSignal& x, const SpectralFilter& f,
                            const SpectralBasis& basis);

/// Least-squares fit of order-M monomial coefficients to target gains at the
/// eigenvalues (Vandermonde system). Interpolates exactly when M reaches the
/// number of distinct eigenvalues.
LsPolynomialFit fit_polynomial_ls(const SpectralFilter& gains, const SpectralBasis& basis,
                                  int order);

/// Chebyshev interpolation of g at M Chebyshev nodes mapped onto [0, lambda_max].
ChebyshevFilter fit_chebyshev(const std::function<double(double)>& g, double lambda_max,
                              int order);

/// y = sum_m h_m S^m x, accumulated with repeated shift applications; no
/// eigendecomposition, output localized to the (M-1)-neighborhood.
GraphSignal filter_vertex(const GraphSignal& x, const PolynomialFilter& h,
                          const ShiftOperator& op);

/// Chebyshev series evaluated on the shifted operator via the three-term
/// recurrence T_{m+1} = 2 S~ T_m - T_{m-1}, S~ = (2/lambda_max) S - I.
GraphSignal filter_chebyshev_vertex(const GraphSignal& x, const ChebyshevFilter& c,
                                    const ShiftOperator& op);

/// Scalar series value at lambda.
double evaluate_chebyshev(const ChebyshevFilter& c, double lambda);

/// H(lambda_k) = sum_m h_m lambda_k^m for every eigenvalue of the basis.
SpectralFilter polynomial_gains(const PolynomialFilter& h, const SpectralBasis& basis);

/// Side-by-side run of the three filtering approaches:
///   a) direct spectral, b) LS polynomial fit applied in the vertex domain,
///   c) Chebyshev approximation applied in the vertex domain.
/// Differences are measured against approach (a).
struct FilterComparison {
  struct Row {
    std::string approach;
    GraphSignal output;
    double max_abs_diff_vs_a;
    double seconds;
  };
  std::vector<Row> rows;
};

FilterComparison compare_filtering(const GraphSignal& x, const std::function<double(double)>& g,
                                   int order, const ShiftOperator& op,
                                   const SpectralBasis& basis);

}  // namespace gmf
