#pragma once

#include <vector>

#include "gmf/graph.hpp"
#include "gmf/spectral.hpp"

namespace gmf {

/// A diffusion feature: the signal obtained by applying the polynomial
/// a_0 + a_1 S + ... + a_{M-1} S^{M-1} to a delta pulse at the origin vertex.
/// Coefficients are held in the normalized-Laplacian basis (the canonical
/// form); a weight-matrix form b_0 + b_1 W_N + ... is converted on input via
/// W_N = I - L_N.
struct DiffusionFeature {
  int origin;     // 1-based vertex index
  Vector coeffs;  // a_0 .. a_{M-1}
  ShiftKind kind = ShiftKind::NormalizedLaplacian;
};

/// Builds a feature from coefficients over the normalized Laplacian.
DiffusionFeature feature_from_laplacian_coeffs(int origin, Vector coeffs);

/// Builds a feature from coefficients over the normalized weight matrix,
/// converting them to the canonical normalized-Laplacian form.
DiffusionFeature feature_from_weight_coeffs(int origin, const Vector& coeffs);

/// K matched filters sharing one operator kind.
struct MatchedFilterBank {
  std::vector<PolynomialFilter> filters;

  static MatchedFilterBank from_features(const std::vector<DiffusionFeature>& features);
};

/// x = sum_m a_m S^m delta_{n0}
GraphSignal synthesize_feature(const DiffusionFeature& f, const Graph& graph);

/// G(lambda_k) = sum_m a_m lambda_k^m
SpectralFilter matched_gains(const DiffusionFeature& f, const SpectralBasis& basis);

/// Vertex-domain impulse response g = U G(Lambda) 1; cross-checked internally
/// against the equivalent diffusion form sum_m a_m S^m (U 1).
GraphSignal matched_impulse_response(const DiffusionFeature& f, const SpectralBasis& basis);

/// Vertex-domain response y = sum_m a_m S^m x. When the feature is matched to
/// x, the response at the origin vertex equals the signal energy.
GraphSignal matched_response(const GraphSignal& x, const DiffusionFeature& f,
                             const ShiftOperator& op);

struct BankDecision {
  int winner;     // 1-based filter index
  Matrix scores;  // K x N response matrix
};

/// winner = argmax over filters of the maximum response over vertices.
BankDecision bank_decide(const GraphSignal& x, const MatchedFilterBank& bank,
                         const ShiftOperator& op);

/// E_x = sum_n x(n)^2
double signal_energy(const GraphSignal& x);

}  // namespace gmf
