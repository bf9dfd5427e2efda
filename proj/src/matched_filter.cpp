#include "gmf/matched_filter.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace gmf {

namespace {

void check_kind(ShiftKind feature_kind, ShiftKind other, const char* what) {
  if (feature_kind != other)
    throw OperatorKindMismatch(std::string(what) + " built from " + shift_kind_name(other) +
                               " but feature uses " + shift_kind_name(feature_kind));
}

void check_origin(const DiffusionFeature& f, int n) {
  if (f.origin < 1 || f.origin > n)
    throw BadVertexIndex("origin vertex " + std::to_string(f.origin) + " outside 1.." +
                         std::to_string(n));
}

}  // namespace

DiffusionFeature feature_from_laplacian_coeffs(int origin, Vector coeffs) {
  if (origin < 1) throw BadVertexIndex("origin vertex must be >= 1");
  if (coeffs.size() < 1) throw Error("feature needs at least one coefficient");
  return {origin, std::move(coeffs), ShiftKind::NormalizedLaplacian};
}

DiffusionFeature feature_from_weight_coeffs(int origin, const Vector& coeffs) {
  // sum_m b_m W_N^m = sum_m b_m (I - L_N)^m; expand binomially into L_N powers.
  const auto m_max = coeffs.size();
  Vector a = Vector::Zero(m_max);
  for (Eigen::Index m = 0; m < m_max; ++m) {
    double binom = 1.0;  // C(m, nu) (-1)^nu accumulated incrementally
    for (Eigen::Index nu = 0; nu <= m; ++nu) {
      a(nu) += coeffs(m) * binom;
      binom *= -static_cast<double>(m - nu) / static_cast<double>(nu + 1);
    }
  }
  return feature_from_laplacian_coeffs(origin, std::move(a));
}

GraphSignal synthesize_feature(const DiffusionFeature& f, const Graph& graph) {
  check_origin(f, graph.size());
  GraphSignal delta = GraphSignal::Zero(graph.size());
  delta(f.origin - 1) = 1.0;
  const ShiftOperator op = shift_operator(graph, f.kind);
  PolynomialFilter h{f.coeffs, f.kind};
  return filter_vertex(delta, h, op);
}

SpectralFilter matched_gains(const DiffusionFeature& f, const SpectralBasis& basis) {
  check_kind(f.kind, basis.kind, "basis");
  return polynomial_gains(PolynomialFilter{f.coeffs, f.kind}, basis);
}

GraphSignal matched_impulse_response(const DiffusionFeature& f, const SpectralBasis& basis) {
  check_kind(f.kind, basis.kind, "basis");
  const SpectralFilter gains = matched_gains(f, basis);
  const GraphSignal g = basis.eigenvectors * gains.gains;  // U G(Lambda) 1

  // Equivalent diffusion form sum_m a_m S^m g0, g0 = U 1; the two must agree.
  const GraphSignal g0 = basis.eigenvectors * Vector::Ones(basis.size());
  GraphSignal check = GraphSignal::Zero(basis.size());
  GraphSignal shifted = g0;
  const Matrix s = basis.eigenvectors * basis.eigenvalues.asDiagonal() * basis.inverse;
  for (Eigen::Index m = 0; m < f.coeffs.size(); ++m) {
    check += f.coeffs(m) * shifted;
    if (m + 1 < f.coeffs.size()) shifted = s * shifted;
  }
  if ((g - check).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, g.cwiseAbs().maxCoeff()))
    throw Error("matched impulse response cross-check failed");
  return g;
}

GraphSignal matched_response(const GraphSignal& x, const DiffusionFeature& f,
                             const ShiftOperator& op) {
  check_kind(f.kind, op.kind, "operator");
  return filter_vertex(x, PolynomialFilter{f.coeffs, f.kind}, op);
}

MatchedFilterBank MatchedFilterBank::from_features(const std::vector<DiffusionFeature>& features) {
  MatchedFilterBank bank;
  bank.filters.reserve(features.size());
  for (const auto& f : features) bank.filters.push_back({f.coeffs, f.kind});
  return bank;
}

BankDecision bank_decide(const GraphSignal& x, const MatchedFilterBank& bank,
                         const ShiftOperator& op) {
  if (bank.filters.empty()) throw EmptyBank("matched filter bank is empty");
  const int k_count = static_cast<int>(bank.filters.size());
  Matrix scores(k_count, x.size());
  int winner = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < k_count; ++k) {
    scores.row(k) = filter_vertex(x, bank.filters[static_cast<std::size_t>(k)], op).transpose();
    const double peak = scores.row(k).maxCoeff();
    if (peak > best) {
      best = peak;
      winner = k;
    }
  }
  return {winner + 1, scores};
}

double signal_energy(const GraphSignal& x) { return x.squaredNorm(); }

}  // namespace gmf
