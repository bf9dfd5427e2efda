#include <doctest.h>

#include <cmath>

#include "gmf/graph_io.hpp"
#include "gmf/matched_filter.hpp"
#include "gmf/rng.hpp"

using namespace gmf;

namespace {

Graph random_graph(Rng& rng, int n) {
  Matrix w = Matrix::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const int j = rng.next_int(i);
    w(i, j) = w(j, i) = 0.5 + rng.next_double();
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (w(i, j) == 0.0 && rng.next_double() < 0.3) w(i, j) = w(j, i) = rng.next_double() + 0.1;
  return build_graph(w);
}

DiffusionFeature random_feature(Rng& rng, int n) {
  const int order = 1 + rng.next_int(3);
  Vector coeffs(order);
  for (int m = 0; m < order; ++m) coeffs(m) = 4.0 * rng.next_double() - 2.0;
  if (coeffs.cwiseAbs().maxCoeff() < 0.1) coeffs(0) += 1.0;
  return feature_from_laplacian_coeffs(1 + rng.next_int(n), coeffs);
}

}  // namespace

TEST_CASE("feature coefficient conversion: weight basis to laplacian basis") {
  // b0 + b1 W_N  ==  (b0 + b1) - b1 L_N
  const DiffusionFeature f = feature_from_weight_coeffs(3, (Vector(2) << 1.0, 3.0).finished());
  CHECK(f.coeffs(0) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(f.coeffs(1) == doctest::Approx(-3.0).epsilon(1e-14));

  const DiffusionFeature f2 = feature_from_weight_coeffs(4, (Vector(2) << 1.0, -2.5).finished());
  CHECK(f2.coeffs(0) == doctest::Approx(-1.5).epsilon(1e-14));
  CHECK(f2.coeffs(1) == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("feature coefficient conversion: the two bases synthesize identical signals") {
  const Graph g = paper8_graph();
  const ShiftOperator wn = shift_operator(g, ShiftKind::NormalizedWeight);
  Rng rng(61);
  for (int trial = 0; trial < 5; ++trial) {
    const int order = 1 + rng.next_int(4);
    Vector b(order);
    for (int m = 0; m < order; ++m) b(m) = 2.0 * rng.next_double() - 1.0;
    const int n0 = 1 + rng.next_int(8);
    Vector delta = Vector::Zero(8);
    delta(n0 - 1) = 1.0;
    // direct W_N diffusion
    Vector expected = Vector::Zero(8);
    Vector power = delta;
    for (int m = 0; m < order; ++m) {
      expected += b(m) * power;
      power = wn.matrix * power;
    }
    const Vector via_conversion = synthesize_feature(feature_from_weight_coeffs(n0, b), g);
    CHECK((via_conversion - expected).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("synthesize_feature: single coefficient returns the delta pulse") {
  const Graph g = paper8_graph();
  const Vector x = synthesize_feature(feature_from_laplacian_coeffs(5, Vector::Ones(1)), g);
  for (int i = 0; i < 8; ++i) CHECK(x(i) == (i == 4 ? 1.0 : 0.0));
}

TEST_CASE("synthesize_feature: rejects a bad origin") {
  const Graph g = paper8_graph();
  CHECK_THROWS_AS(synthesize_feature(feature_from_laplacian_coeffs(9, Vector::Ones(2)), g),
                  BadVertexIndex);
}

TEST_CASE("matched_gains: polynomial in the eigenvalues") {
  const Graph g = paper8_graph();
  const SpectralBasis basis = eigendecompose(shift_operator(g, ShiftKind::NormalizedLaplacian));

  const SpectralFilter ones = matched_gains(feature_from_laplacian_coeffs(1, Vector::Ones(1)), basis);
  CHECK((ones.gains - Vector::Ones(8)).cwiseAbs().maxCoeff() == 0.0);

  const SpectralFilter g1 =
      matched_gains(feature_from_laplacian_coeffs(3, (Vector(2) << 4.0, -3.0).finished()), basis);
  CHECK((g1.gains - (4.0 - 3.0 * basis.eigenvalues.array()).matrix()).cwiseAbs().maxCoeff() <=
        1e-13);

  const SpectralFilter g2 = matched_gains(
      feature_from_laplacian_coeffs(4, (Vector(2) << -1.5, 2.5).finished()), basis);
  CHECK((g2.gains - (-1.5 + 2.5 * basis.eigenvalues.array()).matrix()).cwiseAbs().maxCoeff() <=
        1e-13);
}

TEST_CASE("matched_gains: basis kind must match the feature") {
  const Graph g = paper8_graph();
  const SpectralBasis wn_basis = eigendecompose(shift_operator(g, ShiftKind::NormalizedWeight));
  CHECK_THROWS_AS(matched_gains(feature_from_laplacian_coeffs(1, Vector::Ones(2)), wn_basis),
                  OperatorKindMismatch);
}

TEST_CASE("matched_impulse_response: unit coefficients give g0 = U 1") {
  const Graph g = paper8_graph();
  const SpectralBasis basis = eigendecompose(shift_operator(g, ShiftKind::NormalizedLaplacian));
  const Vector g0 = matched_impulse_response(feature_from_laplacian_coeffs(1, Vector::Ones(1)), basis);
  CHECK((g0 - basis.eigenvectors * Vector::Ones(8)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("matched_impulse_response: spectral and diffusion forms agree") {
  Rng rng(63);
  for (int trial = 0; trial < 8; ++trial) {
    const Graph g = random_graph(rng, 4 + rng.next_int(10));
    const SpectralBasis basis =
        eigendecompose(shift_operator(g, ShiftKind::NormalizedLaplacian));
    const DiffusionFeature f = random_feature(rng, g.size());
    // the implementation cross-checks the two forms internally at 1e-10
    CHECK_NOTHROW(matched_impulse_response(f, basis));
  }
}

TEST_CASE("matched_impulse_response: classical reduction on the shift-invariant ring") {
  // On the directed ring the transform basis is the DFT, u_k(n) = e^{j2pi nk/N}/sqrt(N),
  // and the all-ones spectrum column sums to delta(n) * sqrt(N). Evaluated here in
  // closed form (real and imaginary parts separately) for N = 8.
  const int n = 8;
  for (int vertex = 0; vertex < n; ++vertex) {
    double real = 0.0, imag = 0.0;
    for (int k = 0; k < n; ++k) {
      real += std::cos(2.0 * M_PI * vertex * k / n) / std::sqrt(double(n));
      imag += std::sin(2.0 * M_PI * vertex * k / n) / std::sqrt(double(n));
    }
    CHECK(std::abs(real - (vertex == 0 ? std::sqrt(double(n)) : 0.0)) <= 1e-12);
    CHECK(std::abs(imag) <= 1e-12);
  }
}

TEST_CASE("matched_response: matched peak equals the signal energy") {
  const Graph g = paper8_graph();
  const ShiftOperator ln = shift_operator(g, ShiftKind::NormalizedLaplacian);
  Rng rng(64);
  for (int trial = 0; trial < 20; ++trial) {
    const DiffusionFeature f = random_feature(rng, 8);
    const Vector x = synthesize_feature(f, g);
    const Vector response = matched_response(x, f, ln);
    CHECK(std::abs(response(f.origin - 1) - signal_energy(x)) <= 1e-10);
  }
}

TEST_CASE("matched_response: identity filter passes the signal") {
  const Graph g = paper8_graph();
  const ShiftOperator ln = shift_operator(g, ShiftKind::NormalizedLaplacian);
  Rng rng(65);
  Vector x(8);
  for (int i = 0; i < 8; ++i) x(i) = rng.next_gaussian();
  const Vector y = matched_response(x, feature_from_laplacian_coeffs(1, Vector::Ones(1)), ln);
  CHECK((y - x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("matched_response: vertex form equals the spectral form") {
  Rng rng(66);
  for (int trial = 0; trial < 8; ++trial) {
    const Graph g = random_graph(rng, 4 + rng.next_int(28));
    const ShiftOperator ln = shift_operator(g, ShiftKind::NormalizedLaplacian);
    const SpectralBasis basis = eigendecompose(ln);
    const DiffusionFeature f = random_feature(rng, g.size());
    Vector x(g.size());
    for (int i = 0; i < g.size(); ++i) x(i) = rng.next_gaussian();
    const Vector vertex = matched_response(x, f, ln);
    const Vector spectral = filter_spectral(x, matched_gains(f, basis), basis);
    CHECK((vertex - spectral).norm() <= 1e-10 * std::max(1.0, x.norm()));
  }
}

TEST_CASE("matched_response: Schwartz bound holds per vertex") {
  Rng rng(67);
  for (int trial = 0; trial < 8; ++trial) {
    const Graph g = random_graph(rng, 4 + rng.next_int(12));
    const ShiftOperator ln = shift_operator(g, ShiftKind::NormalizedLaplacian);
    const SpectralBasis basis = eigendecompose(ln);
    const DiffusionFeature f = random_feature(rng, g.size());
    Vector x(g.size());
    for (int i = 0; i < g.size(); ++i) x(i) = rng.next_gaussian();
    const Vector response = matched_response(x, f, ln);
    const Vector spectrum = gft(x, basis);
    const Vector gains = matched_gains(f, basis).gains;
    for (int v = 0; v < g.size(); ++v) {
      double gu_energy = 0.0;
      for (int k = 0; k < g.size(); ++k)
        gu_energy += std::pow(gains(k) * basis.eigenvectors(v, k), 2);
      CHECK(std::abs(response(v)) <=
            std::sqrt(spectrum.squaredNorm() * gu_energy) + 1e-9);
    }
  }
}

TEST_CASE("matched_response: cross response stays below the matched peak") {
  const Graph g = paper8_graph();
  const ShiftOperator ln = shift_operator(g, ShiftKind::NormalizedLaplacian);
  const DiffusionFeature f1 = feature_from_weight_coeffs(3, (Vector(2) << 1.0, 3.0).finished());
  const DiffusionFeature f2 = feature_from_weight_coeffs(4, (Vector(2) << 1.0, -2.5).finished());
  const Vector x1 = synthesize_feature(f1, g);
  const Vector x2 = synthesize_feature(f2, g);
  const Vector matched1 = matched_response(x1, f1, ln);
  const Vector cross21 = matched_response(x1, f2, ln);
  CHECK(cross21(2) < matched1(2));  // at the matched vertex 3
  const Vector matched2 = matched_response(x2, f2, ln);
  const Vector cross12 = matched_response(x2, f1, ln);
  CHECK(cross12(3) < matched2(3));  // at the matched vertex 4
}

TEST_CASE("bank_decide: picks the filter matched to each feature") {
  const Graph g = paper8_graph();
  const ShiftOperator ln = shift_operator(g, ShiftKind::NormalizedLaplacian);
  const DiffusionFeature f1 = feature_from_weight_coeffs(3, (Vector(2) << 1.0, 3.0).finished());
  const DiffusionFeature f2 = feature_from_weight_coeffs(4, (Vector(2) << 1.0, -2.5).finished());
  const MatchedFilterBank bank = MatchedFilterBank::from_features({f1, f2});
  const Vector x1 = synthesize_feature(f1, g);
  const Vector x2 = synthesize_feature(f2, g);
  CHECK(bank_decide(x1, bank, ln).winner == 1);
  CHECK(bank_decide(x2, bank, ln).winner == 2);

  const MatchedFilterBank single{{bank.filters[0]}};
  CHECK(bank_decide(x2, single, ln).winner == 1);

  CHECK_THROWS_AS(bank_decide(x1, MatchedFilterBank{}, ln), EmptyBank);
}

TEST_CASE("bank_decide: relu pre-clipping keeps the winner when the peak is positive") {
  Rng rng(68);
  for (int trial = 0; trial < 10; ++trial) {
    const Graph g = random_graph(rng, 4 + rng.next_int(8));
    const ShiftOperator ln = shift_operator(g, ShiftKind::NormalizedLaplacian);
    std::vector<DiffusionFeature> features;
    for (int k = 0; k < 3; ++k) features.push_back(random_feature(rng, g.size()));
    const MatchedFilterBank bank = MatchedFilterBank::from_features(features);
    Vector x(g.size());
    for (int i = 0; i < g.size(); ++i) x(i) = rng.next_gaussian();
    const BankDecision decision = bank_decide(x, bank, ln);
    if (decision.scores.row(decision.winner - 1).maxCoeff() <= 0.0) continue;
    // clip negatives and re-decide
    const Matrix clipped = decision.scores.cwiseMax(0.0);
    int clipped_winner = 0;
    double best = -1.0;
    for (int k = 0; k < 3; ++k)
      if (clipped.row(k).maxCoeff() > best) {
        best = clipped.row(k).maxCoeff();
        clipped_winner = k + 1;
      }
    CHECK(clipped_winner == decision.winner);
  }
}

TEST_CASE("signal_energy: delta, example feature, zero") {
  const Graph g = paper8_graph();
  Vector delta = Vector::Zero(8);
  delta(2) = 1.0;
  CHECK(signal_energy(delta) == 1.0);

  const Vector x1 =
      synthesize_feature(feature_from_weight_coeffs(3, (Vector(2) << 1.0, 3.0).finished()), g);
  const double expected = 1.0 + 9.0 * (1.0 / 9.0 + 1.0 / 15.0 + 1.0 / 12.0);
  CHECK(signal_energy(x1) == doctest::Approx(expected).epsilon(1e-12));

  CHECK(signal_energy(Vector::Zero(5)) == 0.0);
}
