#include "gmf/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "gmf/graph_io.hpp"

namespace gmf {

namespace {

// ---- published reference table for the first-iteration trace ----

const double kRefX[8] = {0.087, 0.030, -0.006, 0.039, -0.254, -0.426, 0.946, -0.145};
const double kRefW1[2] = {-0.221, -0.741};
const double kRefW2[2] = {1.429, 0.323};
const double kRefV[2][16] = {
    {-0.045, 0.391, -0.289, 0.123, 0.309, 0.029, 0.121, -0.132, -0.389, 0.081, -0.055, -0.609,
     -0.183, -0.765, 0.277, 0.174},
    {-0.248, 0.023, -0.085, 0.543, 0.102, -0.548, -0.542, -0.360, 0.706, 0.412, -0.590, -0.714,
     -0.445, 0.102, 0.245, -0.226}};

const double kRefY1[8] = {0.012, 0.037, -0.034, 0.121, -0.067, -0.152, -0.021, 0.053};
const double kRefY2[8] = {0.111, 0.024, 0.007, -0.001, -0.309, -0.501, 1.270, -0.217};
const double kRefFy1[8] = {0.012, 0.037, 0, 0.121, 0, 0, 0, 0.053};
// entry 1 is a known misprint (the pre-activation row shows 0.111)
const double kRefFy2[8] = {0.011, 0.024, 0.007, 0, 0, 0, 1.270, 0};
const double kRefMask1[8] = {1, 1, 0, 1, 0, 0, 0, 1};
const double kRefMask2[8] = {1, 1, 1, 0, 0, 0, 1, 0};
const double kRefZ[2] = {0.332, 0.440};
const double kRefP[2] = {0.4731, 0.5269};
const double kRefDelta2[2] = {-0.5269, 0.5269};
const double kRefG2Row1[16] = {-0.006, -0.019, 0, -0.064, 0, 0, 0, -0.028,
                               -0.058, -0.013, -0.004, 0, 0, 0, -0.669, 0};
const double kRefVNew[2][16] = {
    {-0.044, 0.394, -0.289, 0.132, 0.309, 0.029, 0.121, -0.128, -0.380, 0.082, -0.054, -0.609,
     -0.183, -0.765, 0.378, 0.174},
    {-0.249, 0.021, -0.085, 0.534, 0.102, -0.548, -0.542, -0.364, 0.697, 0.410, -0.591, -0.714,
     -0.445, 0.102, 0.145, -0.226}};
const double kRefDelta1Ch1[8] = {-0.108, -0.197, 0, 0.211, 0, 0, 0, -0.125};
const double kRefDelta1Ch2[8] = {0.567, 0.173, -0.283, 0, 0, 0, -0.123, 0};
const double kRefG1Ch1[2] = {0.011, -0.017};
const double kRefG1Ch2[2] = {-0.060, -0.017};
const double kRefW1New[2] = {-0.223, -0.739};
const double kRefW2New[2] = {1.437, 0.325};
const double kRefBNew[2] = {0.0109, -0.0167};

// Steps that reproduce the published table; its text says 0.1 but the printed
// updates are consistent only with 0.15 for both layers (bias step is 0.05).
constexpr double kTraceStepConv = 0.15;
constexpr double kTraceStepFc = 0.15;
constexpr double kTraceStepBias = 0.05;

constexpr double kTolPrint = 2e-3;   // values printed from exact inputs
constexpr double kTolDownstream = 5e-2;  // values downstream of input rounding

template <std::size_t N>
Vector vec(const double (&values)[N]) {
  return Eigen::Map<const Vector>(values, N);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "% .4f", v);
  return buf;
}

GcnnConfig trace_config() {
  GcnnConfig config;
  config.n_vertices = 8;
  config.k_channels = 2;
  config.filter_order = 2;
  config.s_outputs = 2;
  config.loss = LossKind::SoftmaxCrossEntropy;
  config.activation = ActivationKind::Relu;
  config.step_conv = kTraceStepConv;
  config.step_bias = kTraceStepBias;
  config.step_fc = kTraceStepFc;
  config.sequential_fc_update = true;
  return config;
}

TraceCheck make_check(std::string name, Vector computed, Vector reference, double tolerance,
                      std::vector<int> erratum_entries = {}) {
  TraceCheck check;
  check.name = std::move(name);
  check.computed = std::move(computed);
  check.reference = std::move(reference);
  check.tolerance = tolerance;
  check.erratum_entries = std::move(erratum_entries);
  if (check.reference.size() == 0) {
    check.max_abs_diff = std::numeric_limits<double>::quiet_NaN();
    check.pass = true;
    return check;
  }
  double max_diff = 0.0;
  for (Eigen::Index i = 0; i < check.computed.size(); ++i) {
    if (std::find(check.erratum_entries.begin(), check.erratum_entries.end(),
                  static_cast<int>(i)) != check.erratum_entries.end())
      continue;
    max_diff = std::max(max_diff, std::abs(check.computed(i) - check.reference(i)));
  }
  check.max_abs_diff = max_diff;
  check.pass = tolerance == 0.0 ? max_diff == 0.0 : max_diff <= tolerance;
  return check;
}

void ensure_dir(const std::string& dir) {
  if (!dir.empty()) std::filesystem::create_directories(dir);
}

}  // namespace

Vector feature_target(FeatureKind kind) {
  Vector t(2);
  if (kind == FeatureKind::Feature1) t << 1.0, 0.0;
  else t << 0.0, 1.0;
  return t;
}

TrainingSample generate_sample(FeatureKind kind, int n0, double sigma, const Graph& graph,
                               const ShiftOperator& normalized_weight, Rng& rng) {
  if (sigma < 0.0) throw Error("noise std must be nonnegative");
  const int n = graph.size();
  if (n0 == 0) n0 = 1 + rng.next_int(n);
  if (n0 < 1 || n0 > n)
    throw BadVertexIndex("origin vertex " + std::to_string(n0) + " outside 1.." + std::to_string(n));
  GraphSignal x0 = GraphSignal::Zero(n);
  x0(n0 - 1) = 1.0;
  const double sign = kind == FeatureKind::Feature1 ? -1.0 : 1.0;
  GraphSignal x = x0 + sign * (normalized_weight.matrix * x0);
  for (int i = 0; i < n; ++i) x(i) += sigma * rng.next_gaussian();
  return {std::move(x), feature_target(kind)};
}

TrainRunResult run_example3_train(const ExperimentConfig& exp) {
  const Graph graph = resolve_graph(exp.graph_spec);
  const ShiftOperator wn = shift_operator(graph, ShiftKind::NormalizedWeight);

  GcnnConfig config;
  config.n_vertices = graph.size();
  config.k_channels = 2;
  config.filter_order = 2;
  config.s_outputs = 2;
  config.loss = LossKind::SoftmaxCrossEntropy;
  config.activation = exp.activation;
  config.leaky_slope = exp.leaky_slope;
  config.step_conv = exp.step_conv;
  config.step_bias = exp.step_bias;
  config.step_fc = exp.step_fc;

  Rng rng(exp.seed);
  GcnnParams params = init_gaussian(config, rng);

  const auto make_epoch_set = [&] {
    std::vector<TrainingSample> samples;
    samples.reserve(static_cast<std::size_t>(exp.realizations_per_epoch));
    for (int i = 0; i < exp.realizations_per_epoch; ++i) {
      const FeatureKind kind =
          rng.next_double() < 0.5 ? FeatureKind::Feature1 : FeatureKind::Feature2;
      samples.push_back(generate_sample(kind, 0, exp.noise_std, graph, wn, rng));
    }
    return samples;
  };

  TrainLog log;
  if (exp.fixed_epoch_set) {
    const auto samples = make_epoch_set();
    log = train(samples, config, params, exp.epochs, wn);
  } else {
    int iteration = 0;
    for (int epoch = 1; epoch <= exp.epochs; ++epoch) {
      TrainLog part = train(make_epoch_set(), config, params, 1, wn);
      for (auto& row : part.rows) {
        row.epoch = epoch;
        row.iteration = ++iteration;
        log.rows.push_back(std::move(row));
      }
    }
  }

  TrainRunResult result;
  result.checkpoint = Checkpoint{config, params, exp.seed, rng.draws()};
  result.log = std::move(log);
  if (!exp.output_dir.empty()) {
    ensure_dir(exp.output_dir);
    result.checkpoint_path = exp.output_dir + "/checkpoint.txt";
    result.log_path = exp.output_dir + "/trainlog.csv";
    save_checkpoint(result.checkpoint_path, result.checkpoint);
    write_train_log_csv(result.log_path, result.log);
  }
  return result;
}

TestRunResult run_example3_test(const Checkpoint& checkpoint, const ExperimentConfig& exp) {
  if (exp.test_trials < 1) throw Error("test needs at least one trial");
  const Graph graph = resolve_graph(exp.graph_spec);
  const ShiftOperator wn = shift_operator(graph, ShiftKind::NormalizedWeight);
  if (graph.size() != checkpoint.config.n_vertices)
    throw ShapeMismatch("checkpoint was trained on a different graph size");

  // fresh stream, disjoint from training: the seed is salted before seeding
  Rng rng(checkpoint.seed ^ 0x746573742d736574ULL);
  TestRunResult result;
  int correct = 0;
  for (int trial = 1; trial <= exp.test_trials; ++trial) {
    const FeatureKind kind =
        rng.next_double() < 0.5 ? FeatureKind::Feature1 : FeatureKind::Feature2;
    const TrainingSample sample = generate_sample(kind, 0, exp.noise_std, graph, wn, rng);
    const Prediction pred = predict(sample.input, checkpoint.params, checkpoint.config, wn);
    const int true_kind = kind == FeatureKind::Feature1 ? 1 : 2;
    correct += pred.winner == true_kind ? 1 : 0;
    result.trials.push_back({trial, true_kind, pred.winner, pred.probabilities(0)});
  }
  result.accuracy = static_cast<double>(correct) / exp.test_trials;

  if (!exp.output_dir.empty()) {
    ensure_dir(exp.output_dir);
    result.csv_path = exp.output_dir + "/test.csv";
    std::vector<std::vector<double>> rows;
    for (const auto& t : result.trials)
      rows.push_back({static_cast<double>(t.trial), static_cast<double>(t.true_kind),
                      static_cast<double>(t.predicted), t.p1});
    write_csv(result.csv_path, "trial,true_kind,predicted,P1", rows);
  }
  return result;
}

TraceReport run_appendix_b_trace(bool inject_reference_values, std::uint64_t seed,
                                 double tolerance_scale) {
  const Graph graph = paper8_graph();
  const ShiftOperator wn = shift_operator(graph, ShiftKind::NormalizedWeight);
  const GcnnConfig config = trace_config();

  GcnnParams params;
  TrainingSample sample;
  if (inject_reference_values) {
    params.conv_weights.resize(2, 2);
    params.conv_weights.row(0) = vec(kRefW1).transpose();
    params.conv_weights.row(1) = vec(kRefW2).transpose();
    params.biases = Vector::Zero(2);
    params.fc_weights.resize(2, 16);
    params.fc_weights.row(0) = vec(kRefV[0]).transpose();
    params.fc_weights.row(1) = vec(kRefV[1]).transpose();
    sample.input = vec(kRefX);
    sample.target = feature_target(FeatureKind::Feature1);
  } else {
    Rng rng(seed);
    params = init_gaussian(config, rng);
    const FeatureKind kind =
        rng.next_double() < 0.5 ? FeatureKind::Feature1 : FeatureKind::Feature2;
    sample = generate_sample(kind, 0, 0.05, graph, wn, rng);
  }

  Gradients grads;
  GcnnParams updated = params;
  const ForwardTrace trace = train_step(updated, sample, config, wn, &grads);

  const bool cmp = inject_reference_values;
  const double scale = tolerance_scale;
  auto ref = [&](auto&& v) { return cmp ? Vector(v) : Vector(); };

  TraceReport report;
  auto add = [&](TraceCheck check) { report.checks.push_back(std::move(check)); };
  add(make_check("x (input)", sample.input, ref(vec(kRefX)), 0.0));
  add(make_check("y1", trace.pre_activation.row(0).transpose(), ref(vec(kRefY1)), kTolPrint * scale));
  add(make_check("y2", trace.pre_activation.row(1).transpose(), ref(vec(kRefY2)), kTolPrint * scale));
  add(make_check("f(y1)", trace.post_activation.row(0).transpose(), ref(vec(kRefFy1)), kTolPrint * scale));
  add(make_check("f(y2)", trace.post_activation.row(1).transpose(), ref(vec(kRefFy2)),
                 kTolPrint * scale, {0}));
  add(make_check("relu mask ch1", trace.relu_mask.row(0).transpose(), ref(vec(kRefMask1)), 0.0));
  add(make_check("relu mask ch2", trace.relu_mask.row(1).transpose(), ref(vec(kRefMask2)), 0.0));
  Vector ref_of(16);
  ref_of << vec(kRefFy1), vec(kRefFy2);
  add(make_check("o_F", trace.flattened, ref(ref_of), kTolDownstream * scale, {8}));
  add(make_check("z", trace.logits, ref(vec(kRefZ)), kTolDownstream * scale));
  add(make_check("P (softmax)", trace.probabilities, ref(vec(kRefP)), kTolDownstream * scale));
  add(make_check("delta2", grads.delta_out, ref(vec(kRefDelta2)), kTolPrint * scale));
  add(make_check("g2 row1", grads.grad_fc.row(0).transpose(), ref(vec(kRefG2Row1)),
                 kTolDownstream * scale));
  add(make_check("g2 row2", grads.grad_fc.row(1).transpose(), ref(Vector(-vec(kRefG2Row1))),
                 kTolDownstream * scale));
  add(make_check("v row1 (updated)", updated.fc_weights.row(0).transpose(), ref(vec(kRefVNew[0])),
                 kTolDownstream * scale));
  add(make_check("v row2 (updated)", updated.fc_weights.row(1).transpose(), ref(vec(kRefVNew[1])),
                 kTolDownstream * scale));
  add(make_check("delta1 ch1", grads.delta_conv.row(0).transpose(), ref(vec(kRefDelta1Ch1)),
                 kTolDownstream * scale));
  add(make_check("delta1 ch2", grads.delta_conv.row(1).transpose(), ref(vec(kRefDelta1Ch2)),
                 kTolDownstream * scale));
  add(make_check("g1 ch1", grads.grad_conv.row(0).transpose(), ref(vec(kRefG1Ch1)),
                 kTolDownstream * scale));
  add(make_check("g1 ch2", grads.grad_conv.row(1).transpose(), ref(vec(kRefG1Ch2)),
                 kTolDownstream * scale));
  add(make_check("w1 (updated)", updated.conv_weights.row(0).transpose(), ref(vec(kRefW1New)),
                 kTolPrint * scale));
  add(make_check("w2 (updated)", updated.conv_weights.row(1).transpose(), ref(vec(kRefW2New)),
                 kTolPrint * scale));
  add(make_check("b (updated)", updated.biases, ref(vec(kRefBNew)), kTolPrint * scale));

  report.all_pass = true;
  for (const auto& check : report.checks) report.all_pass = report.all_pass && check.pass;
  return report;
}

void print_trace_report(std::ostream& out, const TraceReport& report) {
  for (const auto& check : report.checks) {
    out << check.name << "\n  computed :";
    for (Eigen::Index i = 0; i < check.computed.size(); ++i) out << fmt4(check.computed(i));
    out << "\n";
    if (check.reference.size() > 0) {
      out << "  reference:";
      for (Eigen::Index i = 0; i < check.reference.size(); ++i) {
        const bool erratum = std::find(check.erratum_entries.begin(), check.erratum_entries.end(),
                                       static_cast<int>(i)) != check.erratum_entries.end();
        out << fmt4(check.reference(i)) << (erratum ? "*" : "");
      }
      out << "\n  max|diff| = " << check.max_abs_diff << "  (tol " << check.tolerance << ")  "
          << (check.pass ? "PASS" : "FAIL") << "\n";
      if (!check.erratum_entries.empty())
        out << "  (* known misprint in the reference table, excluded)\n";
    }
  }
  out << (report.all_pass ? "trace: all checks passed\n" : "trace: TOLERANCE FAILURE\n");
}

Example1Result run_example1(const std::string& output_dir) {
  const Graph graph = paper8_graph();
  const ShiftOperator ln = shift_operator(graph, ShiftKind::NormalizedLaplacian);
  const SpectralBasis basis = eigendecompose(ln);

  const DiffusionFeature f1 = feature_from_weight_coeffs(3, (Vector(2) << 1.0, 3.0).finished());
  const DiffusionFeature f2 = feature_from_weight_coeffs(4, (Vector(2) << 1.0, -2.5).finished());

  Example1Result r;
  r.x1 = synthesize_feature(f1, graph);
  r.x2 = synthesize_feature(f2, graph);
  r.g1 = matched_impulse_response(f1, basis);
  r.g2 = matched_impulse_response(f2, basis);
  r.response_g1_x1 = matched_response(r.x1, f1, ln);
  r.response_g2_x1 = matched_response(r.x1, f2, ln);
  r.response_g1_x2 = matched_response(r.x2, f1, ln);
  r.response_g2_x2 = matched_response(r.x2, f2, ln);

  const double e1 = signal_energy(r.x1);
  const double e2 = signal_energy(r.x2);
  if (std::abs(r.response_g1_x1(f1.origin - 1) - e1) > 1e-10 ||
      std::abs(r.response_g2_x2(f2.origin - 1) - e2) > 1e-10)
    throw Error("matched response peak does not equal the signal energy");
  if (r.response_g2_x1(f1.origin - 1) >= r.response_g1_x1(f1.origin - 1) ||
      r.response_g1_x2(f2.origin - 1) >= r.response_g2_x2(f2.origin - 1))
    throw Error("mismatched response is not below the matched peak");

  if (!output_dir.empty()) {
    ensure_dir(output_dir);
    r.csv_path = output_dir + "/example1.csv";
    std::vector<std::vector<double>> rows;
    for (int v = 0; v < graph.size(); ++v)
      rows.push_back({static_cast<double>(v + 1), r.x1(v), r.x2(v), r.g1(v), r.g2(v),
                      r.response_g1_x1(v), r.response_g2_x1(v), r.response_g1_x2(v),
                      r.response_g2_x2(v)});
    write_csv(r.csv_path, "vertex,x1,x2,g1,g2,y_g1_x1,y_g2_x1,y_g1_x2,y_g2_x2", rows);
  }
  return r;
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw FileError("cannot write '" + path + "'");
  if (!header.empty()) out << header << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << fmt(row[i]);
    out << "\n";
  }
}

void write_train_log_csv(const std::string& path, const TrainLog& log) {
  std::ofstream out(path);
  if (!out) throw FileError("cannot write '" + path + "'");
  out << "iteration,epoch,sample_kind,loss,P1";
  if (!log.rows.empty())
    for (Eigen::Index i = 0; i < log.rows.front().fc_weights.size(); ++i)
      out << ",fc_w" << (i + 1);
  out << "\n";
  for (const auto& row : log.rows) {
    out << row.iteration << "," << row.epoch << "," << row.sample_kind << "," << fmt(row.loss)
        << "," << fmt(row.p1);
    for (Eigen::Index i = 0; i < row.fc_weights.size(); ++i) out << "," << fmt(row.fc_weights(i));
    out << "\n";
  }
}

DiffusionFeature parse_feature_spec(const std::string& spec) {
  int n0 = 0;
  std::vector<double> coeffs;
  bool weight_basis = false;
  std::stringstream parts(spec);
  std::string part;
  while (std::getline(parts, part, ';')) {
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw Error("feature spec needs 'n0=...;a=...'");
    const std::string key = part.substr(0, eq);
    std::string value = part.substr(eq + 1);
    if (key == "n0") {
      n0 = std::stoi(value);
    } else if (key == "a") {
      std::stringstream cs(value);
      std::string token;
      while (std::getline(cs, token, ',')) {
        if (token.size() >= 2 && token.substr(token.size() - 2) == "wn") {
          weight_basis = true;
          token = token.substr(0, token.size() - 2);
        }
        coeffs.push_back(std::stod(token));
      }
    } else {
      throw Error("unknown feature spec key '" + key + "'");
    }
  }
  if (n0 < 1 || coeffs.empty()) throw Error("feature spec needs 'n0=...;a=...'");
  const Vector a = Eigen::Map<const Vector>(coeffs.data(), static_cast<Eigen::Index>(coeffs.size()));
  return weight_basis ? feature_from_weight_coeffs(n0, a) : feature_from_laplacian_coeffs(n0, a);
}

}  // namespace gmf
