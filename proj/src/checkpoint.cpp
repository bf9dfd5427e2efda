#include "gmf/checkpoint.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace gmf {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string matrix_line(const char* key, const Matrix& m) {
  std::string out = std::string(key) + "[" + std::to_string(m.rows()) + "x" +
                    std::to_string(m.cols()) + "] =";
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out += " " + fmt(m(i, j));
  return out + "\n";
}

std::string vector_line(const char* key, const Vector& v) {
  std::string out = std::string(key) + "[" + std::to_string(v.size()) + "] =";
  for (Eigen::Index i = 0; i < v.size(); ++i) out += " " + fmt(v(i));
  return out + "\n";
}

const char* loss_name(LossKind k) {
  return k == LossKind::MseOnLogits ? "mse-on-logits" : "softmax-cross-entropy";
}
const char* activation_name(ActivationKind k) {
  return k == ActivationKind::Relu ? "relu" : "leaky-relu";
}
const char* pooling_name(PoolingKind k) {
  return k == PoolingKind::None ? "none" : "coarsen-max";
}

struct ParsedEntry {
  std::vector<int> shape;  // empty for scalars
  std::string value;
};

std::map<std::string, ParsedEntry> parse_entries(const std::string& text) {
  std::map<std::string, ParsedEntry> entries;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq);
    while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
    ParsedEntry entry;
    const auto bracket = key.find('[');
    if (bracket != std::string::npos) {
      std::string dims = key.substr(bracket + 1, key.find(']') - bracket - 1);
      key = key.substr(0, bracket);
      std::replace(dims.begin(), dims.end(), 'x', ' ');
      std::istringstream ds(dims);
      int d;
      while (ds >> d) entry.shape.push_back(d);
    }
    entry.value = line.substr(eq + 1);
    entries[key] = std::move(entry);
  }
  return entries;
}

const ParsedEntry& require(const std::map<std::string, ParsedEntry>& entries,
                           const std::string& key) {
  const auto it = entries.find(key);
  if (it == entries.end()) throw CorruptCheckpoint("missing checkpoint key '" + key + "'");
  return it->second;
}

std::vector<double> parse_numbers(const std::string& text, std::size_t expected,
                                  const std::string& key) {
  std::istringstream in(text);
  std::vector<double> values;
  double v;
  while (in >> v) values.push_back(v);
  if (values.size() != expected)
    throw CorruptCheckpoint("checkpoint key '" + key + "' has " + std::to_string(values.size()) +
                            " values, expected " + std::to_string(expected));
  return values;
}

}  // namespace

std::string checkpoint_to_string(const Checkpoint& checkpoint) {
  const auto& c = checkpoint.config;
  std::string out = "gmf-gcnn-checkpoint v1\n";
  out += "n_vertices = " + std::to_string(c.n_vertices) + "\n";
  out += "k_channels = " + std::to_string(c.k_channels) + "\n";
  out += "filter_order = " + std::to_string(c.filter_order) + "\n";
  out += "s_outputs = " + std::to_string(c.s_outputs) + "\n";
  out += std::string("loss = ") + loss_name(c.loss) + "\n";
  out += std::string("activation = ") + activation_name(c.activation) + "\n";
  out += "leaky_slope = " + fmt(c.leaky_slope) + "\n";
  out += std::string("pooling = ") + pooling_name(c.pooling) + "\n";
  out += "step_conv = " + fmt(c.step_conv) + "\n";
  out += "step_bias = " + fmt(c.step_bias) + "\n";
  out += "step_fc = " + fmt(c.step_fc) + "\n";
  out += "sequential_fc_update = " + std::to_string(c.sequential_fc_update ? 1 : 0) + "\n";
  out += "tie_channel_weights = " + std::to_string(c.tie_channel_weights ? 1 : 0) + "\n";
  out += "rng_seed = " + std::to_string(checkpoint.seed) + "\n";
  out += "rng_draws = " + std::to_string(checkpoint.draws) + "\n";
  out += matrix_line("conv_weights", checkpoint.params.conv_weights);
  out += vector_line("biases", checkpoint.params.biases);
  out += matrix_line("fc_weights", checkpoint.params.fc_weights);
  return out;
}

Checkpoint checkpoint_from_string(const std::string& text) {
  if (text.rfind("gmf-gcnn-checkpoint v1", 0) != 0)
    throw CorruptCheckpoint("not a gmf-gcnn checkpoint (bad header)");
  const auto entries = parse_entries(text);
  Checkpoint cp;
  auto scalar = [&](const char* key) { return std::stod(require(entries, key).value); };
  cp.config.n_vertices = static_cast<int>(scalar("n_vertices"));
  cp.config.k_channels = static_cast<int>(scalar("k_channels"));
  cp.config.filter_order = static_cast<int>(scalar("filter_order"));
  cp.config.s_outputs = static_cast<int>(scalar("s_outputs"));

  auto word = [&](const char* key) {
    std::istringstream ss(require(entries, key).value);
    std::string w;
    ss >> w;
    return w;
  };
  const std::string loss = word("loss");
  if (loss == "mse-on-logits") cp.config.loss = LossKind::MseOnLogits;
  else if (loss == "softmax-cross-entropy") cp.config.loss = LossKind::SoftmaxCrossEntropy;
  else throw CorruptCheckpoint("unknown loss '" + loss + "'");
  const std::string activation = word("activation");
  if (activation == "relu") cp.config.activation = ActivationKind::Relu;
  else if (activation == "leaky-relu") cp.config.activation = ActivationKind::LeakyRelu;
  else throw CorruptCheckpoint("unknown activation '" + activation + "'");
  const std::string pooling = word("pooling");
  if (pooling == "none") cp.config.pooling = PoolingKind::None;
  else if (pooling == "coarsen-max") cp.config.pooling = PoolingKind::CoarsenMax;
  else throw CorruptCheckpoint("unknown pooling '" + pooling + "'");

  cp.config.leaky_slope = scalar("leaky_slope");
  cp.config.step_conv = scalar("step_conv");
  cp.config.step_bias = scalar("step_bias");
  cp.config.step_fc = scalar("step_fc");
  cp.config.sequential_fc_update = scalar("sequential_fc_update") != 0.0;
  cp.config.tie_channel_weights = scalar("tie_channel_weights") != 0.0;
  cp.seed = std::stoull(require(entries, "rng_seed").value);
  cp.draws = std::stoull(require(entries, "rng_draws").value);

  const auto& conv = require(entries, "conv_weights");
  if (conv.shape.size() != 2) throw CorruptCheckpoint("conv_weights needs a RxC shape");
  auto conv_values = parse_numbers(conv.value, static_cast<std::size_t>(conv.shape[0]) *
                                                   static_cast<std::size_t>(conv.shape[1]),
                                   "conv_weights");
  cp.params.conv_weights.resize(conv.shape[0], conv.shape[1]);
  for (int i = 0, idx = 0; i < conv.shape[0]; ++i)
    for (int j = 0; j < conv.shape[1]; ++j) cp.params.conv_weights(i, j) = conv_values[static_cast<std::size_t>(idx++)];

  const auto& biases = require(entries, "biases");
  if (biases.shape.size() != 1) throw CorruptCheckpoint("biases needs a length");
  auto bias_values = parse_numbers(biases.value, static_cast<std::size_t>(biases.shape[0]), "biases");
  cp.params.biases = Eigen::Map<const Vector>(bias_values.data(), biases.shape[0]);

  const auto& fc = require(entries, "fc_weights");
  if (fc.shape.size() != 2) throw CorruptCheckpoint("fc_weights needs a RxC shape");
  auto fc_values = parse_numbers(fc.value, static_cast<std::size_t>(fc.shape[0]) *
                                               static_cast<std::size_t>(fc.shape[1]),
                                 "fc_weights");
  cp.params.fc_weights.resize(fc.shape[0], fc.shape[1]);
  for (int i = 0, idx = 0; i < fc.shape[0]; ++i)
    for (int j = 0; j < fc.shape[1]; ++j) cp.params.fc_weights(i, j) = fc_values[static_cast<std::size_t>(idx++)];

  cp.config.validate();
  if (cp.params.conv_weights.rows() != cp.config.k_channels ||
      cp.params.conv_weights.cols() != cp.config.filter_order ||
      cp.params.biases.size() != cp.config.k_channels ||
      cp.params.fc_weights.rows() != cp.config.s_outputs ||
      cp.params.fc_weights.cols() != cp.config.flattened_size())
    throw CorruptCheckpoint("parameter shapes disagree with the stored configuration");
  return cp;
}

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint) {
  std::ofstream out(path);
  if (!out) throw FileError("cannot write '" + path + "'");
  out << checkpoint_to_string(checkpoint);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return checkpoint_from_string(buffer.str());
  } catch (const CorruptCheckpoint&) {
    throw;
  } catch (const std::exception& e) {
    throw CorruptCheckpoint(std::string("failed to parse '") + path + "': " + e.what());
  }
}

}  // namespace gmf
