#include "tripboost/persist.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "tripboost/csv.hpp"
#include "tripboost/errors.hpp"

namespace tripboost {

using nlohmann::json;

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

constexpr std::string_view kMagic = "tripboost-model";

json tree_config_json(const TreeConfig& c) {
  return {{"max_depth", c.max_depth},
          {"min_samples_leaf", c.min_samples_leaf},
          {"min_samples_split", c.min_samples_split},
          {"max_bins", c.max_bins},
          {"feature_subsample", c.feature_subsample},
          {"seed", c.seed}};
}

TreeConfig tree_config_from(const json& j) {
  TreeConfig c;
  c.max_depth = j.at("max_depth").get<int>();
  c.min_samples_leaf = j.at("min_samples_leaf").get<int>();
  c.min_samples_split = j.at("min_samples_split").get<int>();
  c.max_bins = j.at("max_bins").get<int>();
  c.feature_subsample = j.at("feature_subsample").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

json tree_json(const Tree& t) {
  json nodes = json::array();
  for (const auto& n : t.nodes()) {
    if (n.is_leaf()) {
      nodes.push_back(json::array({"leaf", n.value, n.count}));
    } else {
      nodes.push_back(json::array({"split", n.feature, n.threshold, n.left, n.right, n.value, n.count}));
    }
  }
  return {{"arity", t.arity()}, {"nodes", std::move(nodes)}};
}

Tree tree_from(const json& j) {
  std::vector<TreeNode> nodes;
  const auto& arr = j.at("nodes");
  nodes.reserve(arr.size());
  for (const auto& a : arr) {
    TreeNode n;
    const auto type = a.at(0).get<std::string>();
    if (type == "leaf") {
      n.value = a.at(1).get<double>();
      n.count = a.at(2).get<std::size_t>();
    } else if (type == "split") {
      n.feature = a.at(1).get<int>();
      n.threshold = a.at(2).get<double>();
      n.left = a.at(3).get<int>();
      n.right = a.at(4).get<int>();
      n.value = a.at(5).get<double>();
      n.count = a.at(6).get<std::size_t>();
    } else {
      throw FormatError("unknown tree node type '" + type + "'");
    }
    nodes.push_back(n);
  }
  const auto arity = j.at("arity").get<std::size_t>();
  const auto size = static_cast<int>(nodes.size());
  if (nodes.empty()) throw FormatError("tree has no nodes");
  for (const auto& n : nodes) {
    if (!n.is_leaf() && (n.left <= 0 || n.left >= size || n.right <= 0 || n.right >= size ||
                         static_cast<std::size_t>(n.feature) >= arity)) {
      throw FormatError("tree node references are out of range");
    }
  }
  return Tree(std::move(nodes), arity);
}

json bins_json(const BinMap& b) {
  json features = json::array();
  for (const auto& f : b.features) {
    features.push_back({{"edges", f.edges}, {"bin_min", f.bin_min}, {"bin_max", f.bin_max}});
  }
  return {{"max_bins", b.max_bins}, {"features", std::move(features)}};
}

BinMap bins_from(const json& j) {
  BinMap b;
  b.max_bins = j.at("max_bins").get<int>();
  for (const auto& f : j.at("features")) {
    FeatureBins fb;
    fb.edges = f.at("edges").get<std::vector<double>>();
    fb.bin_min = f.at("bin_min").get<std::vector<double>>();
    fb.bin_max = f.at("bin_max").get<std::vector<double>>();
    b.features.push_back(std::move(fb));
  }
  return b;
}

json ensemble_json(const EnsembleModel& m) {
  const auto& c = m.config;
  json members = json::array();
  for (const auto& mem : m.members) members.push_back({{"weight", mem.weight}, {"tree", tree_json(mem.tree)}});
  json out = {
      {"kind", to_string(m.kind)},
      {"config",
       {{"n_estimators", c.n_estimators},
        {"learning_rate", c.learning_rate},
        {"bootstrap", c.bootstrap},
        {"feature_subsample", c.feature_subsample},
        {"loss", to_string(c.loss)},
        {"seed", c.seed},
        {"tree", tree_config_json(c.tree)}}},
      {"base_prediction", m.base_prediction},
      {"stage_train_mse", m.stage_train_mse},
      {"members", std::move(members)},
  };
  out["bins"] = m.bins ? bins_json(*m.bins) : json(nullptr);
  return out;
}

EnsembleModel ensemble_from(const json& j) {
  EnsembleModel m;
  m.kind = parse_ensemble_kind(j.at("kind").get<std::string>());
  const auto& c = j.at("config");
  m.config.n_estimators = c.at("n_estimators").get<int>();
  m.config.learning_rate = c.at("learning_rate").get<double>();
  m.config.bootstrap = c.at("bootstrap").get<bool>();
  m.config.feature_subsample = c.at("feature_subsample").get<double>();
  m.config.loss = parse_ada_loss(c.at("loss").get<std::string>());
  m.config.seed = c.at("seed").get<std::uint64_t>();
  m.config.tree = tree_config_from(c.at("tree"));
  m.base_prediction = j.at("base_prediction").get<double>();
  m.stage_train_mse = j.at("stage_train_mse").get<std::vector<double>>();
  for (const auto& mem : j.at("members")) {
    m.members.push_back({tree_from(mem.at("tree")), mem.at("weight").get<double>()});
  }
  if (m.members.empty()) throw FormatError("ensemble has no members");
  if (!j.at("bins").is_null()) m.bins = bins_from(j.at("bins"));
  return m;
}

json linear_json(const LinearModel& m) {
  json one_hot = json::array();
  for (const auto& s : m.one_hot) one_hot.push_back(json::array({s.column, s.levels}));
  return {{"penalty", to_string(m.penalty)},
          {"lambda", m.lambda},
          {"one_hot", std::move(one_hot)},
          {"input_arity", m.input_arity},
          {"means", m.means},
          {"scales", m.scales},
          {"standardized_coefficients", m.standardized_coefficients},
          {"target_mean", m.target_mean},
          {"coefficients", m.coefficients},
          {"intercept", m.intercept},
          {"converged", m.converged},
          {"iterations", m.iterations}};
}

LinearModel linear_from(const json& j) {
  LinearModel m;
  m.penalty = parse_penalty(j.at("penalty").get<std::string>());
  m.lambda = j.at("lambda").get<double>();
  for (const auto& s : j.at("one_hot")) {
    m.one_hot.push_back(OneHotSpec{s.at(0).get<std::size_t>(), s.at(1).get<int>()});
  }
  m.input_arity = j.at("input_arity").get<std::size_t>();
  m.means = j.at("means").get<std::vector<double>>();
  m.scales = j.at("scales").get<std::vector<double>>();
  m.standardized_coefficients = j.at("standardized_coefficients").get<std::vector<double>>();
  m.target_mean = j.at("target_mean").get<double>();
  m.coefficients = j.at("coefficients").get<std::vector<double>>();
  m.intercept = j.at("intercept").get<double>();
  m.converged = j.at("converged").get<bool>();
  m.iterations = j.at("iterations").get<int>();
  if (m.means.size() != m.scales.size() || m.means.size() != m.standardized_coefficients.size()) {
    throw FormatError("linear model arrays have inconsistent lengths");
  }
  return m;
}

std::string hex16(std::uint64_t v) {
  std::array<char, 17> buf{};
  std::snprintf(buf.data(), buf.size(), "%016llx", static_cast<unsigned long long>(v));
  return buf.data();
}

}  // namespace

std::string serialize_model(const Model& model) {
  json payload = {{"name", model.name()}};
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Tree>) {
          payload["family"] = "tree";
          payload["tree"] = tree_json(m);
        } else if constexpr (std::is_same_v<T, EnsembleModel>) {
          payload["family"] = "ensemble";
          payload["ensemble"] = ensemble_json(m);
        } else {
          payload["family"] = "linear";
          payload["linear"] = linear_json(m);
        }
      },
      model.fitted());
  const std::string body = payload.dump() + "\n";
  return std::string(kMagic) + " " + std::to_string(kModelFormatVersion) + " fnv1a64:" +
         hex16(fnv1a64(body)) + "\n" + body;
}

Model deserialize_model(std::string_view document) {
  const auto eol = document.find('\n');
  if (eol == std::string_view::npos) throw FormatError("model document has no header line");
  std::istringstream header{std::string(document.substr(0, eol))};
  std::string magic, checksum;
  int version = 0;
  if (!(header >> magic >> version >> checksum) || magic != kMagic) {
    throw FormatError("not a tripboost model document");
  }
  if (version != kModelFormatVersion) {
    throw FormatError("unsupported model format version " + std::to_string(version) +
                      " (this build reads version " + std::to_string(kModelFormatVersion) + ")");
  }
  const std::string_view body = document.substr(eol + 1);
  if (checksum != "fnv1a64:" + hex16(fnv1a64(body))) {
    throw FormatError("model checksum mismatch: document is corrupted or truncated");
  }
  try {
    const json payload = json::parse(body);
    const auto name = payload.at("name").get<std::string>();
    const auto family = payload.at("family").get<std::string>();
    if (family == "tree") return Model(name, tree_from(payload.at("tree")));
    if (family == "ensemble") return Model(name, ensemble_from(payload.at("ensemble")));
    if (family == "linear") return Model(name, linear_from(payload.at("linear")));
    throw FormatError("unknown model family '" + family + "'");
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed model payload: ") + e.what());
  }
}

void save_model(const Model& model, const std::filesystem::path& path) {
  const std::string doc = serialize_model(model);
  write_file_atomic(path, [&](std::ostream& out) { out << doc; });
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_model(buf.str());
}

}  // namespace tripboost
