#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "edcrowd/error.hpp"
#include "edcrowd/gbdt.hpp"

namespace edcrowd::gbdt {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;
constexpr const char* kFormatName = "edcrowd-gbdt";

json config_to_json(const TrainConfig& c) {
  return {{"num_trees", c.num_trees},
          {"num_leaves", c.num_leaves},
          {"learning_rate", c.learning_rate},
          {"max_bins", c.max_bins},
          {"min_data_in_leaf", c.min_data_in_leaf},
          {"min_sum_hessian_in_leaf", c.min_sum_hessian_in_leaf},
          {"lambda_l2", c.lambda_l2},
          {"goss_top_rate", c.goss_top_rate},
          {"goss_other_rate", c.goss_other_rate},
          {"categorical_features", c.categorical_features},
          {"positive_weight", c.positive_weight},
          {"seed", c.seed},
          {"num_threads", c.num_threads}};
}

TrainConfig config_from_json(const json& j) {
  TrainConfig c;
  c.num_trees = j.at("num_trees").get<int>();
  c.num_leaves = j.at("num_leaves").get<int>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.max_bins = j.at("max_bins").get<int>();
  c.min_data_in_leaf = j.at("min_data_in_leaf").get<int>();
  c.min_sum_hessian_in_leaf = j.at("min_sum_hessian_in_leaf").get<double>();
  c.lambda_l2 = j.at("lambda_l2").get<double>();
  c.goss_top_rate = j.at("goss_top_rate").get<double>();
  c.goss_other_rate = j.at("goss_other_rate").get<double>();
  c.categorical_features = j.at("categorical_features").get<std::vector<std::size_t>>();
  c.positive_weight = j.at("positive_weight").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.num_threads = j.at("num_threads").get<int>();
  return c;
}

json node_to_json(const TreeNode& n) {
  json j = {{"cover", n.cover}, {"n", n.n_samples}};
  if (n.is_leaf) {
    j["value"] = n.value;
    return j;
  }
  j["feature"] = n.feature;
  j["left"] = n.left;
  j["right"] = n.right;
  j["gain"] = n.gain;
  if (n.categorical) {
    j["kind"] = "categorical";
    j["left_categories"] = n.left_categories;
  } else {
    j["kind"] = "numeric";
    j["threshold_bin"] = n.threshold_bin;
    j["threshold"] = n.threshold;
  }
  return j;
}

TreeNode node_from_json(const json& j) {
  TreeNode n;
  n.cover = j.at("cover").get<double>();
  n.n_samples = j.at("n").get<std::uint32_t>();
  if (j.contains("value")) {
    n.is_leaf = true;
    n.value = j.at("value").get<double>();
    return n;
  }
  n.is_leaf = false;
  n.feature = j.at("feature").get<std::size_t>();
  n.left = j.at("left").get<int>();
  n.right = j.at("right").get<int>();
  n.gain = j.at("gain").get<double>();
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "categorical") {
    n.categorical = true;
    n.left_categories = j.at("left_categories").get<std::vector<int>>();
  } else if (kind == "numeric") {
    n.threshold_bin = j.at("threshold_bin").get<int>();
    n.threshold = j.at("threshold").get<double>();
  } else {
    throw DataError("unknown split kind '" + kind + "'");
  }
  return n;
}

void check_tree(const std::vector<TreeNode>& nodes, std::size_t num_features) {
  if (nodes.empty()) throw DataError("tree without nodes");
  for (const auto& n : nodes) {
    if (n.is_leaf) continue;
    const auto size = static_cast<int>(nodes.size());
    if (n.left <= 0 || n.right <= 0 || n.left >= size || n.right >= size ||
        n.feature >= num_features) {
      throw DataError("malformed tree node");
    }
  }
}

}  // namespace

std::string to_json(const Ensemble& model) {
  json bins = json::array();
  for (const auto& m : model.mappers()) {
    if (m.is_categorical()) {
      bins.push_back({{"kind", "categorical"},
                      {"categories", std::vector<int>(m.categories().begin(), m.categories().end())}});
    } else {
      bins.push_back(
          {{"kind", "numeric"},
           {"boundaries", std::vector<double>(m.boundaries().begin(), m.boundaries().end())}});
    }
  }
  json trees = json::array();
  for (const auto& t : model.trees()) {
    json nodes = json::array();
    for (const auto& n : t.nodes()) nodes.push_back(node_to_json(n));
    trees.push_back({{"nodes", std::move(nodes)}});
  }
  const json doc = {{"format", kFormatName},
                    {"format_version", kFormatVersion},
                    {"num_features", model.num_features()},
                    {"base_score", model.base_score()},
                    {"learning_rate", model.learning_rate()},
                    {"config", config_to_json(model.config())},
                    {"bins", std::move(bins)},
                    {"trees", std::move(trees)}};
  return doc.dump(1);
}

Ensemble from_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    if (doc.at("format").get<std::string>() != kFormatName) throw DataError("not an edcrowd model");
    const int version = doc.at("format_version").get<int>();
    if (version != kFormatVersion) {
      throw DataError("unsupported model format_version " + std::to_string(version));
    }
    const auto num_features = doc.at("num_features").get<std::size_t>();
    std::vector<BinMapper> mappers;
    for (const auto& b : doc.at("bins")) {
      if (b.at("kind").get<std::string>() == "categorical") {
        mappers.push_back(BinMapper::categorical(b.at("categories").get<std::vector<int>>()));
      } else {
        mappers.push_back(BinMapper::numeric(b.at("boundaries").get<std::vector<double>>()));
      }
    }
    if (!mappers.empty() && mappers.size() != num_features) {
      throw DataError("bin mapper count does not match num_features");
    }
    std::vector<Tree> trees;
    for (const auto& t : doc.at("trees")) {
      std::vector<TreeNode> nodes;
      for (const auto& n : t.at("nodes")) nodes.push_back(node_from_json(n));
      check_tree(nodes, num_features);
      trees.emplace_back(std::move(nodes));
    }
    return Ensemble(num_features, doc.at("base_score").get<double>(),
                    doc.at("learning_rate").get<double>(), std::move(trees), std::move(mappers),
                    config_from_json(doc.at("config")));
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model JSON: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("malformed model JSON: ") + e.what());
  }
}

void save_model(const Ensemble& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model file " + path);
  out << to_json(model) << '\n';
  if (!out) throw DataError("failed writing model file " + path);
}

Ensemble load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

}  // namespace edcrowd::gbdt
