#include "core/model_io.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>

#include "core/error.hpp"

namespace kardashev::model_io {

namespace {

using nlohmann::json;

constexpr const char* kFormatName = "kardashev-forest";

json tree_to_json(const forest::Tree& tree) {
  json feature = json::array(), threshold = json::array(), left = json::array(),
       right = json::array(), value = json::array(), cover = json::array();
  for (const auto& n : tree.nodes) {
    feature.push_back(n.feature);
    threshold.push_back(n.threshold);
    left.push_back(n.left);
    right.push_back(n.right);
    value.push_back(n.value);
    cover.push_back(n.cover);
  }
  return {{"feature", feature}, {"threshold", threshold}, {"left", left},
          {"right", right},     {"value", value},         {"cover", cover}};
}

forest::Tree tree_from_json(const json& j) {
  const auto& feature = j.at("feature");
  const std::size_t n = feature.size();
  for (const char* key : {"threshold", "left", "right", "value", "cover"}) {
    if (j.at(key).size() != n) {
      throw ModelIntegrityError(std::string("tree array '") + key + "' has inconsistent length");
    }
  }
  forest::Tree tree;
  tree.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& node = tree.nodes[i];
    node.feature = feature[i].get<std::int32_t>();
    node.threshold = j["threshold"][i].get<double>();
    node.left = j["left"][i].get<std::int32_t>();
    node.right = j["right"][i].get<std::int32_t>();
    node.value = j["value"][i].get<double>();
    node.cover = j["cover"][i].get<std::int64_t>();
  }
  return tree;
}

}  // namespace

void check_integrity(const forest::ForestModel& model) {
  const auto p = static_cast<std::int32_t>(model.feature_names.size());
  if (model.trees.empty()) throw ModelIntegrityError("forest has no trees");
  if (static_cast<int>(model.trees.size()) != model.hyper.n_trees) {
    throw ModelIntegrityError("tree count does not match n_trees");
  }
  for (std::size_t t = 0; t < model.trees.size(); ++t) {
    const auto& nodes = model.trees[t].nodes;
    const auto size = static_cast<std::int32_t>(nodes.size());
    if (size == 0) throw ModelIntegrityError("tree " + std::to_string(t) + " is empty");
    for (std::int32_t i = 0; i < size; ++i) {
      const auto& n = nodes[static_cast<std::size_t>(i)];
      const std::string where = "tree " + std::to_string(t) + " node " + std::to_string(i);
      if (n.cover <= 0) throw ModelIntegrityError(where + " has non-positive cover");
      if (n.is_leaf()) continue;
      if (n.feature >= p) throw ModelIntegrityError(where + " references unknown feature");
      if (n.left <= i || n.right <= i || n.left >= size || n.right >= size) {
        throw ModelIntegrityError(where + " has invalid child index");
      }
      if (nodes[static_cast<std::size_t>(n.left)].cover +
              nodes[static_cast<std::size_t>(n.right)].cover != n.cover) {
        throw ModelIntegrityError(where + " violates cover conservation");
      }
    }
  }
}

void write_forest(std::ostream& out, const forest::ForestModel& model,
                  const std::string& metadata_json) {
  const auto& h = model.hyper;
  json j;
  j["format"] = kFormatName;
  j["schema_version"] = kSchemaVersion;
  j["hyperparams"] = {{"n_trees", h.n_trees},     {"mtry", h.resolved_mtry(model.n_features())},
                      {"min_leaf", h.min_leaf},   {"max_depth", h.max_depth},
                      {"seed", h.seed},           {"bootstrap", h.bootstrap}};
  j["feature_names"] = model.feature_names;
  j["oob_rmse"] = std::isnan(model.oob_rmse) ? json(nullptr) : json(model.oob_rmse);
  try {
    j["metadata"] = json::parse(metadata_json.empty() ? "{}" : metadata_json);
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("model metadata is not valid JSON: ") + e.what());
  }
  if (!j["metadata"].is_object()) throw ArgumentError("model metadata must be a JSON object");
  json trees = json::array();
  for (const auto& t : model.trees) trees.push_back(tree_to_json(t));
  j["trees"] = std::move(trees);
  out << j.dump() << '\n';
}

forest::ForestModel read_forest(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ModelIntegrityError(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kFormatName) {
      throw ModelIntegrityError("not a forest model file");
    }
    if (j.at("schema_version").get<int>() != kSchemaVersion) {
      throw ModelIntegrityError("unsupported model schema version " +
                                std::to_string(j.at("schema_version").get<int>()));
    }
    forest::ForestModel model;
    const auto& h = j.at("hyperparams");
    model.hyper.n_trees = h.at("n_trees").get<int>();
    model.hyper.mtry = h.at("mtry").get<int>();
    model.hyper.min_leaf = h.at("min_leaf").get<int>();
    model.hyper.max_depth = h.at("max_depth").get<int>();
    model.hyper.seed = h.at("seed").get<std::uint64_t>();
    model.hyper.bootstrap = h.at("bootstrap").get<bool>();
    model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    if (!j.at("oob_rmse").is_null()) model.oob_rmse = j["oob_rmse"].get<double>();
    for (const auto& t : j.at("trees")) model.trees.push_back(tree_from_json(t));
    check_integrity(model);
    return model;
  } catch (const json::exception& e) {
    throw ModelIntegrityError(std::string("malformed model file: ") + e.what());
  }
}

void save_forest(const std::string& path, const forest::ForestModel& model,
                 const std::string& metadata_json) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_forest(out, model, metadata_json);
  if (!out) throw IoError("failed writing '" + path + "'");
}

forest::ForestModel load_forest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file '" + path + "'");
  return read_forest(in);
}

}  // namespace kardashev::model_io
