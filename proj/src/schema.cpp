#include "svmcf/schema.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace svmcf {

namespace {

double parse_extended_real(const nlohmann::json& v, const std::string& what) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    if (s == "inf" || s == "+inf" || s == "Infinity") return kInf;
    if (s == "-inf" || s == "-Infinity") return -kInf;
  }
  throw ConfigError("schema: cannot parse " + what + ": expected number or \"inf\"/\"-inf\"");
}

}  // namespace

FeatureSchema::FeatureSchema(std::vector<FeatureSpec> features, std::string label_column)
    : features_(std::move(features)), label_column_(std::move(label_column)) {
  if (features_.empty()) throw ConfigError("schema: no features declared");
  if (label_column_.empty()) throw ConfigError("schema: label column name is empty");

  std::map<std::string, int> seen;
  for (int i = 0; i < size(); ++i) {
    const FeatureSpec& f = features_[i];
    if (f.name.empty()) throw ConfigError("schema: feature " + std::to_string(i) + " has no name");
    if (f.name == label_column_)
      throw ConfigError("schema: feature '" + f.name + "' collides with the label column");
    if (!seen.emplace(f.name, i).second)
      throw ConfigError("schema: duplicate feature name '" + f.name + "'");
    if (!(f.weight > 0.0))
      throw ConfigError("schema: feature '" + f.name + "' must have weight > 0");
    if (f.kind == FeatureKind::OneHot) {
      if (f.group.empty())
        throw ConfigError("schema: one-hot feature '" + f.name + "' has no group id");
      groups_[f.group].push_back(i);
    } else {
      if (!f.group.empty())
        throw ConfigError("schema: continuous feature '" + f.name + "' carries a group id");
      if (std::isfinite(f.lower) && std::isfinite(f.upper) && !(f.lower < f.upper))
        throw ConfigError("schema: feature '" + f.name + "' needs lower < upper");
    }
  }
  for (const auto& [gid, members] : groups_) {
    if (members.size() < 2)
      throw ConfigError("schema: one-hot group '" + gid + "' needs at least 2 members");
  }
  // Normalize one-hot member bounds to the binary box.
  for (FeatureSpec& f : features_) {
    if (f.kind == FeatureKind::OneHot) {
      f.lower = 0.0;
      f.upper = 1.0;
    }
  }
}

FeatureSchema FeatureSchema::from_json_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("schema: invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("label") || !doc.contains("features"))
    throw ConfigError("schema: expected object with 'label' and 'features'");

  std::vector<FeatureSpec> specs;
  for (const auto& item : doc.at("features")) {
    FeatureSpec f;
    f.name = item.at("name").get<std::string>();
    const std::string kind = item.value("kind", std::string("continuous"));
    if (kind == "continuous") {
      f.kind = FeatureKind::Continuous;
    } else if (kind == "one_hot") {
      f.kind = FeatureKind::OneHot;
      f.group = item.value("group", std::string());
    } else {
      throw ConfigError("schema: feature '" + f.name + "': unknown kind '" + kind + "'");
    }
    if (item.contains("lower")) f.lower = parse_extended_real(item.at("lower"), f.name + ".lower");
    if (item.contains("upper")) f.upper = parse_extended_real(item.at("upper"), f.name + ".upper");
    if (item.contains("weight")) f.weight = parse_extended_real(item.at("weight"), f.name + ".weight");
    specs.push_back(std::move(f));
  }
  return FeatureSchema(std::move(specs), doc.at("label").get<std::string>());
}

FeatureSchema FeatureSchema::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("schema: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

int FeatureSchema::index_of(const std::string& name) const {
  for (int i = 0; i < size(); ++i)
    if (features_[i].name == name) return i;
  return -1;
}

std::vector<int> FeatureSchema::continuous_indices() const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i)
    if (is_continuous(i)) out.push_back(i);
  return out;
}

std::vector<int> FeatureSchema::one_hot_indices() const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i)
    if (!is_continuous(i)) out.push_back(i);
  return out;
}

std::vector<double> FeatureSchema::default_weights() const {
  std::vector<double> w(features_.size());
  for (int i = 0; i < size(); ++i) w[i] = features_[i].weight;
  return w;
}

}  // namespace svmcf
