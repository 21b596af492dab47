#include <json.hpp>

#include <string>

#include "muller/error.hpp"
#include "muller/resizer.hpp"

namespace muller {

using json = nlohmann::ordered_json;

std::string params_to_json(const MullerParams& params, int indent) {
  json doc;
  doc["k"] = params.k();
  doc["ksize"] = params.ksize;
  doc["std"] = params.std;
  doc["nonlinearity"] = to_string(params.nonlinearity);
  doc["base_method"] = to_string(params.base_method);
  doc["term_order"] = to_string(params.term_order);
  json layers = json::array();
  for (const LayerParams& layer : params.layers) {
    layers.push_back({{"alpha", layer.alpha}, {"beta", layer.beta}});
  }
  doc["layers"] = std::move(layers);
  return doc.dump(indent);
}

MullerParams params_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::Format, std::string("invalid parameter JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    fail(ErrorCode::Format, "parameter JSON must be an object");
  }
  MullerParams params;
  try {
    for (const json& layer : doc.at("layers")) {
      params.layers.push_back({layer.at("alpha").get<double>(), layer.at("beta").get<double>()});
    }
    if (doc.contains("k") && doc.at("k").get<int>() != params.k()) {
      fail(ErrorCode::Format, "field k disagrees with the number of layers");
    }
    if (doc.contains("ksize")) params.ksize = doc.at("ksize").get<int>();
    if (doc.contains("std")) params.std = doc.at("std").get<double>();
    if (doc.contains("nonlinearity")) {
      params.nonlinearity = parse_nonlinearity(doc.at("nonlinearity").get<std::string>());
    }
    if (doc.contains("base_method")) {
      params.base_method = parse_base_method(doc.at("base_method").get<std::string>());
    }
    if (doc.contains("term_order")) {
      params.term_order = parse_term_order(doc.at("term_order").get<std::string>());
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::Format, std::string("invalid parameter JSON: ") + e.what());
  }
  params.validate();
  return params;
}

}  // namespace muller
