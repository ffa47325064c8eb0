#include "ogf/network_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ogf {

using Json = nlohmann::ordered_json;

namespace {

std::string join(const std::string& path, const char* key) {
  return path == "$" ? std::string(key) : path + "." + key;
}

const Json& require(const Json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw InputError(join(path, key), std::string("missing required field '") + key + "'");
  return *it;
}

double number(const Json& v, const std::string& path) {
  if (!v.is_number()) throw InputError(path, "expected a number");
  return v.get<double>();
}

std::string string(const Json& v, const std::string& path) {
  if (!v.is_string()) throw InputError(path, "expected a string");
  return v.get<std::string>();
}

double required_number(const Json& obj, const char* key, const std::string& path) {
  return number(require(obj, key, path), join(path, key));
}

PipeParams parse_pipe(const Json& j, const std::string& path) {
  if (!j.is_object()) throw InputError(path, "expected an object");
  PipeParams p;
  p.friction = required_number(j, "f", path);
  p.compressibility = required_number(j, "Z", path);
  p.gas_constant = required_number(j, "R", path);
  p.temperature = required_number(j, "T", path);
  p.length = required_number(j, "L", path);
  p.diameter = required_number(j, "D", path);
  return p;
}

Compressor parse_compressor(const Json& j, const std::string& path) {
  if (!j.is_object()) throw InputError(path, "expected an object");
  Compressor c;
  c.position = required_number(j, "r", path);
  c.alpha_max = required_number(j, "alpha_max", path);
  c.cost_coeff = required_number(j, "c", path);
  c.efficiency = required_number(j, "eta", path);
  if (j.contains("m")) {
    c.exponent = number(j["m"], path + ".m");
  } else if (j.contains("gamma")) {
    const double gamma = number(j["gamma"], path + ".gamma");
    if (!(gamma > 1.0)) throw InputError(path + ".gamma", "gamma must exceed 1");
    c.exponent = (gamma - 1.0) / gamma;
  }
  return c;
}

}  // namespace

Network parse_network(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw InputError("$", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw InputError("$", "expected a JSON object");

  const Json& units = require(doc, "units", "$");
  if (!units.is_object()) throw InputError("units", "expected an object");
  const std::string pressure_unit = string(require(units, "pressure", "units"), "units.pressure");
  double to_pascal = 1.0;
  if (pressure_unit == "psi") {
    to_pascal = kPascalPerPsi;
  } else if (pressure_unit != "Pa") {
    throw InputError("units.pressure", "unknown pressure unit '" + pressure_unit + "'");
  }
  if (units.contains("flow") && string(units["flow"], "units.flow") != "kg_s") {
    throw InputError("units.flow", "only kg_s flow units are supported");
  }
  auto squared = [to_pascal](double p) {
    const double pa = p * to_pascal;
    return pa * pa;
  };

  Network net;
  const Json& nodes = require(doc, "nodes", "$");
  if (!nodes.is_array()) throw InputError("nodes", "expected an array");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string path = "nodes[" + std::to_string(i) + "]";
    const Json& j = nodes[i];
    if (!j.is_object()) throw InputError(path, "expected an object");
    Node node;
    node.id = string(require(j, "id", path), path + ".id");
    node.injection = required_number(j, "q", path);
    const double p_min = required_number(j, "p_min", path);
    const double p_max = required_number(j, "p_max", path);
    if (p_min < 0.0) throw InputError(path + ".p_min", "pressure must be non-negative");
    if (p_max < 0.0) throw InputError(path + ".p_max", "pressure must be non-negative");
    node.beta_min = squared(p_min);
    node.beta_max = squared(p_max);
    if (j.contains("milepost") && !j["milepost"].is_null()) {
      node.milepost_km = number(j["milepost"], path + ".milepost");
    }
    net.nodes.push_back(std::move(node));
  }

  auto resolve = [&net](const Json& j, const char* key, const std::string& path) {
    const std::string id = string(require(j, key, path), path + "." + key);
    auto idx = net.find_node(id);
    if (!idx) throw InputError(path + "." + key, "unknown node " + id);
    return *idx;
  };

  const Json& edges = require(doc, "edges", "$");
  if (!edges.is_array()) throw InputError("edges", "expected an array");
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const std::string path = "edges[" + std::to_string(k) + "]";
    const Json& j = edges[k];
    if (!j.is_object()) throw InputError(path, "expected an object");
    Edge e;
    e.from = resolve(j, "from", path);
    e.to = resolve(j, "to", path);
    if (j.contains("pipe_params")) e.pipe = parse_pipe(j["pipe_params"], path + ".pipe_params");
    if (j.contains("a")) {
      e.drop_constant = number(j["a"], path + ".a");
    } else if (e.pipe) {
      try {
        e.drop_constant = pipe_drop_constant(*e.pipe);
      } catch (const InputError& err) {
        throw InputError(path + ".pipe_params." + err.path(), "pipe parameter must be positive");
      }
    } else {
      throw InputError(path, "edge needs either 'a' or 'pipe_params'");
    }
    if (j.contains("compressor") && !j["compressor"].is_null()) {
      e.compressor = parse_compressor(j["compressor"], path + ".compressor");
    }
    net.edges.push_back(e);
  }

  if (doc.contains("root") && !doc["root"].is_null()) {
    const std::string id = string(doc["root"], "root");
    auto idx = net.find_node(id);
    if (!idx) throw InputError("root", "unknown node " + id);
    net.root = *idx;
  }
  if (doc.contains("root_policy")) {
    const std::string policy = string(doc["root_policy"], "root_policy");
    if (policy == "beta_max") {
      net.root_policy = RootPolicy::kPinnedToBetaMax;
    } else if (policy == "free") {
      net.root_policy = RootPolicy::kFree;
    } else if (policy == "value") {
      net.root_policy = RootPolicy::kPinnedToValue;
      net.root_beta = squared(required_number(doc, "root_pressure", "$"));
    } else {
      throw InputError("root_policy", "unknown root policy '" + policy + "'");
    }
  }
  return net;
}

Network load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path, "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_network(buf.str());
}

std::string serialize_network(const Network& n) {
  Json doc;
  Json nodes = Json::array();
  for (const Node& node : n.nodes) {
    Json j;
    j["id"] = node.id;
    j["q"] = node.injection;
    j["p_min"] = std::sqrt(node.beta_min);
    j["p_max"] = std::sqrt(node.beta_max);
    if (node.milepost_km) j["milepost"] = *node.milepost_km;
    nodes.push_back(std::move(j));
  }
  Json edges = Json::array();
  for (const Edge& e : n.edges) {
    Json j;
    j["from"] = n.nodes[e.from].id;
    j["to"] = n.nodes[e.to].id;
    j["a"] = e.drop_constant;
    if (e.pipe) {
      j["pipe_params"] = {{"f", e.pipe->friction},    {"Z", e.pipe->compressibility},
                          {"R", e.pipe->gas_constant}, {"T", e.pipe->temperature},
                          {"L", e.pipe->length},       {"D", e.pipe->diameter}};
    }
    if (e.compressor) {
      const Compressor& c = *e.compressor;
      j["compressor"] = {{"r", c.position},     {"alpha_max", c.alpha_max}, {"c", c.cost_coeff},
                         {"eta", c.efficiency}, {"m", c.exponent}};
    }
    edges.push_back(std::move(j));
  }
  doc["nodes"] = std::move(nodes);
  doc["edges"] = std::move(edges);
  if (!n.nodes.empty()) doc["root"] = n.nodes[n.root].id;
  switch (n.root_policy) {
    case RootPolicy::kPinnedToBetaMax:
      doc["root_policy"] = "beta_max";
      break;
    case RootPolicy::kFree:
      doc["root_policy"] = "free";
      break;
    case RootPolicy::kPinnedToValue:
      doc["root_policy"] = "value";
      doc["root_pressure"] = std::sqrt(n.root_beta);
      break;
  }
  doc["units"] = {{"pressure", "Pa"}, {"flow", "kg_s"}};
  return doc.dump(2) + "\n";
}

}  // namespace ogf
