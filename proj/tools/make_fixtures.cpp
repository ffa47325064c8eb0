// Regenerates fixtures/ and certifies each network by cross-method agreement.
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "ogf/dynamic_program.hpp"
#include "ogf/geometric_program.hpp"
#include "ogf/greedy.hpp"
#include "ogf/instances.hpp"
#include "ogf/network_io.hpp"
#include "ogf/signomial.hpp"

using namespace ogf;

namespace {

nlohmann::ordered_json certify(const std::string& file, const GeneratorSpec& spec, const Network& n,
                               bool& ok) {
  const FlowModel m = make_flow_model(n);
  const OgfSolution gp = solve_gp(m);
  const SpResult sp = solve_signomial(m);
  DpOptions o;
  o.n_beta = 1000;
  o.n_alpha = 400;
  const OgfSolution dp = solve_dp(m, o);
  const OgfSolution gr = solve_greedy(m);

  int compressors = 0;
  for (const Edge& e : n.edges) compressors += e.has_compressor() ? 1 : 0;
  const bool hard = infeasible_without_compression(n);
  ok = ok && hard && (gp.feasible() || sp.solution.feasible() || dp.feasible());

  nlohmann::ordered_json j;
  j["file"] = file;
  j["seed"] = spec.seed;
  j["nodes"] = n.nodes.size();
  j["main_nodes"] = spec.node_count;
  j["compressors"] = compressors;
  j["uncompressed_infeasible"] = hard;
  j["certified_cost"] = sp.solution.cost;
  j["certified_by"] = "sp, cross-checked against gp and dp";
  j["gp_cost"] = gp.cost;
  j["sp_cost"] = sp.solution.cost;
  j["dp_cost"] = dp.cost;
  j["dp_bins"] = {o.n_beta, o.n_alpha};
  j["greedy_cost"] = gr.cost;
  j["status"] = {{"gp", to_string(gp.status)},
                 {"sp", to_string(sp.solution.status)},
                 {"dp", to_string(dp.status)},
                 {"greedy", to_string(gr.status)}};
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixtures <fixture-dir>\n";
    return 1;
  }
  const std::string dir = argv[1];
  nlohmann::ordered_json manifest;
  manifest["fixtures"] = nlohmann::ordered_json::array();
  bool ok = true;
  for (const auto& [file, spec] : {std::pair{std::string("belgian_like.json"), belgian_like_spec()},
                                   std::pair{std::string("transco_like.json"), transco_like_spec()}}) {
    const Network n = generate(spec);
    std::ofstream(dir + "/" + file, std::ios::binary) << serialize_network(n);
    manifest["fixtures"].push_back(certify(file, spec, n, ok));
    std::cout << manifest["fixtures"].back().dump() << "\n";
  }
  std::ofstream(dir + "/manifest.json", std::ios::binary) << manifest.dump(2) << "\n";
  if (!ok) {
    std::cerr << "certification failed\n";
    return 1;
  }
  return 0;
}
