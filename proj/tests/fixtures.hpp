#ifndef REACHMO_TESTS_FIXTURES_HPP
#define REACHMO_TESTS_FIXTURES_HPP

#include <string>

#include "reachmo/network_io.hpp"

namespace fixture {

inline std::string data_path(const std::string& name) { return std::string(REACHMO_DATA_DIR) + "/networks/" + name; }

inline reachmo::ReactionNetwork load(const std::string& name) { return reachmo::load_network(data_path(name)); }

/// Gene-expression network with the given parameters and one channel on transcription.
inline reachmo::ReactionNetwork gene(double kr, double gr, double kp, double gp, double T = 360.0, double stage = 30.0) {
  auto net = load("gene_expression.json");
  net.reactions[0].rate = kr;
  net.reactions[1].rate = gr;
  net.reactions[2].rate = kp;
  net.reactions[3].rate = gp;
  net.schedule.t_final = T;
  net.schedule.switch_times.clear();
  for (double t = stage; t < T - 1e-9; t += stage) net.schedule.switch_times.push_back(t);
  return net;
}

/// Single species, birth at rate k (optionally controlled), no degradation.
inline reachmo::ReactionNetwork birth(double k, double T = 1.0) {
  reachmo::ReactionNetwork net;
  net.species = {"Z"};
  reachmo::Reaction r;
  r.name = "birth";
  r.consumed = {0};
  r.produced = {1};
  r.rate = k;
  net.reactions.push_back(r);
  net.schedule.t_final = T;
  net.initial_state = reachmo::State{0};
  reachmo::validate(net);
  return net;
}

}  // namespace fixture

#endif
