#ifndef REACHMO_NETWORK_IO_HPP
#define REACHMO_NETWORK_IO_HPP

// JSON reader and writer for reaction-network documents.

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "reachmo/model.hpp"

namespace reachmo {

using Json = nlohmann::json;

namespace detail {

inline void only_keys(const Json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ParseError(path, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ParseError(path + "." + key, "unknown key");
  }
}

inline const Json& need(const Json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) throw ParseError(path + "." + key, "missing required key");
  return obj.at(key);
}

inline double number(const Json& v, const std::string& path) {
  if (!v.is_number()) throw ParseError(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ParseError(path, "non-finite number");
  return x;
}

inline std::int64_t count(const Json& v, const std::string& path) {
  if (!v.is_number_integer() && !(v.is_number() && std::floor(v.get<double>()) == v.get<double>()))
    throw ParseError(path, "expected an integer");
  return v.is_number_integer() ? v.get<std::int64_t>() : static_cast<std::int64_t>(v.get<double>());
}

inline int species_ref(const std::vector<std::string>& species, const Json& v, const std::string& path) {
  if (!v.is_string()) throw ParseError(path, "expected a species name");
  for (std::size_t s = 0; s < species.size(); ++s)
    if (species[s] == v.get<std::string>()) return static_cast<int>(s);
  throw ParseError(path, "unknown species '" + v.get<std::string>() + "'");
}

template <class T>
std::vector<T> species_map(const std::vector<std::string>& species, const Json& v, const std::string& path) {
  if (!v.is_object()) throw ParseError(path, "expected a name -> count object");
  std::vector<T> out(species.size(), T{});
  for (const auto& [name, val] : v.items()) {
    const int s = species_ref(species, Json(name), path + "." + name);
    if constexpr (std::is_same_v<T, double>)
      out[s] = number(val, path + "." + name);
    else
      out[s] = static_cast<T>(count(val, path + "." + name));
  }
  return out;
}

template <class T>
Json species_object(const std::vector<std::string>& species, const std::vector<T>& values) {
  Json out = Json::object();
  for (std::size_t s = 0; s < species.size(); ++s)
    if (values[s] != T{}) out[species[s]] = values[s];
  return out;
}

}  // namespace detail

/// Builds and validates a network from a parsed JSON document.
inline ReactionNetwork network_from_json(const Json& doc) {
  using namespace detail;
  only_keys(doc, "$", {"species", "reactions", "channels", "schedule", "initial_state", "initial_distribution"});
  ReactionNetwork net;

  const Json& sp = need(doc, "$", "species");
  if (!sp.is_array()) throw ParseError("$.species", "expected an array of names");
  for (std::size_t s = 0; s < sp.size(); ++s) {
    if (!sp[s].is_string()) throw ParseError("$.species[" + std::to_string(s) + "]", "expected a string");
    net.species.push_back(sp[s].get<std::string>());
  }

  if (doc.contains("channels")) {
    const Json& chs = doc.at("channels");
    if (!chs.is_array()) throw ParseError("$.channels", "expected an array");
    for (std::size_t c = 0; c < chs.size(); ++c) {
      const std::string path = "$.channels[" + std::to_string(c) + "]";
      only_keys(chs[c], path, {"name", "levels", "interval"});
      InputChannel ch;
      if (chs[c].contains("name")) {
        if (!chs[c]["name"].is_string()) throw ParseError(path + ".name", "expected a string");
        ch.name = chs[c]["name"].get<std::string>();
      }
      const bool has_levels = chs[c].contains("levels"), has_interval = chs[c].contains("interval");
      if (has_levels == has_interval) throw ParseError(path, "give exactly one of 'levels' or 'interval'");
      if (has_levels) {
        const Json& lv = chs[c]["levels"];
        if (!lv.is_array()) throw ParseError(path + ".levels", "expected an array");
        for (std::size_t k = 0; k < lv.size(); ++k)
          ch.levels.push_back(number(lv[k], path + ".levels[" + std::to_string(k) + "]"));
      } else {
        const Json& iv = chs[c]["interval"];
        if (!iv.is_array() || iv.size() != 2) throw ParseError(path + ".interval", "expected [0, max]");
        if (number(iv[0], path + ".interval[0]") != 0.0)
          throw ParseError(path + ".interval[0]", "continuous channels start at 0");
        ch.interval_max = number(iv[1], path + ".interval[1]");
      }
      net.channels.push_back(std::move(ch));
    }
  }

  const Json& rxs = need(doc, "$", "reactions");
  if (!rxs.is_array()) throw ParseError("$.reactions", "expected an array");
  for (std::size_t ri = 0; ri < rxs.size(); ++ri) {
    const std::string path = "$.reactions[" + std::to_string(ri) + "]";
    const Json& rj = rxs[ri];
    only_keys(rj, path, {"name", "consumed", "produced", "rate", "law", "control_channel"});
    Reaction r;
    if (rj.contains("name")) {
      if (!rj["name"].is_string()) throw ParseError(path + ".name", "expected a string");
      r.name = rj["name"].get<std::string>();
    }
    r.consumed = rj.contains("consumed") ? species_map<int>(net.species, rj["consumed"], path + ".consumed")
                                         : std::vector<int>(net.species.size(), 0);
    r.produced = rj.contains("produced") ? species_map<int>(net.species, rj["produced"], path + ".produced")
                                         : std::vector<int>(net.species.size(), 0);
    r.rate = number(need(rj, path, "rate"), path + ".rate");
    if (rj.contains("law")) {
      const Json& lj = rj["law"];
      const std::string lp = path + ".law";
      if (!lj.is_object()) throw ParseError(lp, "expected an object");
      const Json& ty = need(lj, lp, "type");
      if (!ty.is_string()) throw ParseError(lp + ".type", "expected a string");
      const auto type = ty.get<std::string>();
      if (type == "mass_action") {
        only_keys(lj, lp, {"type"});
        r.law = MassAction{};
      } else if (type == "michaelis_menten") {
        only_keys(lj, lp, {"type", "species", "a", "b", "scale"});
        MichaelisMenten mm;
        mm.species = species_ref(net.species, need(lj, lp, "species"), lp + ".species");
        mm.a = number(need(lj, lp, "a"), lp + ".a");
        mm.b = number(need(lj, lp, "b"), lp + ".b");
        if (lj.contains("scale")) mm.scale = number(lj["scale"], lp + ".scale");
        r.law = mm;
      } else if (type == "custom_affine") {
        only_keys(lj, lp, {"type", "w", "v"});
        CustomAffine ca;
        ca.w = lj.contains("w") ? number(lj["w"], lp + ".w") : 0.0;
        ca.v = lj.contains("v") ? species_map<double>(net.species, lj["v"], lp + ".v")
                                : std::vector<double>(net.species.size(), 0.0);
        r.law = ca;
      } else {
        throw ParseError(lp + ".type", "unknown law '" + type + "'");
      }
    }
    if (rj.contains("control_channel")) r.channel = static_cast<int>(count(rj["control_channel"], path + ".control_channel"));
    net.reactions.push_back(std::move(r));
  }

  const Json& sc = need(doc, "$", "schedule");
  only_keys(sc, "$.schedule", {"t_final", "switch_times", "stage_length"});
  net.schedule.t_final = number(need(sc, "$.schedule", "t_final"), "$.schedule.t_final");
  if (sc.contains("switch_times") && sc.contains("stage_length"))
    throw ParseError("$.schedule", "give 'switch_times' or 'stage_length', not both");
  if (sc.contains("switch_times")) {
    const Json& st = sc["switch_times"];
    if (!st.is_array()) throw ParseError("$.schedule.switch_times", "expected an array");
    for (std::size_t k = 0; k < st.size(); ++k)
      net.schedule.switch_times.push_back(number(st[k], "$.schedule.switch_times[" + std::to_string(k) + "]"));
  } else if (sc.contains("stage_length")) {
    const double h = number(sc["stage_length"], "$.schedule.stage_length");
    if (!(h > 0.0)) throw ParseError("$.schedule.stage_length", "must be > 0");
    const double stages = net.schedule.t_final / h;
    const auto K = static_cast<long>(std::llround(stages));
    if (std::abs(stages - static_cast<double>(K)) > 1e-9 * std::max(1.0, stages))
      throw ParseError("$.schedule.stage_length", "must divide t_final");
    for (long k = 1; k < K; ++k) net.schedule.switch_times.push_back(h * static_cast<double>(k));
  }

  if (doc.contains("initial_state")) {
    const auto v = species_map<std::int64_t>(net.species, doc["initial_state"], "$.initial_state");
    net.initial_state = State(v.begin(), v.end());
  }
  if (doc.contains("initial_distribution")) {
    const Json& dj = doc["initial_distribution"];
    if (!dj.is_array()) throw ParseError("$.initial_distribution", "expected an array");
    for (std::size_t k = 0; k < dj.size(); ++k) {
      const std::string path = "$.initial_distribution[" + std::to_string(k) + "]";
      only_keys(dj[k], path, {"state", "prob"});
      WeightedState ws;
      const auto v = species_map<std::int64_t>(net.species, need(dj[k], path, "state"), path + ".state");
      ws.state = State(v.begin(), v.end());
      ws.prob = number(need(dj[k], path, "prob"), path + ".prob");
      net.initial_distribution.push_back(std::move(ws));
    }
  }

  validate(net);
  return net;
}

inline ReactionNetwork parse_network(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("$", std::string("malformed JSON: ") + e.what());
  }
  return network_from_json(doc);
}

inline ReactionNetwork load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_network(ss.str());
}

/// Canonical JSON form; parse(serialize(net)) reproduces `net`.
inline Json network_to_json(const ReactionNetwork& net) {
  using detail::species_object;
  Json doc;
  doc["species"] = net.species;
  Json rxs = Json::array();
  for (const auto& r : net.reactions) {
    Json rj;
    if (!r.name.empty()) rj["name"] = r.name;
    rj["consumed"] = species_object(net.species, r.consumed);
    rj["produced"] = species_object(net.species, r.produced);
    rj["rate"] = r.rate;
    if (const auto* mm = std::get_if<MichaelisMenten>(&r.law)) {
      rj["law"] = {{"type", "michaelis_menten"}, {"species", net.species[mm->species]},
                   {"a", mm->a}, {"b", mm->b}, {"scale", mm->scale}};
    } else if (const auto* ca = std::get_if<CustomAffine>(&r.law)) {
      rj["law"] = {{"type", "custom_affine"}, {"w", ca->w}, {"v", species_object(net.species, ca->v)}};
    } else {
      rj["law"] = {{"type", "mass_action"}};
    }
    if (r.channel) rj["control_channel"] = *r.channel;
    rxs.push_back(std::move(rj));
  }
  doc["reactions"] = std::move(rxs);
  Json chs = Json::array();
  for (const auto& ch : net.channels) {
    Json cj;
    if (!ch.name.empty()) cj["name"] = ch.name;
    if (ch.finite())
      cj["levels"] = ch.levels;
    else
      cj["interval"] = {0.0, *ch.interval_max};
    chs.push_back(std::move(cj));
  }
  doc["channels"] = std::move(chs);
  doc["schedule"] = {{"t_final", net.schedule.t_final}, {"switch_times", net.schedule.switch_times}};
  if (net.initial_state) doc["initial_state"] = species_object(net.species, *net.initial_state);
  if (!net.initial_distribution.empty()) {
    Json dj = Json::array();
    for (const auto& ws : net.initial_distribution)
      dj.push_back({{"state", species_object(net.species, ws.state)}, {"prob", ws.prob}});
    doc["initial_distribution"] = std::move(dj);
  }
  return doc;
}

inline std::string serialize_network(const ReactionNetwork& net) { return network_to_json(net).dump(2); }

}  // namespace reachmo

#endif  // REACHMO_NETWORK_IO_HPP
