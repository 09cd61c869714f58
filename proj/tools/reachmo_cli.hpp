#ifndef REACHMO_TOOLS_CLI_HPP
#define REACHMO_TOOLS_CLI_HPP

// Command-line front end: parse, route, compute, emit JSON/CSV plus a run manifest.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include <CLI11.hpp>

#include "reachmo/reachmo.hpp"

namespace reachmo::cli {

inline constexpr const char* kVersion = "0.1.0";

enum Exit : int { ok = 0, internal = 1, validation = 2, certification = 3, usage = 64 };

/// Certificate requested by the user could not be established.
class CertificationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw InternalInconsistency("sha256 failed");
  std::ostringstream ss;
  for (unsigned int i = 0; i < len; ++i) ss << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return ss.str();
}

/// A missing path falls back to the bundled networks directory.
inline std::string resolve_network(const std::string& path) {
  if (std::filesystem::exists(path)) return path;
#ifdef REACHMO_DATA_DIR
  const auto bundled = std::filesystem::path(REACHMO_DATA_DIR) / "networks" / path;
  if (std::filesystem::exists(bundled)) return bundled.string();
#endif
  throw ParseError(path, "network file not found");
}

inline std::vector<std::int64_t> parse_int_list(const std::string& text, const std::string& what) {
  std::vector<std::int64_t> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t used = 0;
    try {
      out.push_back(std::stoll(tok, &used));
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || tok.find_first_not_of(" \t", used) != std::string::npos)
      throw ParseError(what, "expected a comma-separated list of integers, got \"" + text + "\"");
  }
  if (out.empty()) throw ParseError(what, "empty list");
  return out;
}

/// Either one mode per stage or a single mode repeated over all stages.
inline ModeSequence parse_sequence(const std::string& text, std::size_t stages) {
  const auto v = parse_int_list(text, "--sequence");
  ModeSequence s;
  for (auto x : v) s.push_back(static_cast<int>(x));
  if (s.size() == 1) s.assign(stages, s[0]);
  if (s.size() != stages)
    throw DimensionError("--sequence: " + std::to_string(s.size()) + " modes given for " + std::to_string(stages) +
                         " stages");
  return s;
}

/// "E[P]", "E[P^2]", "V[P]" or "C[M,P]".
struct ProjectionTarget {
  enum Kind { mean, second, variance, covariance } kind = mean;
  std::size_t a = 0, b = 0;
  std::string text;
};

inline std::vector<ProjectionTarget> parse_targets(const std::string& text, const std::vector<std::string>& species) {
  std::vector<std::string> parts;
  int depth = 0;
  std::string cur;
  for (char ch : text) {
    if (ch == '[') ++depth;
    if (ch == ']') --depth;
    if (ch == ',' && depth == 0) {
      parts.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(ch))) {
      cur += ch;
    }
  }
  parts.push_back(cur);
  if (parts.size() != 2) throw ParseError("--project", "expected two targets, e.g. \"E[P],V[P]\"");
  auto index = [&](const std::string& name) {
    for (std::size_t s = 0; s < species.size(); ++s)
      if (species[s] == name) return s;
    throw ParseError("--project", "unknown species '" + name + "'");
  };
  static const std::regex one(R"(([EV])\[(\w+)(\^2)?\])"), two(R"(C\[(\w+),(\w+)\])");
  std::vector<ProjectionTarget> out;
  for (const auto& p : parts) {
    std::smatch m;
    ProjectionTarget t;
    t.text = p;
    if (std::regex_match(p, m, one)) {
      if (m[1] == "V" && m[3].matched) throw ParseError("--project", "V[X^2] is not supported");
      t.kind = m[1] == "V" ? ProjectionTarget::variance : m[3].matched ? ProjectionTarget::second : ProjectionTarget::mean;
      t.a = t.b = index(m[2]);
    } else if (std::regex_match(p, m, two)) {
      t.kind = ProjectionTarget::covariance;
      t.a = index(m[1]);
      t.b = index(m[2]);
    } else {
      throw ParseError("--project", "cannot read target \"" + p + "\"");
    }
    out.push_back(t);
  }
  return out;
}

/// Row of L on the moment vector (means, then upper-triangular covariances).
inline Vector moment_row(const ProjectionTarget& t, std::size_t S) {
  Vector l = Vector::Zero(static_cast<Eigen::Index>(moment_dim(S)));
  switch (t.kind) {
    case ProjectionTarget::mean: l[static_cast<Eigen::Index>(t.a)] = 1.0; break;
    case ProjectionTarget::variance:
    case ProjectionTarget::covariance:
      l[static_cast<Eigen::Index>(cov_index(S, std::min(t.a, t.b), std::max(t.a, t.b)))] = 1.0;
      break;
    case ProjectionTarget::second:
      throw UnsupportedError("--project: " + t.text + " is not linear in the moment vector; use V[...]");
  }
  return l;
}

enum class Route { linear, switched, fsp };

inline const char* to_string(Route r) {
  return r == Route::linear ? "linear" : r == Route::switched ? "switched" : "fsp";
}

/// Affine networks of order <= 1 go to the moment equations; the control
/// classification then picks linear or switched. Everything else goes to FSP.
inline Route route_for(const ReactionNetwork& net) {
  if (max_reaction_order(net) <= 1 && moments_close(net))
    return classify_control(net) == ControlClass::linear ? Route::linear : Route::switched;
  return Route::fsp;
}

inline Json to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline Json to_json(const Matrix& A) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < A.rows(); ++i) rows.push_back(to_json(Vector(A.row(i).transpose())));
  return rows;
}

inline Json to_json(const std::vector<Point2>& pts) {
  Json a = Json::array();
  for (const auto& p : pts) a.push_back({p[0], p[1]});
  return a;
}

inline Json to_json(const BranchBoundStats& s) {
  return {{"nodes", s.nodes}, {"leaves", s.leaves}, {"lp_solves", s.lp_solves}, {"pruned", s.pruned}};
}

/// Result document, CSV side files and manifest of one invocation.
class Run {
 public:
  Run(std::string command, std::ostream& out) : command_(std::move(command)), out_(out) {
    manifest_["command"] = command_;
    manifest_["tool_version"] = kVersion;
    manifest_["config"] = Json::object();
    manifest_["inputs"] = Json::object();
    manifest_["phases"] = Json::object();
    manifest_["outputs"] = Json::array();
    last_ = std::chrono::steady_clock::now();
  }

  Json& config() { return manifest_["config"]; }

  void input(const std::string& name, const std::string& path, const std::string& bytes) {
    manifest_["inputs"][name] = {{"path", path}, {"sha256", sha256_hex(bytes)}};
  }

  void phase(const std::string& name) {
    const auto now = std::chrono::steady_clock::now();
    manifest_["phases"][name] = std::chrono::duration<double>(now - last_).count();
    last_ = now;
  }

  void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ParseError(path, "cannot write file");
    f << text;
    manifest_["outputs"].push_back(path);
  }

  /// Result to `out_path` (or stdout), manifest next to it or at `manifest_path`.
  void finish(const Json& result, const std::string& out_path, std::string manifest_path) {
    const std::string text = result.dump(2) + "\n";
    if (out_path.empty()) {
      out_ << text;
    } else {
      write_text(out_path, text);
      if (manifest_path.empty()) {
        std::filesystem::path p(out_path);
        manifest_path = (p.parent_path() / (p.stem().string() + ".manifest.json")).string();
      }
    }
    phase("write");
    if (!manifest_path.empty()) {
      std::ofstream f(manifest_path, std::ios::binary);
      if (!f) throw ParseError(manifest_path, "cannot write file");
      f << manifest_.dump(2) << "\n";
    }
  }

 private:
  std::string command_;
  std::ostream& out_;
  Json manifest_;
  std::chrono::steady_clock::time_point last_;
};

struct Common {
  std::string network;
  std::string out;
  std::string manifest;
  unsigned threads = 0;
};

inline ReactionNetwork load_into(Run& run, const Common& c) {
  const std::string path = resolve_network(c.network);
  const std::string bytes = read_file(path);
  run.input("network", path, bytes);
  auto net = parse_network(bytes);
  run.phase("load");
  return net;
}

inline Truncation truncation_for(const ReactionNetwork& net, const std::string& bounds) {
  if (bounds.empty()) throw PreconditionError("--bounds is required for the FSP path (one bound per species)");
  const auto b = parse_int_list(bounds, "--bounds");
  if (b.size() != net.num_species())
    throw DimensionError("--bounds: " + std::to_string(b.size()) + " bounds for " +
                         std::to_string(net.num_species()) + " species");
  return build_truncation(b);
}

inline MassCertificate certify_or_fail(FspModel& model, double eps_target, Json& doc) {
  const auto cert = certify_mass(model, eps_target);
  doc["certificate"] = {{"epsilon", cert.epsilon},
                        {"eps_target", eps_target},
                        {"certified", cert.certified},
                        {"minimizing_sequence", cert.minimizing_sequence},
                        {"search", to_json(cert.stats)}};
  return cert;
}

/// Points on the polygon boundary mapped by (y1, y2) -> (y1, y2 - y1^2).
inline std::vector<Point2> variance_image(const std::vector<Point2>& poly, int per_edge = 64) {
  std::vector<Point2> out;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point2& a = poly[i];
    const Point2& b = poly[(i + 1) % poly.size()];
    for (int j = 0; j < per_edge; ++j) {
      const Point2 y = a + (b - a) * (static_cast<double>(j) / per_edge);
      out.emplace_back(y[0], y[1] - y[0] * y[0]);
    }
  }
  return out;
}

inline Json region_json(const ProjectedRegion& reg) {
  Json hs = Json::array();
  for (std::size_t d = 0; d < reg.halfspaces.size(); ++d) {
    const auto& h = reg.halfspaces[d];
    Json j = {{"normal", {h.n1, h.n2}}, {"v", h.v}, {"delta", h.delta}};
    if (d < reg.parameters.size()) j["parameter"] = reg.parameters[d];
    hs.push_back(j);
  }
  const auto poly = reg.polygon();
  Json doc = {{"halfspaces", hs},
              {"outer_vertices", to_json(poly.vertices)},
              {"bounded", !poly.unbounded},
              {"empty", poly.empty},
              {"notes", reg.notes}};
  if (!reg.inner_vertices.empty()) {
    doc["inner_kind"] = reg.inner_kind;
    doc["inner_vertices"] = to_json(convex_hull(reg.inner_vertices));
  }
  if (reg.epsilon) doc["epsilon"] = *reg.epsilon;
  return doc;
}

inline std::string region_csv(const Json& doc) {
  std::ostringstream ss;
  ss << std::setprecision(17) << "set,index,y1,y2\n";
  for (const char* key : {"outer_vertices", "inner_vertices", "variance_image"}) {
    if (!doc.contains(key)) continue;
    std::size_t i = 0;
    for (const auto& p : doc[key]) ss << key << ',' << i++ << ',' << p[0].get<double>() << ',' << p[1].get<double>() << '\n';
  }
  return ss.str();
}

inline int cmd_moments(Run& run, const Common& c, const std::string& sequence) {
  const auto net = load_into(run, c);
  if (!moments_close(net)) throw NonClosedMomentsError("moments: a reaction is not affine; the moment equations do not close");
  const auto modes = enumerate_modes(net);
  Json doc = {{"class", to_string(classify_control(net))},
              {"max_reaction_order", max_reaction_order(net)},
              {"labels", moment_labels(net.species)},
              {"x0", to_json(initial_moments(net))}};
  Json ms = Json::array();
  for (const auto& m : modes.modes) {
    const auto [A, b] = build_moment_system(net, m);
    ms.push_back({{"input", m}, {"A", to_json(A)}, {"b", to_json(b)}});
  }
  doc["modes"] = ms;
  run.config()["sequence"] = sequence;
  if (!sequence.empty()) {
    const auto sys = to_switched_system(net);
    const auto s = parse_sequence(sequence, sys.num_stages());
    doc["sequence"] = s;
    doc["terminal"] = to_json(sys.terminal(s));
  }
  run.phase("compute");
  run.finish(doc, c.out, c.manifest);
  return Exit::ok;
}

struct ReachArgs {
  std::string project = "E[P],V[P]";
  std::size_t directions = 0;
  std::string bounds;
  std::string route = "auto";
  double eps_target = 1e-2;
  std::string csv;
  std::string dump_lp;
};

inline int cmd_reach(Run& run, const Common& c, const ReachArgs& a) {
  const auto net = load_into(run, c);
  const auto targets = parse_targets(a.project, net.species);
  Route route = route_for(net);
  if (a.route == "linear") route = Route::linear;
  if (a.route == "switched") route = Route::switched;
  if (a.route == "fsp") route = Route::fsp;
  ReachOptions opt;
  opt.threads = c.threads;

  Json doc = {{"route", to_string(route)}, {"targets", {targets[0].text, targets[1].text}}};
  auto& cfg = run.config();
  cfg["project"] = a.project;
  cfg["route"] = to_string(route);
  cfg["threads"] = worker_count(c.threads);

  ProjectedRegion reg;
  if (route != Route::fsp) {
    const std::size_t S = net.num_species();
    const Vector l1 = moment_row(targets[0], S), l2 = moment_row(targets[1], S);
    const std::size_t D = a.directions ? a.directions : 64;
    cfg["directions"] = D;
    if (route == Route::linear) {
      if (!a.dump_lp.empty()) throw UnsupportedError("--dump-lp: the linear path solves no MILP");
      reg = project_2d(to_linear_model(net), l1, l2, default_angles(D), opt);
    } else {
      const auto sys = to_switched_system(net);
      if (!a.dump_lp.empty()) {
        std::ostringstream lp;
        write_lp_format(build_bigM_program(sys, l1, Sense::max, compute_bigM(sys)), lp, "support value along " + targets[0].text);
        run.write_text(a.dump_lp, lp.str());
      }
      reg = project_2d(sys, l1, l2, default_angles(D), opt);
    }
    doc["region"] = region_json(reg);
  } else {
    // (E[X], V[X]) is computed as (E[X], E[X^2]) and mapped through v = y2 - y1^2.
    bool transform = false;
    auto weights = [&](const ProjectionTarget& t, const Truncation& J, bool first) {
      switch (t.kind) {
        case ProjectionTarget::mean: return species_weights(J, t.a, 1);
        case ProjectionTarget::second: return species_weights(J, t.a, 2);
        case ProjectionTarget::variance:
          if (first || targets[0].kind != ProjectionTarget::mean || targets[0].a != t.a)
            throw UnsupportedError("--project: on the FSP path V[X] is only available as E[X],V[X]");
          transform = true;
          return species_weights(J, t.a, 2);
        case ProjectionTarget::covariance: break;
      }
      throw UnsupportedError("--project: covariances are not available on the FSP path");
    };
    FspModel model(net, truncation_for(net, a.bounds));
    const Vector l1 = weights(targets[0], model.truncation(), true), l2 = weights(targets[1], model.truncation(), false);
    const std::size_t D = a.directions ? a.directions : 32;
    cfg["bounds"] = model.truncation().bounds();
    cfg["eps_target"] = a.eps_target;
    cfg["directions"] = D;
    const auto cert = certify_or_fail(model, a.eps_target, doc);
    run.phase("certify");
    if (!cert.certified) {
      run.finish(doc, c.out, c.manifest);
      throw CertificationFailure("mass certificate failed: epsilon = " + std::to_string(cert.epsilon) +
                                 " exceeds the target " + std::to_string(a.eps_target));
    }
    const auto gammas = default_gammas(D);
    if (!a.dump_lp.empty()) {
      const auto sys = model.probability_system();
      std::ostringstream lp;
      write_lp_format(build_bigM_program(sys, Vector(l2 - gammas[0] * l1), Sense::max,
                                         compute_bigM(sys, Vector::Ones(static_cast<Eigen::Index>(model.size())))),
                      lp, "support value, gamma = " + std::to_string(gammas[0]));
      run.write_text(a.dump_lp, lp.str());
    }
    reg = fsp_projected_outer(model, l1, l2, gammas, cert.epsilon, opt);
    Json r = region_json(reg);
    if (transform) {
      r["space"] = {targets[0].text, "E[" + net.species[targets[0].a] + "^2]"};
      r["variance_image"] = to_json(variance_image(reg.polygon().vertices));
      r["notes"].push_back("variance_image is the nonlinear image (y1, y2 - y1^2) of the outer region, sampled on its boundary");
    }
    doc["region"] = r;
  }
  run.phase("compute");
  if (!a.csv.empty()) run.write_text(a.csv, region_csv(doc["region"]));
  run.finish(doc, c.out, c.manifest);
  return Exit::ok;
}

inline int cmd_fsp_certify(Run& run, const Common& c, const std::string& bounds, double eps_target) {
  const auto net = load_into(run, c);
  FspModel model(net, truncation_for(net, bounds));
  run.config()["bounds"] = model.truncation().bounds();
  run.config()["eps_target"] = eps_target;
  Json doc = {{"states", model.size()}, {"stages", model.num_stages()}};
  const auto cert = certify_or_fail(model, eps_target, doc);
  run.phase("compute");
  run.finish(doc, c.out, c.manifest);
  if (!cert.certified)
    throw CertificationFailure("epsilon = " + std::to_string(cert.epsilon) + " exceeds the target " +
                               std::to_string(eps_target));
  return Exit::ok;
}

inline int cmd_target(Run& run, const Common& c, const std::string& bounds, double eps_target,
                      const std::string& target, bool avoid) {
  const auto net = load_into(run, c);
  const auto set = TargetSet::parse(target, net.species);
  FspModel model(net, truncation_for(net, bounds));
  auto& cfg = run.config();
  cfg["bounds"] = model.truncation().bounds();
  cfg["eps_target"] = eps_target;
  cfg["target"] = target;
  cfg["avoid"] = avoid;
  Json doc = {{"target", set.text()}, {"mode", avoid ? "avoid" : "reach"}};
  const auto cert = certify_or_fail(model, eps_target, doc);
  run.phase("certify");
  if (!cert.certified) {
    run.finish(doc, c.out, c.manifest);
    throw CertificationFailure("mass certificate failed: epsilon = " + std::to_string(cert.epsilon));
  }
  const auto r = avoid ? max_avoid_probability(model, set) : max_target_probability(model, set);
  doc["sequence"] = r.sequence;
  doc["probability_lower"] = r.prob_lower;
  doc["probability_upper"] = r.prob_upper;
  doc["gap"] = r.gap;
  doc["search"] = to_json(r.stats);
  run.phase("compute");
  run.finish(doc, c.out, c.manifest);
  return Exit::ok;
}

struct SsaArgs {
  std::string sequence;
  std::size_t runs = 10000;
  std::uint64_t seed = 1;
  double level = 0.99;
  std::string csv;
  std::string trajectory;
};

inline int cmd_ssa(Run& run, const Common& c, const SsaArgs& a) {
  const auto net = load_into(run, c);
  if (a.runs < 2) throw DomainError("--runs must be at least 2");
  if (!(a.level > 0.0 && a.level < 1.0)) throw DomainError("--level must lie in (0, 1)");
  const auto seq = parse_sequence(a.sequence, net.schedule.stages());
  auto& cfg = run.config();
  cfg["sequence"] = seq;
  cfg["runs"] = a.runs;
  cfg["seed"] = a.seed;
  cfg["level"] = a.level;
  cfg["threads"] = worker_count(c.threads);

  const auto zs = terminal_states(net, seq, a.runs, a.seed, c.threads);
  const auto e = moments_of_samples(zs, net.species, a.level);
  Json doc = {{"labels", e.labels},
              {"estimate", to_json(e.value)},
              {"half_width", to_json(e.half_width)},
              {"level", e.level},
              {"runs", e.runs},
              {"sequence", seq}};
  if (moments_close(net)) doc["moment_equations"] = to_json(to_switched_system(net).terminal(seq));
  run.phase("compute");

  if (!a.csv.empty()) {
    std::map<State, std::size_t> hist;
    for (const auto& z : zs) ++hist[z];
    std::ostringstream ss;
    for (const auto& s : net.species) ss << s << ',';
    ss << "count,frequency\n";
    for (const auto& [z, k] : hist) {
      for (auto x : z) ss << x << ',';
      ss << k << ',' << static_cast<double>(k) / static_cast<double>(zs.size()) << '\n';
    }
    run.write_text(a.csv, ss.str());
  }
  if (!a.trajectory.empty()) {
    const auto tr = simulate(net, seq, run_seed(a.seed, 0));
    std::ostringstream ss;
    ss << std::setprecision(17) << "t";
    for (const auto& s : net.species) ss << ',' << s;
    ss << '\n';
    for (std::size_t j = 0; j < tr.times.size(); ++j) {
      ss << tr.times[j];
      for (auto x : tr.states[j]) ss << ',' << x;
      ss << '\n';
    }
    run.write_text(a.trajectory, ss.str());
  }
  run.finish(doc, c.out, c.manifest);
  return Exit::ok;
}

inline int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reachable sets, mass certificates and target probabilities of controlled reaction networks", "reachmo"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* s) {
    s->add_option("--network", common.network, "network JSON file")->required();
    s->add_option("--out", common.out, "result JSON (default: stdout)");
    s->add_option("--manifest", common.manifest, "run manifest (default: next to --out)");
    s->add_option("--threads", common.threads, "worker threads (default: REACHMO_THREADS or 1)");
  };

  std::string sequence;
  auto* moments = app.add_subcommand("moments", "moment equations of an affine network");
  add_common(moments);
  moments->add_option("--sequence", sequence, "mode per stage; one value repeats");

  ReachArgs ra;
  auto* reach = app.add_subcommand("reach", "projected reachable set of two moments");
  add_common(reach);
  reach->add_option("--project", ra.project, "two targets among E[X], E[X^2], V[X], C[X,Y]")->capture_default_str();
  reach->add_option("--directions", ra.directions, "angles (moments) or slopes (FSP); default 64 or 32");
  reach->add_option("--bounds", ra.bounds, "FSP box, one bound per species, e.g. 6,40");
  reach->add_option("--route", ra.route, "force a path")->check(CLI::IsMember({"auto", "linear", "switched", "fsp"}))->capture_default_str();
  reach->add_option("--eps-target", ra.eps_target, "largest accepted mass loss")->capture_default_str();
  reach->add_option("--csv", ra.csv, "plot-ready vertices");
  reach->add_option("--dump-lp", ra.dump_lp, "big-M program of the first direction in LP format");

  std::string bounds, target;
  double eps_target = 1e-2;
  bool avoid = false;
  auto* certify = app.add_subcommand("fsp-certify", "worst-case retained mass of an FSP box");
  add_common(certify);
  certify->add_option("--bounds", bounds, "box, one bound per species")->required();
  certify->add_option("--eps-target", eps_target, "largest accepted mass loss")->capture_default_str();

  auto* tprob = app.add_subcommand("target-prob", "signal maximizing the probability of a target set");
  add_common(tprob);
  tprob->add_option("--bounds", bounds, "box, one bound per species")->required();
  tprob->add_option("--eps-target", eps_target, "largest accepted mass loss")->capture_default_str();
  tprob->add_option("--target", target, "e.g. \"P>=15\" or \"M<3 && P!=0\"")->required();
  tprob->add_flag("--avoid", avoid, "maximize the probability of staying outside the target");

  SsaArgs sa;
  auto* ssa = app.add_subcommand("ssa", "Monte-Carlo moments under a fixed mode sequence");
  add_common(ssa);
  ssa->add_option("--sequence", sa.sequence, "mode per stage; one value repeats")->required();
  ssa->add_option("--runs", sa.runs)->capture_default_str();
  ssa->add_option("--seed", sa.seed)->capture_default_str();
  ssa->add_option("--level", sa.level, "confidence level")->capture_default_str();
  ssa->add_option("--csv", sa.csv, "terminal histogram");
  ssa->add_option("--trajectory", sa.trajectory, "first sample path");

  if (argc <= 1) {
    err << app.help();
    return Exit::usage;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return Exit::usage;
  }

  std::string command;
  for (int i = 0; i < argc; ++i) command += (i ? " " : "") + std::string(argv[i]);
  Run run(command, out);
  try {
    if (*moments) return cmd_moments(run, common, sequence);
    if (*reach) return cmd_reach(run, common, ra);
    if (*certify) return cmd_fsp_certify(run, common, bounds, eps_target);
    if (*tprob) return cmd_target(run, common, bounds, eps_target, target, avoid);
    if (*ssa) return cmd_ssa(run, common, sa);
  } catch (const CertificationFailure& e) {
    err << "certification failure: " << e.what() << "\n";
    return Exit::certification;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return Exit::validation;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return Exit::validation;
  } catch (const UnsupportedError& e) {
    err << "error: " << e.what() << "\n";
    return Exit::validation;
  } catch (const std::invalid_argument& e) {  // dimension and precondition errors
    err << "error: " << e.what() << "\n";
    return Exit::validation;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return Exit::validation;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return Exit::internal;
  }
  return Exit::usage;
}

}  // namespace reachmo::cli

#endif  // REACHMO_TOOLS_CLI_HPP
