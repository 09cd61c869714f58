#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "fixtures.hpp"
#include "reachmo_cli.hpp"

using namespace reachmo;
using Catch::Approx;

namespace {

struct Result {
  int code;
  std::string out, err;
  Json json() const { return Json::parse(out); }
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "reachmo");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) { return cli::read_file(path); }

}  // namespace

TEST_CASE("usage errors") {
  auto r = run({});
  CHECK(r.code == 64);
  CHECK(r.err.find("reach") != std::string::npos);
  CHECK(run({"bogus"}).code == 64);
  CHECK(run({"reach", "--network", "gene_expression.json", "--frobnicate"}).code == 64);
  CHECK(run({"reach"}).code == 64);
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"reach", "--network", "x.json", "--route", "fast"}).code == 64);
}

TEST_CASE("validation errors exit 2") {
  CHECK(run({"moments", "--network", "missing.json"}).code == 2);
  CHECK(run({"moments", "--network", "saturated.json"}).code == 2);
  CHECK(run({"reach", "--network", "gene_expression.json", "--project", "E[Q],V[P]"}).code == 2);
  CHECK(run({"reach", "--network", "gene_expression.json", "--project", "E[P^2],V[P]"}).code == 2);
  CHECK(run({"reach", "--network", "saturated.json"}).code == 2);  // FSP needs --bounds
  CHECK(run({"reach", "--network", "saturated.json", "--bounds", "6"}).code == 2);
  CHECK(run({"reach", "--network", "saturated.json", "--bounds", "3,x"}).code == 2);
  CHECK(run({"ssa", "--network", "gene_expression.json", "--sequence", "1,0"}).code == 2);
  CHECK(run({"target-prob", "--network", "saturated.json", "--bounds", "3,10", "--eps-target", "1", "--target", "Q>1"})
            .code == 2);

  const std::string bad = "bad_network.json";
  std::ofstream(bad) << R"({"species": ["A"], "reactions": [{"consumed": {"B": 1}, "produced": {}, "rate": 1}]})";
  const auto r = run({"moments", "--network", bad});
  CHECK(r.code == 2);
  CHECK(r.err.find("error") != std::string::npos);
}

TEST_CASE("routing on the bundled networks") {
  CHECK(cli::to_string(cli::route_for(fixture::load("gene_expression.json"))) == std::string("linear"));
  CHECK(cli::to_string(cli::route_for(fixture::load("fluorescent_1in.json"))) == std::string("linear"));
  CHECK(cli::to_string(cli::route_for(fixture::load("fluorescent_2in.json"))) == std::string("switched"));
  CHECK(cli::to_string(cli::route_for(fixture::load("saturated.json"))) == std::string("fsp"));
}

TEST_CASE("projection targets") {
  const std::vector<std::string> MP{"M", "P"};
  const auto t = cli::parse_targets("E[P], C[M,P]", MP);
  CHECK(cli::moment_row(t[0], 2) == Vector::Unit(5, 1));
  CHECK(cli::moment_row(t[1], 2) == Vector::Unit(5, 3));
  CHECK(cli::moment_row(cli::parse_targets("V[P],V[M]", MP)[0], 2) == Vector::Unit(5, 4));
  CHECK_THROWS_AS(cli::parse_targets("E[P]", MP), ParseError);
  CHECK_THROWS_AS(cli::parse_targets("E[P],W[P]", MP), ParseError);
}

TEST_CASE("moments subcommand") {
  const auto r = run({"moments", "--network", "gene_expression.json", "--sequence", "1"});
  REQUIRE(r.code == 0);
  const auto j = r.json();
  CHECK(j["class"] == "linear");
  CHECK(j["labels"].size() == 5);
  CHECK(j["modes"].size() == 2);
  CHECK(j["modes"][1]["b"][0].get<double>() == Approx(0.0236));
  CHECK(j["terminal"][1].get<double>() > 0.0);
}

TEST_CASE("reach on the linear path writes result, csv and manifest") {
  const auto r = run({"reach", "--network", "gene_expression.json", "--project", "E[P],V[P]", "--directions", "16",
                      "--out", "cli_lin.json", "--csv", "cli_lin.csv"});
  REQUIRE(r.code == 0);
  const auto j = Json::parse(slurp("cli_lin.json"));
  CHECK(j["route"] == "linear");
  CHECK(j["region"]["halfspaces"].size() == 16);
  CHECK(j["region"]["bounded"] == true);
  CHECK(j["region"]["outer_vertices"].size() >= 3);
  CHECK(j["region"]["inner_kind"] == "tangent points");
  CHECK(slurp("cli_lin.csv").rfind("set,index,y1,y2\n", 0) == 0);

  const auto m = Json::parse(slurp("cli_lin.manifest.json"));
  CHECK(m["inputs"]["network"]["sha256"] == cli::sha256_hex(slurp(fixture::data_path("gene_expression.json"))));
  CHECK(m["config"]["directions"] == 16);
  CHECK(m["phases"].contains("compute"));
  CHECK(m["tool_version"] == cli::kVersion);

  // Same inputs, same artifact bytes.
  const std::string first = slurp("cli_lin.json");
  REQUIRE(run({"reach", "--network", "gene_expression.json", "--directions", "16", "--out", "cli_lin.json"}).code == 0);
  CHECK(slurp("cli_lin.json") == first);
}

TEST_CASE("reach on the switched path with an LP dump") {
  const auto r = run({"reach", "--network", "fluorescent_2in.json", "--project", "E[P],V[P]", "--directions", "4",
                      "--dump-lp", "cli_sw.lp"});
  if (r.code != 0) FAIL(r.err);
  CHECK(r.json()["route"] == "switched");
  CHECK(r.json()["region"]["inner_kind"] == "convex-hull inner bound");
  CHECK(slurp("cli_sw.lp").find("Maximize") != std::string::npos);
}

TEST_CASE("reach on the FSP path maps variance through the second moment") {
  const auto r = run({"reach", "--network", "saturated.json", "--bounds", "4,20", "--eps-target", "0.9",
                      "--directions", "8"});
  if (r.code != 0) FAIL(r.err);
  const auto j = r.json();
  CHECK(j["route"] == "fsp");
  CHECK(j["certificate"]["certified"] == true);
  CHECK(j["region"]["space"][1] == "E[P^2]");
  CHECK(j["region"]["halfspaces"].size() == 10);
  CHECK(j["region"]["epsilon"].get<double>() == Approx(j["certificate"]["epsilon"].get<double>()));
  CHECK(j["region"]["variance_image"].size() == 64 * j["region"]["outer_vertices"].size());
  for (const auto& h : j["region"]["halfspaces"]) CHECK(h["delta"].get<double>() >= 0.0);
}

TEST_CASE("certification failure exits 3 and still reports epsilon") {
  const auto r = run({"fsp-certify", "--network", "saturated.json", "--bounds", "2,4", "--eps-target", "1e-3"});
  CHECK(r.code == 3);
  const auto j = r.json();
  CHECK(j["certificate"]["certified"] == false);
  CHECK(j["certificate"]["epsilon"].get<double>() > 0.1);
  CHECK(run({"reach", "--network", "saturated.json", "--bounds", "2,4", "--eps-target", "1e-3"}).code == 3);
  CHECK(run({"target-prob", "--network", "saturated.json", "--bounds", "2,4", "--target", "P>=1"}).code == 3);

  const auto ok = run({"fsp-certify", "--network", "conversion_chain.json", "--bounds", "4,4", "--eps-target", "1e-9"});
  CHECK(ok.code == 0);
  CHECK(ok.json()["certificate"]["epsilon"].get<double>() == Approx(0.0).margin(1e-12));
}

TEST_CASE("target-prob reports the sandwich") {
  const auto r = run({"target-prob", "--network", "saturated.json", "--bounds", "4,20", "--eps-target", "0.9",
                      "--target", "P>=5"});
  if (r.code != 0) FAIL(r.err);
  const auto j = r.json();
  CHECK(j["sequence"].size() == 12);
  CHECK(j["probability_upper"].get<double>() ==
        Approx(j["probability_lower"].get<double>() + 2.0 * j["certificate"]["epsilon"].get<double>()));
  const auto a = run({"target-prob", "--network", "saturated.json", "--bounds", "4,20", "--eps-target", "0.9",
                      "--target", "P>=5", "--avoid"});
  REQUIRE(a.code == 0);
  CHECK(a.json()["mode"] == "avoid");
}

TEST_CASE("ssa subcommand is seeded and writes a histogram") {
  const std::vector<std::string> args{"ssa", "--network", "gene_expression.json", "--sequence", "1", "--runs", "400",
                                      "--seed", "9", "--csv", "cli_hist.csv", "--trajectory", "cli_path.csv"};
  const auto a = run(args), b = run(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const auto j = a.json();
  CHECK(j["runs"] == 400);
  CHECK(j["labels"].size() == 5);
  CHECK(j.contains("moment_equations"));
  CHECK(slurp("cli_hist.csv").rfind("M,P,count,frequency\n", 0) == 0);
  CHECK(slurp("cli_path.csv").rfind("t,M,P\n", 0) == 0);
}
