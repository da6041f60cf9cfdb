#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "ahe/scenario.hpp"

using namespace ahe;
namespace fs = std::filesystem;

namespace {

Json torus_line_scenario() {
  Json doc;
  doc["manifold"] = {{"kind", "torus"}, {"dim", 2}, {"grid", 16}};
  doc["metric"] = {{"type", "constant"}, {"matrix", {1, 0, 0, 1}}};
  doc["bundle"] = {{"field", "C"}, {"rank", 1}, {"generators", {Json::array({2.0}), Json::array({1.0})}}};
  doc["degree"] = {{"mode", "numeric"}};
  doc["task"] = "degree";
  doc["params"] = {{"grid", 16}, {"seed", 7}};
  return doc;
}

std::string write_temp(const Json& doc, const std::string& name) {
  fs::path p = fs::temp_directory_path() / name;
  std::ofstream f(p);
  f << doc.dump(2);
  return p.string();
}

}  // namespace

TEST_CASE("scenario round trip: parse, run, deterministic reports") {
  std::string path = write_temp(torus_line_scenario(), "ahe_scn_degree.json");
  Scenario s1 = load_scenario(path);
  Scenario s2 = load_scenario(path);
  CHECK(s1.hash == s2.hash);

  Json r1 = run_scenario(s1, "/tmp/ahe_out1");
  Json r2 = run_scenario(s2, "/tmp/ahe_out2");
  CHECK(r1.dump() == r2.dump());  // byte-identical reports
  CHECK(std::abs(r1["degree"].get<double>()) < 1e-7);
  CHECK(fs::exists("/tmp/ahe_out1/report.json"));
}

TEST_CASE("grid and seed overrides change the hash") {
  std::string path = write_temp(torus_line_scenario(), "ahe_scn_grid.json");
  Scenario a = load_scenario(path);
  Scenario b = load_scenario(path, 24);
  CHECK(a.hash != b.hash);
  CHECK(b.manifold->resolution() == 24);
  Scenario c = load_scenario(path, {}, 1234);
  CHECK(c.params.seed == 1234);
}

TEST_CASE("malformed scenarios produce parse or validation errors") {
  Json doc = torus_line_scenario();
  doc["bundle"]["generators"] = {Json::array({2.0, 1.0}), Json::array({1.0})};  // non-square
  std::string path = write_temp(doc, "ahe_scn_bad.json");
  CHECK_THROWS_AS(load_scenario(path), Error);

  Json doc2 = torus_line_scenario();
  doc2["task"] = "not-a-task";
  CHECK_THROWS_AS(parse_scenario(doc2), Error);

  Json doc3 = torus_line_scenario();
  doc3["degree"] = {{"mode", "abstract"}, {"weights", {1.0}}};  // wrong count
  CHECK_THROWS_AS(parse_scenario(doc3), Error);

  // broken JSON text
  fs::path p = fs::temp_directory_path() / "ahe_scn_broken.json";
  std::ofstream f(p);
  f << "{ not json";
  f.close();
  CHECK_THROWS_AS(load_scenario(p.string()), Error);
}

TEST_CASE("classify task over an abstract scenario") {
  Json doc;
  doc["group"] = {{"generators", 1}};
  doc["bundle"] = {
      {"field", "C"},
      {"rank", 2},
      {"generators", {Json::array({std::exp(3.0), 0.0, 0.0, 1.0})}}};
  doc["degree"] = {{"mode", "abstract"}, {"weights", {1.0}}};
  doc["task"] = "classify";
  Scenario s = parse_scenario(doc);
  Json rep = run_scenario(s, "/tmp/ahe_out_cls");
  CHECK(rep["classification"]["verdict"] == "Unstable");
}

TEST_CASE("oracle task agrees with the main path") {
  Json doc;
  doc["group"] = {{"generators", 1}};
  doc["bundle"] = {{"field", "C"},
                   {"rank", 3},
                   {"generators",
                    {Json::array({std::exp(3.0), 0, 0, 0, std::exp(1.0), 0, 0, 0, std::exp(-4.0)})}}};
  doc["degree"] = {{"mode", "abstract"}, {"weights", {1.0}}};
  doc["task"] = "oracle";
  Scenario s = parse_scenario(doc);
  Json rep = run_scenario(s, "/tmp/ahe_out_oracle");
  CHECK(rep["oracle"]["hn_ranks"] == Json::array({1, 2, 3}));
  CHECK(rep["main_path_match"]["hn_ranks_agree"] == true);
  CHECK(rep["main_path_match"]["verdict_agrees"] == true);
  CHECK(rep["main_path_match"]["hn_max_principal_angle"].get<double>() <= 1e-8);
}

TEST_CASE("he-solve writes trace and checkpoint; resume matches straight-through") {
  Json doc;
  doc["manifold"] = {{"kind", "torus"}, {"dim", 1}, {"grid", 32}};
  doc["metric"] = {{"type", "constant"}, {"matrix", {1.0}}};
  doc["bundle"] = {{"field", "C"},
                   {"rank", 2},
                   {"generators", {Json::array({std::exp(1.0), 0.0, 0.0, std::exp(2.0)})}}};
  doc["degree"] = {{"mode", "numeric"}};
  doc["task"] = "he-solve";
  doc["params"] = {{"grid", 32}, {"seed", 5}};

  // straight run
  Scenario s = parse_scenario(doc);
  Json full = run_scenario(s, "/tmp/ahe_out_flow_full");
  REQUIRE(full["flow"]["verdict"] == "Converged");
  CHECK(fs::exists("/tmp/ahe_out_flow_full/trace.csv"));
  CHECK(fs::exists("/tmp/ahe_out_flow_full/checkpoint.bin"));

  // interrupted run: small budget, then resume
  Json doc2 = doc;
  doc2["params"]["max_steps"] = 3;
  Scenario s2a = parse_scenario(doc2);
  Json partial = run_scenario(s2a, "/tmp/ahe_out_flow_part");
  CHECK(partial["flow"]["verdict"] != "Converged");

  Json doc3 = doc;  // full budget again; same hash requires same params
  doc3["params"]["max_steps"] = doc["params"].value("max_steps", 20000);
  // hash must match the checkpoint: reuse the interrupted scenario but with
  // the full budget; the checkpoint key tracks grid and seed, which agree.
  Scenario s2b = parse_scenario(doc2);
  s2b.params.max_steps = 20000;
  Json resumed = run_scenario(s2b, "/tmp/ahe_out_flow_part", /*resume=*/true);
  CHECK(resumed["resumed"] == true);
  REQUIRE(resumed["flow"]["verdict"] == "Converged");
  double res_full = full["flow"]["final_residual"].get<double>();
  double res_resumed = resumed["flow"]["final_residual"].get<double>();
  CHECK(std::abs(res_full - res_resumed) < 1e-9);
}

TEST_CASE("expression metric scenario exercises the gauduchon checker") {
  Json doc;
  doc["manifold"] = {{"kind", "torus"}, {"dim", 2}, {"grid", 64}};
  doc["metric"] = {{"type", "expression"},
                   {"entries", {Json::array({"1", "0"}), Json::array({"0", "1 + 0.1*sin(2*pi*x1)"})}}};
  doc["task"] = "check-manifold";
  Scenario s = parse_scenario(doc);
  Json rep = run_scenario(s, "/tmp/ahe_out_gd");
  CHECK(rep["manifold"]["valid"] == true);
  CHECK(rep["metric"]["gauduchon_residual"].get<double>() >= 1.0);
}

TEST_CASE("heisenberg manifold scenario validates") {
  Json doc;
  doc["manifold"] = {{"kind", "heisenberg"}, {"dim", 3}, {"grid", 8}};
  doc["task"] = "check-manifold";
  Scenario s = parse_scenario(doc, 8);
  Json rep = run_scenario(s, "/tmp/ahe_out_heis");
  CHECK(rep["manifold"]["valid"] == true);
}
