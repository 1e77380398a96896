#include <filesystem>
#include <fstream>
#include <sstream>

#include "pv5cli/app.hpp"
#include "pv5cli/report.hpp"
#include "test_support.hpp"

using namespace pv5;
using namespace pv5::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "pv5lab_test_cli";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json without_timestamp(Json doc) {
  doc.erase("timestamp");
  return doc;
}

}  // namespace

TEST_CASE("empty report") {
  const Json doc = make_report("verify", Json::object(), {}, summarize({}),
                               Table{}, utc_timestamp());
  CHECK(doc["checks"].is_array());
  CHECK(doc["checks"].empty());
  CHECK(doc["summary"]["required_pass"] == true);
  CHECK(doc["summary"]["max_required_residual"].is_null());
  CHECK(validate_report(doc).empty());
}

TEST_CASE("schema validation flags violations") {
  Json doc = make_report("verify", Json::object(), {}, summarize({}), Table{},
                         utc_timestamp());
  Json extra = doc;
  extra["surprise"] = 1;
  CHECK_FALSE(validate_report(extra).empty());
  Json bad_schema = doc;
  bad_schema["schema"] = "pv5-jacobi-lab/2";
  CHECK_FALSE(validate_report(bad_schema).empty());
  Json bad_check = doc;
  bad_check["checks"].push_back(Json::object({{"id", "S1_FUNC"}}));
  CHECK_FALSE(validate_report(bad_check).empty());
}

TEST_CASE("run: moments CSV") {
  RunConfig c;
  c.command = "moments";
  c.alpha = "0";
  c.k2 = "-1";
  c.t = "0";
  c.n_max = 0;
  c.out_json = scratch("moments.json").string();
  c.out_csv = scratch("moments.csv").string();
  std::ostringstream err;
  REQUIRE(run(c, err) == kExitOk);
  CHECK(slurp(*c.out_csv) == "t,j,mu_j\n0,0,2\n");
  CHECK(validate_report(load_report(c.out_json)).empty());
}

TEST_CASE("run: usage errors") {
  std::ostringstream err;
  RunConfig c;
  c.command = "verify";
  c.k2 = "0";
  c.suite = "diagnostic";
  c.out_json = scratch("unused.json").string();
  CHECK(run(c, err) == kExitUsage);
  CHECK(err.str().find("PV_PHI") != std::string::npos);
  CHECK(err.str().find("BETA_EXPR") != std::string::npos);

  RunConfig grid = c;
  grid.k2 = "0.25";
  grid.suite = "required";
  grid.grid.count = 0;
  CHECK(run(grid, err) == kExitUsage);
  grid.grid.count = 3;
  grid.grid.start = "0";
  CHECK(run(grid, err) == kExitUsage);
  grid.grid.spacing = "cubic";
  CHECK(run(grid, err) == kExitUsage);

  RunConfig ode = c;
  ode.command = "ode";
  CHECK(run(ode, err) == kExitUsage);
  RunConfig ladder = c;
  ladder.command = "ladder";
  ladder.alpha = "0";
  ladder.k2 = "0.25";
  CHECK(run(ladder, err) == kExitUsage);
  RunConfig k2 = c;
  k2.command = "moments";
  k2.k2 = "1.5";
  CHECK(run(k2, err) == kExitUsage);
  RunConfig unknown = c;
  unknown.command = "plot";
  CHECK(run(unknown, err) == kExitUsage);

  const char* argv[] = {"pv5lab", "verify", "--no-such-flag"};
  CHECK(main_entry(3, const_cast<char**>(argv)) == kExitUsage);
  const char* none[] = {"pv5lab"};
  CHECK(main_entry(1, const_cast<char**>(none)) == kExitUsage);
}

TEST_CASE("run: verify is deterministic and round-trips") {
  RunConfig c;
  c.command = "verify";
  c.t = "0.5";
  c.n_max = 2;
  c.out_json = scratch("v1.json").string();
  c.out_csv = scratch("v1.csv").string();
  std::ostringstream err;
  REQUIRE(run(c, err) == kExitOk);
  RunConfig again = c;
  again.out_json = scratch("v2.json").string();
  again.out_csv = scratch("v2.csv").string();
  REQUIRE(run(again, err) == kExitOk);

  const Json a = load_report(c.out_json);
  const Json b = load_report(again.out_json);
  CHECK(validate_report(a).empty());
  CHECK(without_timestamp(a).dump() == without_timestamp(b).dump());
  CHECK(slurp(*c.out_csv) == slurp(*again.out_csv));
  CHECK(a["summary"]["required_pass"] == true);
  CHECK(a["params"]["z_samples"].size() == 20);
  const std::string csv = slurp(*c.out_csv);
  CHECK(csv.rfind("id,tier,n,t,z,residual,residual_half_step,pass,status,"
                  "message\n",
                  0) == 0);

  // The residual strings re-read exactly.
  PrecisionScope scope(256);
  for (const auto& check : a["checks"]) {
    const std::string text = check["residual"];
    CHECK(Real(std::string_view(text)).to_string() == text);
  }
}

TEST_CASE("run: ode CSV header") {
  RunConfig c;
  c.command = "ode";
  c.k2 = "0.04";
  c.grid.start = "0.5";
  c.grid.stop = "0.51";
  c.grid.count = 3;
  c.grid.spacing = "linear";
  c.n_max = 2;
  c.out_json = scratch("ode.json").string();
  c.out_csv = scratch("ode.csv").string();
  std::ostringstream err;
  CHECK(run(c, err) == kExitOk);
  const std::string csv = slurp(*c.out_csv);
  CHECK(csv.rfind("t,R_n,r_n,beta_n,phi_n,pv_residual\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK(validate_report(load_report(c.out_json)).empty());
}
