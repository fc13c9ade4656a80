#include <filesystem>
#include <fstream>

#include <doctest.h>

#include "cclab/output.hpp"
#include "cclab/run_config.hpp"

using namespace cclab;

namespace {

std::filesystem::path temp_dir() {
  static const std::filesystem::path dir = [] {
    auto p = std::filesystem::temp_directory_path() / "cclab-test-io";
    std::filesystem::create_directories(p);
    return p;
  }();
  return dir;
}

std::string write_model() {
  const auto path = temp_dir() / "model.json";
  std::ofstream out(path);
  out << format_chain_model(tfim_model(8, 1.0, 1.05, 0.2));
  return path.string();
}

}  // namespace

TEST_CASE("minimal config fills the documented defaults") {
  const std::string text = R"({"model": ")" + write_model() + R"("})";
  const RunConfig cfg = parse_config(text);
  CHECK(cfg.model.L == 8);
  CHECK(cfg.kind == CumulantKind::classical);
  CHECK(cfg.tol == doctest::Approx(0.1));
  CHECK(cfg.theta == doctest::Approx(1e-2));
  CHECK(cfg.dt == doctest::Approx(0.1));
  CHECK(cfg.horizons == std::vector<double>{5.0, 10.0, 20.0});
  CHECK(cfg.orders == std::vector<int>{2, 3, 4});
}

TEST_CASE("unknown keys are rejected with the nearest valid key") {
  const std::string text = R"({"model": ")" + write_model() + R"(", "betta": 0.3})";
  try {
    parse_config(text);
    FAIL("expected rejection");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("betta") != std::string::npos);
    CHECK(msg.find("did you mean") != std::string::npos);
  }
}

TEST_CASE("x-range beyond the wraparound window is refused with the rule named") {
  const std::string text = R"({"model": ")" + write_model() + R"(", "x": [1, 2, 7]})";
  try {
    parse_config(text);
    FAIL("expected rejection");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("wraparound") != std::string::npos);
  }
}

TEST_CASE("all validation errors are collected, not just the first") {
  const std::string text =
      R"({"model": ")" + write_model() + R"(", "tol": -1, "dt": 0, "velocity": -2})";
  try {
    parse_config(text);
    FAIL("expected rejection");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("tol") != std::string::npos);
    CHECK(msg.find("dt") != std::string::npos);
    CHECK(msg.find("velocity") != std::string::npos);
  }
}

TEST_CASE("missing model file is an error") {
  CHECK_THROWS_AS(parse_config(R"({"model": "/nonexistent/m.json"})"), std::invalid_argument);
}

TEST_CASE("grid objects expand to ranges") {
  const std::string text =
      R"({"model": ")" + write_model() + R"(", "x": {"from": 1, "to": 4}})";
  CHECK(parse_config(text).xs == std::vector<int>{1, 2, 3, 4});
}

TEST_CASE("fmt17 round trips doubles exactly") {
  for (double v : {1.0 / 3.0, 2.718281828459045, 1e-300, -0.1}) {
    CHECK(std::stod(fmt17(v)) == v);
  }
}

TEST_CASE("csv begins with the header row and the version comment") {
  Csv csv;
  csv.columns = {"z", "re"};
  csv.rows = {{"1", "0.5"}, {"2", "0.25"}};
  const std::string text = render_csv(csv, "deadbeef");
  CHECK(text.rfind("z,re\n", 0) == 0);
  CHECK(text.find("# cclab") != std::string::npos);
  CHECK(text.find("config=deadbeef") != std::string::npos);
}

TEST_CASE("atomic writes leave no temp file behind") {
  const auto path = temp_dir() / "artifact.csv";
  write_text_atomic(path.string(), "hello\n");
  CHECK(std::filesystem::exists(path));
  CHECK(!std::filesystem::exists(path.string() + ".tmp"));
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "hello");
}

TEST_CASE("config hash is deterministic and canonical") {
  const std::string text = R"({"model": ")" + write_model() + R"(", "n": 3})";
  const RunConfig a = parse_config(text);
  const RunConfig b = parse_config(text);
  CHECK(a.canonical() == b.canonical());
  CHECK(hash_hex(a.canonical()) == hash_hex(b.canonical()));
  CHECK(fnv1a("a") != fnv1a("b"));
}
