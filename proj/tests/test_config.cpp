#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "safari/config.hpp"

using namespace safari;

namespace {

std::vector<std::string> problems_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigValidationError& e) {
    return e.problems();
  }
  return {};
}

bool mentions(const std::vector<std::string>& problems, const std::string& path) {
  return std::any_of(problems.begin(), problems.end(),
                     [&](const std::string& p) { return p.rfind(path + ":", 0) == 0; });
}

}  // namespace

TEST_CASE("a full document parses into every field") {
  const ExperimentConfig c = parse_config(R"({
    "experiment": {"seed": 9, "clients": 4, "rounds": 30, "eval_every": 2, "oracle_mode": true,
                   "modes": ["safari", "drop"], "output_dir": "o", "threads": 2,
                   "similarity_per_round": true},
    "model": {"hidden_dim": 16, "init_scale": 0.5},
    "data": {"classes": 6, "samples_per_class": 10, "input_dim": 3, "spread": 0.7,
             "holdout_fraction": 0.25, "partition": "clone", "groups": 2, "labels_per_client": 3},
    "training": {"local_steps": 4, "learning_rate": 0.05, "batch_size": 16},
    "sparsity": {"algorithm": "synflow", "level": 0.6},
    "channel": {"uplink": [1, 0.5, 1, 0.5], "downlink": 0.9, "seed": 123}
  })");
  CHECK(c.seed == 9);
  CHECK(c.clients == 4);
  CHECK(c.rounds == 30);
  CHECK(c.eval_every == 2);
  CHECK(c.oracle_mode);
  CHECK(c.modes == std::vector<AggregationMode>{AggregationMode::safari, AggregationMode::drop_no_compensation});
  CHECK(c.output_dir == "o");
  CHECK(c.threads == 2);
  CHECK(c.similarity_per_round);
  CHECK(c.hidden_dim == 16);
  CHECK(c.init_scale == 0.5);
  CHECK(c.classes == 6);
  CHECK(c.spread == 0.7);
  CHECK(c.partition == PartitionMode::clone);
  CHECK(c.local_steps == 4);
  CHECK(c.learning_rate == 0.05);
  CHECK(c.mask_kind == MaskKind::synflow);
  CHECK(c.sparsity == 0.6);
  CHECK(c.uplink.probability(1, 0) == 0.5);
  CHECK(c.downlink.probability(3, 7) == 0.9);
  CHECK(c.effective_channel_seed() == 123);
}

TEST_CASE("defaults fill absent sections and the channel seed follows the experiment seed") {
  const ExperimentConfig c = parse_config(R"({"experiment": {"seed": 4}})");
  CHECK(c.clients == 10);
  CHECK(c.effective_channel_seed() == 4);
  CHECK(c.uplink.probability(9, 0) == 1.0);
}

TEST_CASE("every problem is reported with its field path") {
  const auto p = problems_of(R"({
    "experiment": {"clients": 0, "modes": ["safari", "fedprox"], "colour": 1},
    "training": {"learning_rate": -1, "local_steps": "five"},
    "sparsity": {"algorithm": "grasp", "level": 1.0},
    "channel": {"uplink": [1, 2]},
    "extras": {}
  })");
  for (const char* path : {"experiment.clients", "experiment.modes", "experiment.colour",
                           "training.learning_rate", "training.local_steps", "sparsity.algorithm",
                           "sparsity.level", "channel.uplink", "extras"}) {
    CAPTURE(path);
    CHECK(mentions(p, path));
  }
}

TEST_CASE("cross-field checks") {
  CHECK(mentions(problems_of(R"({"experiment": {"clients": 5}, "data": {"groups": 2}})"), "data.groups"));
  CHECK(mentions(problems_of(R"({"data": {"classes": 10, "groups": 2, "labels_per_client": 4}})"),
                 "data.labels_per_client"));
  CHECK(mentions(problems_of(R"({"experiment": {"clients": 3}, "data": {"groups": 1},
                                 "channel": {"uplink": [1, 1]}})"),
                 "channel.uplink"));
  CHECK(mentions(problems_of(R"({"experiment": {"modes": []}})"), "experiment.modes"));
  CHECK(mentions(problems_of("[1, 2]"), "<document>"));
  CHECK(mentions(problems_of("{not json"), "<document>"));
}

TEST_CASE("link schedules from a CSV path and piecewise segments") {
  const auto dir = std::filesystem::temp_directory_path() / "safari_test_config";
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "links.csv");
    out << "1,0.5\n0.5,1\n1,1\n";
  }
  {
    std::ofstream out(dir / "cfg.json");
    out << R"({"experiment": {"clients": 2, "rounds": 3}, "data": {"groups": 1, "labels_per_client": 10},
               "channel": {"uplink": "links.csv",
                           "downlink": {"piecewise": [{"start_round": 0, "p": [1, 1]},
                                                      {"start_round": 2, "p": [0.5, 0.5]}]}}})";
  }
  const ExperimentConfig c = load_config(dir / "cfg.json");
  CHECK(c.uplink.mode() == LinkSchedule::Mode::per_round_table);
  CHECK(c.uplink.probability(0, 1) == 0.5);
  CHECK(c.downlink.probability(1, 1) == 1.0);
  CHECK(c.downlink.probability(1, 2) == 0.5);

  {
    std::ofstream out(dir / "short.json");
    out << R"({"experiment": {"clients": 2, "rounds": 5}, "data": {"groups": 1, "labels_per_client": 10},
               "channel": {"uplink": "links.csv"}})";
  }
  CHECK_THROWS_AS(load_config(dir / "short.json"), ConfigValidationError);
  CHECK_THROWS_AS(load_config(dir / "missing.json"), ConfigValidationError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("shipped configs validate") {
  for (const char* name : {"paper_shaped.json", "desk.json"}) {
    CAPTURE(name);
    CHECK_NOTHROW(load_config(std::filesystem::path(SAFARI_SOURCE_DIR) / "configs" / name));
  }
}
