#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "qsde/cli/config.hpp"
#include "qsde/cli/experiment.hpp"

namespace qsde::cli {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  fs::path dir = fs::temp_directory_path() / "qsde_tests" / (std::string(info->test_suite_name()) + "." + info->name()) / name;
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t col(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return i;
    throw std::runtime_error("no column " + name);
  }
};

Table read_tsv(const fs::path& p) {
  Table t;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string cell;
    if (t.columns.empty()) {
      while (std::getline(ls, cell, '\t')) t.columns.push_back(cell);
      continue;
    }
    std::vector<double> row;
    while (std::getline(ls, cell, '\t')) row.push_back(std::stod(cell));
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string field_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<accepted>";
}

TEST(Config, PresetExpansion) {
  const auto c = parse_config(R"({"mode": "belavkin", "model": {"preset": "qubit-decay", "gamma": 1.0}})");
  ASSERT_EQ(c.model.couplings.size(), 1u);
  EXPECT_EQ(c.model.hamiltonian.rows(), 2);
  EXPECT_LT(qsde::testing::max_diff(c.model.couplings[0], qubit::sigma_minus()), 1e-16);
  EXPECT_LT(max_abs(c.model.hamiltonian), 1e-16);
  ASSERT_EQ(c.observables.size(), 1u);
  EXPECT_EQ(c.observables[0].name, "sigma_z");
}

TEST(Config, ValidationErrorsNameTheField) {
  EXPECT_EQ(field_of(R"({"mode": "belavkin", "model": {"preset": "qubit-decay"}, "dt": 0})"), "dt");
  EXPECT_EQ(field_of(R"({"mode": "belavkin", "model": {"preset": "qubit-decay"}, "dt": -1e-3})"), "dt");
  EXPECT_EQ(field_of(R"({"mode": "nope", "model": {"preset": "qubit-decay"}})"), "mode");
  EXPECT_EQ(field_of(R"({"mode": "belavkin", "model": {"preset": "nope"}})"), "model.preset");
  EXPECT_EQ(field_of(R"({"mode": "belavkin", "model": {"preset": "qubit-decay"}, "bogus": 1})"), "bogus");
  EXPECT_EQ(field_of(R"({"mode": "belavkin", "model": {"preset": "qubit-decay"}, "n_traj": 0})"), "n_traj");
  EXPECT_EQ(field_of(R"({"mode": "belavkin", "model": {"preset": "qubit-decay"}, "base_seed": -4})"), "base_seed");
  EXPECT_EQ(field_of(R"({"mode": "belavkin", "model": {"couplings": [[[0, 1], [0, 0]]], "hamiltonian": [[0, [0, 1]], [0, 0]]}})"),
            "model.hamiltonian");
  EXPECT_EQ(field_of(R"({"mode": "belavkin", "model": {"couplings": [[[0, 1], [0]]], "hamiltonian": [[0, 0], [0, 0]]}})"),
            "model.couplings[0][1]");
  EXPECT_EQ(field_of(R"({"mode": "canonical-pair", "model": {"couplings": [[[0, 1], [0, 0]], [[1, 0], [0, 1]]],
                                                                "hamiltonian": [[0, 0], [0, 0]]}})"),
            "model.couplings");
  EXPECT_EQ(field_of("not json"), "");
}

TEST(Config, InlineModelRoundTrip) {
  const std::string text = R"({
    "mode": "gisin",
    "model": {"couplings": [[[0, [0.5, 0.25]], [0, 0]]], "hamiltonian": [[-0.6, 0], [0, 0.6]], "psi0": "plus"},
    "dt": 0.002, "t_max": 0.5, "n_traj": 8, "base_seed": 18446744073709551615,
    "observables": ["sigma_x", {"name": "proj_e", "matrix": [[0, 0], [0, 1]]}]
  })";
  const auto a = parse_config(text);
  EXPECT_EQ(a.base_seed, 18446744073709551615ULL);
  const std::string s1 = serialize_config(a);
  const auto b = parse_config(s1);
  EXPECT_EQ(serialize_config(b), s1);
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_EQ(a.model.couplings[0], b.model.couplings[0]);
  EXPECT_EQ(a.model.hamiltonian, b.model.hamiltonian);
  EXPECT_EQ(a.model.psi0, b.model.psi0);
}

TEST(Config, HashIgnoresOutputPathAndThreading) {
  auto a = parse_config(R"({"mode": "belavkin", "model": {"preset": "qubit-decay"}})");
  auto b = a;
  b.output_path = "elsewhere";
  b.parallel = false;
  EXPECT_EQ(config_hash(a), config_hash(b));
  b.base_seed = 1;
  EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(Config, NetworkWithWeylBoxShiftsCoupling) {
  const auto c = parse_config(R"({
    "mode": "lindblad",
    "model": {"preset": "qubit-decay"},
    "network": {
      "components": [{"name": "sys", "type": "system"}, {"name": "lo", "type": "weyl", "beta": [[0, 0.3]]}],
      "series": ["sys", "lo"]
    }
  })");
  const auto co = effective_model(c).at(0.0);
  EXPECT_LT(qsde::testing::max_diff(co.couplings[0], qubit::sigma_minus() + Complex(0, 0.3) * Operator::Identity(2, 2)),
            1e-15);
  EXPECT_LT(qsde::testing::max_diff(co.hamiltonian, im_part(Complex(0, -0.3) * qubit::sigma_minus())), 1e-15);
  EXPECT_EQ(field_of(R"({"mode": "lindblad", "model": {"preset": "qubit-decay"},
                         "network": {"components": [{"name": "s", "type": "system"}], "series": ["t"]}})"),
            "network.series[0]");
}

TEST(TrajectoryRecordFormat, RejectsBadRows) {
  TrajectoryRecord r;
  r.columns = {"a", "b"};
  EXPECT_THROW(r.add_row({1.0}), Error);
  EXPECT_THROW(r.add_row({1.0, std::nan("")}), Error);
  r.add_row({0.1, -2.5});
  r.metadata = {{"k", "v"}};
  EXPECT_EQ(r.to_tsv(), "# k: v\na\tb\n0.10000000000000001\t-2.5\n");
}

TEST(Experiment, LindbladMatchesClosedForm) {
  auto c = parse_config(R"({"mode": "lindblad", "model": {"preset": "qubit-decay", "gamma": 1.0}, "dt": 0.01, "t_max": 3})");
  c.output_path = scratch_dir("out").string();
  const auto result = run_experiment(c);
  ASSERT_EQ(result.exit_code, kExitOk) << result.message;
  const auto t = read_tsv(fs::path(c.output_path) / "summary.tsv");
  ASSERT_EQ(t.rows.size(), 301u);
  for (const auto& row : t.rows) {
    EXPECT_NEAR(row[t.col("sigma_z_mean")], 2.0 * std::exp(-row[t.col("t")]) - 1.0, 1e-6);
  }
}

TEST(Experiment, CanonicalPairReportsPhaseAndResidual) {
  auto c = parse_config(R"({"mode": "canonical-pair", "model": {"preset": "driven-qubit"}, "dt": 5e-4, "t_max": 2,
                             "n_traj": 1, "base_seed": 5, "residual_tolerance": 0.05})");
  c.output_path = scratch_dir("out").string();
  const auto result = run_experiment(c);
  ASSERT_EQ(result.exit_code, kExitOk) << result.message;
  const auto t = read_tsv(fs::path(c.output_path) / "canonical_pair_000000.tsv");
  for (const char* name : {"t", "theta", "qv", "residual", "infidelity", "sigma_z_filter", "sigma_z_diffusion"}) {
    EXPECT_NO_THROW(t.col(name)) << name;
  }
  double worst = 0.0;
  for (const auto& row : t.rows) worst = std::max(worst, row[t.col("residual")]);
  EXPECT_LT(worst, 0.05);
}

TEST(Experiment, ContractFailureExitsWithFive) {
  auto c = parse_config(R"({"mode": "canonical-pair", "model": {"preset": "driven-qubit"}, "dt": 1e-3, "t_max": 1,
                             "residual_tolerance": 1e-9})");
  c.output_path = scratch_dir("out").string();
  EXPECT_EQ(run_experiment(c).exit_code, kExitContract);
}

TEST(Experiment, FeedbackLoopIsExact) {
  auto c = parse_config(R"({"mode": "feedback", "model": {"preset": "driven-qubit"}, "dt": 1e-3, "t_max": 1, "n_traj": 3})");
  c.output_path = scratch_dir("out").string();
  const auto result = run_experiment(c);
  ASSERT_EQ(result.exit_code, kExitOk) << result.message;
  const auto t = read_tsv(fs::path(c.output_path) / "feedback_000002.tsv");
  for (const auto& row : t.rows) EXPECT_LE(row[t.col("residual")], 1e-12);
}

TEST(Experiment, DumpsCarryTheEnsembleNoise) {
  auto c = parse_config(R"({"mode": "gisin", "model": {"preset": "qubit-decay"}, "dt": 1e-2, "t_max": 0.1, "n_traj": 2,
                             "base_seed": 3, "dump_paths": true, "dump_states": true})");
  c.output_path = scratch_dir("out").string();
  ASSERT_EQ(run_experiment(c).exit_code, kExitOk);
  const auto noise = read_tsv(fs::path(c.output_path) / "noise_000001.tsv");
  const auto expected = complex_from_real(real_increments(2, 10, 1e-2, {3, 1})).conjugated();
  ASSERT_EQ(noise.rows.size(), 10u);
  for (std::size_t m = 0; m < 10; ++m) {
    EXPECT_EQ(noise.rows[m][noise.col("dxi_star_re_1")], expected(m, 0).real());
    EXPECT_EQ(noise.rows[m][noise.col("dxi_star_im_1")], expected(m, 0).imag());
  }
  const auto traj = read_tsv(fs::path(c.output_path) / "trajectory_000001.tsv");
  EXPECT_NO_THROW(traj.col("psi_re_1"));
  const auto summary = read_tsv(fs::path(c.output_path) / "summary.tsv");
  const auto traj0 = read_tsv(fs::path(c.output_path) / "trajectory_000000.tsv");
  const double mean = 0.5 * (traj0.rows.back()[traj0.col("sigma_z")] + traj.rows.back()[traj.col("sigma_z")]);
  EXPECT_NEAR(summary.rows.back()[summary.col("sigma_z_mean")], mean, 1e-15);
}

TEST(Experiment, RerunsAreByteIdentical) {
  for (const char* mode : {"belavkin", "gisin", "canonical-pair", "prop2-check", "feedback", "detuning-sweep", "lindblad"}) {
    const std::string text = std::string(R"({"mode": ")") + mode +
                             R"(", "model": {"preset": "driven-qubit"}, "dt": 2e-3, "t_max": 0.4, "n_traj": 70,
                                 "base_seed": 11, "dump_paths": true})";
    auto a = parse_config(text);
    auto b = parse_config(text);
    a.output_path = scratch_dir(std::string(mode) + "_a").string();
    b.output_path = scratch_dir(std::string(mode) + "_b").string();
    b.parallel = false;  // the thread schedule must not leak into the output
    const auto ra = run_experiment(a);
    const auto rb = run_experiment(b);
    ASSERT_EQ(ra.exit_code, kExitOk) << mode << ": " << ra.message;
    ASSERT_EQ(ra.files.size(), rb.files.size());
    for (std::size_t i = 0; i < ra.files.size(); ++i) {
      EXPECT_EQ(ra.files[i].filename(), rb.files[i].filename());
      EXPECT_EQ(slurp(ra.files[i]), slurp(rb.files[i])) << mode << " " << ra.files[i].filename();
    }
  }
}

int run_tool(const std::string& args) {
  const int status = std::system((std::string(QSDE_TOOL_PATH) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Tool, ExitCodes) {
  const fs::path dir = scratch_dir("tool");
  fs::create_directories(dir);
  const fs::path good = dir / "good.json";
  std::ofstream(good) << R"({"mode": "lindblad", "model": {"preset": "qubit-decay"}, "dt": 0.01, "t_max": 0.1})";
  const fs::path bad = dir / "bad.json";
  std::ofstream(bad) << R"({"mode": "lindblad", "model": {"preset": "qubit-decay"}, "dt": 0})";
  const fs::path strict = dir / "strict.json";
  std::ofstream(strict) << R"({"mode": "canonical-pair", "model": {"preset": "driven-qubit"}, "dt": 1e-3, "t_max": 0.5,
                               "residual_tolerance": 1e-12})";

  EXPECT_EQ(run_tool("--config " + good.string() + " --out " + (dir / "o1").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "o1" / "summary.tsv"));
  EXPECT_EQ(run_tool("--config " + bad.string()), 2);
  EXPECT_EQ(run_tool("--config " + (dir / "missing.json").string()), 2);
  EXPECT_EQ(run_tool("--config " + good.string() + " --mode nonsense"), 2);
  EXPECT_EQ(run_tool("--bogus-flag"), 2);
  EXPECT_EQ(run_tool("--config " + strict.string() + " --out " + (dir / "o2").string()), 5);
  // The output directory cannot be created under a regular file.
  EXPECT_EQ(run_tool("--config " + good.string() + " --out " + (good / "sub").string()), 3);
  EXPECT_EQ(run_tool("--config " + good.string() + " --mode belavkin --ntraj 3 --seed 9 --out " + (dir / "o3").string()), 0);
  const auto t = read_tsv(dir / "o3" / "summary.tsv");
  EXPECT_EQ(t.rows.size(), 11u);
}

}  // namespace
}  // namespace qsde::cli
