#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "emin/harness.hpp"
#include "test_helpers.hpp"

using namespace emin;
using namespace emin::harness;

namespace {

ExperimentConfig tiny_config(const std::string& prefix) {
    ExperimentConfig cfg;
    cfg.seed = 99;
    cfg.J_values = {7};
    cfg.p_values = {1.5, 2.0};
    cfg.corpus_size = 6;
    cfg.experiments = {"lemma1", "theorem2"};
    cfg.out_prefix = prefix;
    cfg.workers = 2;
    return cfg;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("corpus generation is reproducible and J-consistent") {
    const Grid g = Grid::unit(8);
    const Signal a = make_corpus_signal(g, 7, 3);
    const Signal b = make_corpus_signal(g, 7, 3);
    CHECK(emin::test::max_abs_diff(a, b) == 0.0);
    const Signal c = make_corpus_signal(g, 7, 4);
    CHECK(emin::test::max_abs_diff(a, c) > 0.0);
    CHECK(lp_norm(a, 1.0) > 0.0);
}

TEST_CASE("config parsing, validation, and hashing") {
    const std::string text = R"({
        "seed": 5, "J": [8], "p": [2.0],
        "s_grid": {"count": 4, "min_frac": 0.25, "max_frac": 1.0},
        "family": "haar",
        "operator": {"kind": "wavelet_projection", "keep_prob": 0.5},
        "weights": {"w_beta": [-0.25, 0.0], "v_beta": [0.0, 0.25]},
        "dilation": 30, "corpus": 3,
        "experiments": ["theorem2"], "out_prefix": "x"
    })";
    const ExperimentConfig cfg = ExperimentConfig::from_json_text(text);
    CHECK(cfg.seed == 5);
    CHECK(cfg.J_values == std::vector<int>{8});
    CHECK(cfg.family == "haar");
    CHECK(cfg.hash().size() == 16);

    // Hash tracks semantic content, not output paths.
    ExperimentConfig cfg2 = cfg;
    cfg2.out_prefix = "y";
    CHECK(cfg.hash() == cfg2.hash());
    cfg2.seed = 6;
    CHECK(cfg.hash() != cfg2.hash());

    CHECK_THROWS_AS(ExperimentConfig::from_json_text("{"), std::invalid_argument);
    CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"J": [99]})"), std::invalid_argument);
    CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"p": [0.5]})"), std::invalid_argument);
    CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"family": "meyer"})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"experiments": ["nope"]})"),
                    std::invalid_argument);
}

TEST_CASE("sweep outputs are byte-identical across runs and worker counts") {
    const auto dir = std::filesystem::temp_directory_path() / "emin_harness_test";
    std::filesystem::remove_all(dir);

    ExperimentConfig cfg = tiny_config((dir / "run1").string());
    const RunOutput out1 = run_sweep(cfg);
    CHECK(out1.baselines_ok);
    REQUIRE(out1.csv_files.size() == 2);

    cfg.out_prefix = (dir / "run2").string();
    cfg.workers = 1;
    const RunOutput out2 = run_sweep(cfg);

    for (std::size_t i = 0; i < out1.csv_files.size(); ++i)
        CHECK(slurp(out1.csv_files[i]) == slurp(out2.csv_files[i]));

    SUBCASE("summary constants carry per-J and aggregate keys") {
        CHECK(out1.constants.count("theorem2.J7.max_r1") == 1);
        CHECK(out1.constants.count("theorem2.max_r1") == 1);
        CHECK(out1.constants.count("lemma1.J7.C_L1") == 1);
        CHECK(out1.constants.at("lemma1.all_cz_ok") == 1.0);
    }

    SUBCASE("empty corpus still writes a header") {
        ExperimentConfig empty = tiny_config((dir / "empty").string());
        empty.corpus_size = 0;
        empty.experiments = {"theorem2"};
        const RunOutput out = run_sweep(empty);
        const std::string csv = slurp(out.csv_files[0]);
        CHECK(csv.find("case,J,family") == 0);
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 1);
    }

    std::filesystem::remove_all(dir);
}

TEST_CASE("replay reproduces rows and flags mismatches") {
    const auto dir = std::filesystem::temp_directory_path() / "emin_replay_test";
    std::filesystem::remove_all(dir);
    ExperimentConfig cfg = tiny_config((dir / "run").string());
    const RunOutput out = run_sweep(cfg);
    const std::string csv_path = out.csv_files[1];  // theorem2

    for (int row : {0, 3, 5}) CHECK(replay_row(cfg, "theorem2", 7, csv_path, row).empty());

    // Tamper with one digit and replay must complain.
    std::string text = slurp(csv_path);
    const auto pos = text.find_last_of(',');
    text[pos + 1] = text[pos + 1] == '1' ? '2' : '1';
    const std::string tampered = (dir / "tampered.csv").string();
    write_file(tampered, text);
    CHECK(!replay_row(cfg, "theorem2", 7, tampered, 5).empty());

    CHECK_THROWS(replay_row(cfg, "theorem2", 7, csv_path, 99));
    std::filesystem::remove_all(dir);
}

TEST_CASE("baseline store round trip and guards") {
    const auto dir = std::filesystem::temp_directory_path() / "emin_baseline_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);

    ExperimentConfig cfg = tiny_config((dir / "run").string());
    const std::string store_path = (dir / "baselines.json").string();
    const BaselineStore store = record_baselines(cfg, store_path, false);
    CHECK(store.config_hash == cfg.hash());
    CHECK(store.constants.count("theorem2.max_r1") == 1);
    CHECK(store.constants.count("theorem2.all_measure_ok") == 0);  // flags are not baselines

    // Second record without force refuses; with force it archives.
    CHECK_THROWS(record_baselines(cfg, store_path, false));
    record_baselines(cfg, store_path, true);
    int backups = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.path().string().find(".bak") != std::string::npos) ++backups;
    CHECK(backups == 1);

    // A sweep checked against its own recorded baselines passes...
    cfg.baselines_path = store_path;
    cfg.out_prefix = (dir / "check").string();
    const RunOutput ok = run_sweep(cfg);
    CHECK(ok.baselines_ok);

    // ...and a config change is a hash mismatch.
    ExperimentConfig other = cfg;
    other.seed = 12345;
    other.out_prefix = (dir / "mismatch").string();
    const RunOutput bad = run_sweep(other);
    CHECK(!bad.baselines_ok);
    REQUIRE(!bad.baseline_failures.empty());
    CHECK(bad.baseline_failures[0] == "baseline/config mismatch");

    std::filesystem::remove_all(dir);
}
