#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "holonet/cli.hpp"
#include "holonet/errors.hpp"
#include "holonet/experiment.hpp"
#include "holonet/verification.hpp"

using namespace holonet;

namespace
{

namespace fs = std::filesystem;

struct TempDir
{
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name)
    {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& path, const std::string& text)
{
    std::ofstream out(path);
    out << text;
}

std::string read_file(const fs::path& path)
{
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int cli(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr)
{
    args.insert(args.begin(), "holonet");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    if (out_text)
        *out_text = out.str();
    if (err_text)
        *err_text = err.str();
    return code;
}

} // namespace

TEST_CASE("presets parse by name")
{
    for (const auto p : {Preset::fig1a, Preset::fig1b, Preset::fig2a, Preset::fig2b, Preset::limit, Preset::custom})
        CHECK(parse_preset(to_string(p)) == p);
    CHECK_FALSE(parse_preset("fig3").has_value());
}

TEST_CASE("custom config parsing")
{
    const auto cfg = parse_config(R"({
        // comments are allowed
        "network": {"inputs": 2,
                    "neurons": [{"id": 3, "activation": "tanh"}, {"id": 4}],
                    "edges": [[3, 1], [3, 2], [3, "bias"], {"to": 4, "from": 3}],
                    "outputs": [4]},
        "params": {"m_x": 0.5, "m_w": 2, "theta": 0.1, "penalty": 1, "dt": 0.01, "horizon": 3},
        "input": {"kind": "transition", "from": [0, 0], "to": [1, -1], "start": 0, "width": 1},
        "target": {"value": [0.2]},
        "initial_weights": [0, 0, 0.1, 0.5],
        "record_stride": 5
    })");
    CHECK(cfg.preset == Preset::custom);
    CHECK(cfg.network.input_count == 2);
    REQUIRE(cfg.network.edges.size() == 4);
    CHECK_FALSE(cfg.network.edges[2].source.has_value());
    CHECK(cfg.network.neurons[0].activation == Activation::tanh);
    CHECK(cfg.params.mass_x == 0.5);
    CHECK(cfg.params.horizon == 3.0);
    CHECK(cfg.input.kind == "transition");
    CHECK(cfg.input.to[1] == -1.0);
    CHECK(cfg.target.value[0] == 0.2);
    CHECK(cfg.record_stride == 5);

    const auto net = build_network(cfg.network);
    CHECK(initial_weights(cfg, net).size() == 4);
    std::ostringstream csv;
    const auto result = run_experiment(cfg, csv);
    CHECK(result.final_state.t == doctest::Approx(3.0));
    CHECK(result.metrics.at("max_abs_g") <= 1e-8);
}

TEST_CASE("preset configs can be overridden field by field")
{
    const auto cfg = parse_config(R"({"preset": "fig2b", "params": {"horizon": 10}})");
    CHECK(cfg.preset == Preset::fig2b);
    CHECK(cfg.params.penalty == 1.0);
    CHECK(cfg.params.horizon == 10.0);
}

TEST_CASE("config errors")
{
    CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"preset": "nope"})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"input": {"kind": "square"}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"network": {"inputs": 1, "neurons": [{"activation": "tanh"}]}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"network": {"inputs": 1, "edges": [[2, "x"]]}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"preset": "limit", "limit": {"ratio": "cubic"}})"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/holonet.json"), ConfigError);
}

TEST_CASE("schedule dataset path resolves against the config directory")
{
    TempDir dir("holonet_schedule_test");
    write_file(dir.path / "data.csv", "e,d\n1,2\n2,1\n");
    write_file(dir.path / "cfg.json", R"({"preset": "limit", "schedule": {"tau": 2, "eps": 0.2, "dataset": "data.csv"}})");
    const auto cfg = load_config(dir.path / "cfg.json");
    REQUIRE(cfg.schedule.has_value());
    REQUIRE(cfg.schedule->dataset.has_value());
    const auto drive = build_drive(cfg);
    CHECK(drive.input->sample(3.0).value[0] == 2.0);
    CHECK(drive.target->sample(3.0).value[0] == 1.0);
}

TEST_CASE("trajectory CSV header and determinism")
{
    auto cfg = preset_config(Preset::fig1a);
    cfg.params.horizon = 1.0;
    std::ostringstream a, b;
    run_experiment(cfg, a);
    run_experiment(cfg, b);
    CHECK(a.str() == b.str());
    const std::string header = a.str().substr(0, a.str().find('\n'));
    CHECK(header == "t,x_1,x_2,w_2_1,xdot_1,xdot_2,wdot_2_1,lambda_1,lambda_2,g_1,g_2,V");
}

TEST_CASE("cli run writes outputs and echoes overrides")
{
    TempDir dir("holonet_cli_test");
    write_file(dir.path / "cfg.json", R"({"preset": "fig1a"})");
    std::string out;
    const int code = cli({"run", "--config", (dir.path / "cfg.json").string(), "--dt", "0.01", "--horizon", "2",
                          "--penalty", "0.5", "--out", (dir.path / "out").string()},
                         &out);
    CHECK(code == exit_ok);
    const std::string summary = read_file(dir.path / "out" / "summary.txt");
    CHECK(summary.find("dt = 0.01") != std::string::npos);
    CHECK(summary.find("horizon = 2") != std::string::npos);
    CHECK(summary.find("penalty = 0.5") != std::string::npos);
    CHECK(summary.find("weight_error = ") != std::string::npos);
    CHECK(fs::exists(dir.path / "out" / "trajectory.csv"));
    CHECK(out.find("wrote") != std::string::npos);
}

TEST_CASE("cli run honours the output directory environment variable")
{
    TempDir dir("holonet_cli_env_test");
    write_file(dir.path / "cfg.json", R"({"preset": "fig1a", "params": {"horizon": 0.5}})");
    const auto target = dir.path / "from_env";
    ::setenv(output_dir_env, target.c_str(), 1);
    const int code = cli({"run", "--config", (dir.path / "cfg.json").string()});
    ::unsetenv(output_dir_env);
    CHECK(code == exit_ok);
    CHECK(fs::exists(target / "summary.txt"));
}

TEST_CASE("cli run rejects bad input before writing anything")
{
    TempDir dir("holonet_cli_bad_test");
    std::string err;
    CHECK(cli({"run", "--config", (dir.path / "missing.json").string(), "--out", (dir.path / "out").string()},
              nullptr, &err) == exit_config_error);
    CHECK_FALSE(fs::exists(dir.path / "out"));
    CHECK(err.find("config error") != std::string::npos);

    write_file(dir.path / "cfg.json", R"({"preset": "fig1a"})");
    CHECK(cli({"run", "--config", (dir.path / "cfg.json").string(), "--dt", "-1", "--out",
               (dir.path / "out").string()}) == exit_config_error);
    CHECK_FALSE(fs::exists(dir.path / "out"));

    CHECK(cli({"frobnicate"}) == exit_config_error);
    CHECK(cli({"--help"}) == exit_ok);
}

TEST_CASE("cli run reports inconsistent initial data as a numerical failure")
{
    TempDir dir("holonet_cli_numerical_test");
    write_file(dir.path / "cfg.json", R"({"preset": "fig1a", "initial_weights": [0.5]})");
    std::string err;
    CHECK(cli({"run", "--config", (dir.path / "cfg.json").string(), "--out", (dir.path / "out").string()}, nullptr,
              &err) == exit_numerical_failure);
    CHECK(err.find("numerical failure") != std::string::npos);
}

TEST_CASE("cli verify passes")
{
    std::string out;
    CHECK(cli({"verify", "--seed", "7"}, &out) == exit_ok);
    CHECK(out.find("[FAIL]") == std::string::npos);
    CHECK(out.find("seed = 7") != std::string::npos);
}

TEST_CASE("the Jacobian check catches a corrupted weight Jacobian")
{
    const auto base = default_evaluator();
    const ConstraintEvaluator flipped = [base](const NetworkSpec& net, const Eigen::VectorXd& x,
                                               const Eigen::VectorXd& w, const Eigen::VectorXd& xdot,
                                               const Eigen::VectorXd& wdot, const SignalSample& input) {
        auto ce = base(net, x, w, xdot, wdot, input);
        ce.Gm = -ce.Gm;
        return ce;
    };
    CHECK(check_jacobians(3, 10).passed);
    CHECK_FALSE(check_jacobians(3, 10, flipped).passed);
}

TEST_CASE("shipped example configs load and build")
{
    int count = 0;
    for (const auto& entry : fs::directory_iterator(HOLONET_CONFIG_DIR))
    {
        if (entry.path().extension() != ".json")
            continue;
        CAPTURE(entry.path().string());
        const auto cfg = load_config(entry.path());
        const auto net = build_network(cfg.network);
        const auto drive = build_drive(cfg);
        CHECK(drive.input->channels() == net.input_count());
        CHECK(drive.target->channels() == net.output_count());
        ++count;
    }
    CHECK(count >= 6);
}
