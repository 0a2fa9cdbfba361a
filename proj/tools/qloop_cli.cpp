// Batch driver: loads a JSON config, runs verification suites, and emits
// machine-readable reports plus plot-ready Trotter-convergence data.
//
// Exit codes: 0 all checks pass, 1 at least one check failed, 2 config
// error, 3 resource budget exceeded.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "qloop/errors.hpp"
#include "qloop/suite.hpp"

namespace {

nlohmann::json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw qloop::Error("ConfigError", "cannot open config '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw qloop::Error("ConfigError", std::string("config parse: ") + e.what());
    }
}

void print_rows(const qloop::ReportBundle& bundle) {
    for (const auto& row : bundle.rows) {
        std::cout << (row.pass ? "PASS" : "FAIL") << "  " << row.algebra << "  " << row.id;
        if (row.has_residual)
            std::cout << "  residual=" << row.residual << "  tol=" << row.tolerance;
        if (!row.note.empty()) std::cout << "  (" << row.note << ")";
        std::cout << "\n";
    }
}

int run_verify(const std::string& config_path, const std::string& suite_override,
               std::uint64_t seed_override, bool has_seed, const std::string& out_override) {
    qloop::SuiteConfig cfg = qloop::suite_config_from_json(load_config(config_path));
    if (!suite_override.empty()) cfg.suite = suite_override;
    if (has_seed) cfg.seed = seed_override;
    if (!out_override.empty()) cfg.out_dir = out_override;

    const qloop::ReportBundle bundle = qloop::run_suite(cfg);
    print_rows(bundle);
    if (!cfg.out_dir.empty()) qloop::write_reports(bundle, cfg.out_dir);
    return bundle.all_pass() ? 0 : 1;
}

int run_convergence(const std::string& config_path, const std::string& out_override) {
    qloop::SuiteConfig cfg = qloop::suite_config_from_json(load_config(config_path));
    if (!out_override.empty()) cfg.out_dir = out_override;
    qloop::fill_default_parameters(cfg);
    const qloop::Model model = cfg.grading.empty()
                                   ? qloop::make_model(cfg.algebra, cfg.q)
                                   : qloop::make_model(cfg.algebra, cfg.q, cfg.grading);
    const auto series =
        qloop::trotter_convergence(model, std::min<std::size_t>(cfg.L, 3), cfg.beta, cfg.trotter_n);

    nlohmann::json json_out;
    if (cfg.out_dir.empty()) {
        qloop::emit_convergence(series, std::cout, json_out);
    } else {
        std::filesystem::create_directories(cfg.out_dir);
        std::ofstream csv(std::filesystem::path(cfg.out_dir) / "convergence.csv");
        qloop::emit_convergence(series, csv, json_out);
        std::ofstream js(std::filesystem::path(cfg.out_dir) / "convergence.json");
        js << json_out.dump(2) << "\n";
        std::cout << "wrote convergence.csv and convergence.json to " << cfg.out_dir << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum loop algebra integrability workbench"};
    app.require_subcommand(1);

    std::string config_path, suite_override, out_override;
    std::uint64_t seed_override = 0;

    auto* verify = app.add_subcommand("verify", "run verification suites from a config");
    verify->add_option("--config", config_path, "JSON config path")->required();
    verify->add_option("--suite", suite_override, "relations|rmatrix|lattice|rqkz|all");
    auto* seed_opt = verify->add_option("--seed", seed_override, "override sampling seed");
    verify->add_option("--out", out_override, "report output directory");

    auto* conv = app.add_subcommand("convergence", "emit Trotter convergence data");
    conv->add_option("--config", config_path, "JSON config path")->required();
    conv->add_option("--out", out_override, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(verify))
            return run_verify(config_path, suite_override, seed_override, !seed_opt->empty(),
                              out_override);
        return run_convergence(config_path, out_override);
    } catch (const qloop::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        if (e.code() == "ConfigError" || e.code() == "ParseError") return 2;
        if (e.code() == "TooLarge") return 3;
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
