#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rklab/experiments.hpp"
#include "rklab/graph.hpp"
#include "rklab/ising.hpp"

namespace {

struct RunConfig {
    std::string experiment;
    std::string graph_path;
    double u = 1.0;
    double s = 1.0;
    std::string z0;
    double scale = 1.0;          // ising-table coupling scale
    double control_scale = 1.0;  // rk2 power control
    long replicates = 20000;
    uint64_t seed = 0;
    int threads = 1;
    std::string out;
    std::string format = "json";
};

int default_threads() {
    if (const char* env = std::getenv("RKLAB_THREADS")) {
        int t = std::atoi(env);
        if (t > 0) return t;
    }
    return 1;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

std::string strip_extension(const std::string& path) {
    size_t dot = path.find_last_of('.');
    size_t slash = path.find_last_of('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return path;
    return path.substr(0, dot);
}

void load_config_file(const std::string& path, RunConfig& cfg) {
    nlohmann::json j = nlohmann::json::parse(read_file(path));
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("experiment", cfg.experiment);
    get("graph", cfg.graph_path);
    get("u", cfg.u);
    get("s", cfg.s);
    get("z0", cfg.z0);
    get("scale", cfg.scale);
    get("control_scale", cfg.control_scale);
    get("replicates", cfg.replicates);
    get("seed", cfg.seed);
    get("threads", cfg.threads);
    get("out", cfg.out);
    get("format", cfg.format);
}

int run(const RunConfig& cfg) {
    using namespace rklab;
    std::string graph_text = read_file(cfg.graph_path);
    WeightedGraph g = WeightedGraph::from_json_text(graph_text);

    std::vector<std::pair<std::string, std::string>> echo;
    echo.emplace_back("experiment", cfg.experiment);
    echo.emplace_back("graph", cfg.graph_path);
    auto add_num = [&](const char* k, double v) {
        echo.emplace_back(k, format_double(v));
    };

    auto start = std::chrono::steady_clock::now();
    ExperimentReport rep;
    if (cfg.experiment == "rk2") {
        add_num("u", cfg.u);
        if (cfg.control_scale != 1.0) add_num("control_scale", cfg.control_scale);
        rep = run_rk2(g, cfg.u, cfg.replicates, cfg.seed, cfg.threads,
                      cfg.control_scale);
    } else if (cfg.experiment == "inverse-rk2") {
        add_num("u", cfg.u);
        rep = run_inverse_rk2(g, cfg.u, cfg.replicates, cfg.seed, cfg.threads);
    } else if (cfg.experiment == "rk1") {
        add_num("s", cfg.s);
        echo.emplace_back("z0", cfg.z0);
        rep = run_rk1(g, g.index_of(cfg.z0), cfg.s, cfg.replicates, cfg.seed,
                      cfg.threads);
    } else if (cfg.experiment == "inverse-rk1") {
        add_num("s", cfg.s);
        echo.emplace_back("z0", cfg.z0);
        rep = run_inverse_rk1(g, g.index_of(cfg.z0), cfg.s, cfg.replicates,
                              cfg.seed, cfg.threads);
    } else if (cfg.experiment == "martingale-check") {
        rep = run_martingale_check(g, cfg.replicates, cfg.seed, cfg.threads);
    } else if (cfg.experiment == "rn-check") {
        rep = run_rn_check(g, cfg.replicates, cfg.seed, cfg.threads);
    } else if (cfg.experiment == "ising-table") {
        add_num("scale", cfg.scale);
        rep = run_ising_table(g, cfg.scale);
    } else {
        throw CLI::ValidationError("unknown experiment: " + cfg.experiment);
    }
    auto elapsed = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start)
                       .count();

    echo.emplace_back("replicates", std::to_string(cfg.replicates));
    echo.emplace_back("seed", std::to_string(cfg.seed));
    rep.config = echo;
    std::string hash_src;
    for (auto& [k, v] : echo) hash_src += k + "=" + v + ";";
    hash_src += graph_text;
    rep.config_hash = fnv1a(hash_src);

    if (cfg.out.empty()) {
        std::cout << report_to_json(rep);
    } else {
        if (cfg.format == "json") {
            write_file(cfg.out, report_to_json(rep));
        } else if (cfg.format == "csv") {
            write_file(cfg.out, report_to_csv(rep));
        } else if (cfg.format == "both") {
            std::string base = strip_extension(cfg.out);
            write_file(base + ".json", report_to_json(rep));
            write_file(base + ".csv", report_to_csv(rep));
        } else {
            throw CLI::ValidationError("format must be json, csv or both");
        }
        // timestamps and wall time live outside the report so reruns are
        // byte-identical
        std::ostringstream meta;
        meta << "wall_time_seconds=" << elapsed << "\n"
             << "unix_time="
             << std::chrono::duration_cast<std::chrono::seconds>(
                    std::chrono::system_clock::now().time_since_epoch())
                    .count()
             << "\n";
        write_file(cfg.out + ".meta", meta.str());
    }

    std::cerr << rep.experiment << ": " << rep.checks.size() << " checks, "
              << (rep.all_pass() ? "all pass" : "FAILURES") << ", "
              << rep.numerical_failures << " numerical failures\n";

    if (!rep.failure_rate_ok()) return 3;
    return rep.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ray-Knight identity simulation lab"};
    app.require_subcommand(0, 1);

    RunConfig cfg;
    cfg.threads = default_threads();
    std::string config_file;
    app.add_option("--config", config_file, "JSON file carrying the run config");

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--graph", cfg.graph_path, "graph JSON file")->required();
        sub->add_option("--replicates", cfg.replicates, "Monte Carlo replicates");
        sub->add_option("--seed", cfg.seed, "master seed");
        sub->add_option("--threads", cfg.threads, "replicate parallelism");
        sub->add_option("--out", cfg.out, "report output path");
        sub->add_option("--format", cfg.format, "json, csv or both");
    };

    auto* rk2 = app.add_subcommand("rk2", "second Ray-Knight identity");
    add_common(rk2);
    rk2->add_option("--u", cfg.u, "inverse local time level")->required();
    rk2->add_option("--control-scale", cfg.control_scale,
                    "mis-shift factor for the power control");

    auto* irk2 = app.add_subcommand("inverse-rk2", "inversion of the second identity");
    add_common(irk2);
    irk2->add_option("--u", cfg.u, "inverse local time level")->required();

    auto* rk1 = app.add_subcommand("rk1", "first Ray-Knight identity");
    add_common(rk1);
    rk1->add_option("--s", cfg.s, "field shift")->required();
    rk1->add_option("--z0", cfg.z0, "start vertex")->required();

    auto* irk1 = app.add_subcommand("inverse-rk1", "inversion of the first identity");
    add_common(irk1);
    irk1->add_option("--s", cfg.s, "field shift")->required();
    irk1->add_option("--z0", cfg.z0, "start vertex")->required();

    auto* mart = app.add_subcommand("martingale-check", "martingale suite");
    add_common(mart);

    auto* rn = app.add_subcommand("rn-check", "density and change-of-measure suite");
    add_common(rn);

    auto* ising = app.add_subcommand("ising-table", "exact Ising table");
    add_common(ising);
    ising->add_option("--scale", cfg.scale, "coupling scale applied to W");

    try {
        app.parse(argc, argv);
        if (!config_file.empty()) {
            load_config_file(config_file, cfg);
        } else if (app.get_subcommands().empty()) {
            std::cerr << app.help();
            return 2;
        } else {
            cfg.experiment = app.get_subcommands().front()->get_name();
        }
        return run(cfg);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const rklab::GraphError& e) {
        std::cerr << "graph error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
