// cqednet: command-line front end for the cavity-network surface-code simulator.
//
// Exit codes: 0 success, 1 model/runtime error, 2 usage/config error.

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cqed/harness.hpp"

namespace fs = std::filesystem;
using namespace cqed;

namespace {

struct Overrides {
    std::string config;
    std::string manifest;
    std::string out = ".";
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> shots;
    std::optional<int> threads;
    std::optional<std::string> structure;
    std::optional<std::string> decoder;
    std::optional<double> alpha;
    std::optional<double> synthetic_loss;
    std::optional<double> synthetic_infidelity;
    std::vector<int> distances;
    bool dot = false;
};

void add_common(CLI::App* sub, Overrides& o) {
    sub->add_option("--config", o.config, "TOML configuration file");
    sub->add_option("--manifest", o.manifest, "replay the settings stored in a run manifest");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--seed", o.seed, "master RNG seed");
    sub->add_option("--shots", o.shots, "Monte Carlo shots per distance");
    sub->add_option("--threads", o.threads, "worker threads");
    sub->add_option("--structure", o.structure, "network structure: 4, d or n");
    sub->add_option("--decoder", o.decoder, "uniform, weighted, or a comma-separated list");
    sub->add_option("--alpha", o.alpha, "weight divisor for loss-implied edges");
    sub->add_option("--distances", o.distances, "code distances")->delimiter(',');
    sub->add_option("--synthetic-loss", o.synthetic_loss, "uniform per-cavity loss (synthetic mode)");
    sub->add_option("--synthetic-infidelity", o.synthetic_infidelity, "uniform delay infidelity (synthetic mode)");
}

Settings resolve(const Overrides& o) {
    Settings s;
    if (!o.manifest.empty()) {
        nlohmann::json m;
        try {
            m = nlohmann::json::parse(read_file(o.manifest));
        } catch (const nlohmann::json::exception& e) {
            throw UsageError("manifest '" + o.manifest + "' is not valid JSON: " + e.what());
        }
        if (!m.contains("settings")) throw UsageError("manifest has no settings");
        s = settings_from_json(m.at("settings"));
    } else if (!o.config.empty()) {
        s = load_settings(o.config);
    }
    if (o.seed) s.seed = *o.seed;
    if (o.shots) s.shots = *o.shots;
    if (o.threads) s.threads = *o.threads;
    if (o.structure) s.structure = parse_structure(*o.structure);
    if (o.decoder) {
        s.decoders.clear();
        std::stringstream ss(*o.decoder);
        std::string item;
        while (std::getline(ss, item, ',')) s.decoders.push_back(parse_decoder(item));
    }
    if (o.alpha) s.alpha = *o.alpha;
    if (!o.distances.empty()) s.distances = o.distances;
    if (o.synthetic_loss) s.synthetic_loss = *o.synthetic_loss;
    if (o.synthetic_infidelity) s.synthetic_infidelity = *o.synthetic_infidelity;
    s.validate();
    return s;
}

std::string out_path(const Overrides& o, const std::string& name) {
    fs::create_directories(o.out);
    return (fs::path(o.out) / name).string();
}

void write_outputs(const Overrides& o, const std::string& command, const Settings& s,
                   const std::vector<std::pair<std::string, std::string>>& files, const nlohmann::json& channels) {
    for (const auto& [name, content] : files) write_file(out_path(o, name), content);
    write_file(out_path(o, "manifest.json"), make_manifest(command, s, files, channels).dump(2) + "\n");
}

int cmd_physics(const Overrides& o) {
    const auto s = resolve(o);
    const auto su = prepare_distance(s, s.distances.front());
    for (const auto& w : su.diagnostics) std::cerr << "warning: " << w << "\n";
    std::cout << physics_report(su, s.structure);
    return 0;
}

int cmd_layout(const Overrides& o) {
    const auto s = resolve(o);
    const auto layout = build_layout(s.distances.front());
    const auto net = assign_cavities(layout, s.structure);
    std::cout << layout_json(layout, net).dump(2) << "\n";
    if (o.dot) {
        const auto su = prepare_distance(s, layout.d);
        const auto model = build_noise_model(layout, net, su.budget, su.pulse, su.cycles, s.round_latency);
        write_file(out_path(o, "detectors_X.dot"), to_dot(build_detector_graph(model, PauliKind::X)));
        write_file(out_path(o, "detectors_Z.dot"), to_dot(build_detector_graph(model, PauliKind::Z)));
    }
    return 0;
}

int cmd_simulate(const Overrides& o) {
    const auto s = resolve(o);
    const auto row = run_point(s);
    nlohmann::json channels = nlohmann::json::array();
    for (const auto& dr : row.distances) {
        channels.push_back(channel_record(dr));
        for (const auto& w : dr.setup.diagnostics) std::cerr << "warning (d=" << dr.setup.d << "): " << w << "\n";
    }
    const std::string csv = results_csv_header() + results_csv_rows(row);
    write_outputs(o, "simulate", s, {{"results.csv", csv}}, channels);
    std::cout << csv;
    return 0;
}

int cmd_boundary(const Overrides& o) {
    const auto s = resolve(o);
    std::vector<BoundaryPoint> pts;
    for (auto k : s.decoders) {
        auto b = boundary_search(s, k);
        pts.insert(pts.end(), b.begin(), b.end());
    }
    std::string results = results_csv_header();
    nlohmann::json channels = nlohmann::json::array();
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& p : pts) {
        for (const auto& st : p.steps) {
            results += results_csv_rows(st.row);
            steps.push_back({{"decoder", to_string(p.decoder)},
                             {"kappa_in", p.kappa_in},
                             {"g", st.g},
                             {"ratio", st.ratio},
                             {"below", st.below},
                             {"resolved", st.resolved}});
            for (const auto& dr : st.row.distances) channels.push_back(channel_record(dr));
        }
    }
    const std::string bcsv = boundary_csv(pts, s);
    write_outputs(o, "boundary", s, {{"boundary.csv", bcsv}, {"results.csv", results}},
                  {{"distances", channels}, {"steps", steps}});
    std::cout << bcsv;
    return 0;
}

int cmd_calibrate(const Overrides& o) {
    const auto s = resolve(o);
    const auto rows = calibrate_alpha(s);
    const std::string csv = alpha_csv(rows);
    write_outputs(o, "calibrate-alpha", s, {{"alpha.csv", csv}}, nlohmann::json::array());
    std::cout << csv << "best_alpha = " << format_double(best_alpha(rows)) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cavity-QED network surface-code simulator"};
    app.set_version_flag("--version", std::string("cqednet ") + kVersion);
    app.require_subcommand(1);

    Overrides o;
    auto* physics = app.add_subcommand("physics", "print the optimised operating point");
    auto* layout = app.add_subcommand("layout", "dump code layout, cavity assignment and schedule as JSON");
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo logical error rates over the configured distances");
    auto* boundary = app.add_subcommand("boundary", "requirement-boundary bisection over g");
    auto* calibrate = app.add_subcommand("calibrate-alpha", "sweep the weighted-decoding alpha");
    for (auto* sub : {physics, layout, simulate, boundary, calibrate}) add_common(sub, o);
    layout->add_flag("--dot", o.dot, "also write detector graphs in DOT format to --out");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (physics->parsed()) return cmd_physics(o);
        if (layout->parsed()) return cmd_layout(o);
        if (simulate->parsed()) return cmd_simulate(o);
        if (boundary->parsed()) return cmd_boundary(o);
        if (calibrate->parsed()) return cmd_calibrate(o);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
