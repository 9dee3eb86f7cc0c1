#include <CLI11.hpp>
#include <iostream>
#include <sstream>

#include "embjet/pipeline.hpp"

namespace {

// --points "0.1;-0.1,0.2": points separated by ';', coordinates by ','.
std::vector<std::vector<double>> parse_points(const std::string& spec) {
    std::vector<std::vector<double>> pts;
    std::stringstream ss(spec);
    std::string pt;
    while (std::getline(ss, pt, ';')) {
        if (pt.empty()) continue;
        std::vector<double> coords;
        std::stringstream ps(pt);
        std::string c;
        while (std::getline(ps, c, ',')) coords.push_back(std::stod(c));
        pts.push_back(std::move(coords));
    }
    return pts;
}

void add_common(CLI::App* app, embjet::PipelineConfig& cfg, std::string& stages,
                std::string& points) {
    app->add_option("-i,--input", cfg.input, "metric/symbol JSON file")
        ->required()
        ->envname("EMBJET_INPUT");
    app->add_option("-o,--out", cfg.out_dir, "output directory")
        ->envname("EMBJET_OUT");
    app->add_option("-s,--stages", stages, "comma-separated stage list")
        ->envname("EMBJET_STAGES");
    app->add_option("-K,--order", cfg.K, "jet truncation order")
        ->envname("EMBJET_ORDER");
    app->add_option("-m,--mode", cfg.mode, "override mode: exact or float")
        ->envname("EMBJET_MODE");
    app->add_option("--eps", cfg.eps, "singular-data scale, rational num/den")
        ->envname("EMBJET_EPS");
    app->add_option("--points", points,
                    "base points, ';'-separated, coords ','-separated")
        ->envname("EMBJET_POINTS");
    app->add_option("--step", cfg.step, "integrator step h")
        ->envname("EMBJET_STEP");
    app->add_option("--trust-radius", cfg.trust_radius,
                    "uniformization trust radius")
        ->envname("EMBJET_TRUST_RADIUS");
    app->add_option("-j,--jobs", cfg.jobs, "worker threads for solve-points")
        ->envname("EMBJET_JOBS");
    app->add_option("--seed", cfg.seed, "seed for sampled directions")
        ->envname("EMBJET_SEED");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"truncated-jet isometric embedding toolkit"};
    app.require_subcommand(1);

    embjet::PipelineConfig cfg;
    std::string stages, points;
    CLI::App* run = app.add_subcommand("run", "execute pipeline stages");
    CLI::App* explain =
        app.add_subcommand("explain", "validate and print the stage plan");
    add_common(run, cfg, stages, points);
    add_common(explain, cfg, stages, points);

    CLI11_PARSE(app, argc, argv);

    std::stringstream sl(stages);
    std::string st;
    while (std::getline(sl, st, ','))
        if (!st.empty()) cfg.stages.push_back(st);
    try {
        cfg.points = parse_points(points);
    } catch (const std::exception&) {
        std::cerr << "{\"error\":\"schema\",\"message\":\"bad --points\"}\n";
        return 2;
    }

    if (app.got_subcommand(run))
        return embjet::run_pipeline(cfg, std::cout, std::cerr);
    return embjet::explain_pipeline(cfg, std::cout, std::cerr);
}
