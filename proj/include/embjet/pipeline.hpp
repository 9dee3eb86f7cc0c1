#ifndef EMBJET_PIPELINE_HPP
#define EMBJET_PIPELINE_HPP

#include <string>

#include "embjet/characteristics.hpp"
#include "embjet/verify.hpp"

namespace embjet {

// Batch pipeline configuration.  Stages execute in the canonical order
// normal-form, admissibility, cartan-janet, singular-data, solve-points,
// characteristics, conoid; requesting a stage without its prerequisite is a
// schema error.
struct PipelineConfig {
    std::string input;                       // metric/symbol JSON path
    std::string out_dir = ".";
    std::vector<std::string> stages;
    int K = 4;
    std::string mode;                        // "", "exact" or "float" override
    std::string eps = "9/10";                // rational "num/den"
    std::vector<std::vector<double>> points; // base points for solve-points
    double step = 1e-3;                      // integrator step h
    double trust_radius = 1.0;
    int jobs = 1;
    unsigned seed = 20260823;                // for seeded ray directions
};

// Exit-code contract: 0 all requested reports pass, 1 internal error,
// 2 schema violation, 3 characteristic failure at a requested solve.
// Failures are also serialized to err (machine-parsable, one JSON object).
int run_pipeline(const PipelineConfig& cfg, std::ostream& out, std::ostream& err);

// Dry-run plan: stage list, dimensions, and the construction each stage
// performs; validates dependencies without computing anything.
int explain_pipeline(const PipelineConfig& cfg, std::ostream& out, std::ostream& err);

} // namespace embjet

#endif
