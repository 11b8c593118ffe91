#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "countgof/contiguous.hpp"
#include "countgof/models.hpp"

namespace countgof::harness {

struct ParamPoint {
    double mu = 0.0;
    std::optional<double> mu2;  // set for two-parameter families
};

// Data-generating law of one cell.
struct NullData {};  // draw from the null family itself
struct AltData {
    models::AltDistribution dist;
};
struct MixtureData {
    models::AltDistribution contaminant;
    double lambda = 0.0;
};
struct ThinningData {
    double lambda = 0.0;
};
using DataLaw = std::variant<NullData, AltData, MixtureData, ThinningData>;

struct CellSpec {
    ParamPoint point;
    std::int64_t n = 0;
    DataLaw law;
};

struct ExperimentGrid {
    std::string family_id;  // null family under test
    std::vector<CellSpec> cells;
    std::int64_t replications = 5000;
    double alpha = 0.05;
    std::uint64_t seed = 1;
    unsigned threads = 0;  // 0 = hardware concurrency
};

struct CellResult {
    std::string family_id;
    std::string alt_id;       // "null", an alternative label, "mixture:…", "thinning"
    std::string param_label;  // "mu=…", "mu=…;mu2=…", contiguous cells add ";lambda=…"
    std::int64_t n = 0;
    std::int64_t replications = 0;
    double alpha = 0.0;
    std::uint64_t seed = 0;
    double reject_rate_z = 0.0;
    double reject_rate_q = 0.0;
    double mc_se = 0.0;  // sqrt(r(1-r)/reps) at r = reject_rate_z
    std::int64_t degenerate_count = 0;
    std::int64_t domain_error_count = 0;
};

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

// Replication r of cell c runs on the Philox stream keyed by
// (seed, c, r), so results are bit-reproducible under any thread count.
// Degenerate samples and moment-domain violations count as non-rejections
// and are tallied separately.
std::vector<CellResult> run_level_experiment(const ExperimentGrid& grid,
                                             const ProgressFn& progress = {});
std::vector<CellResult> run_power_experiment(const ExperimentGrid& grid,
                                             const ProgressFn& progress = {});
std::vector<CellResult> run_contig_experiment(const ExperimentGrid& grid,
                                              const ProgressFn& progress = {});

void emit_csv(std::span<const CellResult> results, std::ostream& out);
void emit_csv(std::span<const CellResult> results,
              const std::filesystem::path& path);

// Plain-text grid config: one cell per line,
//   null=<id> alt=<id:params> n=<int> reps=<int> seed=<int> alpha=<float>
// reps/seed/alpha default to 5000/1/0.05 when omitted; '#' comments and blank
// lines are skipped. alt=null with mu=<float> (plus mu2=<float> for a
// two-parameter family) describes a level cell instead. Each line carries its
// own seed, so it becomes its own single-cell grid; results concatenate in
// file order.
std::vector<ExperimentGrid> parse_grid_config(std::istream& in);
std::vector<CellResult> run_grids(std::span<const ExperimentGrid> grids,
                                  const ProgressFn& progress = {});

// Mean giving P(X=0) = p0, by bisection on ψ₀ to 1e-10.
double mean_for_p0(const models::NullFamily1P& fam, double p0);

// Moment points h(α,θ) over the cartesian product of the two shape grids.
std::vector<ParamPoint> bell2_moment_grid(std::span<const double> alphas,
                                          std::span<const double> thetas);

}  // namespace countgof::harness
