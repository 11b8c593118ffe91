#include "countgof/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "countgof/chisq.hpp"
#include "countgof/errors.hpp"
#include "countgof/gof.hpp"

namespace countgof::harness {

namespace {

std::string fmt6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string param_label(const CellSpec& cell) {
    std::string label = "mu=" + fmt6(cell.point.mu);
    if (cell.point.mu2) label += ";mu2=" + fmt6(*cell.point.mu2);
    if (const auto* mix = std::get_if<MixtureData>(&cell.law))
        label += ";lambda=" + fmt6(mix->lambda);
    else if (const auto* thin = std::get_if<ThinningData>(&cell.law))
        label += ";lambda=" + fmt6(thin->lambda);
    return label;
}

std::string alt_label(const CellSpec& cell) {
    if (std::holds_alternative<NullData>(cell.law)) return "null";
    if (const auto* alt = std::get_if<AltData>(&cell.law)) return alt->dist.id();
    if (const auto* mix = std::get_if<MixtureData>(&cell.law))
        return "mixture:" + mix->contaminant.id();
    return "thinning";
}

// All per-cell machinery resolved once, reused across replications.
struct CellRunner {
    const models::NullFamily1P* fam1 = nullptr;
    const models::NullFamily2P* fam2 = nullptr;
    const CellSpec* cell = nullptr;
    double alpha = 0.0;

    std::optional<models::InversionSampler> base_sampler;
    std::optional<models::InversionSampler> contaminant_sampler;
    std::optional<contig::MixtureSpec> mixture;
    std::optional<contig::ThinningSpec> thinning;

    CellRunner(const ExperimentGrid& grid, const CellSpec& spec)
        : cell(&spec), alpha(grid.alpha) {
        fam1 = models::find_family_1p(grid.family_id);
        fam2 = models::find_family_2p(grid.family_id);
        if (!fam1 && !fam2)
            throw std::invalid_argument("unknown null family id: " +
                                        grid.family_id);
        // the point parameterizes family draws; for alternative-data cells it
        // only labels the row, so it is not held to the family domain
        if (!std::holds_alternative<AltData>(spec.law)) {
            if (fam2 && !spec.point.mu2)
                throw std::invalid_argument(grid.family_id +
                                            ": parameter point needs mu2");
            if (fam1)
                fam1->check_mean(spec.point.mu);
            else
                fam2->check_moments(spec.point.mu, *spec.point.mu2);
        }

        const auto make_base = [&] {
            return fam1 ? models::InversionSampler(*fam1, spec.point.mu)
                        : models::InversionSampler(*fam2, spec.point.mu,
                                                   *spec.point.mu2);
        };
        if (std::holds_alternative<NullData>(spec.law)) {
            base_sampler.emplace(make_base());
        } else if (const auto* alt = std::get_if<AltData>(&spec.law)) {
            base_sampler.emplace(alt->dist);
        } else if (const auto* mix = std::get_if<MixtureData>(&spec.law)) {
            base_sampler.emplace(make_base());
            contaminant_sampler.emplace(mix->contaminant);
            mixture = fam1 ? contig::make_mixture_spec(*fam1, spec.point.mu,
                                                       mix->contaminant,
                                                       mix->lambda, spec.n)
                           : contig::make_mixture_spec(*fam2, spec.point.mu,
                                                       *spec.point.mu2,
                                                       mix->contaminant,
                                                       mix->lambda, spec.n);
        } else {
            const auto& thin = std::get<ThinningData>(spec.law);
            if (!fam1)
                throw std::invalid_argument(
                    "thinning cells need a one-parameter base family");
            base_sampler.emplace(make_base());
            thinning = contig::make_thinning_spec(*fam1, spec.point.mu,
                                                  thin.lambda, spec.n);
        }
    }

    void draw(CounterRng& rng, std::vector<std::int64_t>& xs) {
        if (mixture) {
            contig::sample_mixture_contig(*mixture, *base_sampler,
                                          *contaminant_sampler, rng, xs);
        } else if (thinning) {
            contig::sample_thinning_contig(*thinning, *base_sampler, rng, xs);
        } else {
            xs.resize(static_cast<std::size_t>(cell->n));
            for (auto& x : xs) x = base_sampler->draw(rng);
        }
    }
};

CellResult run_one_cell(const ExperimentGrid& grid, std::size_t cell_index) {
    const CellSpec& cell = grid.cells[cell_index];
    CellRunner runner(grid, cell);

    std::int64_t z_rejects = 0;
    std::int64_t q_rejects = 0;
    std::int64_t degenerate = 0;
    std::int64_t domain_errors = 0;

    std::vector<std::int64_t> xs;
    for (std::int64_t rep = 0; rep < grid.replications; ++rep) {
        CounterRng rng(grid.seed, static_cast<std::uint64_t>(cell_index),
                       static_cast<std::uint64_t>(rep));
        runner.draw(rng, xs);

        bool rep_degenerate = false;
        bool rep_domain = false;
        try {
            const auto report =
                runner.fam1 ? gof::z_test_one_param(*runner.fam1, xs, grid.alpha)
                            : gof::z_test_two_param(*runner.fam2, xs, grid.alpha);
            z_rejects += report.reject;
        } catch (const DegenerateSampleError&) {
            rep_degenerate = true;
        } catch (const DomainError&) {
            rep_domain = true;
        }
        try {
            const auto report =
                runner.fam1 ? chisq::q_test(*runner.fam1, xs, grid.alpha)
                            : chisq::q_test(*runner.fam2, xs, grid.alpha);
            q_rejects += report.reject;
        } catch (const DegenerateSampleError&) {
            rep_degenerate = true;
        } catch (const DomainError&) {
            rep_domain = true;
        }
        degenerate += rep_degenerate;
        domain_errors += rep_domain;
    }

    CellResult result;
    result.family_id = grid.family_id;
    result.alt_id = alt_label(cell);
    result.param_label = param_label(cell);
    result.n = cell.n;
    result.replications = grid.replications;
    result.alpha = grid.alpha;
    result.seed = grid.seed;
    const double reps = static_cast<double>(grid.replications);
    result.reject_rate_z = static_cast<double>(z_rejects) / reps;
    result.reject_rate_q = static_cast<double>(q_rejects) / reps;
    result.mc_se =
        std::sqrt(result.reject_rate_z * (1.0 - result.reject_rate_z) / reps);
    result.degenerate_count = degenerate;
    result.domain_error_count = domain_errors;
    return result;
}

std::vector<CellResult> run_cells(const ExperimentGrid& grid,
                                  const ProgressFn& progress) {
    if (grid.replications < 1)
        throw std::invalid_argument("replications must be >= 1");
    if (!(grid.alpha > 0.0 && grid.alpha < 1.0))
        throw std::invalid_argument("alpha must be in (0,1)");
    for (const auto& cell : grid.cells)
        if (cell.n < 1) throw std::invalid_argument("sample size must be >= 1");

    const std::size_t total = grid.cells.size();
    std::vector<CellResult> results(total);
    if (total == 0) return results;

    unsigned threads = grid.threads ? grid.threads
                                    : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(total));

    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::mutex progress_mutex;
    std::exception_ptr failure;
    std::mutex failure_mutex;

    const auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= total) return;
            try {
                results[i] = run_one_cell(grid, i);
            } catch (...) {
                std::scoped_lock lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
            if (progress) {
                std::scoped_lock lock(progress_mutex);
                progress(done.fetch_add(1) + 1, total);
            }
        }
    };

    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    return results;
}

}  // namespace

std::vector<CellResult> run_level_experiment(const ExperimentGrid& grid,
                                             const ProgressFn& progress) {
    for (const auto& cell : grid.cells)
        if (!std::holds_alternative<NullData>(cell.law))
            throw std::invalid_argument(
                "level experiment: every cell must draw from the null family");
    return run_cells(grid, progress);
}

std::vector<CellResult> run_power_experiment(const ExperimentGrid& grid,
                                             const ProgressFn& progress) {
    for (const auto& cell : grid.cells)
        if (!std::holds_alternative<AltData>(cell.law))
            throw std::invalid_argument(
                "power experiment: every cell must draw from an alternative");
    return run_cells(grid, progress);
}

std::vector<CellResult> run_contig_experiment(const ExperimentGrid& grid,
                                              const ProgressFn& progress) {
    for (const auto& cell : grid.cells)
        if (!std::holds_alternative<MixtureData>(cell.law) &&
            !std::holds_alternative<ThinningData>(cell.law))
            throw std::invalid_argument(
                "contiguous experiment: every cell must use a mixture or "
                "thinning law");
    return run_cells(grid, progress);
}

namespace {

// RFC 4180 quoting for fields that carry commas (e.g. binomial(4,0.25)).
std::string csv_field(const std::string& value) {
    if (value.find_first_of(",\"\n") == std::string::npos) return value;
    std::string quoted = "\"";
    for (const char c : value) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

}  // namespace

void emit_csv(std::span<const CellResult> results, std::ostream& out) {
    out << "null_family,alt_id,param_point,n,reps,alpha,seed,reject_rate_z,"
           "reject_rate_q,mc_se,degenerate,domain_errors\n";
    for (const auto& r : results) {
        out << csv_field(r.family_id) << ',' << csv_field(r.alt_id) << ','
            << csv_field(r.param_label) << ',' << r.n << ',' << r.replications
            << ',' << fmt6(r.alpha) << ',' << r.seed << ','
            << fmt6(r.reject_rate_z) << ',' << fmt6(r.reject_rate_q) << ','
            << fmt6(r.mc_se) << ',' << r.degenerate_count << ','
            << r.domain_error_count << '\n';
    }
}

void emit_csv(std::span<const CellResult> results,
              const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    emit_csv(results, out);
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

namespace {

double parse_number(const std::string& text, int lineno, const char* key) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    throw std::invalid_argument("grid config line " + std::to_string(lineno) +
                                ": bad value for " + key + ": '" + text + "'");
}

}  // namespace

std::vector<ExperimentGrid> parse_grid_config(std::istream& in) {
    std::vector<ExperimentGrid> grids;
    std::string line;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::istringstream tokens(line);
        std::string null_id, alt_spec;
        double mu = 0, mu2 = 0, alpha = 0.05;
        bool have_mu = false, have_mu2 = false, have_n = false;
        std::int64_t n = 0, reps = 5000;
        std::uint64_t seed = 1;
        bool any = false;
        for (std::string tok; tokens >> tok;) {
            any = true;
            const auto eq = tok.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("grid config line " +
                                            std::to_string(lineno) +
                                            ": expected key=value, got '" + tok + "'");
            const std::string key = tok.substr(0, eq);
            const std::string value = tok.substr(eq + 1);
            if (key == "null") {
                null_id = value;
            } else if (key == "alt") {
                alt_spec = value;
            } else if (key == "mu") {
                mu = parse_number(value, lineno, "mu");
                have_mu = true;
            } else if (key == "mu2") {
                mu2 = parse_number(value, lineno, "mu2");
                have_mu2 = true;
            } else if (key == "n") {
                n = static_cast<std::int64_t>(parse_number(value, lineno, "n"));
                have_n = true;
            } else if (key == "reps") {
                reps = static_cast<std::int64_t>(parse_number(value, lineno, "reps"));
            } else if (key == "seed") {
                seed = static_cast<std::uint64_t>(parse_number(value, lineno, "seed"));
            } else if (key == "alpha") {
                alpha = parse_number(value, lineno, "alpha");
            } else {
                throw std::invalid_argument("grid config line " +
                                            std::to_string(lineno) +
                                            ": unknown key '" + key + "'");
            }
        }
        if (!any) continue;
        if (null_id.empty() || alt_spec.empty() || !have_n)
            throw std::invalid_argument("grid config line " + std::to_string(lineno) +
                                        ": need at least null=, alt= and n=");

        ExperimentGrid grid;
        grid.family_id = null_id;
        grid.replications = reps;
        grid.alpha = alpha;
        grid.seed = seed;
        if (alt_spec == "null") {
            if (!have_mu)
                throw std::invalid_argument("grid config line " +
                                            std::to_string(lineno) +
                                            ": level cells need mu=");
            ParamPoint point{mu, std::nullopt};
            if (have_mu2) point.mu2 = mu2;
            grid.cells.push_back({point, n, NullData{}});
        } else {
            auto dist = models::alt_from_spec(alt_spec);
            ParamPoint point{have_mu ? mu : dist.mean(), std::nullopt};
            if (models::find_family_2p(null_id))
                point.mu2 = have_mu2 ? mu2 : dist.second_moment();
            grid.cells.push_back({point, n, AltData{std::move(dist)}});
        }
        grids.push_back(std::move(grid));
    }
    return grids;
}

std::vector<CellResult> run_grids(std::span<const ExperimentGrid> grids,
                                  const ProgressFn& progress) {
    std::vector<CellResult> all;
    std::size_t done = 0;
    for (const auto& grid : grids) {
        const bool level = std::holds_alternative<NullData>(grid.cells.at(0).law);
        auto results = level ? run_level_experiment(grid) : run_power_experiment(grid);
        all.insert(all.end(), std::make_move_iterator(results.begin()),
                   std::make_move_iterator(results.end()));
        if (progress) progress(++done, grids.size());
    }
    return all;
}

double mean_for_p0(const models::NullFamily1P& fam, double p0) {
    if (!(p0 > 0.0 && p0 < 1.0))
        throw DomainError("mean_for_p0: p0 must be in (0,1)");
    double lo = 0.0;
    double hi = 1.0;
    while (fam.psi0(hi) > p0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e12) throw DomainError("mean_for_p0: no mean gives this p0");
    }
    for (int i = 0; i < 200 && hi - lo > 1e-10 * std::max(1.0, lo); ++i) {
        const double mid = 0.5 * (lo + hi);
        (fam.psi0(mid) > p0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<ParamPoint> bell2_moment_grid(std::span<const double> alphas,
                                          std::span<const double> thetas) {
    const auto& fam = models::bell2_family();
    std::vector<ParamPoint> points;
    points.reserve(alphas.size() * thetas.size());
    for (const double a : alphas)
        for (const double t : thetas) {
            const auto [mu, mu2] = fam.moments(a, t);
            points.push_back({mu, mu2});
        }
    return points;
}

}  // namespace countgof::harness
