#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "countgof/chisq.hpp"
#include "countgof/errors.hpp"
#include "countgof/gof.hpp"
#include "countgof/harness.hpp"
#include "countgof/models.hpp"

namespace {

using namespace countgof;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitDegenerate = 3;

double parse_double(std::string_view tok, const std::string& what) {
    double value = 0;
    const auto [ptr, ec] =
        std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        throw CLI::ValidationError(what, "cannot parse number '" +
                                             std::string(tok) + "'");
    return value;
}

// "a:b:step", "x,y,z" or a single value.
std::vector<double> parse_grid(const std::string& text, const std::string& what) {
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
        if (parts.size() != 3)
            throw CLI::ValidationError(what, "range must be start:stop:step");
        const double start = parse_double(parts[0], what);
        const double stop = parse_double(parts[1], what);
        const double step = parse_double(parts[2], what);
        if (!(step > 0.0)) throw CLI::ValidationError(what, "step must be > 0");
        for (double v = start; v <= stop + 1e-9 * step; v += step)
            out.push_back(v);
    } else {
        std::stringstream ss(text);
        for (std::string part; std::getline(ss, part, ',');)
            out.push_back(parse_double(part, what));
    }
    if (out.empty()) throw CLI::ValidationError(what, "empty grid");
    return out;
}

std::vector<std::int64_t> parse_sizes(const std::string& text) {
    std::vector<std::int64_t> out;
    for (const double v : parse_grid(text, "--n")) {
        if (v < 1 || v != static_cast<double>(static_cast<std::int64_t>(v)))
            throw CLI::ValidationError("--n", "sample sizes must be integers >= 1");
        out.push_back(static_cast<std::int64_t>(v));
    }
    return out;
}

// Whitespace/comma separated nonnegative integers; '#' starts a comment.
std::vector<std::int64_t> read_counts(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open data file: " + path);
    std::vector<std::int64_t> xs;
    std::string line;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        for (char& c : line)
            if (c == ',') c = ' ';
        std::stringstream ss(line);
        for (std::string tok; ss >> tok;) {
            std::int64_t value = 0;
            const auto [ptr, ec] =
                std::from_chars(tok.data(), tok.data() + tok.size(), value);
            if (ec != std::errc{} || ptr != tok.data() + tok.size() || value < 0)
                throw std::runtime_error("line " + std::to_string(lineno) +
                                         ": invalid count '" + tok + "'");
            xs.push_back(value);
        }
    }
    if (xs.empty()) throw std::runtime_error("data file holds no counts: " + path);
    return xs;
}

void print_report(const gof::SampleSummary& s, const gof::TestReport& z,
                  const gof::TestReport* q) {
    std::printf("n          : %lld\n", static_cast<long long>(s.n));
    std::printf("mu_hat     : %.10g\n", s.mu_hat);
    std::printf("mu2_hat    : %.10g\n", s.mu2_hat);
    std::printf("p0_hat     : %.10g\n", s.p0_hat);
    std::printf("T0_hat     : %.10g\n", z.raw_numerator);
    std::printf("sigma_hat  : %.10g\n", z.sigma_hat);
    std::printf("Z_n        : %.10g\n", z.statistic);
    std::printf("p_value    : %.10g\n", z.p_value);
    std::printf("decision   : %s H0 at alpha=%g\n",
                z.reject ? "reject" : "fail to reject", z.alpha);
    if (q) {
        std::printf("Q_n        : %.10g  (%s)\n", q->statistic,
                    q->diagnostics.c_str());
        std::printf("p_value_Q  : %.10g\n", q->p_value);
        std::printf("decision_Q : %s H0 at alpha=%g\n",
                    q->reject ? "reject" : "fail to reject", q->alpha);
    }
}

struct CommonFlags {
    std::string out;
    std::int64_t reps = 5000;
    std::uint64_t seed = 1;
    double alpha = 0.05;
    std::string n_text = "50";
    unsigned threads = 0;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--n", f.n_text,
                    "sample sizes (value, comma list or start:stop:step)");
    cmd->add_option("--reps", f.reps, "Monte Carlo replications per cell")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", f.seed, "master seed");
    cmd->add_option("--alpha", f.alpha, "nominal level");
    cmd->add_option("--out", f.out, "CSV output path (default: stdout)");
    cmd->add_option("--threads", f.threads, "worker threads (0 = all cores)");
}

void finish_run(const std::vector<harness::CellResult>& results,
                const std::string& out) {
    if (out.empty()) {
        harness::emit_csv(results, std::cout);
    } else {
        harness::emit_csv(results, std::filesystem::path(out));
        std::cerr << "wrote " << results.size() << " cell(s) to " << out << "\n";
    }
}

harness::ProgressFn stderr_progress() {
    return [](std::size_t done, std::size_t total) {
        std::cerr << "cell " << done << "/" << total << " done\n";
    };
}

int run_test_cmd(const std::string& data_path, const std::string& family,
                 double alpha, bool comparator) {
    std::vector<std::int64_t> xs;
    try {
        xs = read_counts(data_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    const auto* f1 = models::find_family_1p(family);
    const auto* f2 = models::find_family_2p(family);
    if (!f1 && !f2) {
        std::cerr << "error: unknown family '" << family << "'\n";
        return kExitUsage;
    }
    try {
        const auto s = gof::summarize(xs);
        const auto z = f1 ? gof::z_test_one_param(*f1, xs, alpha)
                          : gof::z_test_two_param(*f2, xs, alpha);
        std::optional<gof::TestReport> q;
        if (comparator)
            q = f1 ? chisq::q_test(*f1, xs, alpha) : chisq::q_test(*f2, xs, alpha);
        print_report(s, z, q ? &*q : nullptr);
        return kExitOk;
    } catch (const DegenerateSampleError& e) {
        std::cerr << "degenerate sample: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return kExitDegenerate;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Goodness-of-fit tests for count distributions: the p.g.f.-based Z_n "
        "test, its chi-squared comparator and the Monte Carlo experiments."};
    app.require_subcommand(1);

    // --- test ---------------------------------------------------------------
    auto* test_cmd = app.add_subcommand(
        "test", "test a data file of counts against a null family");
    std::string data_path;
    std::string test_family;
    double test_alpha = 0.05;
    bool comparator = false;
    test_cmd->add_option("data", data_path, "file of nonnegative integers")
        ->required();
    test_cmd
        ->add_option("--family", test_family,
                     "shifted-borel | geometric | bell1 | bell2")
        ->required();
    test_cmd->add_option("--alpha", test_alpha, "nominal level");
    test_cmd->add_flag("--comparator", comparator,
                       "also run the chi-squared comparator Q_n");

    // --- level --------------------------------------------------------------
    auto* level_cmd = app.add_subcommand(
        "level", "empirical significance level under the null family");
    std::string level_family;
    std::string mu_text, p0_text, shape_text;
    CommonFlags level_flags;
    level_cmd->add_option("--family", level_family, "null family id")->required();
    level_cmd->add_option("--mu", mu_text, "mean grid (geometric/shifted-borel)");
    level_cmd->add_option("--p0", p0_text, "P(X=0) grid (bell1)");
    level_cmd->add_option(
        "--shape", shape_text,
        "shape grid applied to both alpha and theta (bell2)");
    add_common(level_cmd, level_flags);

    // --- power --------------------------------------------------------------
    auto* power_cmd = app.add_subcommand(
        "power", "empirical power against alternative distributions");
    std::string power_null;
    std::vector<std::string> power_alts;
    CommonFlags power_flags;
    power_cmd->add_option("--null", power_null, "null family id")->required();
    power_cmd
        ->add_option("--alt", power_alts,
                     "alternative spec id:p1,p2,... (repeatable)")
        ->required();
    add_common(power_cmd, power_flags);

    // --- contig -------------------------------------------------------------
    auto* contig_cmd = app.add_subcommand(
        "contig", "power under contiguous alternatives (mixture or thinning)");
    std::string contig_base;
    double contig_mu = 1.0;
    std::string contaminant_text;
    bool thinning = false;
    std::string lambda_text = "0";
    CommonFlags contig_flags;
    contig_cmd->add_option("--base", contig_base, "base null family id")
        ->required();
    contig_cmd->add_option("--mu", contig_mu, "base mean");
    contig_cmd->add_option("--contaminant", contaminant_text,
                           "mean-matched contaminant spec id:p1,p2,...");
    contig_cmd->add_flag("--thinning", thinning,
                         "binomial thinning instead of a mixture");
    contig_cmd->add_option("--lambda", lambda_text,
                           "contiguity rate grid (start:stop:step)");
    add_common(contig_cmd, contig_flags);

    // --- grid ---------------------------------------------------------------
    auto* grid_cmd = app.add_subcommand(
        "grid", "run cells from a plain-text config, one per line: "
                "null=<id> alt=<id:params> n=<int> reps=<int> seed=<int> "
                "alpha=<float>");
    std::string grid_path;
    std::string grid_out;
    grid_cmd->add_option("config", grid_path, "grid config file")->required();
    grid_cmd->add_option("--out", grid_out, "CSV output path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*test_cmd)
            return run_test_cmd(data_path, test_family, test_alpha, comparator);

        if (*level_cmd) {
            harness::ExperimentGrid grid;
            grid.family_id = level_family;
            grid.replications = level_flags.reps;
            grid.alpha = level_flags.alpha;
            grid.seed = level_flags.seed;
            grid.threads = level_flags.threads;

            std::vector<harness::ParamPoint> points;
            const int grids_given = static_cast<int>(!mu_text.empty()) +
                                    static_cast<int>(!p0_text.empty()) +
                                    static_cast<int>(!shape_text.empty());
            if (grids_given != 1)
                throw CLI::ValidationError(
                    "level", "give exactly one of --mu, --p0, --shape");
            if (!mu_text.empty()) {
                if (!models::find_family_1p(level_family))
                    throw CLI::ValidationError("--mu",
                                               "needs a one-parameter family");
                for (const double mu : parse_grid(mu_text, "--mu"))
                    points.push_back({mu, std::nullopt});
            } else if (!p0_text.empty()) {
                const auto* fam = models::find_family_1p(level_family);
                if (!fam)
                    throw CLI::ValidationError("--p0",
                                               "needs a one-parameter family");
                for (const double p0 : parse_grid(p0_text, "--p0"))
                    points.push_back({harness::mean_for_p0(*fam, p0), std::nullopt});
            } else {
                if (!models::find_family_2p(level_family))
                    throw CLI::ValidationError("--shape",
                                               "needs a two-parameter family");
                const auto shape = parse_grid(shape_text, "--shape");
                points = harness::bell2_moment_grid(shape, shape);
            }
            for (const auto n : parse_sizes(level_flags.n_text))
                for (const auto& point : points)
                    grid.cells.push_back({point, n, harness::NullData{}});
            finish_run(harness::run_level_experiment(grid, stderr_progress()),
                       level_flags.out);
            return kExitOk;
        }

        if (*power_cmd) {
            harness::ExperimentGrid grid;
            grid.family_id = power_null;
            grid.replications = power_flags.reps;
            grid.alpha = power_flags.alpha;
            grid.seed = power_flags.seed;
            grid.threads = power_flags.threads;
            for (const auto n : parse_sizes(power_flags.n_text))
                for (const auto& alt_text : power_alts) {
                    auto dist = models::alt_from_spec(alt_text);
                    // the param point records the alternative's own moments;
                    // the tests always plug in sample moments
                    harness::ParamPoint point{dist.mean(), std::nullopt};
                    if (models::find_family_2p(power_null))
                        point.mu2 = dist.second_moment();
                    grid.cells.push_back(
                        {point, n, harness::AltData{std::move(dist)}});
                }
            finish_run(harness::run_power_experiment(grid, stderr_progress()),
                       power_flags.out);
            return kExitOk;
        }

        if (*contig_cmd) {
            if (contaminant_text.empty() == !thinning)
                throw CLI::ValidationError(
                    "contig", "give exactly one of --contaminant or --thinning");
            harness::ExperimentGrid grid;
            grid.family_id = contig_base;
            grid.replications = contig_flags.reps;
            grid.alpha = contig_flags.alpha;
            grid.seed = contig_flags.seed;
            grid.threads = contig_flags.threads;
            const auto lambdas = parse_grid(lambda_text, "--lambda");
            for (const auto n : parse_sizes(contig_flags.n_text))
                for (const double lambda : lambdas) {
                    harness::ParamPoint point{contig_mu, std::nullopt};
                    if (thinning) {
                        grid.cells.push_back(
                            {point, n, harness::ThinningData{lambda}});
                    } else {
                        grid.cells.push_back(
                            {point, n,
                             harness::MixtureData{
                                 models::alt_from_spec(contaminant_text), lambda}});
                    }
                }
            finish_run(harness::run_contig_experiment(grid, stderr_progress()),
                       contig_flags.out);
            return kExitOk;
        }

        if (*grid_cmd) {
            std::ifstream in(grid_path);
            if (!in) {
                std::cerr << "error: cannot open grid config: " << grid_path
                          << "\n";
                return kExitUsage;
            }
            const auto grids = harness::parse_grid_config(in);
            finish_run(harness::run_grids(grids, stderr_progress()), grid_out);
            return kExitOk;
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
