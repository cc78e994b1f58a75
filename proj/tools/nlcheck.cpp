#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nonlocal/counterexamples.hpp"
#include "nonlocal/report.hpp"
#include "nonlocal/suites.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_output(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        if (!std::cout) throw IoError("cannot write to standard output");
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    os << text;
    os.close();
    if (!os) throw IoError("write failed for '" + path + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical checks for antisymmetric nonlocal problems"};
    app.require_subcommand(1);

    nonlocal::SuiteOptions opts;
    std::string suite, out_path, format = "json";
    std::optional<int> n;
    std::optional<double> s, tol;
    std::vector<double> eps;

    auto* run = app.add_subcommand("run", "Run a verification suite and print a JSON or CSV report");
    run->add_option("suite", suite, "constants, fraclap, barrier, poisson, bochner, ellipsoid, slab, perimeter, "
                                    "counterexamples or all")
        ->required();
    run->add_option("--n", n, "Dimension (restricts the suite grids)");
    run->add_option("--s", s, "Fractional order in (0,1) (restricts the suite grids)");
    run->add_option("--eps", eps, "Comma-separated eps list")->delimiter(',');
    run->add_option("--alpha", opts.alpha, "Perturbed-disk exponent for the slab suite")->capture_default_str();
    run->add_option("--tol", tol, "Override the tolerance of two-sided comparisons");
    run->add_option("--seed", opts.seed, "Base seed of all randomized checks")->capture_default_str();
    run->add_option("--samples", opts.samples, "Monte Carlo samples per estimate")->capture_default_str();
    run->add_option("--threads", opts.threads, "Worker threads, 0 = hardware concurrency")->capture_default_str();
    run->add_option("--out", out_path, "Output file (default: standard output)");
    run->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

    std::string check_id;
    auto* exp = app.add_subcommand("explain", "Describe a check: statement, formula and tolerance");
    exp->add_option("check_id", check_id, "Check id or check family")->required();

    std::string family;
    std::vector<double> emit_eps;
    std::string emit_out;
    nonlocal::CsvGrid grid;
    auto* emit = app.add_subcommand("emit", "Write the counterexample polynomial families as CSV");
    emit->add_option("family", family, "harnack or smp")->required()->check(CLI::IsMember({"harnack", "smp"}));
    emit->add_option("--eps", emit_eps, "Comma-separated eps list (harnack)")->delimiter(',');
    emit->add_option("--x-min", grid.x_min)->capture_default_str();
    emit->add_option("--x-max", grid.x_max)->capture_default_str();
    emit->add_option("--steps", grid.steps)->capture_default_str();
    emit->add_option("--out", emit_out, "Output file (default: standard output)");

    app.add_subcommand("list", "List suites and check families");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*run) {
            if (!nonlocal::is_suite(suite)) {
                std::cerr << "nlcheck: unknown suite '" << suite << "'\n";
                return kExitUsage;
            }
            opts.n = n;
            opts.s = s;
            opts.tol = tol;
            opts.eps = eps;
            std::vector<nonlocal::CheckReport> checks;
            try {
                checks = nonlocal::run_suite(suite, opts);
            } catch (const std::invalid_argument& e) {
                std::cerr << "nlcheck: " << e.what() << "\n";
                return kExitUsage;
            }
            nonlocal::Report report = nonlocal::make_report(suite, opts, std::move(checks));
            write_output(format == "csv" ? nonlocal::report_csv(report) : nonlocal::report_json(report), out_path);
            int failed = 0;
            for (const auto& c : report.checks) failed += !c.pass;
            std::cerr << "nlcheck: " << report.checks.size() << " checks, " << failed << " failed\n";
            return failed ? kExitFail : kExitPass;
        }
        if (*exp) {
            auto e = nonlocal::explain(check_id);
            if (!e) {
                std::cerr << "nlcheck: unknown check id '" << check_id << "'\n";
                return kExitUsage;
            }
            std::cout << e->id << "\n  statement: " << e->statement << "\n  formula:   " << e->formula
                      << "\n  tolerance: " << e->tolerance << "\n";
            return kExitPass;
        }
        if (*emit) {
            std::string text;
            try {
                text = nonlocal::family_csv(family, emit_eps, grid);
            } catch (const std::invalid_argument& e) {
                std::cerr << "nlcheck: " << e.what() << "\n";
                return kExitUsage;
            } catch (const std::domain_error& e) {
                std::cerr << "nlcheck: " << e.what() << "\n";
                return kExitUsage;
            }
            write_output(text, emit_out);
            return kExitPass;
        }
        std::cout << "suites:";
        for (const auto& name : nonlocal::suite_names()) std::cout << ' ' << name;
        std::cout << " all\nchecks:\n";
        for (const auto& e : nonlocal::explanations()) std::cout << "  " << e.id << "\n";
        return kExitPass;
    } catch (const IoError& e) {
        std::cerr << "nlcheck: " << e.what() << "\n";
        return kExitIo;
    }
}
