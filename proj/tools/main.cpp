#include "pevgrid/config.hpp"
#include "pevgrid/errors.hpp"
#include "pevgrid/harness.hpp"
#include "pevgrid/report.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace pevgrid;

config::Overrides make_overrides(const std::optional<std::uint64_t>& seed,
                                 const std::optional<int>& iterations,
                                 const std::optional<int>& scenario,
                                 const std::optional<double>& pl,
                                 const std::optional<std::string>& area,
                                 const std::optional<std::string>& out)
{
    config::Overrides o;
    o.seed = seed;
    o.iterations = iterations;
    o.scenario_index = scenario;
    o.pl_percent = pl;
    o.area = area;
    o.out_dir = out;
    return o;
}

void print_warnings(const config::Bundle& bundle)
{
    for (const std::string& warning : bundle.warnings)
        std::cerr << "warning: " << warning << "\n";
}

int cmd_validate(const std::string& config_path)
{
    const config::Bundle bundle = config::ingest(config_path);
    print_warnings(bundle);
    std::cout << "config ok: " << bundle.feeder.buses.size() << " buses, "
              << bundle.feeder.branches.size() << " branches, "
              << bundle.feeder.regulators.size() << " regulators, "
              << bundle.base_p.horizon_slots << " base-load slots @ "
              << bundle.mcs.resolution_h << " h\n";
    std::cout << "config hash: " << bundle.config_hash << "\n";
    return 0;
}

int cmd_run(const config::Bundle& bundle, bool from_manifest)
{
    print_warnings(bundle);
    const harness::AssessmentInputs inputs = bundle.assessment_inputs();
    const harness::AssessmentReport report =
        harness::run_mcs(bundle.mcs, bundle.selection(), inputs);
    harness::AssessmentReport stamped = report;
    stamped.config_hash = bundle.config_hash;
    report::emit_report(stamped, bundle, bundle.out_dir);
    std::cout << "scenario " << report.scenario_label << ": yearly LoL "
              << report::format_value(report.scenario.yearly_lol_pct) << "%, lifetime "
              << report::format_value(report.scenario.lifetime_years) << " yr"
              << (report.scenario.eps_flag ? " (epsilon class)" : "") << "\n";
    std::cout << "report written to " << bundle.out_dir << (from_manifest ? " (manifest rerun)" : "")
              << "\n";
    return 0;
}

int cmd_benchmark(const config::Bundle& bundle)
{
    print_warnings(bundle);
    const harness::AssessmentInputs inputs = bundle.assessment_inputs();
    const harness::ChannelReport benchmark = harness::run_benchmark(bundle.mcs, inputs);
    report::emit_benchmark_report(benchmark, bundle, bundle.out_dir);
    std::cout << "benchmark: yearly LoL " << report::format_value(benchmark.yearly_lol_pct)
              << "%, lifetime " << report::format_value(benchmark.lifetime_years) << " yr\n";
    std::cout << "report written to " << bundle.out_dir << "\n";
    return 0;
}

int cmd_sweep(const config::Bundle& bundle, const std::vector<double>& pl_levels)
{
    print_warnings(bundle);
    const harness::AssessmentInputs inputs = bundle.assessment_inputs();
    const harness::ChannelReport benchmark = harness::run_benchmark(bundle.mcs, inputs);
    std::vector<harness::AssessmentReport> reports;
    for (double pl : pl_levels) {
        harness::AssessmentReport report =
            harness::run_mcs(bundle.mcs, bundle.mixed_spec(pl), inputs);
        report.config_hash = bundle.config_hash;
        std::cout << "PL " << pl << "%: yearly LoL "
                  << report::format_value(report.scenario.yearly_lol_pct) << "%, TCO gap "
                  << report::format_value(report.scenario.tco_reestablished.total() -
                                          report.scenario.tco_conventional.total())
                  << " $\n";
        reports.push_back(std::move(report));
    }
    report::emit_sweep_summary(reports, benchmark, bundle, bundle.out_dir);
    std::cout << "sweep summary written to " << bundle.out_dir << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"PEV charging impact on grid assets: Monte Carlo time-series "
                 "power flow with transformer thermal aging, voltage-regulator "
                 "duty, and TCO evaluation"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> iterations;
    std::optional<int> scenario;
    std::optional<double> pl;
    std::optional<std::string> area;
    std::optional<std::string> out_dir;
    std::string manifest_path;
    std::vector<double> sweep_levels{50.0, 100.0, 200.0, 300.0};

    CLI::App* run = app.add_subcommand("run", "run one charging scenario through the MCS");
    run->add_option("--config", config_path, "run configuration file")->required();
    run->add_option("--seed", seed, "master seed override");
    run->add_option("--iterations", iterations, "MCS iteration override");
    run->add_option("--scenario", scenario, "catalog scenario index 1..10")
        ->check(CLI::Range(1, 10));
    run->add_option("--pl", pl, "penetration level percent (mixed fleet)");
    run->add_option("--area", area, "area composition for --pl: urban|suburban|rural");
    run->add_option("--out", out_dir, "output directory");

    CLI::App* rerun = app.add_subcommand("rerun", "reproduce a run from its manifest");
    rerun->add_option("--manifest", manifest_path, "run_manifest.json of a previous run")
        ->required();
    rerun->add_option("--out", out_dir, "output directory");

    CLI::App* benchmark = app.add_subcommand("benchmark", "PEV-free benchmark run");
    benchmark->add_option("--config", config_path, "run configuration file")->required();
    benchmark->add_option("--out", out_dir, "output directory");

    CLI::App* sweep = app.add_subcommand("sweep", "penetration-level sweep with mixed fleets");
    sweep->add_option("--config", config_path, "run configuration file")->required();
    sweep->add_option("--pl", sweep_levels, "penetration levels percent")->delimiter(',');
    sweep->add_option("--seed", seed, "master seed override");
    sweep->add_option("--iterations", iterations, "MCS iteration override");
    sweep->add_option("--area", area, "area composition: urban|suburban|rural");
    sweep->add_option("--out", out_dir, "output directory");

    CLI::App* validate = app.add_subcommand("validate", "parse and validate inputs only");
    validate->add_option("--config", config_path, "run configuration file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1; // bad flags are input errors
    }

    try {
        if (app.got_subcommand(validate))
            return cmd_validate(config_path);

        if (app.got_subcommand(rerun)) {
            pevgrid::config::Bundle bundle = pevgrid::config::ingest_manifest(manifest_path);
            if (out_dir)
                bundle.out_dir = *out_dir;
            return cmd_run(bundle, true);
        }

        const pevgrid::config::Overrides overrides =
            make_overrides(seed, iterations, scenario, pl, area, out_dir);
        pevgrid::config::Bundle bundle = pevgrid::config::ingest(config_path, overrides);

        if (app.got_subcommand(benchmark))
            return cmd_benchmark(bundle);
        if (app.got_subcommand(sweep))
            return cmd_sweep(bundle, sweep_levels);
        return cmd_run(bundle, false);
    } catch (const pevgrid::SolveError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const pevgrid::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
