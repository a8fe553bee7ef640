#include "pevgrid/report.hpp"

#include "pevgrid/errors.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace pevgrid::report {

namespace {

    namespace fs = std::filesystem;

    std::ofstream open_out(const fs::path& path)
    {
        std::ofstream out(path, std::ios::binary); // "\n" endings on every platform
        if (!out)
            throw InputError("cannot write " + path.string());
        return out;
    }

    void write_series_csv(const fs::path& path, const std::string& column,
                          std::span<const double> values)
    {
        std::ofstream out = open_out(path);
        out << "slot," << column << "\n";
        for (std::size_t i = 0; i < values.size(); ++i)
            out << i << "," << format_value(values[i]) << "\n";
    }

    void write_tap_csv(const fs::path& path, std::span<const int> taps)
    {
        std::ofstream out = open_out(path);
        out << "slot,tap\n";
        for (std::size_t i = 0; i < taps.size(); ++i)
            out << i << "," << taps[i] << "\n";
    }

    std::string joined_ops(const harness::ChannelReport& ch)
    {
        std::ostringstream os;
        for (std::size_t r = 0; r < ch.regulators.size(); ++r) {
            if (r > 0)
                os << ";";
            os << format_value(ch.regulators[r].annual_ops_mean);
        }
        return os.str();
    }

    std::string joined_vr_lol(const harness::ChannelReport& ch)
    {
        std::ostringstream os;
        for (std::size_t r = 0; r < ch.regulators.size(); ++r) {
            if (r > 0)
                os << ";";
            os << format_value(ch.regulators[r].lol);
        }
        return os.str();
    }

    void write_summary_row(std::ofstream& out, const std::string& label,
                           const harness::ChannelReport& ch)
    {
        out << label << "," << format_value(ch.yearly_lol_pct) << ","
            << format_value(ch.lifetime_years) << "," << (ch.eps_flag ? "true" : "false") << ","
            << joined_ops(ch) << "," << joined_vr_lol(ch) << ","
            << format_value(ch.tco_conventional.total()) << ","
            << format_value(ch.tco_reestablished.total()) << "\n";
    }

    void write_channel_timeseries(const fs::path& dir, const std::string& prefix,
                                  const harness::ChannelReport& ch)
    {
        write_series_csv(dir / (prefix + "mean_k.csv"), "mean_k", ch.mean_k);
        write_series_csv(dir / (prefix + "theta_hst.csv"), "theta_hst_c", ch.theta_hst_c);
        write_series_csv(dir / (prefix + "accum_lol.csv"), "accumulated_lol", ch.accum_lol);
        for (std::size_t r = 0; r < ch.taps_first_iteration.size(); ++r) {
            std::ostringstream name;
            name << prefix << "taps_vr" << r << ".csv";
            write_tap_csv(dir / name.str(), ch.taps_first_iteration[r]);
        }
    }

    void breakdown_rows(std::ofstream& out, const std::string& label,
                        const harness::ChannelReport& ch, double t_ins_years)
    {
        const auto row = [&](const std::string& component, const char* term, double dollars) {
            out << component << "," << term << ",0," << format_value(t_ins_years) << ","
                << format_value(dollars) << "\n";
        };
        row(label + "-conventional", "capital", ch.tco_conventional.capital);
        row(label + "-conventional", "core_loss", ch.tco_conventional.core_loss);
        row(label + "-conventional", "load_loss", ch.tco_conventional.load_loss);
        row(label + "-conventional", "total", ch.tco_conventional.total());
        row(label + "-reestablished", "capital", ch.tco_reestablished.capital);
        row(label + "-reestablished", "core_loss", ch.tco_reestablished.core_loss);
        row(label + "-reestablished", "load_loss", ch.tco_reestablished.load_loss);
        row(label + "-reestablished", "total", ch.tco_reestablished.total());
    }

    nlohmann::json manifest_json(const config::Bundle& bundle, std::uint64_t seed,
                                 const std::string& scenario_label)
    {
        nlohmann::json doc;
        doc["seed"] = seed;
        doc["config_hash"] = bundle.config_hash;
        doc["scenario"] = scenario_label;
        nlohmann::json params;
        for (const auto& [key, value] : bundle.params) {
            nlohmann::json entry;
            // store resolved data paths so a manifest rerun finds them
            if (key == "feeder_csv")
                entry["value"] = fs::absolute(bundle.feeder_csv).string();
            else if (key == "baseload_csv")
                entry["value"] = fs::absolute(bundle.baseload_csv).string();
            else
                entry["value"] = value.value;
            entry["provenance"] = config::provenance_name(value.provenance);
            params[key] = entry;
        }
        doc["params"] = params;
        doc["warnings"] = bundle.warnings;
        return doc;
    }

    void write_manifest(const fs::path& path, const config::Bundle& bundle, std::uint64_t seed,
                        const std::string& scenario_label)
    {
        std::ofstream out = open_out(path);
        out << manifest_json(bundle, seed, scenario_label).dump(2) << "\n";
    }

    fs::path prepare_outdir(const std::string& outdir)
    {
        fs::path dir(outdir);
        std::error_code ec;
        fs::create_directories(dir / "timeseries", ec);
        if (ec)
            throw InputError("cannot create output directory " + dir.string() + ": " +
                             ec.message());
        return dir;
    }

} // namespace

std::string format_value(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

void emit_report(const harness::AssessmentReport& report, const config::Bundle& bundle,
                 const std::string& outdir)
{
    const fs::path dir = prepare_outdir(outdir);

    std::ofstream summary = open_out(dir / "summary.csv");
    summary << "scenario,yearly_lol_pct,lifetime_yr,eps_flag,vr_ops,vr_lol,"
               "tco_conventional,tco_reestablished\n";
    write_summary_row(summary, "benchmark", report.benchmark);
    write_summary_row(summary, report.scenario_label, report.scenario);

    write_channel_timeseries(dir / "timeseries", "", report.scenario);
    write_channel_timeseries(dir / "timeseries", "benchmark_", report.benchmark);
    {
        std::ofstream breakdown = open_out(dir / "cost_breakdown.csv");
        breakdown << "component,term,window_start_yr,window_end_yr,dollars\n";
        breakdown_rows(breakdown, "benchmark", report.benchmark, bundle.tco.t_ins_years);
        breakdown_rows(breakdown, "transformer", report.scenario, bundle.tco.t_ins_years);
    }
    write_manifest(dir / "run_manifest.json", bundle, report.master_seed,
                   report.scenario_label);
}

void emit_benchmark_report(const harness::ChannelReport& benchmark,
                           const config::Bundle& bundle, const std::string& outdir)
{
    const fs::path dir = prepare_outdir(outdir);
    std::ofstream summary = open_out(dir / "summary.csv");
    summary << "scenario,yearly_lol_pct,lifetime_yr,eps_flag,vr_ops,vr_lol,"
               "tco_conventional,tco_reestablished\n";
    write_summary_row(summary, "benchmark", benchmark);
    write_channel_timeseries(dir / "timeseries", "benchmark_", benchmark);
    write_manifest(dir / "run_manifest.json", bundle, bundle.mcs.master_seed, "benchmark");
}

void emit_sweep_summary(const std::vector<harness::AssessmentReport>& reports,
                        const harness::ChannelReport& benchmark, const config::Bundle& bundle,
                        const std::string& outdir)
{
    const fs::path dir = prepare_outdir(outdir);
    std::ofstream out = open_out(dir / "sweep_summary.csv");
    out << "pl_percent,slow_count,fast_count,yearly_lol_pct,lifetime_yr,eps_flag,"
           "tco_conventional,tco_reestablished,tco_gap\n";
    const auto row = [&](double pl, int slow, int fast, const harness::ChannelReport& ch) {
        out << format_value(pl) << "," << slow << "," << fast << ","
            << format_value(ch.yearly_lol_pct) << "," << format_value(ch.lifetime_years) << ","
            << (ch.eps_flag ? "true" : "false") << ","
            << format_value(ch.tco_conventional.total()) << ","
            << format_value(ch.tco_reestablished.total()) << ","
            << format_value(ch.tco_reestablished.total() - ch.tco_conventional.total()) << "\n";
    };
    row(0.0, 0, 0, benchmark);
    for (const harness::AssessmentReport& report : reports)
        row(report.penetration_pct, report.slow_count, report.fast_count, report.scenario);
    write_manifest(dir / "run_manifest.json", bundle, bundle.mcs.master_seed, "sweep");
}

} // namespace pevgrid::report
