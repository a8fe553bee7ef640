#include "pevgrid/config.hpp"

#include "pevgrid/errors.hpp"
#include "pevgrid/report.hpp"
#include "support/synthetic.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

using namespace pevgrid;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;

    TempDir()
    {
        path = fs::temp_directory_path() /
               ("pevgrid_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }

    static int& counter()
    {
        static int n = 0;
        return n;
    }

    fs::path write(const std::string& name, const std::string& content) const
    {
        const fs::path file = path / name;
        std::ofstream out(file, std::ios::binary);
        out << content;
        return file;
    }
};

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

const char* kFeederCsv =
    "# four-bus test feeder\n"
    "source,1,1.0,1000,1000,12.47\n"
    "bus,2,0\n"
    "bus,3,1,0.4\n"
    "bus,4,1,0.6\n"
    "branch,1,2,0.01,0.02\n"
    "branch,2,3,0.008,0.016\n"
    "branch,3,4,0.008,0.016\n"
    "regulator,2,3\n";

std::string base_csv_slots(int slots, double p_kw, bool with_q = false)
{
    std::ostringstream os;
    os << (with_q ? "timestamp,p_kw,q_kvar\n" : "timestamp,p_kw\n");
    for (int i = 0; i < slots; ++i) {
        os << i << "," << p_kw;
        if (with_q)
            os << "," << p_kw * 0.3;
        os << "\n";
    }
    return os.str();
}

std::string demo_config(const std::string& extra = "")
{
    std::string text = "feeder_csv = feeder.csv\n"
                       "baseload_csv = base.csv\n"
                       "horizon_days = 2\n"
                       "iterations = 2\n"
                       "seed = 7\n"
                       "scenario = 1\n";
    text += extra;
    return text;
}

} // namespace

TEST_CASE("config ingestion")
{
    TempDir dir;
    dir.write("feeder.csv", kFeederCsv);
    dir.write("base.csv", base_csv_slots(192, 400.0));

    SUBCASE("defaults, overrides and provenance")
    {
        const fs::path cfg = dir.write("run.conf", demo_config("tco_ec = 0.07\n"));
        const config::Bundle bundle = config::ingest(cfg.string());
        CHECK(bundle.tco.ec == Approx(0.07));
        CHECK(bundle.params.at("tco_ec").provenance == config::Provenance::Override);
        CHECK(bundle.params.at("tco_dc").provenance == config::Provenance::Published);
        CHECK(bundle.params.at("depart_mean_h").provenance == config::Provenance::Default);
        CHECK(bundle.tco.dc == Approx(120.0));
        CHECK(bundle.aging.t_ins_hours == Approx(135000.0));
        CHECK(bundle.mcs.iterations == 2);
        CHECK(bundle.feeder.regulators.size() == 1);
        CHECK(bundle.feeder.regulators[0].config.kappa == Approx(0.0065));
        // q column missing: defaulted with a warning
        CHECK(bundle.base_q.has_value() == false);
        REQUIRE(bundle.warnings.size() == 1);
        CHECK(bundle.warnings[0].find("q_kvar") != std::string::npos);
        // regulator downstream bus auto-monitored
        REQUIRE(bundle.monitored_bus_ids.size() == 1);
        CHECK(bundle.monitored_bus_ids[0] == 3);
        CHECK(!bundle.config_hash.empty());
    }

    SUBCASE("command-line overrides beat the file")
    {
        const fs::path cfg = dir.write("run.conf", demo_config());
        config::Overrides overrides;
        overrides.seed = 12345;
        overrides.scenario_index = 4;
        const config::Bundle bundle = config::ingest(cfg.string(), overrides);
        CHECK(bundle.mcs.master_seed == 12345);
        CHECK(bundle.scenario_index == 4);
        CHECK(bundle.params.at("seed").provenance == config::Provenance::Override);
    }

    SUBCASE("unknown keys are schema violations")
    {
        const fs::path cfg = dir.write("run.conf", demo_config("not_a_key = 1\n"));
        CHECK_THROWS_WITH_AS(config::ingest(cfg.string()),
                             doctest::Contains("unknown parameter"), InputError);
    }

    SUBCASE("exactly one scenario selection form")
    {
        const fs::path cfg = dir.write("run.conf", demo_config("pl_percent = 50\n"));
        CHECK_THROWS_WITH_AS(config::ingest(cfg.string()), doctest::Contains("exactly one"),
                             InputError);
    }

    SUBCASE("custom scenario form")
    {
        std::string text = "feeder_csv = feeder.csv\n"
                           "baseload_csv = base.csv\n"
                           "horizon_days = 2\n"
                           "custom_vehicle_class = commuter\n"
                           "custom_charge_mode = fast\n"
                           "custom_fleet_count = 25\n"
                           "custom_charge_power_kw = 50\n"
                           "custom_battery_kwh = 30\n";
        const fs::path cfg = dir.write("run.conf", text);
        const config::Bundle bundle = config::ingest(cfg.string());
        REQUIRE(bundle.custom_scenario.has_value());
        CHECK(bundle.custom_scenario->fleet_count == 25);
        CHECK(bundle.custom_scenario->charge_power_kw == Approx(50.0));
        const auto selection = bundle.selection();
        CHECK(std::holds_alternative<charging::ChargingScenario>(selection));
    }

    SUBCASE("area table drives the mixed composition")
    {
        const fs::path cfg =
            dir.write("run.conf", demo_config()); // scenario form, but spec is buildable
        config::Bundle bundle = config::ingest(cfg.string());
        CHECK(bundle.mixed_spec(100.0).slow_share == Approx(0.70));
        bundle.area = "rural";
        CHECK(bundle.mixed_spec(100.0).slow_share == Approx(0.80));
        bundle.area = "nowhere";
        CHECK_THROWS_AS(bundle.mixed_spec(100.0), InputError);
    }
}

TEST_CASE("feeder CSV schema errors")
{
    TempDir dir;

    SUBCASE("duplicate bus id names the line")
    {
        const std::string bad = "source,1,1.0,1000,1000,12.47\n"
                                "bus,2,1\n"
                                "bus,2,1\n"
                                "branch,1,2,0.01,0.02\n";
        const fs::path file = dir.write("feeder.csv", bad);
        CHECK_THROWS_WITH_AS(config::load_feeder_csv(file.string(), {}),
                             doctest::Contains(":3"), InputError);
    }

    SUBCASE("regulator must reference a declared branch")
    {
        const std::string bad = "source,1,1.0,1000,1000,12.47\n"
                                "bus,2,1\n"
                                "branch,1,2,0.01,0.02\n"
                                "regulator,1,9\n";
        const fs::path file = dir.write("feeder.csv", bad);
        CHECK_THROWS_WITH_AS(config::load_feeder_csv(file.string(), {}),
                             doctest::Contains("undeclared branch"), InputError);
    }

    SUBCASE("non-tree topologies are rejected at ingestion")
    {
        const std::string bad = "source,1,1.0,1000,1000,12.47\n"
                                "bus,2,1\n"
                                "bus,3,1\n"
                                "branch,1,2,0.01,0.02\n"
                                "branch,2,3,0.01,0.02\n"
                                "branch,3,1,0.01,0.02\n";
        const fs::path file = dir.write("feeder.csv", bad);
        CHECK_THROWS_WITH_AS(config::load_feeder_csv(file.string(), {}),
                             doctest::Contains("tree"), InputError);
    }
}

TEST_CASE("base-load CSV schema")
{
    TempDir dir;

    SUBCASE("row count must fill the horizon exactly")
    {
        const fs::path file = dir.write("base.csv", base_csv_slots(95, 100.0));
        CHECK_THROWS_WITH_AS(config::load_baseload_csv(file.string(), 1, 0.25),
                             doctest::Contains("expected exactly 96"), InputError);
    }

    SUBCASE("q column parsed when present")
    {
        const fs::path file = dir.write("base.csv", base_csv_slots(96, 200.0, true));
        const config::BaseLoadData data = config::load_baseload_csv(file.string(), 1, 0.25);
        REQUIRE(data.q.has_value());
        CHECK(data.q->values_kw[10] == Approx(60.0));
        CHECK_FALSE(data.q_defaulted);
    }

    SUBCASE("ISO timestamps accepted at uniform spacing")
    {
        std::ostringstream os;
        os << "timestamp,p_kw\n";
        for (int i = 0; i < 96; ++i) {
            const int hour = i / 4;
            const int minute = (i % 4) * 15;
            char stamp[32];
            std::snprintf(stamp, sizeof(stamp), "2030-01-01T%02d:%02d", hour, minute);
            os << stamp << ",150\n";
        }
        const fs::path file = dir.write("base.csv", os.str());
        const config::BaseLoadData data = config::load_baseload_csv(file.string(), 1, 0.25);
        CHECK(data.p.values_kw[50] == Approx(150.0));
    }

    SUBCASE("non-uniform spacing rejected")
    {
        std::ostringstream os;
        os << "timestamp,p_kw\n";
        os << "2030-01-01T00:00,100\n";
        os << "2030-01-01T00:15,100\n";
        os << "2030-01-01T00:45,100\n"; // gap
        for (int i = 3; i < 96; ++i)
            os << "2030-01-01T10:00,100\n";
        const fs::path file = dir.write("base.csv", os.str());
        CHECK_THROWS_WITH_AS(config::load_baseload_csv(file.string(), 1, 0.25),
                             doctest::Contains("uniform"), InputError);
    }

    SUBCASE("negative load rejected")
    {
        std::string text = base_csv_slots(96, 100.0);
        text += ""; // keep 96 rows; patch one value negative
        const fs::path file = dir.write("base.csv", text);
        std::string patched = read_file(file);
        const auto pos = patched.find("40,100");
        REQUIRE(pos != std::string::npos);
        patched.replace(pos, 6, "40,-5.");
        dir.write("base.csv", patched);
        CHECK_THROWS_WITH_AS(config::load_baseload_csv(file.string(), 1, 0.25),
                             doctest::Contains("negative"), InputError);
    }
}

TEST_CASE("end-to-end emission is byte-identical and manifest-reproducible")
{
    TempDir dir;
    dir.write("feeder.csv", kFeederCsv);
    // a mild daily shape so regulators and the thermal chain have work
    std::ostringstream base;
    base << "timestamp,p_kw\n";
    for (int i = 0; i < 192; ++i) {
        const double hour = (i % 96) * 0.25;
        base << i << "," << 500.0 + 300.0 * std::exp(-0.5 * std::pow((hour - 18.0) / 2.0, 2))
             << "\n";
    }
    dir.write("base.csv", base.str());
    const fs::path cfg = dir.write("run.conf", demo_config("out_dir = out_a\n"));

    const config::Bundle bundle = config::ingest(cfg.string());
    const harness::AssessmentInputs inputs = bundle.assessment_inputs();
    harness::AssessmentReport report = harness::run_mcs(bundle.mcs, bundle.selection(), inputs);
    report.config_hash = bundle.config_hash;

    const fs::path out_a = dir.path / "out_a";
    const fs::path out_b = dir.path / "out_b";
    report::emit_report(report, bundle, out_a.string());
    report::emit_report(report, bundle, out_b.string());
    CHECK(read_file(out_a / "summary.csv") == read_file(out_b / "summary.csv"));
    CHECK(read_file(out_a / "run_manifest.json") == read_file(out_b / "run_manifest.json"));
    CHECK(read_file(out_a / "summary.csv").find("scenario-1") != std::string::npos);

    SUBCASE("manifest round-trip reproduces the run byte for byte")
    {
        const config::Bundle again =
            config::ingest_manifest((out_a / "run_manifest.json").string());
        CHECK(again.config_hash == bundle.config_hash);
        const harness::AssessmentInputs inputs2 = again.assessment_inputs();
        harness::AssessmentReport replay =
            harness::run_mcs(again.mcs, again.selection(), inputs2);
        replay.config_hash = again.config_hash;
        const fs::path out_c = dir.path / "out_c";
        report::emit_report(replay, again, out_c.string());
        CHECK(read_file(out_c / "summary.csv") == read_file(out_a / "summary.csv"));
    }

    SUBCASE("rerun with a fresh ingest also matches")
    {
        const config::Bundle bundle2 = config::ingest(cfg.string());
        const harness::AssessmentInputs inputs2 = bundle2.assessment_inputs();
        harness::AssessmentReport report2 =
            harness::run_mcs(bundle2.mcs, bundle2.selection(), inputs2);
        report2.config_hash = bundle2.config_hash;
        const fs::path out_d = dir.path / "out_d";
        report::emit_report(report2, bundle2, out_d.string());
        CHECK(read_file(out_d / "summary.csv") == read_file(out_a / "summary.csv"));
    }
}

TEST_CASE("summary values stay finite even in the epsilon class")
{
    // direct channel emission with an extreme loss of life
    harness::ChannelReport ch;
    ch.yearly_lol_pct = 1.82e6;
    ch.lifetime_years = 100.0 / 1.82e6;
    ch.eps_flag = true;
    ch.mean_k = {1.0, 1.1};
    ch.theta_hst_c = {150.0, 160.0};
    ch.accum_lol = {0.5, 1.4};
    CHECK(std::isfinite(ch.yearly_lol_pct));
    CHECK(ch.lifetime_years < 0.5);
    CHECK(report::format_value(ch.yearly_lol_pct) == "1820000");
}
