#ifndef PEVGRID_CONFIG_HPP
#define PEVGRID_CONFIG_HPP

#include "pevgrid/charging.hpp"
#include "pevgrid/economics.hpp"
#include "pevgrid/harness.hpp"
#include "pevgrid/network.hpp"
#include "pevgrid/thermal.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pevgrid::config {

// Where a parameter value came from: the published parameter set, an
// artifact default, or a user override.
enum class Provenance { Published, Default, Override };

const char* provenance_name(Provenance p);

struct ParamValue {
    std::string value;
    Provenance provenance = Provenance::Default;
};

// Command-line overrides applied on top of the config file.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> iterations;
    std::optional<int> scenario_index;
    std::optional<double> pl_percent;
    std::optional<std::string> area;
    std::optional<std::string> out_dir;
};

// Fully resolved, validated model bundle for one run.
struct Bundle {
    network::FeederModel feeder;
    LoadProfile base_p;
    std::optional<LoadProfile> base_q;

    charging::BehaviorDistributions behavior;
    thermal::ThermalParams thermal_params;
    thermal::AgingParams aging;
    economics::TcoParams tco;
    harness::McsConfig mcs;

    double base_power_factor = 0.95;
    double pev_power_factor = 0.95;
    double anxiety_threshold = 0.30;
    std::vector<int> monitored_bus_ids;

    // scenario selection: exactly one form active
    int scenario_index = 0;                 // 1..10 when catalog form
    std::optional<double> pl_percent;       // mixed form
    std::string area = "urban";
    std::optional<charging::ChargingScenario> custom_scenario;
    double mixed_slow_battery_kwh = 40.0;
    double mixed_fast_battery_kwh = 40.0;

    std::string feeder_csv;
    std::string baseload_csv;
    std::string out_dir = "out";
    std::string config_hash;
    std::map<std::string, ParamValue> params; // resolved values with provenance
    std::vector<std::string> warnings;

    harness::AssessmentInputs assessment_inputs() const;
    harness::ScenarioSelection selection() const;
    harness::MixedFleetSpec mixed_spec(double pl) const;
};

// Parses the flat key-value config file, loads and validates the feeder
// and base-load CSVs, and resolves every parameter with provenance.
// Schema violations throw InputError with file/line/column context.
Bundle ingest(const std::string& config_path, const Overrides& overrides = {});

// Rebuilds the bundle of a previous run from its emitted manifest; the
// rerun reproduces the original byte for byte.
Bundle ingest_manifest(const std::string& manifest_path);

// Feeder CSV loader (record-typed rows: source, bus, branch, regulator).
network::FeederModel load_feeder_csv(const std::string& path,
                                     const regulator::VrConfig& vr_defaults);

struct BaseLoadData {
    LoadProfile p;
    std::optional<LoadProfile> q;
    bool q_defaulted = false;
};

// Base-load CSV loader: header timestamp,p_kw[,q_kvar]; timestamps are
// slot indices or ISO-8601 at uniform spacing; the row count must fill
// the requested horizon exactly.
BaseLoadData load_baseload_csv(const std::string& path, int horizon_days, double resolution_h);

// FNV-1a over the canonical resolved-parameter serialization plus the
// ingested data files.
std::string config_hash(const std::map<std::string, ParamValue>& params,
                        const std::string& feeder_csv, const std::string& baseload_csv);

} // namespace pevgrid::config

#endif
