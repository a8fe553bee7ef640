#ifndef PEVGRID_HARNESS_HPP
#define PEVGRID_HARNESS_HPP

#include "pevgrid/charging.hpp"
#include "pevgrid/economics.hpp"
#include "pevgrid/network.hpp"
#include "pevgrid/thermal.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace pevgrid::harness {

enum class ExpectationMode {
    MeanKThenModel,         // thermal model consumes E[K(t)] across iterations
    PerIterationModelThenMean // LoL evaluated per iteration, then averaged
};

struct McsConfig {
    int iterations = 100;
    std::uint64_t master_seed = 1;
    int horizon_days = 365;
    double resolution_h = 0.25;
    ExpectationMode expectation_mode = ExpectationMode::MeanKThenModel;
    int threads = 0; // 0 = hardware concurrency
    // optional per-phase load-share multipliers; when set, regulator
    // operation counts are additionally reported per phase
    std::vector<double> phase_multipliers{};
    // penetration level uses rated charger power (worst-case coincidence)
    // unless observed_peak_pl switches to the simulated PEV peak
    bool observed_peak_pl = false;
};

// Mixed slow/fast fleet sized to a penetration level against the annual
// base peak.
struct MixedFleetSpec {
    double pl_percent = 0.0;
    double slow_share = 0.7;
    double fast_share = 0.3;
    double base_peak_kw = 0.0;
    double slow_power_kw = 19.2;
    double fast_power_kw = 120.0;
    double slow_battery_kwh = 40.0;
    double fast_battery_kwh = 40.0;
};

struct FleetComposition {
    int slow_count = 0;
    int fast_count = 0;
};

FleetComposition build_mixed_fleet(const MixedFleetSpec& spec);

// PL = sum of rated charger power over annual peak base load, percent.
double penetration_level_percent(std::span<const charging::ChargingScenario> fleet,
                                 const LoadProfile& base_profile);

// Scenario selection: a catalog index, a custom scenario, or a mixed spec.
using ScenarioSelection = std::variant<int, charging::ChargingScenario, MixedFleetSpec>;

struct AssessmentInputs {
    const network::FeederModel* feeder = nullptr;
    const LoadProfile* base_p = nullptr;
    const LoadProfile* base_q = nullptr; // optional; power factor otherwise
    double base_power_factor = 0.95;
    double pev_power_factor = 0.95;
    double anxiety_threshold = 0.30;
    charging::BehaviorDistributions behavior{};
    thermal::ThermalParams thermal_params{};
    thermal::AgingParams aging{};
    economics::TcoParams tco{};
    std::vector<int> monitored_bus_ids{};
};

struct IterationResult {
    network::TimeSeriesResult timeseries;
    std::vector<long> vr_op_counts;
    double yearly_lol_pct = 0.0; // per-iteration thermal rollout
};

// One MCS iteration: vehicle profiles sampled and allocated to load buses
// with iteration-specific seeds, then the yearly time series is solved.
IterationResult run_iteration(const network::SweepSolver& solver,
                              const network::BusLoadSeries& base_series,
                              std::span<const charging::ChargingScenario> fleet,
                              const AssessmentInputs& inputs, const McsConfig& config,
                              long iteration_index, bool keep_histories);

struct RegulatorReport {
    int site_index = 0;
    int from_bus = 0;
    int to_bus = 0;
    double annual_ops_mean = 0.0;
    double lol = 0.0;
    std::vector<double> per_phase_annual_ops{}; // empty unless phase multipliers set
};

// Results of one assessed channel (the PEV scenario or the benchmark).
struct ChannelReport {
    double yearly_lol_pct = 0.0;         // per the selected expectation mode
    double yearly_lol_pct_mean_k = 0.0;  // E[K] pathway
    double yearly_lol_pct_per_iter = 0.0; // per-iteration average pathway
    double lifetime_years = 0.0;
    bool eps_flag = false;
    double k_avg = 0.0;
    double k_peak = 0.0;
    economics::TcoBreakdown tco_conventional{};
    economics::TcoBreakdown tco_reestablished{};
    std::vector<RegulatorReport> regulators{};
    // plot series (slot resolution)
    std::vector<double> mean_k{};
    std::vector<double> theta_hst_c{};
    std::vector<double> accum_lol{};
    std::vector<std::vector<int>> taps_first_iteration{}; // [site][slot]
};

struct AssessmentReport {
    std::string scenario_label;
    ChannelReport scenario;
    ChannelReport benchmark;
    double penetration_pct = 0.0;
    int slow_count = 0;
    int fast_count = 0;
    int iterations = 0;
    int horizon_days = 0;
    double resolution_h = 0.25;
    std::string expectation_mode;
    std::uint64_t master_seed = 0;
    std::string config_hash;
};

// Full Monte Carlo assessment: iterations of yearly time-series power
// flow, expectation aggregation in fixed iteration order, asset models and
// both TCO formulations, against the PEV-free benchmark.
AssessmentReport run_mcs(const McsConfig& config, const ScenarioSelection& selection,
                         const AssessmentInputs& inputs);

// Benchmark-only evaluation (deterministic, seed-independent).
ChannelReport run_benchmark(const McsConfig& config, const AssessmentInputs& inputs);

// Fleet scenarios for a selection (resolves catalog indices and mixed specs).
std::vector<charging::ChargingScenario> resolve_fleet(const ScenarioSelection& selection,
                                                      const AssessmentInputs& inputs,
                                                      std::string* label_out = nullptr);

} // namespace pevgrid::harness

#endif
