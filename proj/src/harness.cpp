#include "pevgrid/harness.hpp"

#include "pevgrid/errors.hpp"
#include "pevgrid/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

namespace pevgrid::harness {

namespace {

    int round_half_away(double x)
    {
        return static_cast<int>(x >= 0.0 ? std::floor(x + 0.5) : std::ceil(x - 0.5));
    }

    std::vector<int> load_bus_indices(const network::SweepSolver& solver)
    {
        std::vector<int> indices;
        const auto& buses = solver.feeder().buses;
        for (std::size_t i = 0; i < buses.size(); ++i)
            if (buses[i].is_load && buses[i].load_weight > 0.0)
                indices.push_back(static_cast<int>(i));
        return indices;
    }

    double annual_factor(int horizon_days) { return 365.0 / horizon_days; }

} // namespace

FleetComposition build_mixed_fleet(const MixedFleetSpec& spec)
{
    if (!(spec.base_peak_kw > 0.0))
        throw InputError("mixed fleet: base peak must be positive");
    if (spec.pl_percent < 0.0)
        throw InputError("mixed fleet: penetration level must be >= 0");
    if (spec.slow_share < 0.0 || spec.fast_share < 0.0 ||
        std::abs(spec.slow_share + spec.fast_share - 1.0) > 1e-9)
        throw InputError("mixed fleet: shares must be non-negative and sum to 1");

    const double pev_power_kw = spec.pl_percent * spec.base_peak_kw / 100.0;
    FleetComposition out;
    out.slow_count = round_half_away(spec.slow_share * pev_power_kw / spec.slow_power_kw);
    out.fast_count = round_half_away(spec.fast_share * pev_power_kw / spec.fast_power_kw);
    return out;
}

double penetration_level_percent(std::span<const charging::ChargingScenario> fleet,
                                 const LoadProfile& base_profile)
{
    const double peak = base_profile.peak_kw();
    if (!(peak > 0.0))
        throw InputError("penetration level: base peak must be positive");
    double rated = 0.0;
    for (const charging::ChargingScenario& s : fleet)
        rated += s.fleet_count * s.charge_power_kw;
    return rated / peak * 100.0;
}

std::vector<charging::ChargingScenario> resolve_fleet(const ScenarioSelection& selection,
                                                      const AssessmentInputs& inputs,
                                                      std::string* label_out)
{
    std::vector<charging::ChargingScenario> fleet;
    std::string label;
    if (const int* index = std::get_if<int>(&selection)) {
        if (*index < 1 || *index > 10)
            throw InputError("scenario index must lie in 1..10");
        const auto catalog = charging::scenario_catalog(inputs.behavior);
        fleet.push_back(catalog[static_cast<std::size_t>(*index - 1)]);
        fleet.back().anxiety_threshold = inputs.anxiety_threshold;
        label = fleet.back().label();
    } else if (const auto* custom = std::get_if<charging::ChargingScenario>(&selection)) {
        fleet.push_back(*custom);
        label = custom->label();
    } else {
        const auto& mix = std::get<MixedFleetSpec>(selection);
        const FleetComposition counts = build_mixed_fleet(mix);
        charging::ChargingScenario slow;
        slow.vehicle_class = charging::VehicleClass::Commuter;
        slow.charge_mode = charging::ChargeMode::Slow;
        slow.fleet_count = counts.slow_count;
        slow.charge_power_kw = mix.slow_power_kw;
        slow.battery_kwh = mix.slow_battery_kwh;
        slow.anxiety_threshold = inputs.anxiety_threshold;
        slow.behavior = inputs.behavior;
        charging::ChargingScenario fast = slow;
        fast.charge_mode = charging::ChargeMode::Fast;
        fast.fleet_count = counts.fast_count;
        fast.charge_power_kw = mix.fast_power_kw;
        fast.battery_kwh = mix.fast_battery_kwh;
        fleet.push_back(slow);
        fleet.push_back(fast);
        std::ostringstream os;
        os << "mixed-pl" << mix.pl_percent;
        label = os.str();
    }
    for (const charging::ChargingScenario& s : fleet)
        charging::validate_scenario(s);
    if (label_out != nullptr)
        *label_out = label;
    return fleet;
}

IterationResult run_iteration(const network::SweepSolver& solver,
                              const network::BusLoadSeries& base_series,
                              std::span<const charging::ChargingScenario> fleet,
                              const AssessmentInputs& inputs, const McsConfig& config,
                              long iteration_index, bool keep_histories)
{
    const std::uint64_t iter_seed = derive_seed(config.master_seed, stream_domain::iteration,
                                                static_cast<std::uint64_t>(iteration_index));
    const int slots = base_series.horizon_slots;
    const std::vector<int> load_buses = load_bus_indices(solver);

    // vehicles draw their service bus proportionally to the base-load
    // share, re-randomized each iteration
    std::vector<double> weights;
    weights.reserve(load_buses.size());
    for (int b : load_buses)
        weights.push_back(solver.feeder().buses[static_cast<std::size_t>(b)].load_weight);
    RngStream alloc_rng(derive_seed(iter_seed, stream_domain::allocation, 0));

    std::vector<LoadProfile> pev_by_bus(load_buses.size());
    for (auto& p : pev_by_bus)
        p = LoadProfile::zeros(slots, base_series.resolution_h);

    int vehicle_id = 0;
    for (const charging::ChargingScenario& scenario : fleet) {
        for (int v = 0; v < scenario.fleet_count; ++v, ++vehicle_id) {
            const std::uint64_t vseed = derive_seed(iter_seed, stream_domain::vehicle,
                                                    static_cast<std::uint64_t>(vehicle_id));
            const std::size_t slot_bus = alloc_rng.categorical(weights);
            LoadProfile& target = pev_by_bus[slot_bus];
            for (const charging::ChargingSession& s :
                 charging::sample_vehicle_year(scenario, vehicle_id, config.horizon_days, vseed))
                target.add_pulse(s.start_h, s.duration_h, s.power_kw);
        }
    }

    const double tan_phi = std::tan(std::acos(inputs.pev_power_factor));
    network::BusLoadSeries pev_series =
        network::BusLoadSeries::zeros(solver, slots, base_series.resolution_h);
    const double s_base = solver.feeder().s_base_kva;
    for (std::size_t li = 0; li < load_buses.size(); ++li) {
        const int bus = load_buses[li];
        for (int slot = 0; slot < slots; ++slot) {
            const double p_kw = pev_by_bus[li].values_kw[static_cast<std::size_t>(slot)];
            if (p_kw != 0.0)
                pev_series.at(slot, bus) = network::Complex(p_kw / s_base, p_kw * tan_phi / s_base);
        }
    }

    network::TimeSeriesOptions options;
    options.monitored_bus_ids = inputs.monitored_bus_ids;
    options.iteration_index = iteration_index;
    IterationResult out;
    out.timeseries = network::run_timeseries(solver, base_series, pev_series, options);

    out.vr_op_counts.reserve(out.timeseries.vr_states.size());
    for (const regulator::VrState& state : out.timeseries.vr_states)
        out.vr_op_counts.push_back(state.op_count);

    const std::vector<double> theta = thermal::rollout_theta_hst(
        out.timeseries.k_series, config.resolution_h, inputs.thermal_params);
    out.yearly_lol_pct = thermal::accumulate_lol(theta, config.resolution_h, inputs.aging) *
                         annual_factor(config.horizon_days) * 100.0;

    if (!keep_histories) {
        for (regulator::VrState& state : out.timeseries.vr_states)
            state.history.clear();
        out.timeseries.v_monitored.clear();
    }
    return out;
}

namespace {

    // Thermal, economic and regulator post-processing shared by the
    // scenario and benchmark channels.
    ChannelReport summarize_channel(const std::vector<double>& mean_k,
                                    double yearly_lol_pct_per_iter,
                                    const std::vector<double>& vr_mean_ops,
                                    const std::vector<std::vector<int>>& taps_first_iter,
                                    const AssessmentInputs& inputs, const McsConfig& config)
    {
        ChannelReport ch;
        ch.mean_k = mean_k;
        ch.taps_first_iteration = taps_first_iter;

        const double factor = annual_factor(config.horizon_days);
        ch.theta_hst_c = thermal::rollout_theta_hst(ch.mean_k, config.resolution_h,
                                                    inputs.thermal_params);
        const double lol_mean_k =
            thermal::accumulate_lol(ch.theta_hst_c, config.resolution_h, inputs.aging);
        ch.yearly_lol_pct_mean_k = lol_mean_k * factor * 100.0;
        ch.yearly_lol_pct_per_iter = yearly_lol_pct_per_iter;
        ch.yearly_lol_pct = config.expectation_mode == ExpectationMode::MeanKThenModel
                                ? ch.yearly_lol_pct_mean_k
                                : ch.yearly_lol_pct_per_iter;
        ch.lifetime_years =
            thermal::estimated_lifetime_years(ch.yearly_lol_pct, inputs.aging.t_ins_years());
        ch.eps_flag = ch.lifetime_years < thermal::kEpsilonLifetimeYears;

        ch.accum_lol.reserve(ch.theta_hst_c.size());
        double acc = 0.0;
        for (double theta : ch.theta_hst_c) {
            acc += thermal::faa(theta, inputs.aging) * config.resolution_h /
                   inputs.aging.t_ins_hours;
            ch.accum_lol.push_back(acc);
        }

        double k_sum = 0.0;
        double k_peak = 0.0;
        for (double k : ch.mean_k) {
            k_sum += k;
            k_peak = std::max(k_peak, k);
        }
        ch.k_avg = ch.mean_k.empty() ? 0.0 : k_sum / static_cast<double>(ch.mean_k.size());
        ch.k_peak = k_peak;

        if (ch.k_peak > 0.0 && ch.k_avg > 0.0) {
            economics::TcoParams tco = inputs.tco;
            tco.p_hat = ch.k_peak;
            const double s_rated = inputs.thermal_params.s_rated_kva;
            ch.tco_conventional = economics::tco_conventional(tco, ch.k_avg * s_rated,
                                                              ch.k_peak * s_rated);
            const double lol_over_window = ch.yearly_lol_pct / 100.0 * tco.t_ins_years;
            ch.tco_reestablished = economics::tco_transformer_reestablished(
                tco, lol_over_window, ch.mean_k, 0.0, tco.t_ins_years);
        }

        const auto& sites = inputs.feeder->regulators;
        for (std::size_t r = 0; r < vr_mean_ops.size(); ++r) {
            RegulatorReport reg;
            reg.site_index = static_cast<int>(r);
            const auto& branch =
                inputs.feeder->branches[static_cast<std::size_t>(sites[r].branch_index)];
            reg.from_bus = branch.from;
            reg.to_bus = branch.to;
            reg.annual_ops_mean = vr_mean_ops[r] * factor;
            reg.lol = reg.annual_ops_mean / sites[r].config.n_op_max;
            ch.regulators.push_back(reg);
        }
        return ch;
    }

    struct IterationBatch {
        std::vector<double> mean_k;
        double lol_pct_mean = 0.0;
        std::vector<double> vr_mean_ops;
        std::vector<std::vector<int>> taps_first_iter;
    };

    // Runs all iterations (optionally threaded) and reduces in iteration
    // order so results do not depend on scheduling.
    IterationBatch run_iterations(const network::SweepSolver& solver,
                                  const network::BusLoadSeries& base_series,
                                  std::span<const charging::ChargingScenario> fleet,
                                  const AssessmentInputs& inputs, const McsConfig& config,
                                  double load_scale, bool keep_first_histories)
    {
        const int n = config.iterations;
        network::BusLoadSeries scaled = base_series;
        if (load_scale != 1.0) {
            for (network::Complex& s : scaled.s_pu)
                s *= load_scale;
        }

        std::vector<IterationResult> results(static_cast<std::size_t>(n));
        std::vector<std::exception_ptr> failures(static_cast<std::size_t>(n));
        std::atomic<int> cursor{0};
        const auto worker = [&]() {
            for (;;) {
                const int i = cursor.fetch_add(1);
                if (i >= n)
                    return;
                try {
                    results[static_cast<std::size_t>(i)] =
                        run_iteration(solver, scaled, fleet, inputs, config, i,
                                      keep_first_histories && i == 0);
                } catch (...) {
                    failures[static_cast<std::size_t>(i)] = std::current_exception();
                }
            }
        };

        int threads = config.threads > 0 ? config.threads
                                         : static_cast<int>(std::thread::hardware_concurrency());
        threads = std::clamp(threads, 1, n);
        if (threads == 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            pool.reserve(static_cast<std::size_t>(threads));
            for (int t = 0; t < threads; ++t)
                pool.emplace_back(worker);
            for (std::thread& t : pool)
                t.join();
        }
        for (const std::exception_ptr& failure : failures)
            if (failure)
                std::rethrow_exception(failure);

        IterationBatch batch;
        const std::size_t slots = results[0].timeseries.k_series.size();
        batch.mean_k.assign(slots, 0.0);
        batch.vr_mean_ops.assign(results[0].vr_op_counts.size(), 0.0);
        for (int i = 0; i < n; ++i) { // fixed reduction order
            const IterationResult& res = results[static_cast<std::size_t>(i)];
            for (std::size_t s = 0; s < slots; ++s)
                batch.mean_k[s] += res.timeseries.k_series[s];
            for (std::size_t r = 0; r < batch.vr_mean_ops.size(); ++r)
                batch.vr_mean_ops[r] += static_cast<double>(res.vr_op_counts[r]);
            batch.lol_pct_mean += res.yearly_lol_pct;
        }
        for (double& k : batch.mean_k)
            k /= n;
        for (double& ops : batch.vr_mean_ops)
            ops /= n;
        batch.lol_pct_mean /= n;

        if (keep_first_histories) {
            for (const regulator::VrState& state : results[0].timeseries.vr_states) {
                std::vector<int> taps;
                taps.reserve(state.history.size());
                for (const auto& [slot, h] : state.history)
                    taps.push_back(h);
                batch.taps_first_iter.push_back(std::move(taps));
            }
        }
        return batch;
    }

    void validate_inputs(const AssessmentInputs& inputs, const McsConfig& config)
    {
        if (inputs.feeder == nullptr || inputs.base_p == nullptr)
            throw InputError("assessment: feeder and base profile are required");
        if (config.iterations < 1)
            throw InputError("assessment: iterations must be >= 1");
        thermal::validate_params(inputs.thermal_params);
        thermal::validate_params(inputs.aging);
        const int slots = charging::slots_for_horizon(config.horizon_days, config.resolution_h);
        if (inputs.base_p->horizon_slots != slots ||
            inputs.base_p->resolution_h != config.resolution_h) {
            std::ostringstream os;
            os << "assessment: base profile has " << inputs.base_p->horizon_slots
               << " slots, expected " << slots << " at " << config.resolution_h << " h";
            throw InputError(os.str());
        }
    }

} // namespace

ChannelReport run_benchmark(const McsConfig& config, const AssessmentInputs& inputs)
{
    validate_inputs(inputs, config);
    network::SweepSolver solver(*inputs.feeder);
    const network::BusLoadSeries base_series = network::allocate_to_buses(
        solver, *inputs.base_p, inputs.base_power_factor, inputs.base_q);

    // no PEVs: one deterministic run regardless of seed or iterations
    McsConfig bench_config = config;
    bench_config.iterations = 1;
    const IterationBatch batch = run_iterations(solver, base_series, {}, inputs, bench_config,
                                                1.0, true);
    return summarize_channel(batch.mean_k, batch.lol_pct_mean, batch.vr_mean_ops,
                             batch.taps_first_iter, inputs, bench_config);
}

AssessmentReport run_mcs(const McsConfig& config, const ScenarioSelection& selection,
                         const AssessmentInputs& inputs)
{
    validate_inputs(inputs, config);
    network::SweepSolver solver(*inputs.feeder);
    const network::BusLoadSeries base_series = network::allocate_to_buses(
        solver, *inputs.base_p, inputs.base_power_factor, inputs.base_q);

    AssessmentReport report;
    std::vector<charging::ChargingScenario> fleet =
        resolve_fleet(selection, inputs, &report.scenario_label);

    const IterationBatch batch =
        run_iterations(solver, base_series, fleet, inputs, config, 1.0, true);
    report.scenario = summarize_channel(batch.mean_k, batch.lol_pct_mean, batch.vr_mean_ops,
                                        batch.taps_first_iter, inputs, config);

    // optional per-phase reruns for regulator duty under unbalanced shares
    if (!config.phase_multipliers.empty()) {
        for (RegulatorReport& reg : report.scenario.regulators)
            reg.per_phase_annual_ops.assign(config.phase_multipliers.size(), 0.0);
        for (std::size_t phase = 0; phase < config.phase_multipliers.size(); ++phase) {
            const IterationBatch phase_batch =
                run_iterations(solver, base_series, fleet, inputs, config,
                               config.phase_multipliers[phase], false);
            for (std::size_t r = 0; r < phase_batch.vr_mean_ops.size(); ++r)
                report.scenario.regulators[r].per_phase_annual_ops[phase] =
                    phase_batch.vr_mean_ops[r] * annual_factor(config.horizon_days);
        }
    }

    report.benchmark = run_benchmark(config, inputs);
    report.penetration_pct = penetration_level_percent(fleet, *inputs.base_p);
    if (config.observed_peak_pl) {
        // alternative PL basis: simulated coincident PEV peak over base peak
        LoadProfile aggregate = LoadProfile::zeros(
            charging::slots_for_horizon(config.horizon_days, config.resolution_h),
            config.resolution_h);
        const std::uint64_t seed0 =
            derive_seed(config.master_seed, stream_domain::iteration, 0);
        for (const charging::ChargingScenario& s : fleet)
            aggregate += charging::generate_fleet_profile(s, config.horizon_days,
                                                          config.resolution_h, seed0);
        report.penetration_pct = aggregate.peak_kw() / inputs.base_p->peak_kw() * 100.0;
    }
    for (const charging::ChargingScenario& s : fleet) {
        if (s.charge_mode == charging::ChargeMode::Slow)
            report.slow_count += s.fleet_count;
        else
            report.fast_count += s.fleet_count;
    }
    report.iterations = config.iterations;
    report.horizon_days = config.horizon_days;
    report.resolution_h = config.resolution_h;
    report.expectation_mode = config.expectation_mode == ExpectationMode::MeanKThenModel
                                  ? "mean_k"
                                  : "per_iteration";
    report.master_seed = config.master_seed;
    return report;
}

} // namespace pevgrid::harness
