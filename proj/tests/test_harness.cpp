#include "pevgrid/harness.hpp"

#include "pevgrid/errors.hpp"
#include "support/synthetic.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace pevgrid;
using namespace pevgrid::harness;
using doctest::Approx;

namespace {

struct Fixture {
    network::FeederModel feeder;
    LoadProfile base;
    AssessmentInputs inputs;
    McsConfig config;

    explicit Fixture(int horizon_days = 30, double base_peak_kw = 3900.0,
                     double s_rated = 5000.0)
    {
        feeder = testsupport::twelve_bus_feeder(s_rated, 5000.0);
        base = testsupport::synthetic_base_profile(horizon_days, 0.25, base_peak_kw);
        inputs.feeder = &feeder;
        inputs.base_p = &base;
        inputs.thermal_params.s_rated_kva = s_rated;
        config.horizon_days = horizon_days;
        config.resolution_h = 0.25;
        config.iterations = 4;
        config.master_seed = 99;
        config.threads = 2;
    }
};

charging::ChargingScenario fleet_of(int count, charging::ChargeMode mode,
                                    double battery_kwh)
{
    charging::ChargingScenario s;
    s.vehicle_class = charging::VehicleClass::Commuter;
    s.charge_mode = mode;
    s.fleet_count = count;
    s.charge_power_kw = mode == charging::ChargeMode::Slow ? 19.2 : 120.0;
    s.battery_kwh = battery_kwh;
    return s;
}

} // namespace

TEST_CASE("penetration level and mixed fleet sizing")
{
    LoadProfile base = LoadProfile::zeros(96, 0.25);
    for (double& v : base.values_kw)
        v = 500.0;
    base.values_kw[40] = 1000.0;

    SUBCASE("documented urban 100% composition")
    {
        MixedFleetSpec spec;
        spec.pl_percent = 100.0;
        spec.slow_share = 0.70;
        spec.fast_share = 0.30;
        spec.base_peak_kw = 1000.0;
        const FleetComposition fleet = build_mixed_fleet(spec);
        CHECK(fleet.slow_count == 36); // 700/19.2 = 36.46
        CHECK(fleet.fast_count == 3);  // 300/120 = 2.5, rounds away from zero
    }

    SUBCASE("rated-power PL definition")
    {
        const std::vector<charging::ChargingScenario> none{};
        CHECK(penetration_level_percent(none, base) == Approx(0.0));

        std::vector<charging::ChargingScenario> fleet{
            fleet_of(500, charging::ChargeMode::Slow, 40.0)};
        LoadProfile peak_base = LoadProfile::zeros(96, 0.25);
        for (double& v : peak_base.values_kw)
            v = 9600.0;
        CHECK(penetration_level_percent(fleet, peak_base) == Approx(100.0).epsilon(1e-12));
    }

    SUBCASE("zero base peak rejected")
    {
        const LoadProfile empty = LoadProfile::zeros(96, 0.25);
        CHECK_THROWS_AS(penetration_level_percent({}, empty), InputError);
    }

    SUBCASE("shares must sum to one")
    {
        MixedFleetSpec spec;
        spec.pl_percent = 50.0;
        spec.slow_share = 0.7;
        spec.fast_share = 0.4;
        spec.base_peak_kw = 1000.0;
        CHECK_THROWS_AS(build_mixed_fleet(spec), InputError);
    }
}

TEST_CASE("scenario resolution")
{
    Fixture fx;

    SUBCASE("catalog index")
    {
        std::string label;
        const auto fleet = resolve_fleet(5, fx.inputs, &label);
        REQUIRE(fleet.size() == 1);
        CHECK(fleet[0].fleet_count == 1000);
        CHECK(fleet[0].charge_mode == charging::ChargeMode::Slow);
        CHECK(label == "scenario-5");
        CHECK_THROWS_AS(resolve_fleet(11, fx.inputs, nullptr), InputError);
    }

    SUBCASE("mixed spec resolves to two commuter fleets")
    {
        MixedFleetSpec spec;
        spec.pl_percent = 100.0;
        spec.slow_share = 0.6;
        spec.fast_share = 0.4;
        spec.base_peak_kw = 3900.0;
        const auto fleet = resolve_fleet(spec, fx.inputs, nullptr);
        REQUIRE(fleet.size() == 2);
        CHECK(fleet[0].charge_mode == charging::ChargeMode::Slow);
        CHECK(fleet[1].charge_mode == charging::ChargeMode::Fast);
        CHECK(fleet[0].fleet_count == 122); // 0.6*3900/19.2 = 121.9
        CHECK(fleet[1].fleet_count == 13);  // 0.4*3900/120 = 13.0
    }
}

TEST_CASE("iteration determinism")
{
    Fixture fx(14);
    const network::SweepSolver solver(fx.feeder);
    const network::BusLoadSeries base_series =
        network::allocate_to_buses(solver, fx.base, fx.inputs.base_power_factor);
    const std::vector<charging::ChargingScenario> fleet{
        fleet_of(80, charging::ChargeMode::Fast, 40.0)};

    const IterationResult a =
        run_iteration(solver, base_series, fleet, fx.inputs, fx.config, 3, false);
    const IterationResult b =
        run_iteration(solver, base_series, fleet, fx.inputs, fx.config, 3, false);
    REQUIRE(a.timeseries.k_series.size() == b.timeseries.k_series.size());
    for (std::size_t i = 0; i < a.timeseries.k_series.size(); ++i)
        CHECK(a.timeseries.k_series[i] == b.timeseries.k_series[i]);

    const IterationResult c =
        run_iteration(solver, base_series, fleet, fx.inputs, fx.config, 4, false);
    bool differs = false;
    for (std::size_t i = 0; !differs && i < a.timeseries.k_series.size(); ++i)
        differs = a.timeseries.k_series[i] != c.timeseries.k_series[i];
    CHECK(differs);
}

TEST_CASE("MCS reports")
{
    SUBCASE("zero-fleet scenario reproduces the benchmark")
    {
        Fixture fx(7);
        fx.config.iterations = 3;
        const AssessmentReport report =
            run_mcs(fx.config, fleet_of(0, charging::ChargeMode::Slow, 40.0), fx.inputs);
        REQUIRE(report.scenario.mean_k.size() == report.benchmark.mean_k.size());
        for (std::size_t i = 0; i < report.scenario.mean_k.size(); ++i)
            CHECK(report.scenario.mean_k[i] == Approx(report.benchmark.mean_k[i]).epsilon(1e-14));
        CHECK(report.scenario.yearly_lol_pct ==
              Approx(report.benchmark.yearly_lol_pct).epsilon(1e-12));
        CHECK(report.penetration_pct == Approx(0.0));
    }

    SUBCASE("single iteration equals the degenerate MCS")
    {
        Fixture fx(7);
        fx.config.iterations = 1;
        const network::SweepSolver solver(fx.feeder);
        const network::BusLoadSeries base_series =
            network::allocate_to_buses(solver, fx.base, fx.inputs.base_power_factor);
        const std::vector<charging::ChargingScenario> fleet{
            fleet_of(60, charging::ChargeMode::Slow, 40.0)};
        const IterationResult single =
            run_iteration(solver, base_series, fleet, fx.inputs, fx.config, 0, false);
        const AssessmentReport report = run_mcs(fx.config, fleet[0], fx.inputs);
        REQUIRE(report.scenario.mean_k.size() == single.timeseries.k_series.size());
        for (std::size_t i = 0; i < report.scenario.mean_k.size(); ++i)
            CHECK(report.scenario.mean_k[i] == Approx(single.timeseries.k_series[i]).epsilon(1e-14));
        CHECK(report.scenario.yearly_lol_pct_per_iter ==
              Approx(single.yearly_lol_pct).epsilon(1e-12));
    }

    SUBCASE("same seed bitwise-identical, different seed differs, benchmark invariant")
    {
        Fixture fx(7);
        fx.config.iterations = 3;
        const auto selection = fleet_of(60, charging::ChargeMode::Fast, 40.0);
        const AssessmentReport r1 = run_mcs(fx.config, selection, fx.inputs);
        const AssessmentReport r2 = run_mcs(fx.config, selection, fx.inputs);
        for (std::size_t i = 0; i < r1.scenario.mean_k.size(); ++i)
            CHECK(r1.scenario.mean_k[i] == r2.scenario.mean_k[i]);

        Fixture fy(7);
        fy.config.iterations = 3;
        fy.config.master_seed = 12345;
        const AssessmentReport r3 = run_mcs(fy.config, selection, fy.inputs);
        bool differs = false;
        for (std::size_t i = 0; !differs && i < r1.scenario.mean_k.size(); ++i)
            differs = r1.scenario.mean_k[i] != r3.scenario.mean_k[i];
        CHECK(differs);
        for (std::size_t i = 0; i < r1.benchmark.mean_k.size(); ++i)
            CHECK(r1.benchmark.mean_k[i] == r3.benchmark.mean_k[i]);
    }

    SUBCASE("thread count does not change the ordered reduction")
    {
        Fixture fx(7);
        fx.config.iterations = 6;
        const auto selection = fleet_of(40, charging::ChargeMode::Fast, 40.0);
        fx.config.threads = 1;
        const AssessmentReport serial = run_mcs(fx.config, selection, fx.inputs);
        fx.config.threads = 2;
        const AssessmentReport parallel = run_mcs(fx.config, selection, fx.inputs);
        for (std::size_t i = 0; i < serial.scenario.mean_k.size(); ++i)
            CHECK(serial.scenario.mean_k[i] == parallel.scenario.mean_k[i]);
        CHECK(serial.scenario.yearly_lol_pct == parallel.scenario.yearly_lol_pct);
    }

    SUBCASE("expectation mode selects the reported pathway")
    {
        Fixture fx(7);
        fx.config.iterations = 4;
        const auto selection = fleet_of(120, charging::ChargeMode::Fast, 40.0);
        fx.config.expectation_mode = ExpectationMode::MeanKThenModel;
        const AssessmentReport mean_first = run_mcs(fx.config, selection, fx.inputs);
        CHECK(mean_first.scenario.yearly_lol_pct ==
              Approx(mean_first.scenario.yearly_lol_pct_mean_k));
        fx.config.expectation_mode = ExpectationMode::PerIterationModelThenMean;
        const AssessmentReport per_iter = run_mcs(fx.config, selection, fx.inputs);
        CHECK(per_iter.scenario.yearly_lol_pct ==
              Approx(per_iter.scenario.yearly_lol_pct_per_iter));
        // Jensen: averaging K before the convex thermal chain understates
        CHECK(per_iter.scenario.yearly_lol_pct_per_iter >=
              per_iter.scenario.yearly_lol_pct_mean_k - 1e-9);
    }

    SUBCASE("report carries regulators, TCO and provenance fields")
    {
        Fixture fx(7);
        fx.config.iterations = 2;
        const AssessmentReport report = run_mcs(fx.config, 1, fx.inputs);
        CHECK(report.scenario_label == "scenario-1");
        REQUIRE(report.scenario.regulators.size() == 2);
        CHECK(report.scenario.regulators[0].to_bus == 4);
        CHECK(report.scenario.tco_conventional.total() > 0.0);
        CHECK(report.scenario.tco_reestablished.total() > 0.0);
        CHECK(report.benchmark.lifetime_years > 0.0);
        CHECK(report.master_seed == fx.config.master_seed);
        REQUIRE(report.scenario.taps_first_iteration.size() == 2);
        CHECK(report.scenario.taps_first_iteration[0].size() ==
              report.scenario.mean_k.size());
    }
}

TEST_CASE("scenario dominance on a short horizon")
{
    // cheap preview of the yearly orderings: more fleets or home charging
    // concentrate load and age the transformer faster
    Fixture fx(30);
    fx.config.iterations = 4;

    const AssessmentReport s1 =
        run_mcs(fx.config, fleet_of(500, charging::ChargeMode::Slow, 40.0), fx.inputs);
    const AssessmentReport s4 =
        run_mcs(fx.config, fleet_of(500, charging::ChargeMode::Fast, 60.0), fx.inputs);
    const AssessmentReport s5 =
        run_mcs(fx.config, fleet_of(1000, charging::ChargeMode::Slow, 40.0), fx.inputs);
    const AssessmentReport s9 = run_mcs(fx.config, 9, fx.inputs); // ride service, 500

    CHECK(s5.scenario.yearly_lol_pct > s1.scenario.yearly_lol_pct);
    CHECK(s1.scenario.yearly_lol_pct > s4.scenario.yearly_lol_pct);
    CHECK(s4.scenario.yearly_lol_pct > s4.benchmark.yearly_lol_pct);
    // multiple fast recharges per service day dwarf any commuter pattern
    CHECK(s9.scenario.yearly_lol_pct > s1.scenario.yearly_lol_pct);
    CHECK(s9.scenario.yearly_lol_pct > s4.scenario.yearly_lol_pct);
}

TEST_CASE("evening K spikes align with the fleet charging peaks")
{
    Fixture fx(5);
    fx.config.iterations = 1;
    const auto scenario = fleet_of(500, charging::ChargeMode::Slow, 40.0);
    const AssessmentReport report = run_mcs(fx.config, scenario, fx.inputs);

    // the substation K elevation over the benchmark must peak where the
    // aggregated charging profile does, day by day
    const std::uint64_t iter_seed =
        derive_seed(fx.config.master_seed, stream_domain::iteration, 0);
    const LoadProfile fleet_profile =
        charging::generate_fleet_profile(scenario, 5, 0.25, iter_seed);

    for (int day = 0; day < 5; ++day) {
        int k_peak_slot = 0;
        int pev_peak_slot = 0;
        double k_peak = -1.0;
        double pev_peak = -1.0;
        for (int s = 0; s < 96; ++s) {
            const std::size_t slot = static_cast<std::size_t>(day * 96 + s);
            const double delta = report.scenario.mean_k[slot] - report.benchmark.mean_k[slot];
            if (delta > k_peak) {
                k_peak = delta;
                k_peak_slot = s;
            }
            if (fleet_profile.values_kw[slot] > pev_peak) {
                pev_peak = fleet_profile.values_kw[slot];
                pev_peak_slot = s;
            }
        }
        CHECK(k_peak > 0.0);
        CHECK(std::abs(k_peak_slot - pev_peak_slot) <= 4); // within an hour
        // home charging: the spike sits in the evening
        CHECK(pev_peak_slot >= 16 * 4);
        CHECK(pev_peak_slot <= 22 * 4);
    }
}

TEST_CASE("mean-K variance shrinks with iteration count")
{
    // replicated short-horizon estimates: the variance of the per-slot
    // mean K should drop roughly like 1/iterations
    Fixture fx(2);
    const auto selection = fleet_of(150, charging::ChargeMode::Fast, 40.0);

    const auto estimate_variance = [&](int iterations, std::uint64_t seed_base) {
        const int replicas = 10;
        std::vector<double> estimates;
        for (int rep = 0; rep < replicas; ++rep) {
            Fixture fy(2);
            fy.config.iterations = iterations;
            fy.config.master_seed = seed_base + static_cast<std::uint64_t>(rep);
            const AssessmentReport report = run_mcs(fy.config, selection, fy.inputs);
            // evening slot of day 2 where PEV load is active
            estimates.push_back(report.scenario.mean_k[96 + 72]);
        }
        double mean = 0.0;
        for (double e : estimates)
            mean += e;
        mean /= replicas;
        double var = 0.0;
        for (double e : estimates)
            var += (e - mean) * (e - mean);
        return var / (replicas - 1);
    };

    const double var_small = estimate_variance(8, 1000);
    const double var_large = estimate_variance(80, 2000);
    CHECK(var_large > 0.0);
    CHECK(var_small / var_large > 3.0); // ~10 expected
}

TEST_CASE("per-phase multipliers add per-phase regulator duty")
{
    Fixture fx(7);
    fx.config.iterations = 2;
    fx.config.phase_multipliers = {1.05, 1.0, 0.95};
    const AssessmentReport report =
        run_mcs(fx.config, fleet_of(150, charging::ChargeMode::Slow, 40.0), fx.inputs);
    for (const RegulatorReport& reg : report.scenario.regulators) {
        REQUIRE(reg.per_phase_annual_ops.size() == 3);
        for (double ops : reg.per_phase_annual_ops)
            CHECK(ops >= 0.0);
    }
}

TEST_CASE("input validation")
{
    Fixture fx(7);
    fx.config.iterations = 0;
    CHECK_THROWS_AS(run_mcs(fx.config, 1, fx.inputs), InputError);

    Fixture fy(7);
    fy.base.values_kw.pop_back();
    fy.base.horizon_slots -= 1;
    CHECK_THROWS_AS(run_mcs(fy.config, 1, fy.inputs), InputError);
}
