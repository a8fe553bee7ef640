#ifndef PEVGRID_CHARGING_HPP
#define PEVGRID_CHARGING_HPP

#include "pevgrid/load_profile.hpp"
#include "pevgrid/rng.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pevgrid::charging {

enum class VehicleClass { Commuter, RideService };

// Slow chargers serve overnight home charging; fast chargers serve
// anxiety-triggered en-route charging.
enum class ChargeMode { Slow, Fast };

struct NormalSpec {
    double mean = 0.0;
    double sd = 1.0;
};

struct SpeedPeriod {
    double start_h = 0.0;
    double end_h = 0.0;
    double mph = 0.0;
};

// Stochastic daily behavior of one vehicle class. Times are hours from
// midnight, mileage in miles. Commuters use the trip-time and mileage
// distributions; ride-service vehicles use the service window and the
// per-period average speeds.
struct BehaviorDistributions {
    NormalSpec depart_time{7.5, 1.0};
    NormalSpec arrive_time{17.5, 1.0};
    NormalSpec daily_miles{32.0, 12.0}; // truncated at 0 when sampling
    double energy_per_mile_kwh = 0.30;
    double service_window_start_h = 7.0;
    double service_window_end_h = 21.0;
    std::vector<SpeedPeriod> avg_speed_by_period{
        {7.0, 10.0, 22.0}, {10.0, 16.0, 28.0}, {16.0, 19.0, 20.0}, {19.0, 21.0, 26.0}};
    // day-to-day multiplicative speed variation for ride-service vehicles,
    // Normal(1, sd) clamped at 0; set to 0 for a deterministic walk
    double speed_jitter_sd = 0.10;
    // ride-service vehicles normally charge en route only
    bool ride_service_overnight_charge = false;
};

struct ChargingScenario {
    VehicleClass vehicle_class = VehicleClass::Commuter;
    ChargeMode charge_mode = ChargeMode::Slow;
    int fleet_count = 0;
    double charge_power_kw = 19.2;
    double battery_kwh = 40.0;
    double anxiety_threshold = 0.30;
    BehaviorDistributions behavior{};
    int scenario_index = 0; // 1..10 catalog entries, 0 = custom

    std::string label() const;
};

// The ten cataloged scenarios (slow 19.2 kW / fast 120 kW chargers,
// short 40 kWh / long 60 kWh packs, 500 or 1000 fleets, commuter or
// ride-service usage), sharing one behavior parameter set.
std::array<ChargingScenario, 10> scenario_catalog(const BehaviorDistributions& behavior = {});

// Validates scenario invariants; throws InputError on violation. Catalog
// scenarios additionally pin charger power and battery capacity to the
// cataloged values.
void validate_scenario(const ChargingScenario& scenario);

// One charge event of one vehicle. start_h counts hours from the start of
// the simulated horizon.
struct ChargingSession {
    double start_h = 0.0;
    double duration_h = 0.0;
    double power_kw = 0.0;
    int vehicle_id = 0;

    double end_h() const { return start_h + duration_h; }
    double energy_kwh() const { return duration_h * power_kw; }
};

// Hours to recharge a battery_kwh pack from soc to full at power_kw.
double charge_duration_h(double battery_kwh, double soc, double power_kw);

// --- deterministic per-day builders (sampling-free, unit-testable) ------

// Slow commuter: at most one home-charging session right after arrival,
// replenishing the day's consumption, capped at a full battery.
std::optional<ChargingSession> build_slow_commuter_session(const ChargingScenario& scenario,
                                                           int day_index, double arrive_h,
                                                           double miles);

struct FastDayOutcome {
    std::optional<ChargingSession> session;
    double end_soc = 1.0;
};

// Fast commuter: depletes SoC by the day's driving and emits one en-route
// full recharge only when SoC drops strictly below the anxiety threshold.
// charge_at_departure selects which trip hosts the session; the recharge
// always starts from the end-of-day SoC.
FastDayOutcome build_fast_commuter_day(const ChargingScenario& scenario, int day_index,
                                       double soc_carryover, double depart_h, double arrive_h,
                                       double miles, bool charge_at_departure);

struct RideServiceDayOutcome {
    std::vector<ChargingSession> sessions;
    double end_soc = 1.0;
};

// Ride service: walks the service window at the given per-period speeds,
// pausing to fully recharge en route each time SoC reaches the threshold.
RideServiceDayOutcome build_ride_service_day(const ChargingScenario& scenario, int day_index,
                                             double soc_carryover,
                                             std::span<const SpeedPeriod> speeds);

// --- sampling operations -------------------------------------------------

// Draw (depart, arrive) respecting ordering: negative times clamp to 0,
// an arrival earlier than departure is re-drawn up to 10 times, then the
// pair is swapped.
std::pair<double, double> sample_trip_times(const BehaviorDistributions& behavior,
                                            RngStream& rng);

std::vector<ChargingSession> sample_commuter_slow_day(const ChargingScenario& scenario,
                                                      int day_index, RngStream& rng);

FastDayOutcome sample_commuter_fast(const ChargingScenario& scenario, double soc_carryover,
                                    int day_index, RngStream& rng);

RideServiceDayOutcome sample_ride_service_day(const ChargingScenario& scenario,
                                              double soc_carryover, int day_index,
                                              RngStream& rng);

// Full-year session list of one vehicle, seeded independently per vehicle.
// Sessions are guaranteed non-overlapping and sorted by start time.
std::vector<ChargingSession> sample_vehicle_year(const ChargingScenario& scenario,
                                                 int vehicle_id, int horizon_days,
                                                 std::uint64_t vehicle_seed);

// Fleet-aggregated charging profile: sums every vehicle's sessions onto
// the slot grid. Deterministic for a fixed seed; vehicles use independent
// sub-streams derived from it.
LoadProfile generate_fleet_profile(const ChargingScenario& scenario, int horizon_days,
                                   double resolution_h, std::uint64_t seed);

// Slot count for a horizon; throws InputError unless resolution divides 24.
int slots_for_horizon(int horizon_days, double resolution_h);

} // namespace pevgrid::charging

#endif
