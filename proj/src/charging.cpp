#include "pevgrid/charging.hpp"

#include "pevgrid/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pevgrid::charging {

namespace {
    constexpr double kSlowPowerKw = 19.2;
    constexpr double kFastPowerKw = 120.0;
    constexpr double kShortRangeKwh = 40.0;
    constexpr double kLongRangeKwh = 60.0;

    double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }
} // namespace

std::string ChargingScenario::label() const
{
    if (scenario_index >= 1 && scenario_index <= 10) {
        std::ostringstream os;
        os << "scenario-" << scenario_index;
        return os.str();
    }
    std::ostringstream os;
    os << (vehicle_class == VehicleClass::Commuter ? "commuter" : "ride-service") << "-"
       << fleet_count << "x" << charge_power_kw << "kW-" << battery_kwh << "kWh";
    return os.str();
}

std::array<ChargingScenario, 10> scenario_catalog(const BehaviorDistributions& behavior)
{
    std::array<ChargingScenario, 10> catalog{};
    const struct {
        VehicleClass cls;
        int fleets;
        ChargeMode mode;
        double battery;
    } rows[10] = {
        {VehicleClass::Commuter, 500, ChargeMode::Slow, kShortRangeKwh},
        {VehicleClass::Commuter, 500, ChargeMode::Slow, kLongRangeKwh},
        {VehicleClass::Commuter, 500, ChargeMode::Fast, kShortRangeKwh},
        {VehicleClass::Commuter, 500, ChargeMode::Fast, kLongRangeKwh},
        {VehicleClass::Commuter, 1000, ChargeMode::Slow, kShortRangeKwh},
        {VehicleClass::Commuter, 1000, ChargeMode::Slow, kLongRangeKwh},
        {VehicleClass::Commuter, 1000, ChargeMode::Fast, kShortRangeKwh},
        {VehicleClass::Commuter, 1000, ChargeMode::Fast, kLongRangeKwh},
        {VehicleClass::RideService, 500, ChargeMode::Fast, kLongRangeKwh},
        {VehicleClass::RideService, 1000, ChargeMode::Fast, kLongRangeKwh},
    };
    for (int i = 0; i < 10; ++i) {
        catalog[i].vehicle_class = rows[i].cls;
        catalog[i].charge_mode = rows[i].mode;
        catalog[i].fleet_count = rows[i].fleets;
        catalog[i].charge_power_kw = rows[i].mode == ChargeMode::Slow ? kSlowPowerKw : kFastPowerKw;
        catalog[i].battery_kwh = rows[i].battery;
        catalog[i].behavior = behavior;
        catalog[i].scenario_index = i + 1;
    }
    return catalog;
}

void validate_scenario(const ChargingScenario& s)
{
    if (s.fleet_count < 0)
        throw InputError("scenario: fleet_count must be >= 0");
    if (!(s.charge_power_kw > 0.0) || !(s.battery_kwh > 0.0))
        throw InputError("scenario: charge power and battery capacity must be positive");
    if (!(s.anxiety_threshold > 0.0) || !(s.anxiety_threshold < 1.0))
        throw InputError("scenario: anxiety_threshold must lie in (0, 1)");
    const BehaviorDistributions& b = s.behavior;
    if (!(b.depart_time.sd > 0.0) || !(b.arrive_time.sd > 0.0) || !(b.daily_miles.sd > 0.0))
        throw InputError("scenario: behavior standard deviations must be positive");
    if (!(b.arrive_time.mean > b.depart_time.mean))
        throw InputError("scenario: arrival mean must be later than departure mean");
    if (!(b.energy_per_mile_kwh > 0.0))
        throw InputError("scenario: energy_per_mile must be positive");
    if (!(b.service_window_end_h > b.service_window_start_h))
        throw InputError("scenario: service window must have positive length");
    if (s.vehicle_class == VehicleClass::RideService && s.charge_mode != ChargeMode::Fast)
        throw InputError("scenario: ride-service vehicles use fast charging only");
    if (s.scenario_index >= 1 && s.scenario_index <= 10) {
        const bool power_ok = s.charge_power_kw == kSlowPowerKw || s.charge_power_kw == kFastPowerKw;
        const bool battery_ok = s.battery_kwh == kShortRangeKwh || s.battery_kwh == kLongRangeKwh;
        if (!power_ok || !battery_ok)
            throw InputError("catalog scenario: charger must be 19.2/120 kW and pack 40/60 kWh");
        if (s.vehicle_class == VehicleClass::RideService &&
            (s.charge_power_kw != kFastPowerKw || s.battery_kwh != kLongRangeKwh))
            throw InputError("catalog ride-service scenario: requires 120 kW / 60 kWh");
    }
}

double charge_duration_h(double battery_kwh, double soc, double power_kw)
{
    if (!std::isfinite(battery_kwh) || !std::isfinite(soc) || !std::isfinite(power_kw))
        throw InputError("charge_duration: non-finite input");
    if (soc < 0.0 || soc > 1.0)
        throw InputError("charge_duration: soc outside [0, 1]");
    if (!(battery_kwh > 0.0) || !(power_kw > 0.0))
        throw InputError("charge_duration: battery and power must be positive");
    return battery_kwh * (1.0 - soc) / power_kw;
}

std::optional<ChargingSession> build_slow_commuter_session(const ChargingScenario& scenario,
                                                           int day_index, double arrive_h,
                                                           double miles)
{
    if (miles <= 0.0)
        return std::nullopt;
    const double energy = std::min(miles * scenario.behavior.energy_per_mile_kwh,
                                   scenario.battery_kwh);
    ChargingSession session;
    session.start_h = day_index * 24.0 + arrive_h;
    session.duration_h = energy / scenario.charge_power_kw;
    session.power_kw = scenario.charge_power_kw;
    return session;
}

FastDayOutcome build_fast_commuter_day(const ChargingScenario& scenario, int day_index,
                                       double soc_carryover, double depart_h, double arrive_h,
                                       double miles, bool charge_at_departure)
{
    FastDayOutcome out;
    const double consumed = miles * scenario.behavior.energy_per_mile_kwh / scenario.battery_kwh;
    const double soc = clamp01(soc_carryover - consumed);
    if (soc < scenario.anxiety_threshold) {
        ChargingSession session;
        session.start_h = day_index * 24.0 + (charge_at_departure ? depart_h : arrive_h);
        session.duration_h = charge_duration_h(scenario.battery_kwh, soc, scenario.charge_power_kw);
        session.power_kw = scenario.charge_power_kw;
        out.session = session;
        out.end_soc = 1.0;
    } else {
        out.end_soc = soc;
    }
    return out;
}

RideServiceDayOutcome build_ride_service_day(const ChargingScenario& scenario, int day_index,
                                             double soc_carryover,
                                             std::span<const SpeedPeriod> speeds)
{
    RideServiceDayOutcome out;
    const BehaviorDistributions& b = scenario.behavior;
    const double threshold = scenario.anxiety_threshold;
    const double soc_per_mile = b.energy_per_mile_kwh / scenario.battery_kwh;

    double soc = soc_carryover;
    double t = b.service_window_start_h;
    const double t_end = b.service_window_end_h;

    while (t < t_end) {
        // active speed period containing t, if any
        const SpeedPeriod* active = nullptr;
        double next_boundary = t_end;
        for (const SpeedPeriod& p : speeds) {
            if (t >= p.start_h && t < p.end_h) {
                active = &p;
                next_boundary = std::min(p.end_h, t_end);
                break;
            }
            if (p.start_h > t)
                next_boundary = std::min(next_boundary, p.start_h);
        }
        if (active == nullptr || active->mph <= 0.0) {
            t = next_boundary;
            continue;
        }
        const double rate = active->mph * soc_per_mile; // SoC consumed per hour
        const double hours_to_threshold = (soc - threshold) / rate;
        if (t + hours_to_threshold < next_boundary) {
            const double t_cross = t + std::max(hours_to_threshold, 0.0);
            ChargingSession session;
            session.start_h = day_index * 24.0 + t_cross;
            session.duration_h =
                charge_duration_h(scenario.battery_kwh, threshold, scenario.charge_power_kw);
            session.power_kw = scenario.charge_power_kw;
            out.sessions.push_back(session);
            soc = 1.0;
            t = t_cross + session.duration_h; // vehicle pauses while charging
        } else {
            soc -= rate * (next_boundary - t);
            t = next_boundary;
        }
    }
    out.end_soc = soc;
    return out;
}

std::pair<double, double> sample_trip_times(const BehaviorDistributions& behavior,
                                            RngStream& rng)
{
    const double depart = rng.normal_clamped0(behavior.depart_time.mean, behavior.depart_time.sd);
    double arrive = rng.normal_clamped0(behavior.arrive_time.mean, behavior.arrive_time.sd);
    for (int retry = 0; retry < 10 && arrive < depart; ++retry)
        arrive = rng.normal_clamped0(behavior.arrive_time.mean, behavior.arrive_time.sd);
    if (arrive < depart)
        return {arrive, depart};
    return {depart, arrive};
}

std::vector<ChargingSession> sample_commuter_slow_day(const ChargingScenario& scenario,
                                                      int day_index, RngStream& rng)
{
    const auto [depart, arrive] = sample_trip_times(scenario.behavior, rng);
    (void)depart; // home charging keys off the arrival trip only
    const double miles =
        rng.normal_clamped0(scenario.behavior.daily_miles.mean, scenario.behavior.daily_miles.sd);
    std::vector<ChargingSession> sessions;
    if (auto s = build_slow_commuter_session(scenario, day_index, arrive, miles))
        sessions.push_back(*s);
    return sessions;
}

FastDayOutcome sample_commuter_fast(const ChargingScenario& scenario, double soc_carryover,
                                    int day_index, RngStream& rng)
{
    const auto [depart, arrive] = sample_trip_times(scenario.behavior, rng);
    const double miles =
        rng.normal_clamped0(scenario.behavior.daily_miles.mean, scenario.behavior.daily_miles.sd);
    // the en-route stop splits equally between the departure and arrival trips
    const bool at_departure = rng.coin();
    return build_fast_commuter_day(scenario, day_index, soc_carryover, depart, arrive, miles,
                                   at_departure);
}

RideServiceDayOutcome sample_ride_service_day(const ChargingScenario& scenario,
                                              double soc_carryover, int day_index,
                                              RngStream& rng)
{
    const BehaviorDistributions& b = scenario.behavior;
    std::vector<SpeedPeriod> speeds(b.avg_speed_by_period.begin(), b.avg_speed_by_period.end());
    if (b.speed_jitter_sd > 0.0) {
        for (SpeedPeriod& p : speeds)
            p.mph *= rng.normal_clamped0(1.0, b.speed_jitter_sd);
    }
    RideServiceDayOutcome out = build_ride_service_day(scenario, day_index, soc_carryover, speeds);
    if (b.ride_service_overnight_charge && out.end_soc < 1.0) {
        ChargingSession session;
        session.start_h = day_index * 24.0 + 22.0;
        session.duration_h =
            charge_duration_h(scenario.battery_kwh, out.end_soc, scenario.charge_power_kw);
        session.power_kw = scenario.charge_power_kw;
        out.sessions.push_back(session);
        out.end_soc = 1.0;
    }
    return out;
}

std::vector<ChargingSession> sample_vehicle_year(const ChargingScenario& scenario,
                                                 int vehicle_id, int horizon_days,
                                                 std::uint64_t vehicle_seed)
{
    RngStream rng(vehicle_seed);
    std::vector<ChargingSession> sessions;
    double soc = 1.0;
    double prev_end_h = -1.0e30;

    const auto append = [&](ChargingSession s) {
        // vehicles cannot charge twice at once; a start inside the previous
        // session is pushed to its end
        if (s.start_h < prev_end_h)
            s.start_h = prev_end_h;
        s.vehicle_id = vehicle_id;
        prev_end_h = s.end_h();
        sessions.push_back(s);
    };

    for (int day = 0; day < horizon_days; ++day) {
        switch (scenario.vehicle_class) {
        case VehicleClass::Commuter:
            if (scenario.charge_mode == ChargeMode::Slow) {
                for (const ChargingSession& s : sample_commuter_slow_day(scenario, day, rng))
                    append(s);
            } else {
                FastDayOutcome day_out = sample_commuter_fast(scenario, soc, day, rng);
                if (day_out.session)
                    append(*day_out.session);
                soc = day_out.end_soc;
            }
            break;
        case VehicleClass::RideService: {
            RideServiceDayOutcome day_out = sample_ride_service_day(scenario, soc, day, rng);
            for (const ChargingSession& s : day_out.sessions)
                append(s);
            soc = day_out.end_soc;
            break;
        }
        }
    }
    return sessions;
}

int slots_for_horizon(int horizon_days, double resolution_h)
{
    if (horizon_days < 1)
        throw InputError("horizon_days must be >= 1");
    if (!(resolution_h > 0.0))
        throw InputError("resolution must be positive");
    const double slots_per_day = 24.0 / resolution_h;
    const double rounded = std::round(slots_per_day);
    if (std::abs(slots_per_day - rounded) > 1e-9 || rounded < 1.0)
        throw InputError("resolution_h must divide 24 evenly");
    return horizon_days * static_cast<int>(rounded);
}

LoadProfile generate_fleet_profile(const ChargingScenario& scenario, int horizon_days,
                                   double resolution_h, std::uint64_t seed)
{
    validate_scenario(scenario);
    const int slots = slots_for_horizon(horizon_days, resolution_h);
    LoadProfile profile = LoadProfile::zeros(slots, resolution_h);
    for (int v = 0; v < scenario.fleet_count; ++v) {
        const std::uint64_t vseed = derive_seed(seed, stream_domain::vehicle,
                                                static_cast<std::uint64_t>(v));
        for (const ChargingSession& s : sample_vehicle_year(scenario, v, horizon_days, vseed))
            profile.add_pulse(s.start_h, s.duration_h, s.power_kw);
    }
    return profile;
}

} // namespace pevgrid::charging
