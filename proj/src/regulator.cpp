#include "pevgrid/regulator.hpp"

#include "pevgrid/errors.hpp"

#include <algorithm>
#include <cmath>

namespace pevgrid::regulator {

void validate_config(const VrConfig& c)
{
    if (!(c.kappa > 0.0))
        throw InputError("regulator: kappa must be positive");
    if (!(c.deadband_low <= c.v_regulated && c.v_regulated <= c.deadband_high))
        throw InputError("regulator: deadband must contain v_regulated");
    if (!(c.h_min < 0 && 0 < c.h_max))
        throw InputError("regulator: tap limits must straddle zero");
    if (!(c.n_op_max > 0.0))
        throw InputError("regulator: operation budget must be positive");
}

namespace {
    int round_half_away(double x)
    {
        return static_cast<int>(x >= 0.0 ? std::floor(x + 0.5) : std::ceil(x - 0.5));
    }
} // namespace

VrState decide_tap(VrState state, double v_measured, const VrConfig& config)
{
    if (!std::isfinite(v_measured) || !(v_measured > 0.0))
        throw InputError("decide_tap: measured voltage must be positive and finite");

    int delta = 0;
    if (v_measured < config.deadband_low || v_measured > config.deadband_high) {
        // integer taps nearest to the measured deviation, applied so the
        // correction opposes it: boost when low, buck when high
        delta = round_half_away((v_measured - config.v_regulated) / config.kappa);
    }
    const int h_new = std::clamp(state.h - delta, config.h_min, config.h_max);
    state.op_count += std::abs(h_new - state.h);
    state.h = h_new;
    state.record_slot();
    return state;
}

VrState run_series(std::span<const double> v_series, const VrConfig& config)
{
    if (v_series.empty())
        throw InputError("run_series: empty voltage series");
    VrState state;
    state.history.reserve(v_series.size());
    for (double v : v_series)
        state = decide_tap(std::move(state), v, config);
    return state;
}

double vr_lol(const VrState& state, const VrConfig& config)
{
    if (!(config.n_op_max > 0.0))
        throw InputError("vr_lol: operation budget must be positive");
    return static_cast<double>(state.op_count) / config.n_op_max;
}

double tco_vr(double lol, double capital_cost)
{
    return lol * capital_cost;
}

long ops_from_history(const VrState& state)
{
    long ops = 0;
    int prev = 0; // regulators start on the neutral tap
    for (const auto& [slot, h] : state.history) {
        ops += std::abs(h - prev);
        prev = h;
    }
    return ops;
}

} // namespace pevgrid::regulator
