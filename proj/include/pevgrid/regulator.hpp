#ifndef PEVGRID_REGULATOR_HPP
#define PEVGRID_REGULATOR_HPP

#include <span>
#include <utility>
#include <vector>

namespace pevgrid::regulator {

// Step-voltage regulator settings. The deadband must contain v_regulated;
// tap limits straddle zero.
struct VrConfig {
    double v_regulated = 1.0;
    double kappa = 0.0065; // pu per tap
    double deadband_low = 1.0 - 0.0065;
    double deadband_high = 1.0 + 0.0065;
    int h_min = -16;
    int h_max = 16;
    double n_op_max = 1.0e6; // lifetime tap-operation budget
};

void validate_config(const VrConfig& config);

// Tap-changer state. history records the position applied at each slot;
// op_count is the telescoped sum of |h(n) - h(n-1)|.
struct VrState {
    int h = 0;
    long op_count = 0;
    std::vector<std::pair<int, int>> history; // (slot, tap position)

    // Appends the current position without a control decision (used for
    // the first slot, where no prior solved voltage exists).
    void record_slot()
    {
        history.emplace_back(static_cast<int>(history.size()), h);
    }
};

// One control action: no move inside the deadband, otherwise the rounded
// integer tap correction opposing the deviation, clamped to the tap range.
VrState decide_tap(VrState state, double v_measured, const VrConfig& config);

// Folds decide_tap over a voltage series starting from tap 0.
VrState run_series(std::span<const double> v_series, const VrConfig& config);

// Fraction of the operation budget consumed.
double vr_lol(const VrState& state, const VrConfig& config);

// Depreciation-weighted capital cost of the regulator.
double tco_vr(double lol, double capital_cost);

// Recomputes the operation count from the recorded history (consistency
// check against op_count).
long ops_from_history(const VrState& state);

} // namespace pevgrid::regulator

#endif
