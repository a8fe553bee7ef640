#ifndef PEVGRID_LOAD_PROFILE_HPP
#define PEVGRID_LOAD_PROFILE_HPP

#include <vector>

namespace pevgrid {

// Fixed-resolution time series of real power at one network location.
// Slot values are the average power over the slot, so
// energy = sum(values) * resolution_h.
struct LoadProfile {
    double resolution_h = 0.25;
    int horizon_slots = 0;
    std::vector<double> values_kw;

    static LoadProfile zeros(int horizon_slots, double resolution_h);

    double horizon_h() const { return resolution_h * horizon_slots; }
    double energy_kwh() const;
    double peak_kw() const;
    double mean_kw() const;

    // Accumulates a rectangular pulse, prorating partial slot overlap.
    // Pulses wrap modulo the horizon so profile energy always equals the
    // summed pulse energy (yearly horizons are treated as cyclic).
    void add_pulse(double start_h, double duration_h, double power_kw);

    LoadProfile& operator+=(const LoadProfile& other);
};

} // namespace pevgrid

#endif
