#include "pevgrid/load_profile.hpp"

#include "pevgrid/errors.hpp"

#include <algorithm>
#include <cmath>

namespace pevgrid {

LoadProfile LoadProfile::zeros(int horizon_slots, double resolution_h)
{
    if (horizon_slots < 0 || !(resolution_h > 0.0))
        throw InputError("LoadProfile: horizon_slots must be >= 0 and resolution > 0");
    LoadProfile p;
    p.resolution_h = resolution_h;
    p.horizon_slots = horizon_slots;
    p.values_kw.assign(static_cast<std::size_t>(horizon_slots), 0.0);
    return p;
}

double LoadProfile::energy_kwh() const
{
    double sum = 0.0;
    for (double v : values_kw)
        sum += v;
    return sum * resolution_h;
}

double LoadProfile::peak_kw() const
{
    double peak = 0.0;
    for (double v : values_kw)
        peak = std::max(peak, v);
    return peak;
}

double LoadProfile::mean_kw() const
{
    if (values_kw.empty())
        return 0.0;
    double sum = 0.0;
    for (double v : values_kw)
        sum += v;
    return sum / static_cast<double>(values_kw.size());
}

void LoadProfile::add_pulse(double start_h, double duration_h, double power_kw)
{
    if (duration_h <= 0.0 || power_kw == 0.0 || horizon_slots == 0)
        return;
    const double horizon = horizon_h();
    if (duration_h > horizon)
        throw InputError("LoadProfile::add_pulse: pulse longer than the horizon");

    // wrap into [0, horizon)
    double start = std::fmod(start_h, horizon);
    if (start < 0.0)
        start += horizon;
    double end = start + duration_h;

    const auto deposit = [&](double a, double b) {
        // [a, b) guaranteed inside [0, horizon]
        int first = static_cast<int>(a / resolution_h);
        if (first >= horizon_slots)
            first = horizon_slots - 1;
        for (int s = first; s < horizon_slots; ++s) {
            const double slot_a = s * resolution_h;
            const double slot_b = slot_a + resolution_h;
            if (slot_a >= b)
                break;
            const double overlap = std::min(b, slot_b) - std::max(a, slot_a);
            if (overlap > 0.0)
                values_kw[static_cast<std::size_t>(s)] += power_kw * overlap / resolution_h;
        }
    };

    if (end <= horizon) {
        deposit(start, end);
    } else {
        deposit(start, horizon);
        deposit(0.0, end - horizon);
    }
}

LoadProfile& LoadProfile::operator+=(const LoadProfile& other)
{
    if (other.horizon_slots != horizon_slots || other.resolution_h != resolution_h)
        throw InputError("LoadProfile: cannot add profiles with mismatched grids");
    for (std::size_t i = 0; i < values_kw.size(); ++i)
        values_kw[i] += other.values_kw[i];
    return *this;
}

} // namespace pevgrid
