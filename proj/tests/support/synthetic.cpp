#include "support/synthetic.hpp"

#include <algorithm>
#include <cmath>

namespace pevgrid::testsupport {

using network::Branch;
using network::Bus;
using network::FeederModel;
using network::VrSite;

FeederModel two_bus_feeder(double s_base_kva, double s_rated_kva)
{
    FeederModel feeder;
    feeder.buses = {{1, false, 0.0}, {2, true, 1.0}};
    feeder.branches = {{1, 2, 0.01, 0.02}};
    feeder.source_bus = 1;
    feeder.v_source_pu = 1.0;
    feeder.s_base_kva = s_base_kva;
    feeder.s_rated_kva = s_rated_kva;
    return feeder;
}

FeederModel two_bus_regulated_feeder(double kappa)
{
    FeederModel feeder = two_bus_feeder();
    VrSite site;
    site.branch_index = 0;
    site.config.kappa = kappa;
    site.config.deadband_low = 1.0 - kappa;
    site.config.deadband_high = 1.0 + kappa;
    feeder.regulators.push_back(site);
    return feeder;
}

FeederModel four_bus_feeder()
{
    FeederModel feeder;
    feeder.buses = {{1, false, 0.0}, {2, true, 0.3}, {3, true, 0.3}, {4, true, 0.4}};
    feeder.branches = {{1, 2, 0.008, 0.016}, {2, 3, 0.006, 0.012}, {3, 4, 0.01, 0.02}};
    feeder.source_bus = 1;
    feeder.v_source_pu = 1.0;
    feeder.s_base_kva = 1000.0;
    feeder.s_rated_kva = 1000.0;
    return feeder;
}

FeederModel twelve_bus_feeder(double s_rated_kva, double s_base_kva)
{
    FeederModel feeder;
    // trunk 1..8, laterals 9..12
    feeder.buses = {
        {1, false, 0.0}, {2, false, 0.0}, {3, false, 0.0}, {4, true, 0.15},
        {5, false, 0.0}, {6, true, 0.15}, {7, false, 0.0}, {8, true, 0.10},
        {9, true, 0.10}, {10, true, 0.15}, {11, true, 0.20}, {12, true, 0.15},
    };
    feeder.branches = {
        {1, 2, 0.006, 0.012},  // 0
        {2, 3, 0.006, 0.012},  // 1
        {3, 4, 0.001, 0.002},  // 2: VR1 site, ~40% of trunk impedance
        {4, 5, 0.006, 0.012},  // 3
        {5, 6, 0.001, 0.002},  // 4: VR2 site, ~60% of trunk impedance
        {6, 7, 0.006, 0.012},  // 5
        {7, 8, 0.006, 0.012},  // 6
        {3, 9, 0.004, 0.008},  // 7
        {5, 10, 0.004, 0.008}, // 8
        {7, 11, 0.004, 0.008}, // 9
        {8, 12, 0.004, 0.008}, // 10
    };
    feeder.source_bus = 1;
    feeder.v_source_pu = 1.01;
    feeder.s_base_kva = s_base_kva;
    feeder.s_rated_kva = s_rated_kva;

    VrSite vr1;
    vr1.branch_index = 2;
    feeder.regulators.push_back(vr1);
    VrSite vr2;
    vr2.branch_index = 4;
    feeder.regulators.push_back(vr2);
    return feeder;
}

LoadProfile synthetic_base_profile(int horizon_days, double resolution_h, double peak_kw,
                                   double floor_frac)
{
    const int slots_per_day = static_cast<int>(std::lround(24.0 / resolution_h));
    LoadProfile profile = LoadProfile::zeros(horizon_days * slots_per_day, resolution_h);

    // raw shape peaks during the evening hump of the seasonal high;
    // normalized afterwards so the profile peak equals peak_kw exactly
    double raw_max = 0.0;
    std::vector<double> raw(profile.values_kw.size());
    for (int day = 0; day < horizon_days; ++day) {
        const double season =
            0.5 - 0.5 * std::cos(2.0 * 3.14159265358979323846 * ((day % 365) - 30.0) / 365.0);
        for (int s = 0; s < slots_per_day; ++s) {
            const double hour = (s + 0.5) * resolution_h;
            const double morning = std::exp(-0.5 * std::pow((hour - 8.0) / 2.5, 2.0));
            const double evening = std::exp(-0.5 * std::pow((hour - 18.5) / 3.0, 2.0));
            const double weekly = (day % 7 >= 5) ? 0.92 : 1.0;
            const double value =
                weekly * (0.52 + 0.18 * morning + 0.42 * evening) * (0.82 + 0.18 * season);
            raw[static_cast<std::size_t>(day * slots_per_day + s)] = value;
            raw_max = std::max(raw_max, value);
        }
    }
    for (std::size_t i = 0; i < raw.size(); ++i)
        profile.values_kw[i] = (floor_frac + (1.0 - floor_frac) * raw[i] / raw_max) * peak_kw;
    return profile;
}

} // namespace pevgrid::testsupport
