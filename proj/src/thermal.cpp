#include "pevgrid/thermal.hpp"

#include "pevgrid/errors.hpp"

#include <algorithm>
#include <cmath>

namespace pevgrid::thermal {

void validate_params(const ThermalParams& p)
{
    if (!(p.s_rated_kva > 0.0))
        throw InputError("thermal: rating must be positive");
    if (!(p.dtheta_to_rated_k > 0.0) || !(p.dtheta_h_rated_k > 0.0))
        throw InputError("thermal: rated temperature rises must be positive");
    if (!(p.tau_to_h > 0.0) || !(p.tau_h_h > 0.0))
        throw InputError("thermal: time constants must be positive");
    if (!(p.tau_h_h < p.tau_to_h))
        throw InputError("thermal: hot-spot time constant must be below the top-oil one");
    if (!(p.loss_ratio_r > 0.0) || !(p.oil_exponent_x > 0.0) || !(p.winding_exponent_y > 0.0))
        throw InputError("thermal: loss ratio and exponents must be positive");
}

void validate_params(const AgingParams& p)
{
    if (!(p.beta > 0.0))
        throw InputError("aging: beta must be positive");
    if (!(p.t_ins_hours > 0.0))
        throw InputError("aging: normal insulation life must be positive");
}

ThermalState steady_state_temps(double k, const ThermalParams& p)
{
    if (!(k >= 0.0))
        throw InputError("steady_state_temps: load factor must be >= 0");
    const double r = p.loss_ratio_r;
    ThermalState s;
    s.theta_to_c = p.theta_ambient_c +
                   p.dtheta_to_rated_k * std::pow((1.0 + r * k * k) / (1.0 + r), p.oil_exponent_x);
    s.dtheta_h_k = p.dtheta_h_rated_k * std::pow(k, p.winding_exponent_y);
    return s;
}

ThermalState step_thermal(const ThermalState& state, double k, double dt_h,
                          const ThermalParams& p)
{
    if (!(dt_h > 0.0))
        throw InputError("step_thermal: dt must be positive");
    const ThermalState target = steady_state_temps(k, p);
    ThermalState next;
    next.theta_to_c =
        target.theta_to_c + (state.theta_to_c - target.theta_to_c) * std::exp(-dt_h / p.tau_to_h);
    next.dtheta_h_k =
        target.dtheta_h_k + (state.dtheta_h_k - target.dtheta_h_k) * std::exp(-dt_h / p.tau_h_h);
    return next;
}

double faa(double theta_hst_c, const AgingParams& aging)
{
    const double denom = theta_hst_c + aging.omega;
    if (!(denom > 0.0))
        throw InputError("faa: hot-spot temperature at or below the aging-law pole");
    return std::exp(aging.alpha - aging.beta / denom);
}

double accumulate_lol(std::span<const double> theta_hst_c, double dt_h, const AgingParams& aging)
{
    if (theta_hst_c.empty())
        throw InputError("accumulate_lol: empty temperature series");
    double sum = 0.0;
    for (double theta : theta_hst_c)
        sum += faa(theta, aging);
    return sum * dt_h / aging.t_ins_hours;
}

std::vector<double> rollout_theta_hst(std::span<const double> k_series, double dt_h,
                                      const ThermalParams& params,
                                      std::span<const double> ambient_series_c)
{
    if (k_series.empty())
        throw InputError("rollout_theta_hst: empty load series");
    if (!ambient_series_c.empty() && ambient_series_c.size() != k_series.size())
        throw InputError("rollout_theta_hst: ambient series length mismatch");

    ThermalParams p = params;
    if (!ambient_series_c.empty())
        p.theta_ambient_c = ambient_series_c[0];
    ThermalState state = steady_state_temps(k_series[0], p);

    std::vector<double> theta;
    theta.reserve(k_series.size());
    for (std::size_t i = 0; i < k_series.size(); ++i) {
        if (!ambient_series_c.empty())
            p.theta_ambient_c = ambient_series_c[i];
        state = step_thermal(state, k_series[i], dt_h, p);
        theta.push_back(state.theta_hst_c());
    }
    return theta;
}

double estimated_lifetime_years(double yearly_lol_percent, double t_ins_years)
{
    if (!(yearly_lol_percent >= 0.0))
        throw InputError("estimated_lifetime: yearly LoL must be >= 0");
    if (yearly_lol_percent == 0.0)
        return t_ins_years;
    return std::min(100.0 / yearly_lol_percent, t_ins_years);
}

} // namespace pevgrid::thermal
