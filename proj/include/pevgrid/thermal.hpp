#ifndef PEVGRID_THERMAL_HPP
#define PEVGRID_THERMAL_HPP

#include <span>
#include <vector>

namespace pevgrid::thermal {

// Transformer thermal constants (loading-guide style two-time-constant
// model). Defaults anchor the rated hot-spot at 110 degC with a 30 degC
// ambient: 30 + 55 + 25.
struct ThermalParams {
    double s_rated_kva = 10000.0;
    double dtheta_to_rated_k = 55.0; // top-oil rise over ambient at rated load
    double dtheta_h_rated_k = 25.0;  // hot-spot rise over top-oil at rated load
    double tau_to_h = 3.5;
    double tau_h_h = 0.08;
    double loss_ratio_r = 53.0 / 13.2; // rated load-loss / no-load-loss
    double oil_exponent_x = 0.8;
    double winding_exponent_y = 1.6;
    double theta_ambient_c = 30.0;
};

void validate_params(const ThermalParams& params);

struct ThermalState {
    double theta_to_c = 0.0;  // top-oil temperature
    double dtheta_h_k = 0.0;  // hot-spot rise over top-oil

    double theta_hst_c() const { return theta_to_c + dtheta_h_k; }
};

// Insulation aging law: F_AA = exp(alpha - beta / (theta_hst + omega)).
// Defaults give F_AA = 1 exactly at 110 degC and a 135,000 h normal life.
struct AgingParams {
    double alpha = 15000.0 / 383.0;
    double beta = 15000.0;
    double omega = 273.0;
    double t_ins_hours = 135000.0;

    double t_ins_years() const { return t_ins_hours / 8760.0; }
};

void validate_params(const AgingParams& params);

// Equilibrium temperatures for a constant load factor k.
ThermalState steady_state_temps(double k, const ThermalParams& params);

// Exact exponential step for piecewise-constant k over dt_h: each
// component relaxes toward its steady-state target with its own time
// constant. Semigroup-exact, so two steps of dt equal one step of 2*dt.
ThermalState step_thermal(const ThermalState& state, double k, double dt_h,
                          const ThermalParams& params);

double faa(double theta_hst_c, const AgingParams& aging);

// Loss of life over a hot-spot series: (1/T_ins) * sum faa(theta_i) * dt
// (left-Riemann at slot resolution).
double accumulate_lol(std::span<const double> theta_hst_c, double dt_h,
                      const AgingParams& aging);

// Hot-spot temperature rollout over a load-factor series. The state starts
// at the steady state of the first slot's k (no artificial cold-start
// transient). An ambient series, when given, overrides the constant
// ambient slot by slot.
std::vector<double> rollout_theta_hst(std::span<const double> k_series, double dt_h,
                                      const ThermalParams& params,
                                      std::span<const double> ambient_series_c = {});

// min(100 / yearly LoL%, T_ins); zero LoL reports T_ins. Lifetimes under
// half a year fall in the epsilon class.
double estimated_lifetime_years(double yearly_lol_percent, double t_ins_years);

constexpr double kEpsilonLifetimeYears = 0.5;

} // namespace pevgrid::thermal

#endif
