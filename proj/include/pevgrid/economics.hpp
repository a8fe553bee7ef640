#ifndef PEVGRID_ECONOMICS_HPP
#define PEVGRID_ECONOMICS_HPP

#include <span>
#include <vector>

namespace pevgrid::economics {

// Transformer TCO parameters. Shipped defaults are the vendor-survey
// values (10 MVA substation unit): core loss 13.2 kW, load loss 53 kW,
// demand cost 120 $/kW-yr, responsibility factor 0.81, energy cost
// 0.05 $/kWh, gamma 0.2, interest 5%, capital $70,000, evaluated over the
// 135,000 h insulation life.
struct TcoParams {
    double c_o = 70000.0;     // capital cost, $
    double cl_kw = 13.2;      // core loss
    double ll_kw = 53.0;      // load loss
    double dc = 120.0;        // levelized demand cost, $/kW-yr
    double rf = 0.81;         // responsibility factor
    double ec = 0.05;         // energy cost, $/kWh
    double gamma = 0.2;       // dynamic load factor constant
    double interest = 0.05;   // fraction/yr
    double n_hours = 8760.0;
    double t_ins_years = 135000.0 / 8760.0;
    double p_hat = 1.0;       // normalized peak loading s_hat / s_R
};

void validate_params(const TcoParams& params);

// Present value of energy cost over T years: EC * ((1+i)^T - 1)/(i (1+i)^T).
double pec(double ec, double interest, double t_years);

// Windowed present value: (EC/i) * ((1+i)^-t1 - (1+i)^-t2). Window-additive
// and equal to pec() on [0, T].
double pec_window(double ec, double interest, double t1_years, double t2_years);

// Loss factor gamma*u + (1-gamma)*u^2 with u = s_avg / s_hat.
double lof_conventional(double s_avg, double s_hat, double gamma);

// Per-slot loss factor of a mean load-factor series, u(t) = k(t) / s_hat_pu.
std::vector<double> lof_timeseries(std::span<const double> mean_k_series, double s_hat_pu,
                                   double gamma);

struct TcoBreakdown {
    double capital = 0.0;
    double core_loss = 0.0; // CL * A
    double load_loss = 0.0; // LL * B
    int replacements = 0;   // full end-of-life replacements inside the window

    double total() const { return capital + core_loss + load_loss; }
};

// Conventional TCO from annual-average loading:
//   A = DC + N*PEC,  B = (RF*DC + LoF*N*PEC) * p_hat^2,
//   TCO = C_o + CL*A + LL*B.
TcoBreakdown tco_conventional(const TcoParams& params, double s_avg, double s_hat);

// Loading-aware TCO over [t1, t2]: the capital term scales with the
// accumulated loss of life (each full unit of LoL is one replacement
// purchase), A and B use the windowed PEC and the time-varying loss
// factor. The demand-cost terms prorate by window length so the full
// insulation-life window reproduces the conventional formula.
TcoBreakdown tco_transformer_reestablished(const TcoParams& params, double lol_fraction,
                                           std::span<const double> mean_k_series,
                                           double t1_years, double t2_years);

} // namespace pevgrid::economics

#endif
