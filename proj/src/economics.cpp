#include "pevgrid/economics.hpp"

#include "pevgrid/errors.hpp"

#include <cmath>

namespace pevgrid::economics {

void validate_params(const TcoParams& p)
{
    if (p.c_o < 0.0 || p.cl_kw < 0.0 || p.ll_kw < 0.0 || p.dc < 0.0 || p.ec < 0.0)
        throw InputError("tco: costs and losses must be non-negative");
    if (!(p.rf > 0.0 && p.rf <= 1.0))
        throw InputError("tco: responsibility factor must lie in (0, 1]");
    if (p.gamma < 0.0 || p.gamma > 1.0)
        throw InputError("tco: gamma must lie in [0, 1]");
    if (!(p.interest > 0.0))
        throw InputError("tco: interest rate must be positive");
    if (!(p.n_hours > 0.0) || !(p.t_ins_years > 0.0))
        throw InputError("tco: hours per year and evaluation period must be positive");
    if (!(p.p_hat > 0.0))
        throw InputError("tco: normalized peak loading must be positive");
}

double pec(double ec, double interest, double t_years)
{
    if (!(interest > 0.0))
        throw InputError("pec: interest rate must be positive");
    if (t_years < 0.0)
        throw InputError("pec: period must be >= 0");
    const double growth = std::pow(1.0 + interest, t_years);
    return ec * (growth - 1.0) / (interest * growth);
}

double pec_window(double ec, double interest, double t1_years, double t2_years)
{
    if (!(interest > 0.0))
        throw InputError("pec_window: interest rate must be positive");
    if (t1_years < 0.0 || t2_years < t1_years)
        throw InputError("pec_window: window must satisfy 0 <= t1 <= t2");
    return ec / interest *
           (std::pow(1.0 + interest, -t1_years) - std::pow(1.0 + interest, -t2_years));
}

double lof_conventional(double s_avg, double s_hat, double gamma)
{
    if (!(s_avg > 0.0))
        throw InputError("lof: average loading must be positive");
    if (s_avg > s_hat)
        throw InputError("lof: average loading exceeds the peak");
    const double u = s_avg / s_hat;
    return gamma * u + (1.0 - gamma) * u * u;
}

std::vector<double> lof_timeseries(std::span<const double> mean_k_series, double s_hat_pu,
                                   double gamma)
{
    if (!(s_hat_pu > 0.0))
        throw InputError("lof_timeseries: peak loading must be positive");
    std::vector<double> lof;
    lof.reserve(mean_k_series.size());
    for (double k : mean_k_series) {
        const double u = k / s_hat_pu;
        lof.push_back(gamma * u + (1.0 - gamma) * u * u);
    }
    return lof;
}

TcoBreakdown tco_conventional(const TcoParams& p, double s_avg, double s_hat)
{
    validate_params(p);
    const double pec_full = pec(p.ec, p.interest, p.t_ins_years);
    const double a = p.dc + p.n_hours * pec_full;
    const double lof = lof_conventional(s_avg, s_hat, p.gamma);
    const double b = (p.rf * p.dc + lof * p.n_hours * pec_full) * p.p_hat * p.p_hat;
    TcoBreakdown out;
    out.capital = p.c_o;
    out.core_loss = p.cl_kw * a;
    out.load_loss = p.ll_kw * b;
    return out;
}

TcoBreakdown tco_transformer_reestablished(const TcoParams& p, double lol_fraction,
                                           std::span<const double> mean_k_series,
                                           double t1_years, double t2_years)
{
    validate_params(p);
    if (lol_fraction < 0.0)
        throw InputError("tco_reestablished: loss of life must be >= 0");
    if (t1_years < 0.0 || t2_years < t1_years)
        throw InputError("tco_reestablished: window must satisfy 0 <= t1 <= t2");

    const double window_years = t2_years - t1_years;
    const double pec_win = pec_window(p.ec, p.interest, t1_years, t2_years);
    // demand-cost terms prorate by window length so [0, T_ins] reproduces
    // the conventional A and B
    const double window_frac = window_years / p.t_ins_years;
    const double a = p.dc * window_frac + p.n_hours * pec_win;

    double lof_mean = 0.0;
    if (!mean_k_series.empty()) {
        const std::vector<double> lof = lof_timeseries(mean_k_series, p.p_hat, p.gamma);
        for (double v : lof)
            lof_mean += v;
        lof_mean /= static_cast<double>(lof.size());
    }
    const double b =
        (p.rf * p.dc * window_frac + lof_mean * p.n_hours * pec_win) * p.p_hat * p.p_hat;

    TcoBreakdown out;
    // every full unit of accumulated LoL is one end-of-life replacement
    // purchase; the fractional remainder is consumed capital. A unit
    // exhausted exactly at the window end is not replaced.
    out.capital = lol_fraction * p.c_o;
    out.replacements =
        lol_fraction > 0.0 ? std::max(0, static_cast<int>(std::ceil(lol_fraction)) - 1) : 0;
    out.core_loss = p.cl_kw * a;
    out.load_loss = p.ll_kw * b;
    return out;
}

} // namespace pevgrid::economics
