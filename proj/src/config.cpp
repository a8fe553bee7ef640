#include "pevgrid/config.hpp"

#include "pevgrid/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace pevgrid::config {

namespace {

    std::string trim(const std::string& s)
    {
        std::size_t a = 0;
        std::size_t b = s.size();
        while (a < b && std::isspace(static_cast<unsigned char>(s[a])))
            ++a;
        while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1])))
            --b;
        return s.substr(a, b - a);
    }

    [[noreturn]] void fail(const std::string& file, int line, int column, const std::string& msg)
    {
        std::ostringstream os;
        os << file << ":" << line;
        if (column > 0)
            os << ":" << column;
        os << ": " << msg;
        throw InputError(os.str());
    }

    double parse_double(const std::string& file, int line, int column, const std::string& text)
    {
        try {
            std::size_t used = 0;
            const double v = std::stod(text, &used);
            if (used != text.size() || !std::isfinite(v))
                fail(file, line, column, "expected a finite number, got '" + text + "'");
            return v;
        } catch (const InputError&) {
            throw;
        } catch (const std::exception&) {
            fail(file, line, column, "expected a number, got '" + text + "'");
        }
    }

    long parse_long(const std::string& file, int line, int column, const std::string& text)
    {
        try {
            std::size_t used = 0;
            const long v = std::stol(text, &used);
            if (used != text.size())
                fail(file, line, column, "expected an integer, got '" + text + "'");
            return v;
        } catch (const InputError&) {
            throw;
        } catch (const std::exception&) {
            fail(file, line, column, "expected an integer, got '" + text + "'");
        }
    }

    std::vector<std::string> split(const std::string& s, char sep)
    {
        std::vector<std::string> parts;
        std::string cur;
        for (char c : s) {
            if (c == sep) {
                parts.push_back(trim(cur));
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        parts.push_back(trim(cur));
        return parts;
    }

    // ---- parameter registry ------------------------------------------------

    struct RegistryEntry {
        const char* key;
        const char* default_value;
        Provenance provenance; // of the default
    };

    // Every tunable has a named key; defaults marked Published carry the
    // surveyed source values (charger ratings, transformer cost set,
    // kappa, insulation life, iteration count), the rest are artifact
    // defaults.
    const RegistryEntry kRegistry[] = {
        {"feeder_csv", "", Provenance::Default},
        {"baseload_csv", "", Provenance::Default},
        {"out_dir", "out", Provenance::Default},
        {"seed", "1", Provenance::Default},
        {"iterations", "100", Provenance::Published},
        {"horizon_days", "365", Provenance::Default},
        {"resolution_h", "0.25", Provenance::Published},
        {"expectation_mode", "mean_k", Provenance::Default},
        {"threads", "0", Provenance::Default},
        {"phase_multipliers", "", Provenance::Default},
        {"observed_peak_pl", "0", Provenance::Default},
        {"monitored_buses", "", Provenance::Default},
        {"scenario", "0", Provenance::Default},
        {"pl_percent", "", Provenance::Default},
        {"area", "urban", Provenance::Default},
        {"base_power_factor", "0.95", Provenance::Default},
        {"pev_power_factor", "0.95", Provenance::Default},
        {"anxiety_threshold", "0.30", Provenance::Published},
        {"depart_mean_h", "7.5", Provenance::Default},
        {"depart_sd_h", "1.0", Provenance::Default},
        {"arrive_mean_h", "17.5", Provenance::Default},
        {"arrive_sd_h", "1.0", Provenance::Default},
        {"miles_mean", "32", Provenance::Default},
        {"miles_sd", "12", Provenance::Default},
        {"energy_per_mile_kwh", "0.30", Provenance::Default},
        {"service_start_h", "7", Provenance::Published},
        {"service_end_h", "21", Provenance::Published},
        {"service_speeds", "7-10:22,10-16:28,16-19:20,19-21:26", Provenance::Default},
        {"speed_jitter_sd", "0.10", Provenance::Default},
        {"ride_service_overnight_charge", "0", Provenance::Default},
        {"custom_vehicle_class", "", Provenance::Default},
        {"custom_charge_mode", "", Provenance::Default},
        {"custom_fleet_count", "0", Provenance::Default},
        {"custom_charge_power_kw", "19.2", Provenance::Published},
        {"custom_battery_kwh", "40", Provenance::Published},
        {"mixed_slow_power_kw", "19.2", Provenance::Published},
        {"mixed_fast_power_kw", "120", Provenance::Published},
        {"mixed_slow_battery_kwh", "40", Provenance::Default},
        {"mixed_fast_battery_kwh", "40", Provenance::Default},
        {"dtheta_to_rated_k", "55", Provenance::Default},
        {"dtheta_h_rated_k", "25", Provenance::Default},
        {"tau_to_h", "3.5", Provenance::Default},
        {"tau_h_h", "0.08", Provenance::Default},
        {"oil_exponent_x", "0.8", Provenance::Default},
        {"winding_exponent_y", "1.6", Provenance::Default},
        {"loss_ratio_r", "4.015151515151515", Provenance::Default},
        {"theta_ambient_c", "30", Provenance::Default},
        {"aging_alpha", "39.16449086161879", Provenance::Default},
        {"aging_beta", "15000", Provenance::Default},
        {"aging_omega", "273", Provenance::Default},
        {"t_ins_hours", "135000", Provenance::Published},
        {"vr_v_regulated", "1.0", Provenance::Default},
        {"vr_kappa", "0.0065", Provenance::Published},
        {"vr_deadband_low", "", Provenance::Default},  // blank = v_reg - kappa
        {"vr_deadband_high", "", Provenance::Default}, // blank = v_reg + kappa
        {"vr_h_min", "-16", Provenance::Default},
        {"vr_h_max", "16", Provenance::Default},
        {"vr_n_op_max", "1000000", Provenance::Default},
        {"tco_c_o", "70000", Provenance::Published},
        {"tco_cl_kw", "13.2", Provenance::Published},
        {"tco_ll_kw", "53", Provenance::Published},
        {"tco_dc", "120", Provenance::Published},
        {"tco_rf", "0.81", Provenance::Published},
        {"tco_ec", "0.05", Provenance::Published},
        {"tco_gamma", "0.2", Provenance::Published},
        {"tco_interest", "0.05", Provenance::Published},
        {"tco_n_hours", "8760", Provenance::Published},
        {"tco_eval_period_yr", "15.41095890410959", Provenance::Published},
    };

    const RegistryEntry* find_registry(const std::string& key)
    {
        for (const RegistryEntry& entry : kRegistry)
            if (key == entry.key)
                return &entry;
        return nullptr;
    }

    std::map<std::string, ParamValue> default_params()
    {
        std::map<std::string, ParamValue> params;
        for (const RegistryEntry& entry : kRegistry)
            params[entry.key] = ParamValue{entry.default_value, entry.provenance};
        return params;
    }

    // ---- csv helpers ---------------------------------------------------------

    struct CsvRow {
        int line = 0;
        std::vector<std::string> fields;
    };

    std::vector<CsvRow> read_csv(const std::string& path)
    {
        std::ifstream in(path);
        if (!in)
            throw InputError("cannot open file: " + path);
        std::vector<CsvRow> rows;
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            const std::string trimmed = trim(line);
            if (trimmed.empty() || trimmed[0] == '#')
                continue;
            rows.push_back({line_no, split(line, ',')});
        }
        return rows;
    }

    // ISO-8601 naive local timestamp -> minutes from the start of a
    // non-leap year. Timestamps are only used at ingestion to verify
    // uniform spacing; everything downstream is slot-indexed.
    long iso_to_minutes(const std::string& file, int line, const std::string& text)
    {
        int year = 0;
        int month = 0;
        int day = 0;
        int hour = 0;
        int minute = 0;
        int second = 0;
        const int got = std::sscanf(text.c_str(), "%d-%d-%d%*1[T ]%d:%d:%d", &year, &month, &day,
                                    &hour, &minute, &second);
        if (got < 5)
            fail(file, line, 1, "cannot parse timestamp '" + text + "'");
        static const int days_before[12] = {0, 31, 59, 90, 120, 151, 181, 212, 243, 273, 304, 334};
        static const int days_in[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
        if (month < 1 || month > 12 || day < 1 || day > days_in[month - 1] || hour < 0 ||
            hour > 23 || minute < 0 || minute > 59 || second != 0)
            fail(file, line, 1, "timestamp out of range: '" + text + "'");
        return (static_cast<long>(days_before[month - 1]) + day - 1) * 24 * 60 + hour * 60 +
               minute;
    }

} // namespace

const char* provenance_name(Provenance p)
{
    switch (p) {
    case Provenance::Published:
        return "published";
    case Provenance::Default:
        return "default";
    case Provenance::Override:
        return "override";
    }
    return "unknown";
}

network::FeederModel load_feeder_csv(const std::string& path,
                                     const regulator::VrConfig& vr_defaults)
{
    network::FeederModel feeder;
    bool have_source = false;
    std::map<std::pair<int, int>, int> branch_lookup;

    for (const CsvRow& row : read_csv(path)) {
        const auto& f = row.fields;
        const std::string record = trim(f[0]);
        const auto field = [&](std::size_t i) -> std::string {
            if (i >= f.size())
                fail(path, row.line, static_cast<int>(i + 1),
                     "missing field " + std::to_string(i + 1) + " in '" + record + "' record");
            return trim(f[i]);
        };
        const auto num = [&](std::size_t i) {
            return parse_double(path, row.line, static_cast<int>(i + 1), field(i));
        };
        const auto integer = [&](std::size_t i) {
            return static_cast<int>(parse_long(path, row.line, static_cast<int>(i + 1), field(i)));
        };

        if (record == "source") {
            if (have_source)
                fail(path, row.line, 1, "duplicate source record");
            have_source = true;
            feeder.source_bus = integer(1);
            feeder.v_source_pu = num(2);
            feeder.s_rated_kva = num(3);
            feeder.s_base_kva = num(4);
            feeder.v_base_kv = num(5);
            network::Bus bus;
            bus.id = feeder.source_bus;
            feeder.buses.push_back(bus);
        } else if (record == "bus") {
            network::Bus bus;
            bus.id = integer(1);
            bus.is_load = f.size() > 2 && !trim(f[2]).empty() ? integer(2) != 0 : false;
            bus.load_weight = f.size() > 3 && !trim(f[3]).empty() ? num(3) : (bus.is_load ? 1.0 : 0.0);
            for (const network::Bus& existing : feeder.buses)
                if (existing.id == bus.id)
                    fail(path, row.line, 2, "duplicate bus id " + std::to_string(bus.id));
            feeder.buses.push_back(bus);
        } else if (record == "branch") {
            network::Branch branch;
            branch.from = integer(1);
            branch.to = integer(2);
            branch.r_pu = num(3);
            branch.x_pu = num(4);
            branch_lookup[{branch.from, branch.to}] = static_cast<int>(feeder.branches.size());
            feeder.branches.push_back(branch);
        } else if (record == "regulator") {
            const int from = integer(1);
            const int to = integer(2);
            const auto it = branch_lookup.find({from, to});
            if (it == branch_lookup.end())
                fail(path, row.line, 2,
                     "regulator references undeclared branch " + std::to_string(from) + "->" +
                         std::to_string(to));
            network::VrSite site;
            site.branch_index = it->second;
            site.config = vr_defaults;
            const auto opt = [&](std::size_t i) -> std::optional<double> {
                if (i >= f.size() || trim(f[i]).empty())
                    return std::nullopt;
                return num(i);
            };
            if (auto v = opt(3))
                site.config.v_regulated = *v;
            if (auto v = opt(4))
                site.config.kappa = *v;
            if (auto v = opt(5))
                site.config.deadband_low = *v;
            else
                site.config.deadband_low = site.config.v_regulated - site.config.kappa;
            if (auto v = opt(6))
                site.config.deadband_high = *v;
            else
                site.config.deadband_high = site.config.v_regulated + site.config.kappa;
            if (auto v = opt(7))
                site.config.h_min = static_cast<int>(*v);
            if (auto v = opt(8))
                site.config.h_max = static_cast<int>(*v);
            if (auto v = opt(9))
                site.config.n_op_max = *v;
            feeder.regulators.push_back(site);
        } else {
            fail(path, row.line, 1, "unknown record type '" + record + "'");
        }
    }

    if (!have_source)
        throw InputError(path + ": missing source record");
    if (auto error = network::validate_radial(feeder))
        throw InputError(path + ": " + *error);
    return feeder;
}

BaseLoadData load_baseload_csv(const std::string& path, int horizon_days, double resolution_h)
{
    const std::vector<CsvRow> rows = read_csv(path);
    if (rows.empty())
        throw InputError(path + ": empty base-load file");

    const auto& header = rows[0].fields;
    if (header.size() < 2 || (trim(header[0]) != "timestamp" && trim(header[0]) != "slot"))
        fail(path, rows[0].line, 1, "expected header 'timestamp,p_kw[,q_kvar]'");
    if (trim(header[1]) != "p_kw")
        fail(path, rows[0].line, 2, "expected column 'p_kw'");
    const bool has_q = header.size() > 2 && trim(header[2]) == "q_kvar";

    const int expected_slots = charging::slots_for_horizon(horizon_days, resolution_h);
    const long n_rows = static_cast<long>(rows.size()) - 1;
    if (n_rows != expected_slots) {
        std::ostringstream os;
        os << path << ": " << n_rows << " data rows, expected exactly " << expected_slots
           << " slots (" << horizon_days << " days at " << resolution_h << " h)";
        throw InputError(os.str());
    }

    BaseLoadData data;
    data.p = LoadProfile::zeros(expected_slots, resolution_h);
    if (has_q)
        data.q = LoadProfile::zeros(expected_slots, resolution_h);
    else
        data.q_defaulted = true;

    const long res_minutes = std::lround(resolution_h * 60.0);
    std::optional<long> first_minutes;
    for (long i = 0; i < n_rows; ++i) {
        const CsvRow& row = rows[static_cast<std::size_t>(i + 1)];
        if (static_cast<long>(row.fields.size()) < 2 + (has_q ? 1 : 0))
            fail(path, row.line, static_cast<int>(row.fields.size() + 1), "missing column");
        const std::string stamp = trim(row.fields[0]);
        const bool numeric = !stamp.empty() && stamp.find_first_not_of("0123456789") ==
                                                   std::string::npos;
        if (numeric) {
            const long slot = parse_long(path, row.line, 1, stamp);
            if (slot != i)
                fail(path, row.line, 1,
                     "slot index " + stamp + " out of order, expected " + std::to_string(i));
        } else {
            const long minutes = iso_to_minutes(path, row.line, stamp);
            if (!first_minutes)
                first_minutes = minutes;
            else if (minutes - *first_minutes != i * res_minutes)
                fail(path, row.line, 1,
                     "timestamp spacing is not uniform at the declared resolution");
        }
        const double p_kw = parse_double(path, row.line, 2, trim(row.fields[1]));
        if (p_kw < 0.0)
            fail(path, row.line, 2, "negative base load");
        data.p.values_kw[static_cast<std::size_t>(i)] = p_kw;
        if (has_q)
            data.q->values_kw[static_cast<std::size_t>(i)] =
                parse_double(path, row.line, 3, trim(row.fields[2]));
    }
    return data;
}

std::string config_hash(const std::map<std::string, ParamValue>& params,
                        const std::string& feeder_csv, const std::string& baseload_csv)
{
    const auto fnv = [](std::uint64_t h, const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001B3ull;
        }
        return h;
    };
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (const auto& [key, param] : params) { // std::map: sorted, canonical order
        // path strings and the output directory do not affect results;
        // the data files themselves are hashed below
        if (key == "feeder_csv" || key == "baseload_csv" || key == "out_dir")
            continue;
        h = fnv(h, key);
        h = fnv(h, "=");
        h = fnv(h, param.value);
        h = fnv(h, "\n");
    }
    for (const std::string& path : {feeder_csv, baseload_csv}) {
        std::ifstream in(path, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        h = fnv(h, buf.str());
    }
    char out[17];
    std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
    return out;
}

namespace {

    double param_double(const std::map<std::string, ParamValue>& params, const std::string& key)
    {
        return parse_double("<config>", 0, 0, params.at(key).value);
    }

    long param_long(const std::map<std::string, ParamValue>& params, const std::string& key)
    {
        return parse_long("<config>", 0, 0, params.at(key).value);
    }

    void set_override(std::map<std::string, ParamValue>& params, const std::string& key,
                      const std::string& value)
    {
        params[key] = ParamValue{value, Provenance::Override};
    }

    std::string format_number(double v)
    {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return buf;
    }

    Bundle bundle_from_params(std::map<std::string, ParamValue> params,
                              const std::string& config_dir)
    {
        Bundle bundle;
        bundle.params = std::move(params);
        const auto& p = bundle.params;

        const auto resolve_path = [&](const std::string& raw) {
            if (raw.empty())
                return raw;
            std::filesystem::path path(raw);
            if (path.is_absolute() || config_dir.empty())
                return raw;
            return (std::filesystem::path(config_dir) / path).string();
        };
        bundle.feeder_csv = resolve_path(p.at("feeder_csv").value);
        bundle.baseload_csv = resolve_path(p.at("baseload_csv").value);
        bundle.out_dir = p.at("out_dir").value;
        if (bundle.feeder_csv.empty())
            throw InputError("config: feeder_csv is required");
        if (bundle.baseload_csv.empty())
            throw InputError("config: baseload_csv is required");

        bundle.mcs.master_seed = static_cast<std::uint64_t>(param_long(p, "seed"));
        bundle.mcs.iterations = static_cast<int>(param_long(p, "iterations"));
        bundle.mcs.horizon_days = static_cast<int>(param_long(p, "horizon_days"));
        bundle.mcs.resolution_h = param_double(p, "resolution_h");
        bundle.mcs.threads = static_cast<int>(param_long(p, "threads"));
        bundle.mcs.observed_peak_pl = param_long(p, "observed_peak_pl") != 0;
        const std::string mode = p.at("expectation_mode").value;
        if (mode == "mean_k")
            bundle.mcs.expectation_mode = harness::ExpectationMode::MeanKThenModel;
        else if (mode == "per_iteration")
            bundle.mcs.expectation_mode = harness::ExpectationMode::PerIterationModelThenMean;
        else
            throw InputError("config: expectation_mode must be 'mean_k' or 'per_iteration'");
        if (!p.at("phase_multipliers").value.empty()) {
            for (const std::string& part : split(p.at("phase_multipliers").value, ','))
                bundle.mcs.phase_multipliers.push_back(parse_double("<config>", 0, 0, part));
        }

        if (!p.at("monitored_buses").value.empty()) {
            for (const std::string& part : split(p.at("monitored_buses").value, ','))
                bundle.monitored_bus_ids.push_back(
                    static_cast<int>(parse_long("<config>", 0, 0, part)));
        }

        bundle.base_power_factor = param_double(p, "base_power_factor");
        bundle.pev_power_factor = param_double(p, "pev_power_factor");

        charging::BehaviorDistributions& b = bundle.behavior;
        b.depart_time = {param_double(p, "depart_mean_h"), param_double(p, "depart_sd_h")};
        b.arrive_time = {param_double(p, "arrive_mean_h"), param_double(p, "arrive_sd_h")};
        b.daily_miles = {param_double(p, "miles_mean"), param_double(p, "miles_sd")};
        b.energy_per_mile_kwh = param_double(p, "energy_per_mile_kwh");
        b.service_window_start_h = param_double(p, "service_start_h");
        b.service_window_end_h = param_double(p, "service_end_h");
        b.speed_jitter_sd = param_double(p, "speed_jitter_sd");
        b.ride_service_overnight_charge = param_long(p, "ride_service_overnight_charge") != 0;
        b.avg_speed_by_period.clear();
        for (const std::string& part : split(p.at("service_speeds").value, ',')) {
            // "start-end:mph"
            const std::size_t dash = part.find('-');
            const std::size_t colon = part.find(':');
            if (dash == std::string::npos || colon == std::string::npos || colon < dash)
                throw InputError("config: service_speeds entries must look like '7-10:22'");
            charging::SpeedPeriod period;
            period.start_h = parse_double("<config>", 0, 0, trim(part.substr(0, dash)));
            period.end_h = parse_double("<config>", 0, 0,
                                        trim(part.substr(dash + 1, colon - dash - 1)));
            period.mph = parse_double("<config>", 0, 0, trim(part.substr(colon + 1)));
            b.avg_speed_by_period.push_back(period);
        }

        thermal::ThermalParams& t = bundle.thermal_params;
        t.dtheta_to_rated_k = param_double(p, "dtheta_to_rated_k");
        t.dtheta_h_rated_k = param_double(p, "dtheta_h_rated_k");
        t.tau_to_h = param_double(p, "tau_to_h");
        t.tau_h_h = param_double(p, "tau_h_h");
        t.oil_exponent_x = param_double(p, "oil_exponent_x");
        t.winding_exponent_y = param_double(p, "winding_exponent_y");
        t.loss_ratio_r = param_double(p, "loss_ratio_r");
        t.theta_ambient_c = param_double(p, "theta_ambient_c");

        bundle.aging.alpha = param_double(p, "aging_alpha");
        bundle.aging.beta = param_double(p, "aging_beta");
        bundle.aging.omega = param_double(p, "aging_omega");
        bundle.aging.t_ins_hours = param_double(p, "t_ins_hours");

        economics::TcoParams& tco = bundle.tco;
        tco.c_o = param_double(p, "tco_c_o");
        tco.cl_kw = param_double(p, "tco_cl_kw");
        tco.ll_kw = param_double(p, "tco_ll_kw");
        tco.dc = param_double(p, "tco_dc");
        tco.rf = param_double(p, "tco_rf");
        tco.ec = param_double(p, "tco_ec");
        tco.gamma = param_double(p, "tco_gamma");
        tco.interest = param_double(p, "tco_interest");
        tco.n_hours = param_double(p, "tco_n_hours");
        tco.t_ins_years = param_double(p, "tco_eval_period_yr");

        regulator::VrConfig vr_defaults;
        vr_defaults.v_regulated = param_double(p, "vr_v_regulated");
        vr_defaults.kappa = param_double(p, "vr_kappa");
        vr_defaults.deadband_low = p.at("vr_deadband_low").value.empty()
                                       ? vr_defaults.v_regulated - vr_defaults.kappa
                                       : param_double(p, "vr_deadband_low");
        vr_defaults.deadband_high = p.at("vr_deadband_high").value.empty()
                                        ? vr_defaults.v_regulated + vr_defaults.kappa
                                        : param_double(p, "vr_deadband_high");
        vr_defaults.h_min = static_cast<int>(param_long(p, "vr_h_min"));
        vr_defaults.h_max = static_cast<int>(param_long(p, "vr_h_max"));
        vr_defaults.n_op_max = param_double(p, "vr_n_op_max");

        // scenario selection: catalog index, mixed PL, or custom
        bundle.scenario_index = static_cast<int>(param_long(p, "scenario"));
        if (!p.at("pl_percent").value.empty())
            bundle.pl_percent = param_double(p, "pl_percent");
        bundle.area = p.at("area").value;
        bundle.mixed_slow_battery_kwh = param_double(p, "mixed_slow_battery_kwh");
        bundle.mixed_fast_battery_kwh = param_double(p, "mixed_fast_battery_kwh");

        const std::string custom_class = p.at("custom_vehicle_class").value;
        if (!custom_class.empty()) {
            charging::ChargingScenario custom;
            if (custom_class == "commuter")
                custom.vehicle_class = charging::VehicleClass::Commuter;
            else if (custom_class == "ride_service")
                custom.vehicle_class = charging::VehicleClass::RideService;
            else
                throw InputError("config: custom_vehicle_class must be commuter|ride_service");
            const std::string custom_mode = p.at("custom_charge_mode").value;
            if (custom_mode == "slow")
                custom.charge_mode = charging::ChargeMode::Slow;
            else if (custom_mode == "fast")
                custom.charge_mode = charging::ChargeMode::Fast;
            else
                throw InputError("config: custom_charge_mode must be slow|fast");
            custom.fleet_count = static_cast<int>(param_long(p, "custom_fleet_count"));
            custom.charge_power_kw = param_double(p, "custom_charge_power_kw");
            custom.battery_kwh = param_double(p, "custom_battery_kwh");
            custom.anxiety_threshold = param_double(p, "anxiety_threshold");
            custom.behavior = bundle.behavior;
            bundle.custom_scenario = custom;
        }
        const int forms = (bundle.scenario_index != 0 ? 1 : 0) + (bundle.pl_percent ? 1 : 0) +
                          (bundle.custom_scenario ? 1 : 0);
        if (forms > 1)
            throw InputError(
                "config: choose exactly one of scenario index, pl_percent, or custom scenario");

        bundle.anxiety_threshold = param_double(p, "anxiety_threshold");
        if (bundle.custom_scenario)
            bundle.custom_scenario->anxiety_threshold = bundle.anxiety_threshold;

        bundle.feeder = load_feeder_csv(bundle.feeder_csv, vr_defaults);
        const BaseLoadData base = load_baseload_csv(bundle.baseload_csv, bundle.mcs.horizon_days,
                                                    bundle.mcs.resolution_h);
        bundle.base_p = base.p;
        bundle.base_q = base.q;
        if (base.q_defaulted) {
            std::ostringstream os;
            os << bundle.baseload_csv << ": no q_kvar column; reactive power defaulted from "
               << "power factor " << bundle.base_power_factor;
            bundle.warnings.push_back(os.str());
        }
        if (bundle.monitored_bus_ids.empty()) {
            for (const network::VrSite& site : bundle.feeder.regulators)
                bundle.monitored_bus_ids.push_back(
                    bundle.feeder.branches[static_cast<std::size_t>(site.branch_index)].to);
        }

        bundle.config_hash = config_hash(bundle.params, bundle.feeder_csv, bundle.baseload_csv);
        return bundle;
    }

} // namespace

harness::AssessmentInputs Bundle::assessment_inputs() const
{
    harness::AssessmentInputs inputs;
    inputs.feeder = &feeder;
    inputs.base_p = &base_p;
    inputs.base_q = base_q ? &*base_q : nullptr;
    inputs.base_power_factor = base_power_factor;
    inputs.pev_power_factor = pev_power_factor;
    inputs.anxiety_threshold = anxiety_threshold;
    inputs.behavior = behavior;
    inputs.thermal_params = thermal_params;
    inputs.thermal_params.s_rated_kva = feeder.s_rated_kva;
    inputs.aging = aging;
    inputs.tco = tco;
    inputs.monitored_bus_ids = monitored_bus_ids;
    return inputs;
}

harness::ScenarioSelection Bundle::selection() const
{
    if (custom_scenario)
        return *custom_scenario;
    if (pl_percent)
        return mixed_spec(*pl_percent);
    if (scenario_index >= 1 && scenario_index <= 10)
        return scenario_index;
    throw InputError("config: no scenario selected (set scenario, pl_percent, or custom_*)");
}

harness::MixedFleetSpec Bundle::mixed_spec(double pl) const
{
    harness::MixedFleetSpec spec;
    spec.pl_percent = pl;
    if (area == "suburban") {
        spec.slow_share = 0.60;
        spec.fast_share = 0.40;
    } else if (area == "urban") {
        spec.slow_share = 0.70;
        spec.fast_share = 0.30;
    } else if (area == "rural") {
        spec.slow_share = 0.80;
        spec.fast_share = 0.20;
    } else {
        throw InputError("config: area must be urban|suburban|rural");
    }
    spec.base_peak_kw = base_p.peak_kw();
    spec.slow_power_kw = parse_double("<config>", 0, 0, params.at("mixed_slow_power_kw").value);
    spec.fast_power_kw = parse_double("<config>", 0, 0, params.at("mixed_fast_power_kw").value);
    spec.slow_battery_kwh = mixed_slow_battery_kwh;
    spec.fast_battery_kwh = mixed_fast_battery_kwh;
    return spec;
}

Bundle ingest(const std::string& config_path, const Overrides& overrides)
{
    std::ifstream in(config_path);
    if (!in)
        throw InputError("cannot open config file: " + config_path);

    std::map<std::string, ParamValue> params = default_params();
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        const std::size_t hash_pos = line.find('#');
        if (hash_pos != std::string::npos)
            line = line.substr(0, hash_pos);
        const std::string stripped = trim(line);
        if (stripped.empty())
            continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            fail(config_path, line_no, 1, "expected 'key = value'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (find_registry(key) == nullptr)
            fail(config_path, line_no, 1, "unknown parameter '" + key + "'");
        params[key] = ParamValue{value, Provenance::Override};
    }

    if (overrides.seed)
        set_override(params, "seed", std::to_string(*overrides.seed));
    if (overrides.iterations)
        set_override(params, "iterations", std::to_string(*overrides.iterations));
    if (overrides.scenario_index)
        set_override(params, "scenario", std::to_string(*overrides.scenario_index));
    if (overrides.pl_percent)
        set_override(params, "pl_percent", format_number(*overrides.pl_percent));
    if (overrides.area)
        set_override(params, "area", *overrides.area);
    if (overrides.out_dir)
        set_override(params, "out_dir", *overrides.out_dir);

    const std::string dir = std::filesystem::path(config_path).parent_path().string();
    return bundle_from_params(std::move(params), dir);
}

Bundle ingest_manifest(const std::string& manifest_path)
{
    std::ifstream in(manifest_path);
    if (!in)
        throw InputError("cannot open manifest: " + manifest_path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw InputError(std::string("manifest parse error: ") + e.what());
    }
    if (!doc.contains("params") || !doc["params"].is_object())
        throw InputError("manifest: missing params object");

    std::map<std::string, ParamValue> params = default_params();
    for (const auto& [key, entry] : doc["params"].items()) {
        if (find_registry(key) == nullptr)
            throw InputError("manifest: unknown parameter '" + key + "'");
        ParamValue pv;
        pv.value = entry.at("value").get<std::string>();
        const std::string prov = entry.at("provenance").get<std::string>();
        pv.provenance = prov == "published" ? Provenance::Published
                        : prov == "override" ? Provenance::Override
                                             : Provenance::Default;
        params[key] = pv;
    }
    const std::string dir = std::filesystem::path(manifest_path).parent_path().string();
    return bundle_from_params(std::move(params), dir);
}

} // namespace pevgrid::config
