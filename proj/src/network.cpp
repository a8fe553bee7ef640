#include "pevgrid/network.hpp"

#include "pevgrid/errors.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <sstream>

namespace pevgrid::network {

std::optional<std::string> validate_radial(const FeederModel& feeder)
{
    std::ostringstream os;
    if (feeder.buses.empty()) {
        return "feeder has no buses";
    }
    if (!(feeder.s_rated_kva > 0.0)) {
        return "nonpositive transformer rating";
    }
    if (!(feeder.s_base_kva > 0.0)) {
        return "nonpositive power base";
    }
    if (!(feeder.v_source_pu > 0.0)) {
        return "nonpositive source voltage";
    }

    std::set<int> ids;
    for (const Bus& bus : feeder.buses) {
        if (!ids.insert(bus.id).second) {
            os << "duplicate bus id " << bus.id;
            return os.str();
        }
        if (bus.load_weight < 0.0) {
            os << "negative load weight on bus " << bus.id;
            return os.str();
        }
    }
    if (ids.count(feeder.source_bus) == 0) {
        os << "source bus " << feeder.source_bus << " is not declared";
        return os.str();
    }

    if (feeder.branches.size() != feeder.buses.size() - 1) {
        os << "branch count " << feeder.branches.size() << " != buses-1 ("
           << feeder.buses.size() - 1 << "); not a tree";
        return os.str();
    }
    for (std::size_t i = 0; i < feeder.branches.size(); ++i) {
        const Branch& br = feeder.branches[i];
        if (ids.count(br.from) == 0 || ids.count(br.to) == 0) {
            os << "branch " << i << " references undeclared bus "
               << (ids.count(br.from) == 0 ? br.from : br.to);
            return os.str();
        }
        if (br.r_pu < 0.0 || br.x_pu < 0.0) {
            os << "negative impedance on branch " << i;
            return os.str();
        }
        if (br.from == br.to) {
            os << "branch " << i << " is a self-loop at bus " << br.from;
            return os.str();
        }
    }
    for (const VrSite& site : feeder.regulators) {
        if (site.branch_index < 0 ||
            site.branch_index >= static_cast<int>(feeder.branches.size())) {
            os << "regulator attached to unknown branch " << site.branch_index;
            return os.str();
        }
        try {
            regulator::validate_config(site.config);
        } catch (const InputError& e) {
            return std::string(e.what());
        }
    }

    // connectivity; with n-1 edges, full reachability also excludes cycles
    std::map<int, std::vector<int>> adjacency;
    for (const Branch& br : feeder.branches) {
        adjacency[br.from].push_back(br.to);
        adjacency[br.to].push_back(br.from);
    }
    std::set<int> seen{feeder.source_bus};
    std::queue<int> frontier;
    frontier.push(feeder.source_bus);
    while (!frontier.empty()) {
        const int u = frontier.front();
        frontier.pop();
        for (int v : adjacency[u]) {
            if (seen.insert(v).second)
                frontier.push(v);
        }
    }
    if (seen.size() != ids.size()) {
        for (int id : ids) {
            if (seen.count(id) == 0) {
                os << "bus " << id << " is disconnected from the substation";
                return os.str();
            }
        }
    }
    return std::nullopt;
}

SweepSolver::SweepSolver(const FeederModel& feeder) : feeder_(&feeder)
{
    if (auto error = validate_radial(feeder))
        throw InputError("invalid feeder: " + *error);

    for (std::size_t i = 0; i < feeder.buses.size(); ++i)
        id_to_index_[feeder.buses[i].id] = static_cast<int>(i);
    source_index_ = id_to_index_.at(feeder.source_bus);

    // adjacency with branch back-references, in declaration order
    std::vector<std::vector<std::pair<int, int>>> adjacency(feeder.buses.size());
    for (std::size_t b = 0; b < feeder.branches.size(); ++b) {
        const int from = id_to_index_.at(feeder.branches[b].from);
        const int to = id_to_index_.at(feeder.branches[b].to);
        adjacency[from].emplace_back(to, static_cast<int>(b));
        adjacency[to].emplace_back(from, static_cast<int>(b));
    }

    std::map<int, int> branch_site; // original branch index -> regulator site
    for (std::size_t s = 0; s < feeder.regulators.size(); ++s)
        branch_site[feeder.regulators[s].branch_index] = static_cast<int>(s);

    // BFS from the source; branches re-oriented parent -> child
    parent_branch_.assign(feeder.buses.size(), -1);
    branch_to_oriented_.assign(feeder.branches.size(), -1);
    std::vector<bool> visited(feeder.buses.size(), false);
    visited[static_cast<std::size_t>(source_index_)] = true;
    std::queue<int> frontier;
    frontier.push(source_index_);
    bus_order_.push_back(source_index_);
    while (!frontier.empty()) {
        const int u = frontier.front();
        frontier.pop();
        for (const auto& [v, b] : adjacency[static_cast<std::size_t>(u)]) {
            if (visited[static_cast<std::size_t>(v)])
                continue;
            visited[static_cast<std::size_t>(v)] = true;
            OrientedBranch ob;
            ob.parent = u;
            ob.child = v;
            ob.z = Complex(feeder.branches[static_cast<std::size_t>(b)].r_pu,
                           feeder.branches[static_cast<std::size_t>(b)].x_pu);
            if (auto it = branch_site.find(b); it != branch_site.end())
                ob.regulator_site = it->second;
            ob.original_index = b;
            branch_to_oriented_[static_cast<std::size_t>(b)] =
                static_cast<int>(oriented_.size());
            parent_branch_[static_cast<std::size_t>(v)] = static_cast<int>(oriented_.size());
            oriented_.push_back(ob);
            bus_order_.push_back(v);
            frontier.push(v);
        }
    }

    reg_child_bus_.assign(feeder.regulators.size(), -1);
    for (const OrientedBranch& ob : oriented_) {
        if (ob.regulator_site >= 0)
            reg_child_bus_[static_cast<std::size_t>(ob.regulator_site)] = ob.child;
    }
}

int SweepSolver::bus_index(int bus_id) const
{
    const auto it = id_to_index_.find(bus_id);
    if (it == id_to_index_.end()) {
        std::ostringstream os;
        os << "unknown bus id " << bus_id;
        throw InputError(os.str());
    }
    return it->second;
}

void SweepSolver::solve_into(std::span<const Complex> loads_pu, std::span<const int> taps,
                             Workspace& ws) const
{
    const std::size_t n = bus_order_.size();
    if (loads_pu.size() != n)
        throw InputError("solve: load vector size does not match bus count");
    if (taps.size() != feeder_->regulators.size())
        throw InputError("solve: tap vector size does not match regulator count");
    for (const Complex& s : loads_pu) {
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
            throw InputError("solve: non-finite load");
    }

    // ideal ratio per oriented branch
    ws.v.assign(n, Complex(feeder_->v_source_pu, 0.0));
    ws.i_subtree.assign(n, Complex(0.0, 0.0));
    ws.i_branch.assign(oriented_.size(), Complex(0.0, 0.0));

    const auto ratio_of = [&](const OrientedBranch& ob) {
        if (ob.regulator_site < 0)
            return 1.0;
        const regulator::VrConfig& cfg =
            feeder_->regulators[static_cast<std::size_t>(ob.regulator_site)].config;
        return 1.0 + taps[static_cast<std::size_t>(ob.regulator_site)] * cfg.kappa;
    };

    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        // backward: subtree currents from the leaves toward the source
        for (std::size_t i = 0; i < n; ++i)
            ws.i_subtree[i] = std::conj(loads_pu[i] / ws.v[i]);
        for (std::size_t i = n; i-- > 1;) {
            const int bus = bus_order_[i];
            const int pb = parent_branch_[static_cast<std::size_t>(bus)];
            const OrientedBranch& ob = oriented_[static_cast<std::size_t>(pb)];
            ws.i_branch[static_cast<std::size_t>(pb)] =
                ws.i_subtree[static_cast<std::size_t>(bus)];
            // the ideal transformer at the branch head conserves power:
            // upstream current scales with the ratio
            ws.i_subtree[static_cast<std::size_t>(ob.parent)] +=
                ratio_of(ob) * ws.i_branch[static_cast<std::size_t>(pb)];
        }

        // forward: voltages from the source toward the leaves
        double max_delta = 0.0;
        for (std::size_t b = 0; b < oriented_.size(); ++b) {
            const OrientedBranch& ob = oriented_[b];
            const Complex v_new = ratio_of(ob) * ws.v[static_cast<std::size_t>(ob.parent)] -
                                  ob.z * ws.i_branch[b];
            max_delta = std::max(max_delta,
                                 std::abs(v_new - ws.v[static_cast<std::size_t>(ob.child)]));
            ws.v[static_cast<std::size_t>(ob.child)] = v_new;
        }
        if (max_delta < kTolerancePu && sweep > 0)
            return;
    }
    throw SolveError("power flow did not converge within 100 sweeps");
}

double SweepSolver::substation_s_pu(const Workspace& ws) const
{
    return std::abs(ws.v[static_cast<std::size_t>(source_index_)] *
                    std::conj(ws.i_subtree[static_cast<std::size_t>(source_index_)]));
}

SnapshotResult SweepSolver::solve(std::span<const Complex> loads_pu,
                                  std::span<const int> taps) const
{
    Workspace ws;
    solve_into(loads_pu, taps, ws);

    SnapshotResult result;
    result.v_pu.resize(bus_order_.size());
    for (std::size_t i = 0; i < bus_order_.size(); ++i)
        result.v_pu[i] = std::abs(ws.v[i]);
    result.branch_flow_pu.assign(feeder_->branches.size(), Complex(0.0, 0.0));
    for (std::size_t b = 0; b < oriented_.size(); ++b) {
        const OrientedBranch& ob = oriented_[b];
        double ratio = 1.0;
        if (ob.regulator_site >= 0) {
            const regulator::VrConfig& cfg =
                feeder_->regulators[static_cast<std::size_t>(ob.regulator_site)].config;
            ratio = 1.0 + taps[static_cast<std::size_t>(ob.regulator_site)] * cfg.kappa;
        }
        // sending-end power at the parent bus
        result.branch_flow_pu[static_cast<std::size_t>(ob.original_index)] =
            ws.v[static_cast<std::size_t>(ob.parent)] * std::conj(ratio * ws.i_branch[b]);
    }
    result.substation_s_kva = substation_s_pu(ws) * feeder_->s_base_kva;
    result.load_factor_k = result.substation_s_kva / feeder_->s_rated_kva;
    return result;
}

SnapshotResult solve_snapshot(const FeederModel& feeder,
                              const std::map<int, Complex>& bus_loads_kw_kvar,
                              std::span<const int> taps)
{
    SweepSolver solver(feeder);
    std::vector<Complex> loads_pu(static_cast<std::size_t>(solver.bus_count()),
                                  Complex(0.0, 0.0));
    for (const auto& [bus_id, s_kw] : bus_loads_kw_kvar)
        loads_pu[static_cast<std::size_t>(solver.bus_index(bus_id))] = s_kw / feeder.s_base_kva;
    std::vector<int> zero_taps;
    if (taps.empty()) {
        zero_taps.assign(feeder.regulators.size(), 0);
        taps = zero_taps;
    }
    return solver.solve(loads_pu, taps);
}

BusLoadSeries BusLoadSeries::zeros(const SweepSolver& solver, int horizon_slots,
                                   double resolution_h)
{
    BusLoadSeries series;
    series.resolution_h = resolution_h;
    series.horizon_slots = horizon_slots;
    series.bus_count = solver.bus_count();
    series.s_pu.assign(static_cast<std::size_t>(horizon_slots) * solver.bus_count(),
                       Complex(0.0, 0.0));
    return series;
}

BusLoadSeries allocate_to_buses(const SweepSolver& solver, const LoadProfile& p_profile,
                                double power_factor, const LoadProfile* q_profile)
{
    if (!(power_factor > 0.0 && power_factor <= 1.0))
        throw InputError("allocate_to_buses: power factor must lie in (0, 1]");
    if (q_profile != nullptr && (q_profile->horizon_slots != p_profile.horizon_slots ||
                                 q_profile->resolution_h != p_profile.resolution_h))
        throw InputError("allocate_to_buses: q profile grid mismatch");

    const FeederModel& feeder = solver.feeder();
    double weight_sum = 0.0;
    for (const Bus& bus : feeder.buses)
        if (bus.is_load)
            weight_sum += bus.load_weight;
    if (!(weight_sum > 0.0))
        throw InputError("allocate_to_buses: feeder has no load buses with positive weight");

    const double tan_phi = std::tan(std::acos(power_factor));
    BusLoadSeries series = BusLoadSeries::zeros(solver, p_profile.horizon_slots,
                                                p_profile.resolution_h);
    for (int slot = 0; slot < p_profile.horizon_slots; ++slot) {
        const double p_kw = p_profile.values_kw[static_cast<std::size_t>(slot)];
        const double q_kvar =
            q_profile != nullptr ? q_profile->values_kw[static_cast<std::size_t>(slot)]
                                 : p_kw * tan_phi;
        const Complex s_total(p_kw / feeder.s_base_kva, q_kvar / feeder.s_base_kva);
        for (std::size_t i = 0; i < feeder.buses.size(); ++i) {
            const Bus& bus = feeder.buses[i];
            if (!bus.is_load || bus.load_weight <= 0.0)
                continue;
            series.at(slot, static_cast<int>(i)) = s_total * (bus.load_weight / weight_sum);
        }
    }
    return series;
}

TimeSeriesResult run_timeseries(const SweepSolver& solver, const BusLoadSeries& base,
                                const BusLoadSeries& pev, const TimeSeriesOptions& options)
{
    if (base.horizon_slots != pev.horizon_slots || base.resolution_h != pev.resolution_h)
        throw InputError("run_timeseries: base and PEV series grids differ");
    if (base.bus_count != solver.bus_count() || pev.bus_count != solver.bus_count())
        throw InputError("run_timeseries: series bus count does not match the feeder");

    const FeederModel& feeder = solver.feeder();
    const int slots = base.horizon_slots;
    const int n_reg = solver.regulator_count();

    TimeSeriesResult result;
    result.k_series.reserve(static_cast<std::size_t>(slots));
    result.substation_kva.reserve(static_cast<std::size_t>(slots));
    result.monitored_bus_ids = options.monitored_bus_ids;
    result.v_monitored.assign(result.monitored_bus_ids.size(), {});
    for (auto& series : result.v_monitored)
        series.reserve(static_cast<std::size_t>(slots));
    result.vr_states.assign(static_cast<std::size_t>(n_reg), regulator::VrState{});

    std::vector<int> monitor_idx;
    monitor_idx.reserve(result.monitored_bus_ids.size());
    for (int id : result.monitored_bus_ids)
        monitor_idx.push_back(solver.bus_index(id));

    std::vector<int> taps(static_cast<std::size_t>(n_reg), 0);
    std::vector<Complex> loads(static_cast<std::size_t>(solver.bus_count()));
    std::vector<double> v_reg_prev(static_cast<std::size_t>(n_reg), feeder.v_source_pu);
    SweepSolver::Workspace ws;

    for (int slot = 0; slot < slots; ++slot) {
        // one control action per slot from the previous slot's voltages;
        // the first slot runs on the initial taps
        if (slot > 0) {
            for (int r = 0; r < n_reg; ++r) {
                result.vr_states[static_cast<std::size_t>(r)] = regulator::decide_tap(
                    std::move(result.vr_states[static_cast<std::size_t>(r)]),
                    v_reg_prev[static_cast<std::size_t>(r)],
                    feeder.regulators[static_cast<std::size_t>(r)].config);
                taps[static_cast<std::size_t>(r)] =
                    result.vr_states[static_cast<std::size_t>(r)].h;
            }
        } else {
            for (int r = 0; r < n_reg; ++r)
                result.vr_states[static_cast<std::size_t>(r)].record_slot();
        }

        const std::size_t row = static_cast<std::size_t>(slot) * solver.bus_count();
        for (int b = 0; b < solver.bus_count(); ++b)
            loads[static_cast<std::size_t>(b)] =
                base.s_pu[row + static_cast<std::size_t>(b)] +
                pev.s_pu[row + static_cast<std::size_t>(b)];

        try {
            solver.solve_into(loads, taps, ws);
        } catch (const SolveError&) {
            std::ostringstream os;
            os << "power flow did not converge at slot " << slot;
            if (options.iteration_index >= 0)
                os << " (iteration " << options.iteration_index << ")";
            throw SolveError(os.str(), slot, options.iteration_index);
        }

        const double s_pu = solver.substation_s_pu(ws);
        result.substation_kva.push_back(s_pu * feeder.s_base_kva);
        result.k_series.push_back(s_pu * feeder.s_base_kva / feeder.s_rated_kva);
        for (std::size_t m = 0; m < monitor_idx.size(); ++m)
            result.v_monitored[m].push_back(
                std::abs(ws.v[static_cast<std::size_t>(monitor_idx[m])]));
        for (int r = 0; r < n_reg; ++r)
            v_reg_prev[static_cast<std::size_t>(r)] =
                std::abs(ws.v[static_cast<std::size_t>(solver.regulated_bus_index(r))]);
    }
    return result;
}

} // namespace pevgrid::network
