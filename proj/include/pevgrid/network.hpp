#ifndef PEVGRID_NETWORK_HPP
#define PEVGRID_NETWORK_HPP

#include "pevgrid/load_profile.hpp"
#include "pevgrid/regulator.hpp"

#include <complex>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pevgrid::network {

using Complex = std::complex<double>;

struct Bus {
    int id = 0;
    bool is_load = false;
    double load_weight = 0.0; // share of the substation-level load series
};

struct Branch {
    int from = 0;
    int to = 0;
    double r_pu = 0.0;
    double x_pu = 0.0;
};

// Voltage regulator attached to a branch: an ideal ratio (1 + h*kappa)
// applied to everything downstream of the branch head.
struct VrSite {
    int branch_index = -1;
    regulator::VrConfig config{};
};

// Radial feeder: a branch tree rooted at the substation source bus, plus
// the substation transformer rating used for the load factor K = s / s_R.
struct FeederModel {
    std::vector<Bus> buses;
    std::vector<Branch> branches;
    int source_bus = 0;
    double v_source_pu = 1.0;
    double s_rated_kva = 10000.0; // substation transformer rating
    double s_base_kva = 10000.0;
    double v_base_kv = 12.47;
    std::vector<VrSite> regulators;
};

// Tree/connectivity/parameter validation; nullopt means the feeder is a
// well-formed radial network, otherwise the first violation found.
std::optional<std::string> validate_radial(const FeederModel& feeder);

struct SnapshotResult {
    std::vector<double> v_pu;          // per bus index
    std::vector<Complex> branch_flow_pu; // sending-end complex power per branch
    double substation_s_kva = 0.0;
    double load_factor_k = 0.0;
};

// Forward-backward sweep solver over a validated feeder. Stateless after
// construction; solve() is reentrant given a caller-owned workspace.
class SweepSolver {
public:
    explicit SweepSolver(const FeederModel& feeder); // throws InputError when invalid

    struct Workspace {
        std::vector<Complex> v;
        std::vector<Complex> i_subtree;
        std::vector<Complex> i_branch;
    };

    static constexpr double kTolerancePu = 1e-9;
    static constexpr int kMaxSweeps = 100;

    // loads_pu: complex power per bus index; taps: one position per
    // regulator site. Throws SolveError on non-convergence.
    SnapshotResult solve(std::span<const Complex> loads_pu, std::span<const int> taps) const;

    // Allocation-free variant for the time-series hot path.
    void solve_into(std::span<const Complex> loads_pu, std::span<const int> taps,
                    Workspace& ws) const;

    double substation_s_pu(const Workspace& ws) const;

    const FeederModel& feeder() const { return *feeder_; }
    int bus_count() const { return static_cast<int>(bus_order_.size()); }
    int bus_index(int bus_id) const; // throws InputError for unknown ids
    int source_index() const { return source_index_; }
    int regulator_count() const { return static_cast<int>(feeder_->regulators.size()); }
    // bus index regulated by site r (the branch's downstream bus)
    int regulated_bus_index(int site) const { return reg_child_bus_[site]; }

private:
    const FeederModel* feeder_;
    std::map<int, int> id_to_index_;
    std::vector<int> bus_order_;    // BFS order, source first
    std::vector<int> parent_branch_; // per bus index, -1 for source
    // branches re-oriented parent -> child, in BFS order
    struct OrientedBranch {
        int parent = -1;
        int child = -1;
        Complex z{};
        int regulator_site = -1; // index into feeder regulators, -1 if plain
        int original_index = -1;
    };
    std::vector<OrientedBranch> oriented_;
    std::vector<int> branch_to_oriented_;
    std::vector<int> reg_child_bus_;
    int source_index_ = 0;
};

// Convenience wrapper taking loads in kW/kvar keyed by bus id.
SnapshotResult solve_snapshot(const FeederModel& feeder,
                              const std::map<int, Complex>& bus_loads_kw_kvar,
                              std::span<const int> taps = {});

// Dense per-bus complex power series in pu, slot-major.
struct BusLoadSeries {
    double resolution_h = 0.25;
    int horizon_slots = 0;
    int bus_count = 0;
    std::vector<Complex> s_pu; // [slot * bus_count + bus_index]

    Complex at(int slot, int bus) const { return s_pu[static_cast<std::size_t>(slot) * bus_count + bus]; }
    Complex& at(int slot, int bus) { return s_pu[static_cast<std::size_t>(slot) * bus_count + bus]; }

    static BusLoadSeries zeros(const SweepSolver& solver, int horizon_slots, double resolution_h);
};

// Spreads a substation-level profile across load buses by their load
// weights; reactive power from the power factor unless a matching kvar
// profile is supplied.
BusLoadSeries allocate_to_buses(const SweepSolver& solver, const LoadProfile& p_profile,
                                double power_factor,
                                const LoadProfile* q_profile = nullptr);

struct TimeSeriesOptions {
    std::vector<int> monitored_bus_ids; // extra voltage recordings
    long iteration_index = -1;          // reported in SolveError context
};

struct TimeSeriesResult {
    std::vector<double> k_series;
    std::vector<double> substation_kva;
    std::vector<int> monitored_bus_ids;
    std::vector<std::vector<double>> v_monitored; // [monitor][slot]
    std::vector<regulator::VrState> vr_states;    // final states with history
};

// Quasi-static time series: per slot the total load is assembled, each
// regulator takes one control action from the previous slot's solved
// voltage at its downstream bus (head-to-tail order), the snapshot is
// solved and K recorded. Tap positions persist across slots.
TimeSeriesResult run_timeseries(const SweepSolver& solver, const BusLoadSeries& base,
                                const BusLoadSeries& pev, const TimeSeriesOptions& options = {});

} // namespace pevgrid::network

#endif
