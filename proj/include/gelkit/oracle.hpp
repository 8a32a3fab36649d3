#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gelkit/chemistry.hpp"
#include "gelkit/degrees.hpp"
#include "gelkit/kinetics.hpp"
#include "gelkit/ode.hpp"

namespace gelkit {

// ---------------------------------------------------------------------------
// Master equation
// ---------------------------------------------------------------------------

/// Concentrations M(i, I) for every species at time t.
struct MasterState {
    double t = 0.0;
    std::vector<Species> species;
    std::vector<DegreeTable> tables;

    /// mu_k = sum_I sum_i i_k M(i, I).
    Eigen::VectorXd mu() const;
    /// sum_i M(i, I) for species index s.
    double species_mass(std::size_t s) const;
};

/// Dense solution of the full master equation.
class MasterTrajectory {
public:
    MasterTrajectory(SystemSpec spec, std::vector<DegreeTable> layout, ode::DenseSolution solution);

    const SystemSpec& spec() const { return spec_; }
    double t_end() const { return solution_.t_end(); }
    MasterState state(double t) const;

private:
    SystemSpec spec_;
    std::vector<DegreeTable> layout_;
    ode::DenseSolution solution_;
};

/// Largest per-species rectangle accepted by integrate_master.
inline constexpr std::size_t kMaxMasterStates = 10000;

/// Integrates dM/dt over all (i, I) with rates W (nu1 - mu(t)), mu taken from
/// the state itself. Throws DomainError when a species rectangle is too large.
MasterTrajectory integrate_master(const SystemSpec& spec, double t_end, const OdeTolerance& tol = {1e-10, 1e-14});

// ---------------------------------------------------------------------------
// Stochastic network growth
// ---------------------------------------------------------------------------

struct BondEvent {
    double t = 0.0;
    int type_a = 0;
    int type_b = 0;
    std::int32_t monomer_a = 0;
    std::int32_t monomer_b = 0;

    bool operator==(const BondEvent&) const = default;
};

struct McSample {
    double t = 0.0;
    /// Bond ends of each group type per monomer.
    std::vector<double> mu_hat;
    double largest_fraction = 0.0;
    /// sum of s^2 over all components but the largest, divided by N.
    double susceptibility = 0.0;
};

struct McOptions {
    std::int64_t monomers = 100000;
    double t_end = 1.0;
    std::uint64_t seed = 1;
    /// Times at which the state is sampled (ascending, within [0, t_end]).
    std::vector<double> sample_times;
    bool record_events = true;
};

struct McRun {
    std::int64_t monomers = 0;
    std::uint64_t seed = 0;
    double t_end = 0.0;
    /// Simulation time reached (t_end, or the time the system became absorbing).
    double t_final = 0.0;
    bool absorbed = false;

    std::vector<BondEvent> events;
    std::vector<McSample> samples;

    std::vector<std::int64_t> initial_groups;
    std::vector<std::int64_t> free_groups;
    /// degrees[m * r + k]: bonds formed by monomer m on groups of type k.
    std::vector<std::int32_t> degrees;
    /// count_by_size[s]: number of components of size s at t_final.
    std::vector<std::int64_t> count_by_size;
    std::int64_t largest = 1;

    /// First time the largest component exceeded N^(2/3).
    std::optional<double> threshold_time;
    double susceptibility_peak_time = 0.0;
    double susceptibility_peak = 0.0;

    /// Fraction of monomers in components of size s (monomer-weighted histogram).
    double size_fraction(int s) const;
};

McRun simulate(const SystemSpec& spec, const McOptions& options);

/// Independent replicas with seeds seed, seed + 1, ... run on a worker pool.
std::vector<McRun> simulate_replicas(const SystemSpec& spec, const McOptions& options, int replicas, int threads = 0);

struct GiantOnset {
    /// Earliest time the largest component exceeded N^(2/3).
    std::optional<double> threshold_time;
    /// Time of the maximum of the finite-cluster susceptibility.
    std::optional<double> susceptibility_peak_time;

    bool observed() const { return threshold_time.has_value(); }
};

GiantOnset giant_onset(const McRun& run);

} // namespace gelkit
