#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gelkit {

/// One monomer species: counts of functional groups per group type, and its
/// fraction among all monomers.
struct Species {
    std::vector<int> groups;
    double fraction = 0.0;

    bool operator==(const Species&) const = default;
};

/// Initial monomer distribution P over functionality vectors.
struct MonomerDistribution {
    std::vector<Species> species;

    int group_types() const { return species.empty() ? 0 : static_cast<int>(species.front().groups.size()); }
    /// Largest functionality of each group type over all species.
    std::vector<int> max_functionality() const;
};

/// Symmetric non-negative group-compatibility matrix; w(m, n) is the relative
/// rate of an m-n bond and 0 forbids it.
struct WeightMatrix {
    Eigen::MatrixXd w;

    int size() const { return static_cast<int>(w.rows()); }
    double operator()(int m, int n) const { return w(m, n); }
};

struct SystemSpec {
    MonomerDistribution distribution;
    WeightMatrix weights;

    int group_types() const { return distribution.group_types(); }
};

/// First and second partial moments of the initial distribution.
struct MomentSet {
    Eigen::VectorXd nu1;
    Eigen::MatrixXd nu2;

    int group_types() const { return static_cast<int>(nu1.size()); }

    /// Two-type aliases nu_mn = sum I^m J^n P(I, J) for m + n <= 2.
    double nu(int m, int n) const;
};

struct ValidationReport {
    std::vector<std::string> advisories;
    /// Group types present in the system (nu_k > 0) whose row of W is zero.
    std::vector<int> inert_types;
};

/// Checks every invariant of the spec; throws SpecError naming the first
/// violation. Row sums of W different from 1 are reported, not rejected.
ValidationReport validate_spec(const SystemSpec& spec);

/// Builds and validates a spec.
SystemSpec make_spec(MonomerDistribution distribution, Eigen::MatrixXd weights);

/// Sum over species of fraction * prod_k I_k^{e_k}.
double partial_moment(const MonomerDistribution& dist, std::span<const int> exponents);

MomentSet moment_set(const MonomerDistribution& dist);

} // namespace gelkit
