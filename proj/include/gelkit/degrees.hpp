#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gelkit/chemistry.hpp"
#include "gelkit/kinetics.hpp"

namespace gelkit {

/// Dense table over the rectangle prod_k {0..extent_k - 1}; the last index varies fastest.
class DegreeTable {
public:
    DegreeTable() = default;
    explicit DegreeTable(std::vector<int> extents);

    const std::vector<int>& extents() const { return extents_; }
    std::size_t size() const { return values_.size(); }
    int rank() const { return static_cast<int>(extents_.size()); }

    std::size_t flat_index(std::span<const int> degrees) const;
    std::vector<int> degrees(std::size_t flat) const;
    bool contains(std::span<const int> degrees) const;

    double& operator[](std::size_t flat) { return values_[flat]; }
    double operator[](std::size_t flat) const { return values_[flat]; }
    /// Zero outside the support.
    double at(std::span<const int> degrees) const;

    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

private:
    std::vector<int> extents_;
    std::vector<double> values_;
};

/// Concentrations M(i, I) for every species I.
struct SpeciesDistribution {
    ConversionState conversion;
    std::vector<Species> species;
    /// One table per species with extents I_k + 1.
    std::vector<DegreeTable> tables;

    double at(std::size_t species_index, std::span<const int> degrees) const
    {
        return tables[species_index].at(degrees);
    }
};

/// u(i) over the rectangle bounded by the maximum functionality per group type.
struct DegreeDistribution {
    ConversionState conversion;
    DegreeTable table;

    double at(std::span<const int> degrees) const { return table.at(degrees); }
};

/// Degree moments mu_k (first) and mu_mn (second).
struct DegreeMoments {
    Eigen::VectorXd mu1;
    Eigen::MatrixXd mu2;
    /// mu_00 = 1 by normalization.
    double mu0 = 1.0;
};

/// C(n, k) p^k (1 - p)^(n - k).
double binomial_pmf(int n, int k, double p);

SpeciesDistribution species_dist(const SystemSpec& spec, const ConversionState& conv);
DegreeDistribution degree_dist(const SystemSpec& spec, const ConversionState& conv);

/// Closed-form degree moments from conversions.
DegreeMoments mu_from_p(const MomentSet& moments, const ConversionState& conv);

/// sum_i i_m i_n u(i) by direct summation over the table.
double brute_force_moments(const DegreeDistribution& dist, int m, int n);
/// sum_i prod_k i_k^{e_k} u(i).
double brute_force_moment(const DegreeDistribution& dist, std::span<const int> exponents);

} // namespace gelkit
