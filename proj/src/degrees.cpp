#include "gelkit/degrees.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "gelkit/errors.hpp"

namespace gelkit {

DegreeTable::DegreeTable(std::vector<int> extents) : extents_(std::move(extents))
{
    std::size_t n = 1;
    for (int e : extents_) {
        if (e < 1)
            throw DomainError("DegreeTable: extents must be positive");
        n *= static_cast<std::size_t>(e);
    }
    values_.assign(n, 0.0);
}

std::size_t DegreeTable::flat_index(std::span<const int> degrees) const
{
    std::size_t idx = 0;
    for (std::size_t k = 0; k < extents_.size(); ++k)
        idx = idx * static_cast<std::size_t>(extents_[k]) + static_cast<std::size_t>(degrees[k]);
    return idx;
}

std::vector<int> DegreeTable::degrees(std::size_t flat) const
{
    std::vector<int> out(extents_.size());
    for (std::size_t k = extents_.size(); k-- > 0;) {
        out[k] = static_cast<int>(flat % static_cast<std::size_t>(extents_[k]));
        flat /= static_cast<std::size_t>(extents_[k]);
    }
    return out;
}

bool DegreeTable::contains(std::span<const int> degrees) const
{
    if (degrees.size() != extents_.size())
        return false;
    for (std::size_t k = 0; k < extents_.size(); ++k)
        if (degrees[k] < 0 || degrees[k] >= extents_[k])
            return false;
    return true;
}

double DegreeTable::at(std::span<const int> degrees) const
{
    return contains(degrees) ? values_[flat_index(degrees)] : 0.0;
}

double binomial_pmf(int n, int k, double p)
{
    if (k < 0 || k > n)
        return 0.0;
    double c = 1.0;
    for (int j = 1; j <= k; ++j)
        c = c * (n - k + j) / j;
    return c * std::pow(p, k) * std::pow(1.0 - p, n - k);
}

namespace {

void check_conversion(const SystemSpec& spec, const ConversionState& conv)
{
    if (conv.p.size() != spec.group_types())
        throw DomainError("conversion state has wrong dimension");
    for (Eigen::Index k = 0; k < conv.p.size(); ++k)
        if (!(conv.p(k) >= 0.0 && conv.p(k) <= 1.0))
            throw DomainError("conversion p_" + std::to_string(k) + " outside [0,1]");
}

} // namespace

SpeciesDistribution species_dist(const SystemSpec& spec, const ConversionState& conv)
{
    check_conversion(spec, conv);
    SpeciesDistribution out{conv, spec.distribution.species, {}};
    out.tables.reserve(out.species.size());
    for (const auto& s : out.species) {
        std::vector<int> extents(s.groups.size());
        for (std::size_t k = 0; k < extents.size(); ++k)
            extents[k] = s.groups[k] + 1;
        DegreeTable table(std::move(extents));
        for (std::size_t f = 0; f < table.size(); ++f) {
            const auto i = table.degrees(f);
            double v = s.fraction;
            for (std::size_t k = 0; k < i.size(); ++k)
                v *= binomial_pmf(s.groups[k], i[k], conv.p(static_cast<Eigen::Index>(k)));
            table[f] = v;
        }
        out.tables.push_back(std::move(table));
    }
    return out;
}

DegreeDistribution degree_dist(const SystemSpec& spec, const ConversionState& conv)
{
    const auto species = species_dist(spec, conv);
    auto extents = spec.distribution.max_functionality();
    for (int& e : extents)
        ++e;
    DegreeDistribution out{conv, DegreeTable(std::move(extents))};
    for (const auto& t : species.tables)
        for (std::size_t f = 0; f < t.size(); ++f)
            out.table[out.table.flat_index(t.degrees(f))] += t[f];
    return out;
}

DegreeMoments mu_from_p(const MomentSet& moments, const ConversionState& conv)
{
    const Eigen::Index r = moments.nu1.size();
    if (conv.p.size() != r)
        throw DomainError("mu_from_p: conversion state has wrong dimension");
    const Eigen::VectorXd& p = conv.p;
    DegreeMoments out{p.cwiseProduct(moments.nu1), Eigen::MatrixXd::Zero(r, r)};
    for (Eigen::Index m = 0; m < r; ++m)
        for (Eigen::Index n = 0; n < r; ++n)
            out.mu2(m, n) = m == n ? p(m) * p(m) * moments.nu2(m, m) + p(m) * (1.0 - p(m)) * moments.nu1(m)
                                   : p(m) * p(n) * moments.nu2(m, n);
    return out;
}

double brute_force_moment(const DegreeDistribution& dist, std::span<const int> exponents)
{
    const auto& table = dist.table;
    if (static_cast<int>(exponents.size()) != table.rank())
        throw DomainError("brute_force_moment: exponent vector has wrong dimension");
    double total = 0.0;
    for (std::size_t f = 0; f < table.size(); ++f) {
        const auto i = table.degrees(f);
        double w = table[f];
        for (std::size_t k = 0; k < i.size(); ++k)
            w *= std::pow(static_cast<double>(i[k]), exponents[k]);
        total += w;
    }
    return total;
}

double brute_force_moments(const DegreeDistribution& dist, int m, int n)
{
    std::vector<int> e(static_cast<std::size_t>(dist.table.rank()), 0);
    if (m < 0 || n < 0 || m >= dist.table.rank() || n >= dist.table.rank())
        throw DomainError("brute_force_moments: index out of range");
    ++e[static_cast<std::size_t>(m)];
    ++e[static_cast<std::size_t>(n)];
    return brute_force_moment(dist, e);
}

} // namespace gelkit
