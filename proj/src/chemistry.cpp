#include "gelkit/chemistry.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "gelkit/errors.hpp"

namespace gelkit {

namespace {

constexpr double kMassTolerance = 1e-12;

std::string describe(const std::vector<int>& v)
{
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < v.size(); ++i)
        os << (i ? "," : "") << v[i];
    os << ')';
    return os.str();
}

} // namespace

std::vector<int> MonomerDistribution::max_functionality() const
{
    std::vector<int> out(group_types(), 0);
    for (const auto& s : species)
        for (std::size_t k = 0; k < out.size(); ++k)
            out[k] = std::max(out[k], s.groups[k]);
    return out;
}

double MomentSet::nu(int m, int n) const
{
    if (group_types() != 2)
        throw SpecError("nu(m, n) aliases are defined for two group types only");
    if (m < 0 || n < 0 || m + n > 2)
        throw DomainError("nu(m, n) is available for m + n <= 2");
    if (m + n == 0)
        return 1.0;
    if (m + n == 1)
        return m == 1 ? nu1(0) : nu1(1);
    if (m == 2)
        return nu2(0, 0);
    if (n == 2)
        return nu2(1, 1);
    return nu2(0, 1);
}

ValidationReport validate_spec(const SystemSpec& spec)
{
    const auto& dist = spec.distribution;
    if (dist.species.empty())
        throw SpecError("distribution: no species");
    const int r = dist.group_types();
    if (r < 1)
        throw SpecError("distribution: functionality vectors must have at least one group type");

    double mass = 0.0;
    std::set<std::vector<int>> seen;
    for (const auto& s : dist.species) {
        if (static_cast<int>(s.groups.size()) != r)
            throw SpecError("distribution: dimension mismatch for species " + describe(s.groups));
        if (std::any_of(s.groups.begin(), s.groups.end(), [](int g) { return g < 0; }))
            throw SpecError("distribution: negative functionality in " + describe(s.groups));
        if (!(s.fraction >= 0.0 && s.fraction <= 1.0))
            throw SpecError("distribution: fraction outside [0,1] for " + describe(s.groups));
        if (!seen.insert(s.groups).second)
            throw SpecError("distribution: duplicate functionality vector " + describe(s.groups));
        mass += s.fraction;
    }
    if (std::abs(mass - 1.0) > kMassTolerance)
        throw SpecError("distribution: fractions sum to " + std::to_string(mass) + ", expected 1");

    const auto& w = spec.weights.w;
    if (w.rows() != r || w.cols() != r)
        throw SpecError("weights: matrix is " + std::to_string(w.rows()) + "x" + std::to_string(w.cols()) +
                        " but the distribution has " + std::to_string(r) + " group types");
    if (!w.allFinite())
        throw SpecError("weights: non-finite entry");
    if ((w.array() < 0.0).any())
        throw SpecError("weights: negative entry");
    for (int m = 0; m < r; ++m)
        for (int n = m + 1; n < r; ++n)
            if (w(m, n) != w(n, m))
                throw SpecError("weights: asymmetric entry (" + std::to_string(m) + "," + std::to_string(n) + ")");
    if ((w.array() == 0.0).all())
        throw SpecError("weights: all entries are zero");

    ValidationReport report;
    const MomentSet moments = moment_set(dist);
    for (int k = 0; k < r; ++k) {
        const double row = w.row(k).sum();
        if (std::abs(row - 1.0) > 1e-12) {
            std::ostringstream os;
            os << "weights: row " << k << " sums to " << row << " (not normalized)";
            report.advisories.push_back(os.str());
        }
        if (moments.nu1(k) > 0.0 && (w.row(k).array() == 0.0).all()) {
            report.inert_types.push_back(k);
            report.advisories.push_back("group type " + std::to_string(k) + " is present but inert (zero row in W)");
        }
    }
    return report;
}

SystemSpec make_spec(MonomerDistribution distribution, Eigen::MatrixXd weights)
{
    SystemSpec spec{std::move(distribution), WeightMatrix{std::move(weights)}};
    validate_spec(spec);
    return spec;
}

double partial_moment(const MonomerDistribution& dist, std::span<const int> exponents)
{
    const int r = dist.group_types();
    if (static_cast<int>(exponents.size()) != r)
        throw SpecError("partial_moment: exponent vector has length " + std::to_string(exponents.size()) +
                        ", expected " + std::to_string(r));
    if (std::any_of(exponents.begin(), exponents.end(), [](int e) { return e < 0; }))
        throw SpecError("partial_moment: negative exponent");

    double total = 0.0;
    for (const auto& s : dist.species) {
        double term = s.fraction;
        for (int k = 0; k < r; ++k)
            for (int e = 0; e < exponents[k]; ++e)
                term *= s.groups[k];
        total += term;
    }
    return total;
}

MomentSet moment_set(const MonomerDistribution& dist)
{
    const int r = dist.group_types();
    MomentSet out{Eigen::VectorXd::Zero(r), Eigen::MatrixXd::Zero(r, r)};
    std::vector<int> e(r, 0);
    for (int m = 0; m < r; ++m) {
        e[m] = 1;
        out.nu1(m) = partial_moment(dist, e);
        for (int n = m; n < r; ++n) {
            ++e[n];
            out.nu2(m, n) = out.nu2(n, m) = partial_moment(dist, e);
            --e[n];
        }
        e[m] = 0;
    }
    return out;
}

} // namespace gelkit
