#include "gelkit/gelation.hpp"

#include <cmath>
#include <string>

#include "gelkit/errors.hpp"

namespace gelkit {

namespace {

constexpr double kActiveEps = 1e-14;

void require_two_type(const MomentSet& moments, const char* who)
{
    if (moments.group_types() != 2)
        throw SpecError(std::string(who) + ": requires exactly two group types");
}

double pregel_sign(CriterionKind kind)
{
    return kind == CriterionKind::general_determinant ? 1.0 : -1.0;
}

} // namespace

std::string_view to_string(CriterionKind kind)
{
    switch (kind) {
    case CriterionKind::two_type_polynomial:
        return "two_type_polynomial";
    case CriterionKind::two_type_structural:
        return "two_type_structural";
    case CriterionKind::general_determinant:
        return "general_determinant";
    }
    return "unknown";
}

CriterionKind criterion_from_string(std::string_view name)
{
    for (auto kind : {CriterionKind::two_type_polynomial, CriterionKind::two_type_structural,
                      CriterionKind::general_determinant})
        if (to_string(kind) == name)
            return kind;
    throw SpecError("unknown criterion '" + std::string(name) + "'");
}

std::vector<int> reactive_lanes(const MomentSet& moments, const WeightMatrix& weights)
{
    std::vector<int> out;
    const int r = moments.group_types();
    for (int k = 0; k < r; ++k) {
        if (moments.nu1(k) <= 0.0)
            continue;
        for (int j = 0; j < r; ++j)
            if (weights(k, j) > 0.0 && moments.nu1(j) > 0.0) {
                out.push_back(k);
                break;
            }
    }
    return out;
}

KMatrix k_matrix(const WeightMatrix& weights, const Eigen::VectorXd& mu, const std::vector<int>& lanes)
{
    const auto n = static_cast<Eigen::Index>(lanes.size());
    KMatrix out{lanes, Eigen::MatrixXd::Zero(n, n)};
    for (Eigen::Index a = 0; a < n; ++a) {
        double norm = 0.0;
        for (Eigen::Index b = 0; b < n; ++b) {
            out.k(a, b) = weights(lanes[a], lanes[b]) * mu(lanes[b]);
            norm += out.k(a, b);
        }
        if (!(norm > 0.0))
            throw DomainError("K matrix: group type " + std::to_string(lanes[a]) + " has no bonded partner type");
        out.k.row(a) /= norm;
    }
    return out;
}

BranchingModel branching_model(const MomentSet& moments, const WeightMatrix& weights, const ConversionState& conv)
{
    const Eigen::VectorXd& nu = moments.nu1;
    const Eigen::VectorXd mu = conv.p.cwiseProduct(nu);
    std::vector<int> lanes;
    for (int k : reactive_lanes(moments, weights))
        if (mu(k) > 0.0)
            lanes.push_back(k);

    BranchingModel out;
    out.lanes = lanes;
    out.k = k_matrix(weights, mu, lanes).k;
    const auto n = static_cast<Eigen::Index>(lanes.size());
    out.d.resize(n, n);
    out.mu.resize(n);
    for (Eigen::Index a = 0; a < n; ++a) {
        const int m = lanes[a];
        out.mu(a) = mu(m);
        for (Eigen::Index b = 0; b < n; ++b) {
            const int j = lanes[b];
            // dU_m/dx_j = mu_mj / mu_m - [m == j]
            out.d(a, b) = m == j ? conv.p(j) * (moments.nu2(j, j) / nu(j) - 1.0)
                                 : conv.p(j) * moments.nu2(m, j) / nu(m);
        }
    }
    return out;
}

KappaMix kappa_mix(const MomentSet& moments, const WeightMatrix& weights, const ConversionState& conv)
{
    require_two_type(moments, "kappa_mix");
    if (weights(0, 0) != 0.0)
        throw SpecError("kappa_mix: two-type closed forms assume A-A bonds are impossible (W_AA = 0)");
    const double mu_a = conv.p(0) * moments.nu1(0);
    const double mu_b = conv.p(1) * moments.nu1(1);
    const double num = weights(1, 0) * mu_a;
    const double den = num + weights(1, 1) * mu_b;
    if (!(den > 0.0))
        throw DomainError("kappa_mix: undefined before any B bond forms");
    return {num / den};
}

GelCriterionValue criterion_two_type_structural(const MomentSet& moments, const ConversionState& conv, KappaMix kappa)
{
    require_two_type(moments, "criterion_two_type_structural");
    GelCriterionValue out{conv.t, std::nullopt, CriterionKind::two_type_structural};
    const auto mu = mu_from_p(moments, conv);
    const double m10 = mu.mu1(0), m01 = mu.mu1(1);
    if (!(m10 > 0.0 && m01 > 0.0))
        return out;
    const double m20 = mu.mu2(0, 0), m02 = mu.mu2(1, 1), m11 = mu.mu2(0, 1);

    const double ubi_y = m02 / m01 - 1.0;
    const double ubi_x = m11 / m01;
    const double uin_x = m20 / m10 - 1.0;
    const double uin_y = m11 / m10;
    const double k = kappa.kappa;
    const double uplus_x = k * uin_x + (1.0 - k) * ubi_x;
    const double uplus_y = k * uin_y + (1.0 - k) * ubi_y;
    out.residual = uplus_x * ubi_y - (uplus_y - 1.0) * (ubi_x - 1.0);
    return out;
}

GelCriterionValue criterion_two_type_polynomial(const MomentSet& moments, const ConversionState& conv, KappaMix kappa)
{
    require_two_type(moments, "criterion_two_type_polynomial");
    GelCriterionValue out{conv.t, std::nullopt, CriterionKind::two_type_polynomial};
    const double n10 = moments.nu(1, 0), n01 = moments.nu(0, 1);
    const double n20 = moments.nu(2, 0), n02 = moments.nu(0, 2), n11 = moments.nu(1, 1);
    const double pa = conv.p(0), pb = conv.p(1), k = kappa.kappa;
    if (!(n10 > 0.0 && n01 > 0.0))
        return out;
    out.residual = ((n01 - n02) * (k * (1.0 + pa) - 1.0) * n10 -
                    ((n01 * n20 - n02 * n20 + n11 * n11) * pa - n01 * n11) * k) *
                       pb +
                   n10 * (n11 * pa - n01);
    return out;
}

GelCriterionValue criterion_two_type_simplified(const MomentSet& moments, const ConversionState& conv, KappaMix kappa)
{
    require_two_type(moments, "criterion_two_type_simplified");
    if (moments.nu(1, 1) != 0.0)
        throw SpecError("criterion_two_type_simplified: requires nu_11 = 0");
    GelCriterionValue out{conv.t, std::nullopt, CriterionKind::two_type_polynomial};
    const double n10 = moments.nu(1, 0), n01 = moments.nu(0, 1);
    const double n20 = moments.nu(2, 0), n02 = moments.nu(0, 2);
    const double pa = conv.p(0), pb = conv.p(1), k = kappa.kappa;
    if (!(n10 > 0.0 && n01 > 0.0))
        return out;
    out.residual =
        ((n01 - n02) * (k * (1.0 + pa) - 1.0) * n10 - (n01 * n20 - n02 * n20) * pa * k) * pb - n10 * n01;
    return out;
}

GelCriterionValue criterion_general(const MomentSet& moments, const ConversionState& conv, const WeightMatrix& weights)
{
    GelCriterionValue out{conv.t, std::nullopt, CriterionKind::general_determinant};
    const auto lanes = reactive_lanes(moments, weights);
    if (lanes.empty())
        return out;

    bool any_bonded = false, all_bonded = true;
    for (int k : lanes) {
        const bool bonded = conv.p(k) * moments.nu1(k) > kActiveEps * moments.nu1(k);
        any_bonded = any_bonded || bonded;
        all_bonded = all_bonded && bonded;
    }
    if (!any_bonded) {
        // The determinant extends continuously to 1 at p = 0.
        bool exactly_zero = true;
        for (int k : lanes)
            exactly_zero = exactly_zero && conv.p(k) == 0.0;
        if (exactly_zero)
            out.residual = 1.0;
        return out;
    }
    if (!all_bonded)
        return out;

    const auto model = branching_model(moments, weights, conv);
    const auto n = static_cast<Eigen::Index>(model.lanes.size());
    out.residual = (Eigen::MatrixXd::Identity(n, n) - model.b()).determinant();
    return out;
}

GelCriterionValue evaluate_criterion(const MomentTrajectory& traj, double t, CriterionKind kind)
{
    const auto conv = conversion(traj, t);
    const auto& moments = traj.moments();
    switch (kind) {
    case CriterionKind::general_determinant:
        return criterion_general(moments, conv, traj.spec().weights);
    case CriterionKind::two_type_structural:
    case CriterionKind::two_type_polynomial: {
        require_two_type(moments, "evaluate_criterion");
        if (!(conv.p(0) > 0.0 && conv.p(1) > 0.0))
            return {t, std::nullopt, kind};
        const auto kappa = kappa_mix(moments, traj.spec().weights, conv);
        return kind == CriterionKind::two_type_structural ? criterion_two_type_structural(moments, conv, kappa)
                                                         : criterion_two_type_polynomial(moments, conv, kappa);
    }
    }
    throw DomainError("evaluate_criterion: unknown kind");
}

GelReport find_gel_time(const MomentTrajectory& traj, CriterionKind kind, const GelSearchOptions& options)
{
    GelReport report;
    report.criterion = kind;
    report.horizon = traj.t_end();
    report.conversions_at_gel = ConversionState{traj.t_end(), Eigen::VectorXd::Zero(traj.moments().group_types())};

    const double sign0 = pregel_sign(kind);
    const auto steps = traj.times();
    const int sub = std::max(1, options.subdivisions);

    bool any_defined = false;
    double lo = 0.0;
    double hi = -1.0;
    for (std::size_t s = 1; s < steps.size() && hi < 0.0; ++s) {
        for (int q = 1; q <= sub; ++q) {
            const double t = q == sub ? steps[s] : steps[s - 1] + (steps[s] - steps[s - 1]) * q / sub;
            const auto value = evaluate_criterion(traj, t, kind);
            if (!value.residual)
                continue;
            any_defined = true;
            if (*value.residual * sign0 <= 0.0) {
                hi = t;
                break;
            }
            lo = t;
        }
    }
    if (!any_defined)
        throw NumericalError("find_gel_time: criterion undefined on the entire trajectory", traj.t_end());
    if (hi < 0.0) {
        report.bracket_lo = report.bracket_hi = traj.t_end();
        return report;
    }

    while (hi - lo > options.relative_width * hi) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        const auto value = evaluate_criterion(traj, mid, kind);
        if (!value.residual || *value.residual * sign0 > 0.0)
            lo = mid;
        else
            hi = mid;
    }

    const double t_gel = 0.5 * (lo + hi);
    report.t_gel = t_gel;
    report.bracket_lo = lo;
    report.bracket_hi = hi;
    report.refinement_width = hi - lo;
    report.conversions_at_gel = conversion(traj, t_gel);
    const Eigen::VectorXd mu = traj.mu(t_gel);
    report.p_crit = mu.sum() / traj.moments().nu1.sum();
    return report;
}

} // namespace gelkit
