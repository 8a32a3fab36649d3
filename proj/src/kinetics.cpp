#include "gelkit/kinetics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "gelkit/errors.hpp"

namespace gelkit {

namespace {

void check_box(const MomentSet& moments, const Eigen::VectorXd& mu, double slack_rel, double slack_abs,
               const char* who)
{
    if (mu.size() != moments.nu1.size())
        throw DomainError(std::string(who) + ": mu has wrong dimension");
    for (Eigen::Index k = 0; k < mu.size(); ++k) {
        const double slack = slack_abs + slack_rel * moments.nu1(k);
        if (!(mu(k) >= -slack && mu(k) <= moments.nu1(k) + slack))
            throw DomainError(std::string(who) + ": mu_" + std::to_string(k) + " = " + std::to_string(mu(k)) +
                              " outside [0, " + std::to_string(moments.nu1(k)) + "]");
    }
}

ode::Rhs make_rhs(const SystemSpec& spec, const MomentSet& moments)
{
    return [&w = spec.weights.w, &nu = moments.nu1](double, const ode::Vector& mu, ode::Vector& out) {
        const Eigen::VectorXd free = nu - mu;
        out = free.cwiseProduct(w * free);
    };
}

ode::Options ode_options(const MomentSet& moments, const OdeTolerance& tol)
{
    ode::Options opt;
    opt.rtol = tol.rtol;
    opt.atol = tol.atol;
    opt.skip_in_norm.resize(static_cast<std::size_t>(moments.nu1.size()));
    for (Eigen::Index k = 0; k < moments.nu1.size(); ++k)
        opt.skip_in_norm[static_cast<std::size_t>(k)] = moments.nu1(k) == 0.0;
    return opt;
}

// Accepted states may leave the box only by one tolerance width.
ode::StepObserver box_guard(const MomentSet& moments, const OdeTolerance& tol)
{
    return [&moments, tol](double t, const ode::Vector& mu, const ode::Vector&) {
        for (Eigen::Index k = 0; k < mu.size(); ++k) {
            const double width = tol.atol + tol.rtol * moments.nu1(k);
            if (mu(k) < -width || mu(k) > moments.nu1(k) + width)
                throw NumericalError("kinetics: mu_" + std::to_string(k) + " left the invariant box at t = " +
                                         std::to_string(t),
                                     t, std::vector<double>(mu.data(), mu.data() + mu.size()));
        }
        return false;
    };
}

} // namespace

MomentTrajectory::MomentTrajectory(SystemSpec spec, MomentSet moments, ode::DenseSolution solution,
                                   OdeTolerance tol)
    : spec_(std::move(spec)), moments_(std::move(moments)), solution_(std::move(solution)), tol_(tol)
{
}

Eigen::VectorXd MomentTrajectory::mu(double t) const
{
    if (!(t >= 0.0 && t <= t_end()))
        throw DomainError("trajectory: t = " + std::to_string(t) + " outside [0, " + std::to_string(t_end()) + "]");
    Eigen::VectorXd v = solution_.value(t);
    for (Eigen::Index k = 0; k < v.size(); ++k)
        v(k) = std::clamp(v(k), 0.0, moments_.nu1(k));
    return v;
}

Eigen::VectorXd moment_rhs(const SystemSpec& spec, const MomentSet& moments, const Eigen::VectorXd& mu)
{
    check_box(moments, mu, 1e-12, 1e-15, "moment_rhs");
    const Eigen::VectorXd free = moments.nu1 - mu;
    return free.cwiseProduct(spec.weights.w * free);
}

Eigen::VectorXd moment_rhs(const SystemSpec& spec, const Eigen::VectorXd& mu)
{
    return moment_rhs(spec, moment_set(spec.distribution), mu);
}

double default_horizon_cap(const SystemSpec& spec)
{
    const MomentSet moments = moment_set(spec.distribution);
    const double scale = moments.nu1.maxCoeff() * spec.weights.w.maxCoeff();
    return scale > 0.0 ? 1e3 / scale : 1e3;
}

MomentTrajectory integrate_moments(const SystemSpec& spec, double t_end, const OdeTolerance& tol)
{
    if (!(t_end > 0.0))
        throw DomainError("integrate_moments: t_end must be positive");
    if (!(tol.rtol > 0.0 && tol.atol > 0.0))
        throw DomainError("integrate_moments: tolerances must be positive");
    MomentSet moments = moment_set(spec.distribution);
    const Eigen::VectorXd mu0 = Eigen::VectorXd::Zero(moments.nu1.size());
    auto sol = ode::integrate(make_rhs(spec, moments), 0.0, mu0, t_end, ode_options(moments, tol),
                              box_guard(moments, tol));
    return MomentTrajectory(spec, std::move(moments), std::move(sol), tol);
}

MomentTrajectory integrate_until_stationary(const SystemSpec& spec, const OdeTolerance& tol, HorizonRule rule)
{
    if (!(tol.rtol > 0.0 && tol.atol > 0.0))
        throw DomainError("integrate_until_stationary: tolerances must be positive");
    MomentSet moments = moment_set(spec.distribution);
    const double cap = rule.cap > 0.0 ? rule.cap : default_horizon_cap(spec);
    const double threshold = rule.stationarity * moments.nu1.squaredNorm();
    auto guard = box_guard(moments, tol);
    auto observer = [&](double t, const ode::Vector& mu, const ode::Vector& dmu) {
        guard(t, mu, dmu);
        return dmu.norm() < threshold;
    };
    const Eigen::VectorXd mu0 = Eigen::VectorXd::Zero(moments.nu1.size());
    auto sol = ode::integrate(make_rhs(spec, moments), 0.0, mu0, cap, ode_options(moments, tol), observer);
    return MomentTrajectory(spec, std::move(moments), std::move(sol), tol);
}

ConversionState conversion_from_mu(const MomentSet& moments, double t, const Eigen::VectorXd& mu)
{
    ConversionState out{t, Eigen::VectorXd::Zero(mu.size())};
    for (Eigen::Index k = 0; k < mu.size(); ++k)
        out.p(k) = moments.nu1(k) > 0.0 ? std::clamp(mu(k) / moments.nu1(k), 0.0, 1.0) : 0.0;
    return out;
}

ConversionState conversion(const MomentTrajectory& traj, double t)
{
    return conversion_from_mu(traj.moments(), t, traj.mu(t));
}

ConversionViaA conversion_via_A(const MomentTrajectory& traj, double t)
{
    if (!(t > 0.0 && t <= traj.t_end()))
        throw DomainError("conversion_via_A: t = " + std::to_string(t) + " outside (0, t_end]");

    const auto& w = traj.spec().weights.w;
    const auto& nu = traj.moments().nu1;
    const Eigen::Index r = nu.size();
    using Quad = boost::math::quadrature::gauss<double, 7>;

    // Integrate the hazard W (nu1 - mu(u)) over [0, t], one accepted step at a time.
    Eigen::VectorXd hazard = Eigen::VectorXd::Zero(r);
    for (const auto& seg : traj.solution().segments()) {
        if (seg.t0 >= t)
            break;
        const double hi = std::min(t, seg.t0 + seg.h);
        for (Eigen::Index k = 0; k < r; ++k) {
            if (w.row(k).isZero())
                continue;
            hazard(k) += Quad::integrate(
                [&](double u) { return w.row(k).dot(nu - seg.value(u)); }, seg.t0, hi);
        }
    }
    if (!hazard.allFinite())
        throw NumericalError("conversion_via_A: quadrature produced a non-finite value", t);

    ConversionViaA out{{t, Eigen::VectorXd::Zero(r)}, Eigen::VectorXd::Zero(r)};
    for (Eigen::Index k = 0; k < r; ++k) {
        out.a(k) = std::expm1(hazard(k)) / t;
        // tA / (1 + tA) with tA = e^H - 1, written to stay finite for large H.
        out.state.p(k) = nu(k) > 0.0 ? -std::expm1(-hazard(k)) : 0.0;
    }
    return out;
}

} // namespace gelkit
