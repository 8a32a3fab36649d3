#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "gelkit/chemistry.hpp"
#include "gelkit/ode.hpp"

namespace gelkit {

struct OdeTolerance {
    double rtol = 1e-9;
    double atol = 1e-12;
};

/// When to stop integrating if no explicit end time is given: once
/// |rhs| < stationarity * |nu1|^2, or at the cap (default 1e3 / rate scale).
struct HorizonRule {
    double stationarity = 1e-10;
    double cap = 0.0;
};

/// Solution mu(t) of the moment ODE on [0, t_end] with dense output.
class MomentTrajectory {
public:
    MomentTrajectory(SystemSpec spec, MomentSet moments, ode::DenseSolution solution, OdeTolerance tol);

    const SystemSpec& spec() const { return spec_; }
    const MomentSet& moments() const { return moments_; }
    const OdeTolerance& tolerance() const { return tol_; }
    const ode::DenseSolution& solution() const { return solution_; }

    double t_end() const { return solution_.t_end(); }
    /// Accepted step boundaries, starting at 0.
    std::vector<double> times() const { return solution_.step_times(); }
    /// mu(t) from the integrator's interpolant, clamped to [0, nu1].
    Eigen::VectorXd mu(double t) const;

private:
    SystemSpec spec_;
    MomentSet moments_;
    ode::DenseSolution solution_;
    OdeTolerance tol_;
};

struct ConversionState {
    double t = 0.0;
    Eigen::VectorXd p;
};

/// (nu1 - mu) .* W (nu1 - mu). Throws DomainError when mu leaves [0, nu1].
Eigen::VectorXd moment_rhs(const SystemSpec& spec, const Eigen::VectorXd& mu);
Eigen::VectorXd moment_rhs(const SystemSpec& spec, const MomentSet& moments, const Eigen::VectorXd& mu);

MomentTrajectory integrate_moments(const SystemSpec& spec, double t_end, const OdeTolerance& tol = {});

/// Integrates until stationary or until the horizon cap.
MomentTrajectory integrate_until_stationary(const SystemSpec& spec, const OdeTolerance& tol = {},
                                            HorizonRule rule = {});

/// 1e3 / (max_k nu_k * max W), the time by which every reaction channel has
/// seen ~1e3 characteristic times.
double default_horizon_cap(const SystemSpec& spec);

/// p_k = mu_k / nu_k, 0 for absent group types.
ConversionState conversion(const MomentTrajectory& traj, double t);
ConversionState conversion_from_mu(const MomentSet& moments, double t, const Eigen::VectorXd& mu);

struct ConversionViaA {
    ConversionState state;
    /// A_k(t) = (exp(int_0^t [W(nu1 - mu)]_k) - 1) / t.
    Eigen::VectorXd a;
};

/// Conversion through the A_k(t) integral path: p_k = t A_k / (1 + t A_k).
ConversionViaA conversion_via_A(const MomentTrajectory& traj, double t);

} // namespace gelkit
