#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "gelkit/chemistry.hpp"
#include "gelkit/degrees.hpp"
#include "gelkit/kinetics.hpp"

namespace gelkit {

enum class CriterionKind { two_type_polynomial, two_type_structural, general_determinant };

std::string_view to_string(CriterionKind kind);
CriterionKind criterion_from_string(std::string_view name);

/// Criterion left-hand side at time t; empty residual means undefined at t
/// (some bond class has not formed yet).
struct GelCriterionValue {
    double t = 0.0;
    std::optional<double> residual;
    CriterionKind kind = CriterionKind::general_determinant;
};

/// Probability that the partner of a converted B group is an A group.
struct KappaMix {
    double kappa = 0.0;
};

/// Row-stochastic partner matrix over the active group types.
struct KMatrix {
    /// Group-type indices the rows and columns refer to.
    std::vector<int> lanes;
    Eigen::MatrixXd k;
};

/// Branching structure at a conversion state, restricted to group types that
/// carry bonds: partner matrix K and excess-degree Jacobian D with
/// D(m, j) = dU_m/dx_j at x = 1.
struct BranchingModel {
    std::vector<int> lanes;
    Eigen::MatrixXd k;
    Eigen::MatrixXd d;
    Eigen::VectorXd mu;

    Eigen::MatrixXd b() const { return k * d; }
};

/// Group types that can react at all: nu_k > 0 and some partner j with
/// W_kj > 0 and nu_j > 0.
std::vector<int> reactive_lanes(const MomentSet& moments, const WeightMatrix& weights);

/// K_ij = W_ij mu_j / sum_m W_im mu_m over the given lanes.
KMatrix k_matrix(const WeightMatrix& weights, const Eigen::VectorXd& mu, const std::vector<int>& lanes);

/// Branching model over the lanes with p_k > 0. Throws DomainError if a lane
/// with bonds has no bonded partner type.
BranchingModel branching_model(const MomentSet& moments, const WeightMatrix& weights, const ConversionState& conv);

/// kappa = W_BA mu_A / (W_BA mu_A + W_BB mu_B) for two group types with W_AA = 0.
KappaMix kappa_mix(const MomentSet& moments, const WeightMatrix& weights, const ConversionState& conv);

GelCriterionValue criterion_two_type_structural(const MomentSet& moments, const ConversionState& conv, KappaMix kappa);
/// The printed two-type gel polynomial.
GelCriterionValue criterion_two_type_polynomial(const MomentSet& moments, const ConversionState& conv, KappaMix kappa);
/// The same polynomial specialised to nu_11 = 0 (species carry one group type only).
GelCriterionValue criterion_two_type_simplified(const MomentSet& moments, const ConversionState& conv, KappaMix kappa);
/// det(I - K D); positive before the gel point.
GelCriterionValue criterion_general(const MomentSet& moments, const ConversionState& conv, const WeightMatrix& weights);

/// Criterion of the given kind evaluated on a trajectory at time t.
GelCriterionValue evaluate_criterion(const MomentTrajectory& traj, double t, CriterionKind kind);

struct GelSearchOptions {
    double relative_width = 1e-10;
    /// Grid points per accepted ODE step when scanning for a sign change.
    int subdivisions = 4;
};

struct GelReport {
    std::optional<double> t_gel;
    ConversionState conversions_at_gel;
    CriterionKind criterion = CriterionKind::general_determinant;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    double refinement_width = 0.0;
    double horizon = 0.0;
    /// Overall fraction of converted groups sum mu / sum nu at the gel point.
    double p_crit = 0.0;
};

/// First sign change of the criterion on the trajectory, refined by bisection.
/// Reports no t_gel when the criterion keeps its pre-gel sign up to t_end.
GelReport find_gel_time(const MomentTrajectory& traj, CriterionKind kind, const GelSearchOptions& options = {});

} // namespace gelkit
