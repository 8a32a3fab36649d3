#pragma once

#include <vector>

#include <Eigen/Dense>

#include "gelkit/chemistry.hpp"
#include "gelkit/gelation.hpp"
#include "gelkit/kinetics.hpp"

namespace gelkit {

struct FixedPointOptions {
    double damping = 0.5;
    double tolerance = 1e-12;
    int max_iterations = 100000;
    bool record_residuals = false;
};

/// Component generating functions at x from R = x K U_vec(R), W = x U(R).
struct GfValues {
    double x = 0.0;
    double w = 0.0;
    /// R over `lanes`; for two group types R = (W_bi, W_+).
    std::vector<int> lanes;
    Eigen::VectorXd r;
    int iterations = 0;
    double residual = 0.0;
    std::vector<double> residual_history;
};

/// Two-type functional system with explicit kappa.
struct TwoTypeGf {
    double w = 0.0;
    double w_bi = 0.0;
    double w_plus = 0.0;
    int iterations = 0;
};

struct MwReport {
    double t = 0.0;
    double mw = 1.0;
    bool converged = true;
    /// det(I - K D); the linear system is singular where it vanishes.
    double determinant = 1.0;
};

/// Monomer-weighted component-size distribution w(s), s = 1..S.
struct SizeDistribution {
    double t = 0.0;
    std::vector<double> w;
    double tail_mass = 0.0;

    double at(int s) const { return s >= 1 && s <= static_cast<int>(w.size()) ? w[s - 1] : 0.0; }
    /// sum s w(s) / sum w(s) over the truncated series.
    double weight_average() const;
};

/// Degree generating function U(y), y over all group types.
double degree_gf(const SystemSpec& spec, const ConversionState& conv, const Eigen::VectorXd& y);
/// Excess generating function U_m(y) = (1/mu_m) dU/dy_m.
double excess_gf(const SystemSpec& spec, const ConversionState& conv, int m, const Eigen::VectorXd& y);

/// True when det(I - K D) > 0 at this conversion state.
bool is_pregel(const SystemSpec& spec, const ConversionState& conv);

GfValues gf_fixed_point(const SystemSpec& spec, const ConversionState& conv, double x,
                        const FixedPointOptions& options = {});

TwoTypeGf gf_fixed_point_two_type(const SystemSpec& spec, const ConversionState& conv, KappaMix kappa, double x,
                                  const FixedPointOptions& options = {});

/// Mw = W'(1) / W(1) from the derivative linear system at x = 1.
MwReport weight_avg_mw(const SystemSpec& spec, const ConversionState& conv);

/// Coefficients of W(x) through order S by online truncated power-series iteration.
SizeDistribution size_series(const SystemSpec& spec, const ConversionState& conv, int order);

} // namespace gelkit
