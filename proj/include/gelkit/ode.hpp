#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace gelkit::ode {

using Vector = Eigen::VectorXd;
using Rhs = std::function<void(double t, const Vector& y, Vector& dydt)>;
/// Called after every accepted step; returning true stops the integration.
using StepObserver = std::function<bool(double t, const Vector& y, const Vector& dydt)>;

struct Options {
    double rtol = 1e-9;
    double atol = 1e-12;
    /// Initial step; 0 selects one automatically.
    double initial_step = 0.0;
    std::size_t max_steps = 5'000'000;
    /// Components excluded from the error norm (empty: all included).
    std::vector<bool> skip_in_norm;
};

/// One accepted step with its continuous extension.
struct Segment {
    double t0 = 0.0;
    double h = 0.0;
    /// Dense-output coefficients, one column per coefficient.
    Eigen::MatrixXd coeff;

    Vector value(double t) const;
};

/// Piecewise-quartic interpolant produced by Dormand-Prince 5(4).
class DenseSolution {
public:
    DenseSolution() = default;
    DenseSolution(double t0, Vector y0);

    double t_begin() const { return t0_; }
    double t_end() const { return segments_.empty() ? t0_ : segments_.back().t0 + segments_.back().h; }
    Vector value(double t) const;
    Vector final_value() const { return y_end_; }
    /// Start of every accepted step plus the final time.
    std::vector<double> step_times() const;
    const std::vector<Segment>& segments() const { return segments_; }
    std::size_t dimension() const { return static_cast<std::size_t>(y0_.size()); }

    void append(Segment seg, const Vector& y_end);

private:
    double t0_ = 0.0;
    Vector y0_;
    Vector y_end_;
    std::vector<Segment> segments_;
};

/// Adaptive embedded Runge-Kutta 5(4) (Dormand-Prince) with dense output.
/// Throws NumericalError on step-size underflow or step budget exhaustion.
DenseSolution integrate(const Rhs& rhs, double t0, const Vector& y0, double t_end, const Options& options = {},
                        const StepObserver& observer = {});

} // namespace gelkit::ode
