#include "gelkit/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gelkit/errors.hpp"

namespace gelkit::ode {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// Continuous extension (Hairer, Norsett & Wanner, dopri5).
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

double error_norm(const Vector& err, const Vector& y0, const Vector& y1, const Options& opt)
{
    double sum = 0.0;
    int count = 0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
        if (!opt.skip_in_norm.empty() && opt.skip_in_norm[static_cast<std::size_t>(i)])
            continue;
        const double sc = opt.atol + opt.rtol * std::max(std::abs(y0(i)), std::abs(y1(i)));
        const double q = err(i) / sc;
        sum += q * q;
        ++count;
    }
    return count == 0 ? 0.0 : std::sqrt(sum / count);
}

double initial_step(const Rhs& rhs, double t0, const Vector& y0, const Vector& f0, double span, const Options& opt)
{
    Vector scale = (opt.atol + opt.rtol * y0.array().abs()).matrix();
    auto norm = [&](const Vector& v) {
        double s = 0.0;
        int n = 0;
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            if (!opt.skip_in_norm.empty() && opt.skip_in_norm[static_cast<std::size_t>(i)])
                continue;
            s += (v(i) / scale(i)) * (v(i) / scale(i));
            ++n;
        }
        return n == 0 ? 0.0 : std::sqrt(s / n);
    };
    const double d0 = norm(y0);
    const double d1n = norm(f0);
    double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
    h0 = std::min(h0, span);
    Vector y1 = y0 + h0 * f0;
    Vector f1(y0.size());
    rhs(t0 + h0, y1, f1);
    const double d2 = norm(f1 - f0) / h0;
    const double big = std::max(d1n, d2);
    const double h1 = big <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / big, 1.0 / 5.0);
    return std::min({100 * h0, h1, span});
}

} // namespace

Vector Segment::value(double t) const
{
    const double th = (t - t0) / h;
    const double th1 = 1.0 - th;
    return coeff.col(0) +
           th * (coeff.col(1) + th1 * (coeff.col(2) + th * (coeff.col(3) + th1 * coeff.col(4))));
}

DenseSolution::DenseSolution(double t0, Vector y0) : t0_(t0), y0_(y0), y_end_(std::move(y0)) {}

void DenseSolution::append(Segment seg, const Vector& y_end)
{
    segments_.push_back(std::move(seg));
    y_end_ = y_end;
}

Vector DenseSolution::value(double t) const
{
    if (segments_.empty() || t <= t0_)
        return y0_;
    if (t >= t_end())
        return y_end_;
    auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                               [](double x, const Segment& s) { return x < s.t0; });
    return std::prev(it)->value(t);
}

std::vector<double> DenseSolution::step_times() const
{
    std::vector<double> out;
    out.reserve(segments_.size() + 1);
    out.push_back(t0_);
    for (const auto& s : segments_)
        out.push_back(s.t0 + s.h);
    return out;
}

DenseSolution integrate(const Rhs& rhs, double t0, const Vector& y0, double t_end, const Options& opt,
                        const StepObserver& observer)
{
    DenseSolution sol(t0, y0);
    if (!(t_end > t0))
        return sol;

    const Eigen::Index n = y0.size();
    Vector k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), y1(n), err(n);
    Vector y = y0;
    double t = t0;
    rhs(t, y, k1);

    double h = opt.initial_step > 0.0 ? opt.initial_step : initial_step(rhs, t, y, k1, t_end - t0, opt);
    bool last_rejected = false;

    for (std::size_t step = 0; step < opt.max_steps; ++step) {
        if (t + h > t_end)
            h = t_end - t;
        if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t)))
            throw NumericalError("ode: step size underflow at t = " + std::to_string(t), t,
                                 std::vector<double>(y.data(), y.data() + n));

        ytmp = y + h * a21 * k1;
        rhs(t + c2 * h, ytmp, k2);
        ytmp = y + h * (a31 * k1 + a32 * k2);
        rhs(t + c3 * h, ytmp, k3);
        ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        rhs(t + c4 * h, ytmp, k4);
        ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        rhs(t + c5 * h, ytmp, k5);
        ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        rhs(t + h, ytmp, k6);
        y1 = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
        rhs(t + h, y1, k7);

        err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double e = error_norm(err, y, y1, opt);
        if (!std::isfinite(e))
            throw NumericalError("ode: non-finite error estimate at t = " + std::to_string(t), t,
                                 std::vector<double>(y.data(), y.data() + n));

        if (e <= 1.0) {
            Segment seg;
            seg.t0 = t;
            seg.h = h;
            seg.coeff.resize(n, 5);
            const Vector ydiff = y1 - y;
            const Vector bspl = h * k1 - ydiff;
            seg.coeff.col(0) = y;
            seg.coeff.col(1) = ydiff;
            seg.coeff.col(2) = bspl;
            seg.coeff.col(3) = ydiff - h * k7 - bspl;
            seg.coeff.col(4) = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
            sol.append(std::move(seg), y1);

            t = (t + h >= t_end) ? t_end : t + h;
            y = y1;
            k1 = k7;
            if (t >= t_end)
                return sol;
            if (observer && observer(t, y, k1))
                return sol;

            double fac = e == 0.0 ? 10.0 : 0.9 * std::pow(e, -0.2);
            fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 10.0);
            h *= fac;
            last_rejected = false;
        } else {
            h *= std::max(0.2, 0.9 * std::pow(e, -0.2));
            last_rejected = true;
        }
    }
    throw NumericalError("ode: step budget exhausted at t = " + std::to_string(t), t,
                         std::vector<double>(y.data(), y.data() + n));
}

} // namespace gelkit::ode
