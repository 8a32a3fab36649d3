#include "gelkit/molweight.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "gelkit/errors.hpp"

namespace gelkit {

namespace {

double ipow(double base, int e)
{
    double out = 1.0;
    for (int i = 0; i < e; ++i)
        out *= base;
    return out;
}

// dU/dy_m.
double excess_unnormalized(const SystemSpec& spec, const ConversionState& conv, int m, const Eigen::VectorXd& y)
{
    double total = 0.0;
    for (const auto& s : spec.distribution.species) {
        const int im = s.groups[static_cast<std::size_t>(m)];
        if (im == 0)
            continue;
        double term = s.fraction * im * conv.p(m);
        for (std::size_t k = 0; k < s.groups.size(); ++k) {
            const auto kk = static_cast<Eigen::Index>(k);
            const int e = s.groups[k] - (static_cast<int>(k) == m ? 1 : 0);
            term *= ipow(1.0 - conv.p(kk) + conv.p(kk) * y(kk), e);
        }
        total += term;
    }
    return total;
}

void require_pregel(const SystemSpec& spec, const ConversionState& conv, const char* who)
{
    if (!is_pregel(spec, conv))
        throw DomainError(std::string(who) + ": conversion state is at or past the gel point");
}

// Full-length argument vector with y = 1 outside the bonded lanes.
Eigen::VectorXd embed(int r, const std::vector<int>& lanes, const Eigen::VectorXd& values)
{
    Eigen::VectorXd y = Eigen::VectorXd::Ones(r);
    for (std::size_t a = 0; a < lanes.size(); ++a)
        y(lanes[a]) = values(static_cast<Eigen::Index>(a));
    return y;
}

// Truncated series stored coefficientwise; coefficients are produced online.
using Series = std::vector<double>;

// Product series a * b, filled one coefficient at a time.
struct Chain {
    std::vector<int> factors;    // lane slots (with repetition)
    std::vector<Series> partial; // partial[i] = f_{factors[0]} * ... * f_{factors[i+1]}
};

} // namespace

double SizeDistribution::weight_average() const
{
    double mass = 0.0, first = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        mass += w[i];
        first += static_cast<double>(i + 1) * w[i];
    }
    return first / mass;
}

double degree_gf(const SystemSpec& spec, const ConversionState& conv, const Eigen::VectorXd& y)
{
    double total = 0.0;
    for (const auto& s : spec.distribution.species) {
        double term = s.fraction;
        for (std::size_t k = 0; k < s.groups.size(); ++k) {
            const auto kk = static_cast<Eigen::Index>(k);
            term *= ipow(1.0 - conv.p(kk) + conv.p(kk) * y(kk), s.groups[k]);
        }
        total += term;
    }
    return total;
}

double excess_gf(const SystemSpec& spec, const ConversionState& conv, int m, const Eigen::VectorXd& y)
{
    const MomentSet moments = moment_set(spec.distribution);
    const double mu_m = conv.p(m) * moments.nu1(m);
    if (!(mu_m > 0.0))
        throw DomainError("excess_gf: no bonds of type " + std::to_string(m));
    return excess_unnormalized(spec, conv, m, y) / mu_m;
}

bool is_pregel(const SystemSpec& spec, const ConversionState& conv)
{
    const MomentSet moments = moment_set(spec.distribution);
    const auto model = branching_model(moments, spec.weights, conv);
    const auto n = static_cast<Eigen::Index>(model.lanes.size());
    if (n == 0)
        return true;
    return (Eigen::MatrixXd::Identity(n, n) - model.b()).determinant() > 0.0;
}

GfValues gf_fixed_point(const SystemSpec& spec, const ConversionState& conv, double x, const FixedPointOptions& options)
{
    if (!(x >= 0.0 && x < 1.0))
        throw DomainError("gf_fixed_point: x must lie in [0, 1)");
    require_pregel(spec, conv, "gf_fixed_point");

    const int r = spec.group_types();
    const MomentSet moments = moment_set(spec.distribution);
    const auto model = branching_model(moments, spec.weights, conv);
    const auto n = static_cast<Eigen::Index>(model.lanes.size());

    GfValues out;
    out.x = x;
    out.lanes = model.lanes;
    out.r = Eigen::VectorXd::Constant(n, x);

    auto excess = [&](const Eigen::VectorXd& r_vals) {
        const Eigen::VectorXd y = embed(r, model.lanes, r_vals);
        Eigen::VectorXd u(n);
        for (Eigen::Index a = 0; a < n; ++a)
            u(a) = excess_unnormalized(spec, conv, model.lanes[static_cast<std::size_t>(a)], y) / model.mu(a);
        return u;
    };

    for (int it = 1; it <= options.max_iterations && n > 0; ++it) {
        const Eigen::VectorXd target = x * (model.k * excess(out.r));
        const Eigen::VectorXd next = (1.0 - options.damping) * out.r + options.damping * target;
        out.residual = (target - out.r).cwiseAbs().maxCoeff();
        out.r = next;
        out.iterations = it;
        if (options.record_residuals)
            out.residual_history.push_back(out.residual);
        if (out.residual < options.tolerance)
            break;
    }
    if (n > 0 && !(out.residual < options.tolerance))
        throw NumericalError("gf_fixed_point: no convergence, residual " + std::to_string(out.residual));

    out.w = x * degree_gf(spec, conv, embed(r, model.lanes, out.r));
    return out;
}

TwoTypeGf gf_fixed_point_two_type(const SystemSpec& spec, const ConversionState& conv, KappaMix kappa, double x,
                                  const FixedPointOptions& options)
{
    if (spec.group_types() != 2)
        throw SpecError("gf_fixed_point_two_type: requires two group types");
    if (!(x >= 0.0 && x < 1.0))
        throw DomainError("gf_fixed_point_two_type: x must lie in [0, 1)");
    if (!(conv.p(0) > 0.0 && conv.p(1) > 0.0))
        throw DomainError("gf_fixed_point_two_type: both bond classes must be present");
    require_pregel(spec, conv, "gf_fixed_point_two_type");

    const MomentSet moments = moment_set(spec.distribution);
    const double mu_a = conv.p(0) * moments.nu1(0);
    const double mu_b = conv.p(1) * moments.nu1(1);
    const double k = kappa.kappa;
    TwoTypeGf out{0.0, x, x, 0};
    Eigen::VectorXd y(2);
    for (int it = 1; it <= options.max_iterations; ++it) {
        y << out.w_bi, out.w_plus;
        const double ubi = excess_unnormalized(spec, conv, 1, y) / mu_b;
        const double uin = excess_unnormalized(spec, conv, 0, y) / mu_a;
        const double t_bi = x * ubi;
        const double t_plus = x * (k * uin + (1.0 - k) * ubi);
        const double res = std::max(std::abs(t_bi - out.w_bi), std::abs(t_plus - out.w_plus));
        out.w_bi = (1.0 - options.damping) * out.w_bi + options.damping * t_bi;
        out.w_plus = (1.0 - options.damping) * out.w_plus + options.damping * t_plus;
        out.iterations = it;
        if (res < options.tolerance) {
            y << out.w_bi, out.w_plus;
            out.w = x * degree_gf(spec, conv, y);
            return out;
        }
    }
    throw NumericalError("gf_fixed_point_two_type: no convergence");
}

MwReport weight_avg_mw(const SystemSpec& spec, const ConversionState& conv)
{
    const MomentSet moments = moment_set(spec.distribution);
    const auto model = branching_model(moments, spec.weights, conv);
    const auto n = static_cast<Eigen::Index>(model.lanes.size());
    MwReport out{conv.t, 1.0, true, 1.0};
    if (n == 0)
        return out;

    const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - model.b();
    out.determinant = a.determinant();
    if (!(out.determinant > 0.0)) {
        out.converged = false;
        out.mw = std::numeric_limits<double>::infinity();
        return out;
    }
    // (I - K D) R'(1) = 1;  W'(1) = 1 + sum_k mu_k R_k'(1).
    const Eigen::VectorXd dr = a.partialPivLu().solve(Eigen::VectorXd::Ones(n));
    out.mw = 1.0 + model.mu.dot(dr);
    out.converged = std::isfinite(out.mw) && out.mw >= 1.0;
    return out;
}

SizeDistribution size_series(const SystemSpec& spec, const ConversionState& conv, int order)
{
    if (order < 2)
        throw DomainError("size_series: truncation order must be at least 2");
    require_pregel(spec, conv, "size_series");

    const MomentSet moments = moment_set(spec.distribution);
    const auto model = branching_model(moments, spec.weights, conv);
    const std::size_t n = model.lanes.size();
    const auto S = static_cast<std::size_t>(order);

    SizeDistribution out;
    out.t = conv.t;
    out.w.assign(S, 0.0);
    if (n == 0) {
        out.w[0] = 1.0;
        return out;
    }

    // Monomials prod_a f_a^{e_a} over bonded lanes, shared between U and the U_m.
    std::map<std::vector<int>, std::size_t> index;
    std::vector<Chain> monomials;
    struct Term {
        double coeff;
        std::size_t monomial;
        int target; // -1: U, otherwise lane slot of U_m
    };
    std::vector<Term> terms;
    auto monomial_for = [&](const std::vector<int>& e) {
        auto [it, inserted] = index.try_emplace(e, monomials.size());
        if (inserted) {
            Chain c;
            for (std::size_t a = 0; a < n; ++a)
                for (int i = 0; i < e[a]; ++i)
                    c.factors.push_back(static_cast<int>(a));
            if (c.factors.size() > 1)
                c.partial.assign(c.factors.size() - 1, Series(S, 0.0));
            monomials.push_back(std::move(c));
        }
        return it->second;
    };
    for (const auto& s : spec.distribution.species) {
        std::vector<int> e(n);
        for (std::size_t a = 0; a < n; ++a)
            e[a] = s.groups[static_cast<std::size_t>(model.lanes[a])];
        terms.push_back({s.fraction, monomial_for(e), -1});
        for (std::size_t a = 0; a < n; ++a) {
            if (e[a] == 0)
                continue;
            auto em = e;
            --em[a];
            const int lane = model.lanes[a];
            const double coeff = s.fraction * e[a] * conv.p(lane) / model.mu(static_cast<Eigen::Index>(a));
            terms.push_back({coeff, monomial_for(em), static_cast<int>(a)});
        }
    }

    // f_a(x) = 1 - p_a + p_a R_a(x), R_a(0) = 0.
    std::vector<Series> r(n, Series(S, 0.0));
    std::vector<Series> f(n, Series(S, 0.0));
    std::vector<double> mono_coeff(monomials.size());
    Eigen::VectorXd um(static_cast<Eigen::Index>(n));

    for (std::size_t c = 0; c < S; ++c) {
        for (std::size_t a = 0; a < n; ++a) {
            const double p = conv.p(model.lanes[a]);
            f[a][c] = c == 0 ? 1.0 - p : p * r[a][c];
        }
        for (std::size_t q = 0; q < monomials.size(); ++q) {
            auto& m = monomials[q];
            if (m.factors.empty()) {
                mono_coeff[q] = c == 0 ? 1.0 : 0.0;
                continue;
            }
            const Series* prev = &f[static_cast<std::size_t>(m.factors[0])];
            for (std::size_t i = 1; i < m.factors.size(); ++i) {
                const Series& g = f[static_cast<std::size_t>(m.factors[i])];
                double acc = 0.0;
                for (std::size_t j = 0; j <= c; ++j)
                    acc += (*prev)[j] * g[c - j];
                m.partial[i - 1][c] = acc;
                prev = &m.partial[i - 1];
            }
            mono_coeff[q] = (*prev)[c];
        }
        double u = 0.0;
        um.setZero();
        for (const auto& t : terms) {
            if (t.target < 0)
                u += t.coeff * mono_coeff[t.monomial];
            else
                um(t.target) += t.coeff * mono_coeff[t.monomial];
        }
        // W = x U(R): coefficient c of U is w(c + 1).
        out.w[c] = u;
        if (c + 1 < S) {
            const Eigen::VectorXd next = model.k * um;
            for (std::size_t a = 0; a < n; ++a)
                r[a][c + 1] = next(static_cast<Eigen::Index>(a));
        }
    }

    double mass = 0.0;
    for (double v : out.w) {
        if (!std::isfinite(v) || v < -1e-15)
            throw NumericalError("size_series: invalid coefficient");
        mass += v;
    }
    out.tail_mass = 1.0 - mass;
    return out;
}

} // namespace gelkit
