#include <doctest.h>

#include <cmath>
#include <numeric>

#include "gelkit/config.hpp"
#include "gelkit/degrees.hpp"
#include "gelkit/errors.hpp"
#include "gelkit/molweight.hpp"
#include "support.hpp"

using namespace gelkit;

namespace {

ConversionState at(std::initializer_list<double> p)
{
    ConversionState c;
    c.p.resize(static_cast<Eigen::Index>(p.size()));
    Eigen::Index i = 0;
    for (double v : p)
        c.p(i++) = v;
    return c;
}

// Stockmayer's mass fraction of s-mers for an f-functional homopolymer.
double stockmayer_w(int f, int s, double p)
{
    const double log_n = std::log(f) + std::lgamma(f * s - s + 1.0) - std::lgamma(s + 1.0) -
                         std::lgamma(f * s - 2.0 * s + 3.0) + (s - 1) * std::log(p) +
                         (f * s - 2 * s + 2) * std::log1p(-p);
    return s * std::exp(log_n);
}

} // namespace

TEST_SUITE("molweight") {

TEST_CASE("homopolymer size distribution matches Stockmayer")
{
    for (int f : {3, 4}) {
        const double p = 0.6 / (f - 1);
        const auto spec = testing::homopolymer(f);
        const auto sizes = size_series(spec, at({p}), 200);
        for (int s = 1; s <= 60; ++s)
            CHECK(sizes.at(s) == doctest::Approx(stockmayer_w(f, s, p)).epsilon(1e-10));
        CHECK(weight_avg_mw(spec, at({p})).mw == doctest::Approx((1 + p) / (1 - (f - 1) * p)).epsilon(1e-12));
    }
}

TEST_CASE("first series coefficients")
{
    for (const auto& name : preset_names()) {
        const auto spec = preset_spec(name);
        const auto moments = moment_set(spec.distribution);
        const auto conv = at({0.2, 0.15});
        const auto sizes = size_series(spec, conv, 8);
        const auto dist = degree_dist(spec, conv);

        const int zero[] = {0, 0};
        CHECK(sizes.at(1) == doctest::Approx(dist.at(zero)).epsilon(1e-14));
        CHECK(sizes.at(1) == doctest::Approx(degree_gf(spec, conv, Eigen::VectorXd::Zero(2))).epsilon(1e-14));

        // A dimer is a monomer with exactly one bond whose partner has no other bond.
        const Eigen::VectorXd mu = conv.p.cwiseProduct(moments.nu1);
        double dimer = 0.0;
        for (int m = 0; m < 2; ++m) {
            const int em[] = {m == 0, m == 1};
            double norm = 0.0, tail = 0.0;
            for (int j = 0; j < 2; ++j) {
                const int ej[] = {j == 0, j == 1};
                norm += spec.weights(m, j) * mu(j);
                tail += spec.weights(m, j) * mu(j) * dist.at(ej) / mu(j);
            }
            dimer += dist.at(em) * tail / norm;
        }
        CHECK(sizes.at(2) == doctest::Approx(dimer).epsilon(1e-12));
    }
}

TEST_CASE("printed dimer expression counts B-B pairs a directed system cannot form")
{
    const auto spec = preset_spec("a2b5-directed");
    const auto moments = moment_set(spec.distribution);
    const auto conv = at({0.3, 0.2});
    const auto dist = degree_dist(spec, conv);
    const int e10[] = {1, 0}, e01[] = {0, 1};
    const double u10 = dist.at(e10), u01 = dist.at(e01);
    const double mu10 = 0.3 * moments.nu1(0), mu01 = 0.2 * moments.nu1(1);

    const double printed = u10 * u01 * (1 / mu01 + 1 / mu10) + u01 * u01 / mu01;
    const double functional = u10 * u01 / mu01 + u01 * u10 / mu10; // kappa = 1
    const double w2 = size_series(spec, conv, 4).at(2);
    CHECK(w2 == doctest::Approx(functional).epsilon(1e-13));
    CHECK(printed - w2 == doctest::Approx(u01 * u01 / mu01).epsilon(1e-12));
}

TEST_CASE("series sums to one before the gel point and matches Mw")
{
    for (const auto& name : preset_names()) {
        const auto spec = preset_spec(name);
        const auto traj = integrate_until_stationary(spec, {1e-11, 1e-14});
        const auto g = find_gel_time(traj, CriterionKind::general_determinant);
        REQUIRE(g.t_gel);
        const auto conv = conversion(traj, 0.5 * *g.t_gel);
        const auto sizes = size_series(spec, conv, 1024);
        const double mass = std::accumulate(sizes.w.begin(), sizes.w.end(), 0.0);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(sizes.weight_average() == doctest::Approx(weight_avg_mw(spec, conv).mw).epsilon(1e-9));
        for (double v : sizes.w)
            CHECK(v >= 0.0);
    }
}

TEST_CASE("general and two-type generating functions agree")
{
    for (const auto& name : preset_names()) {
        const auto spec = preset_spec(name);
        const auto moments = moment_set(spec.distribution);
        const auto conv = at({0.2, 0.1});
        const auto kappa = kappa_mix(moments, spec.weights, conv);
        for (double x : {0.0, 0.3, 0.7, 0.99}) {
            const auto general = gf_fixed_point(spec, conv, x);
            const auto two = gf_fixed_point_two_type(spec, conv, kappa, x);
            CHECK(general.w == doctest::Approx(two.w).epsilon(1e-10));
            CHECK(general.r(0) == doctest::Approx(two.w_bi).epsilon(1e-10));
            CHECK(general.r(1) == doctest::Approx(two.w_plus).epsilon(1e-10));
        }
        const auto sizes = size_series(spec, conv, 400);
        double direct = 0.0;
        for (int s = 400; s >= 1; --s)
            direct = direct * 0.7 + sizes.at(s);
        CHECK(gf_fixed_point(spec, conv, 0.7).w == doctest::Approx(0.7 * direct).epsilon(1e-10));
    }
}

TEST_CASE("fixed-point residuals shrink")
{
    const auto spec = preset_spec("single-2-5");
    FixedPointOptions opt;
    opt.record_residuals = true;
    const auto gf = gf_fixed_point(spec, at({0.1, 0.1}), 0.9, opt);
    REQUIRE(gf.residual_history.size() > 3);
    CHECK(gf.residual_history.back() < gf.residual_history.front());
    CHECK(gf.residual < opt.tolerance);
}

TEST_CASE("Mw at zero conversion and past the gel point")
{
    const auto spec = preset_spec("single-2-5");
    CHECK(weight_avg_mw(spec, at({0.0, 0.0})).mw == 1.0);
    CHECK(size_series(spec, at({0.0, 0.0}), 4).at(1) == 1.0);

    const auto post = at({0.5, 0.5});
    CHECK_FALSE(is_pregel(spec, post));
    const auto mw = weight_avg_mw(spec, post);
    CHECK_FALSE(mw.converged);
    CHECK(std::isinf(mw.mw));
    CHECK_THROWS_AS(size_series(spec, post, 16), DomainError);
    CHECK_THROWS_AS(gf_fixed_point(spec, post, 0.5), DomainError);
    CHECK_THROWS_AS(size_series(spec, at({0.1, 0.1}), 1), DomainError);
}

TEST_CASE("Mw grows toward the gel point")
{
    const auto spec = preset_spec("a2b5-directed");
    const auto traj = integrate_until_stationary(spec, {1e-11, 1e-14});
    const auto g = find_gel_time(traj, CriterionKind::general_determinant);
    REQUIRE(g.t_gel);
    double last = 0.0;
    for (int i = 0; i <= 50; ++i) {
        const double mw = weight_avg_mw(spec, conversion(traj, g.bracket_lo * i / 50.0)).mw;
        CHECK(mw >= last);
        last = mw;
    }
    CHECK(last > 1e6);
}

}
