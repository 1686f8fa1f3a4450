#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "ets/bm_series.hpp"

using namespace ets;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Reference values computed with an independent high-precision evaluation of
// the hitting functionals on the unit horizon; delta = pi/sqrt(8 lambda).
struct RefRow {
    double lambda, p, e1, e2, phi, psi;
};

const RefRow kRef[] = {
    {0.3, 0.085143084774375, 0.021249747714485, 0.007782883379885, 0.825227830362561,
     -0.015565766759771},
    {0.5, 0.232455034544235, 0.076068883379344, 0.034373194736919, 0.624615106906636,
     -0.068746389473837},
    {1.0, 0.531653724549501, 0.234692282419904, 0.132497967602049, 0.420920004131702,
     -0.264995935204098},
    {1.2337005501361697, 0.629222570200476, 0.300545470426126, 0.179439872175807,
     0.398909059147749, -0.358879744351614},
    {2.0, 0.827685772049015, 0.469306841780209, 0.314316102448956, 0.421015891113087,
     -0.628632204897911},
};

}  // namespace

TEST_CASE("lambda parameterization") {
    CHECK_THROWS_AS(LambdaParam(0.0), std::invalid_argument);
    CHECK_THROWS_AS(LambdaParam(-1.0), std::invalid_argument);

    const double lam = lambda_from_delta(1.0, 1.0);
    CHECK(lam == doctest::Approx(kPi * kPi / 8.0).epsilon(1e-15));
    CHECK(delta_from_lambda(lam, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(lambda_from_delta(delta_from_lambda(0.37, 2.0), 2.0) ==
          doctest::Approx(0.37).epsilon(1e-14));
}

TEST_CASE("alternating constants") {
    CHECK(alternating_series_constant(1) == doctest::Approx(kPi / 4.0).epsilon(1e-12));

    const SeriesConfig tight{1e-13, 20000};
    CHECK(std::abs(alternating_series_constant(3, tight) - kPi * kPi * kPi / 32.0) < 1e-10);
    const double pi5 = kPi * kPi * kPi * kPi * kPi;
    CHECK(std::abs(alternating_series_constant(5, tight) - 5.0 * pi5 / 1536.0) < 1e-10);

    CHECK_THROWS_AS(alternating_series_constant(2), std::invalid_argument);
}

TEST_CASE("hitting functionals against reference values") {
    for (const RefRow& r : kRef) {
        const LambdaParam lam(r.lambda);
        const double delta = delta_from_lambda(r.lambda, 1.0);
        CHECK(firing_probability(lam) == doctest::Approx(r.p).epsilon(1e-11));
        CHECK(residual_moment_1(delta, 1.0) == doctest::Approx(r.e1).epsilon(1e-11));
        CHECK(residual_moment_2(delta, 1.0) == doctest::Approx(r.e2).epsilon(1e-11));
        CHECK(phi(lam) == doctest::Approx(r.phi).epsilon(1e-11));
        CHECK(psi(lam) == doctest::Approx(r.psi).epsilon(1e-11));
    }
}

TEST_CASE("moment identities tie the cost functions together") {
    // (T^2/2) phi = T^2/2 - delta^2 E1 and psi = -2 E2 on the unit horizon
    for (double lambda : {0.08, 0.3, 0.7, 1.3, 2.5, 6.0}) {
        const LambdaParam lam(lambda);
        const double delta = delta_from_lambda(lambda, 1.0);
        const double lhs = 0.5 * phi(lam);
        const double rhs = 0.5 - delta * delta * residual_moment_1(delta, 1.0);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
        CHECK(psi(lam) ==
              doctest::Approx(-2.0 * residual_moment_2(delta, 1.0)).epsilon(1e-11));
    }
}

TEST_CASE("evaluation branches agree where they meet") {
    // the image and exponential expansions are both accurate near the switch;
    // the probe gap contributes ~2e-12 * d/dlambda, well inside the tolerances
    const LambdaParam just_lo(0.25 - 1e-12), just_hi(0.25 + 1e-12);
    CHECK(phi(just_lo) == doctest::Approx(phi(just_hi)).epsilon(1e-9));
    CHECK(phi(LambdaParam(0.25)) == doctest::Approx(0.883588542478394).epsilon(1e-12));

    CHECK(psi(just_lo) == doctest::Approx(psi(just_hi)).epsilon(1e-7));

    CHECK(firing_probability(just_lo) ==
          doctest::Approx(firing_probability(just_hi)).epsilon(1e-10));
}

TEST_CASE("asymptotic behaviour of the cost functions") {
    CHECK(phi(LambdaParam(1e4)) == doctest::Approx(0.999753290330314).epsilon(1e-12));
    CHECK(psi(LambdaParam(1e4)) == doctest::Approx(-1.999506570513847).epsilon(1e-12));
    CHECK(std::abs(phi(LambdaParam(1e4)) - 1.0) < 1e-3);
    CHECK(std::abs(psi(LambdaParam(1e4)) + 2.0) < 1e-3);

    // tiny lambda: the band is so wide that a crossing is essentially
    // impossible, so phi -> 1 and psi -> 0 from below in magnitude
    CHECK(phi(LambdaParam(1e-4)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(psi(LambdaParam(1e-4))) < std::abs(psi(LambdaParam(1e-3))));
}

TEST_CASE("firing probability is a probability and grows with lambda") {
    double prev = -1.0;
    for (double lg = -4.0; lg <= 4.0; lg += 0.125) {
        const double p = firing_probability(LambdaParam(std::pow(10.0, lg)));
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
        CHECK(p >= prev);  // nondecreasing over the whole range
        prev = p;
    }
    // strictly increasing where the probability is far from both endpoints
    prev = firing_probability(LambdaParam(0.3));
    for (double lambda = 0.4; lambda <= 5.0; lambda += 0.1) {
        const double p = firing_probability(LambdaParam(lambda));
        CHECK(p > prev);
        prev = p;
    }
    CHECK(firing_probability(LambdaParam(1e4)) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("exit-time transform") {
    CHECK(mgf_first_hitting(1.0, 1.0, 0.0) ==
          doctest::Approx(0.459098131085425).epsilon(1e-12));
    CHECK(mgf_first_hitting(0.0, 2.3, 0.7) == 1.0);       // s = 0 is exactly one
    CHECK(mgf_first_hitting(1.0, 1.0, 1.0) == 1.0);       // started on the level
    CHECK(mgf_first_hitting(1.0, 1.0, -1.0) == 1.0);      // either side counts
    CHECK(mgf_first_hitting(2.0, 1.0, 0.0) < mgf_first_hitting(1.0, 1.0, 0.0));
    CHECK(mgf_first_hitting(1.0, 1.0, 0.5) > mgf_first_hitting(1.0, 1.0, 0.0));

    // far level: cosh overflows, the guarded form must stay finite
    const double far = mgf_first_hitting(1.0, 800.0, 0.0);
    CHECK(std::isfinite(far));
    CHECK(far >= 0.0);
    CHECK(far < 1e-300);

    CHECK_THROWS_AS(mgf_first_hitting(-1.0, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(mgf_first_hitting(1.0, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(mgf_first_hitting(1.0, 1.0, -1.5), std::invalid_argument);
}

TEST_CASE("series truncation is reported, not silently absorbed") {
    const SeriesConfig starved{1e-30, 3};
    CHECK_THROWS_AS(theta_series(3, 0.05, starved), std::runtime_error);
}

TEST_CASE("residual moments are ordered and bounded") {
    for (double delta : {0.5, 0.8, 1.0, 1.5}) {
        const double e1 = residual_moment_1(delta, 1.0);
        const double e2 = residual_moment_2(delta, 1.0);
        CHECK(e1 > 0.0);
        CHECK(e1 < 1.0);                       // bounded by T
        CHECK(e2 > 0.0);
        CHECK(e2 < e1);                        // (T - tau)^+ < T on the unit horizon
    }
    // wider band leaves less residual time
    CHECK(residual_moment_1(1.5, 1.0) < residual_moment_1(0.5, 1.0));
}
