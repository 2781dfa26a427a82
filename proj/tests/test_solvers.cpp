#include <cmath>

#include "doctest.h"
#include "fpcredit/solvers.hpp"

using namespace fpcredit;

TEST_SUITE("solvers") {

TEST_CASE("brent finds simple roots") {
    auto r = find_root([](double x) { return x * x - 2.0; }, 0.0, 2.0, 1e-15);
    CHECK(r.bracketed);
    CHECK(r.converged);
    CHECK(r.x == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

    r = find_root([](double x) { return std::cos(x) - x; }, 0.0, 1.0, 1e-15);
    CHECK(r.x == doctest::Approx(0.7390851332151607).epsilon(1e-14));
    CHECK(r.iterations < 20);
}

TEST_CASE("brent on a flat-then-steep function") {
    auto r = find_root([](double x) { return std::exp(20.0 * x) - 1e6; }, 0.0, 5.0, 1e-9);
    CHECK(r.converged);
    CHECK(r.x == doctest::Approx(std::log(1e6) / 20.0).epsilon(1e-12));
}

TEST_CASE("brent endpoints and missing brackets") {
    auto r = find_root([](double x) { return x; }, 0.0, 1.0, 1e-12);
    CHECK(r.bracketed);
    CHECK(r.x == 0.0);
    r = find_root([](double x) { return x * x + 1.0; }, -1.0, 1.0, 1e-12);
    CHECK_FALSE(r.bracketed);
    CHECK_FALSE(r.converged);
}

TEST_CASE("nelder-mead on Rosenbrock") {
    auto rosen = [](const std::vector<double>& x) {
        return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
    };
    const auto m = nelder_mead(rosen, {-1.2, 1.0}, 0.5, 1e-20);
    CHECK(m.converged);
    CHECK(m.x[0] == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(m.x[1] == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("nelder-mead is deterministic") {
    auto f = [](const std::vector<double>& x) { return std::pow(x[0] - 0.3, 2) + std::pow(x[1] + 2, 4) + x[2] * x[2]; };
    const auto a = nelder_mead(f, {1, 1, 1}, 0.3, 1e-16);
    const auto b = nelder_mead(f, {1, 1, 1}, 0.3, 1e-16);
    CHECK(a.x == b.x);
    CHECK(a.evaluations == b.evaluations);
}

}
