#include "doctest.h"
#include "netkin/hyperbolic.hpp"
#include "netkin/models.hpp"

#include <cmath>
#include <random>

using namespace netkin;

TEST_SUITE_BEGIN("hyperbolic");

namespace {

// Independent oracle for the half-moment spectrum: roots of the quartic
// x^4 - (29/6) phi x^2 + phi^2/6 = 0, expanded by hand from det(M - xI).
std::vector<double> halfmoment_quartic_roots(double phi) {
    const double s = std::sqrt(817.0);
    const double hi = std::sqrt(phi * (29.0 + s) / 12.0);
    const double lo = std::sqrt(phi * (29.0 - s) / 12.0);
    return {-hi, -lo, lo, hi};
}

void check_invariants(const LinearHyperbolicSystem& sys) {
    const int n = sys.dim;
    double norm = 1.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) norm = std::max(norm, std::abs(sys.matrix(i, j)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double recon = 0.0, rl = 0.0;
            for (int k = 0; k < n; ++k) {
                recon += sys.right(i, k) * sys.lambda[k] * sys.left(k, j);
                rl += sys.right(i, k) * sys.left(k, j);
            }
            CHECK(std::abs(recon - sys.matrix(i, j)) <= 1e-12 * norm);
            CHECK(std::abs(rl - (i == j ? 1.0 : 0.0)) <= 1e-12);
        }
    for (int k = 1; k < n; ++k) CHECK(sys.lambda[k] >= sys.lambda[k - 1]);
}

}  // namespace

TEST_CASE("P1 matrix with phi = 1/3 has speeds +-1/sqrt(3)") {
    const auto sys = eigendecompose(p1_transport_matrix(1.0 / 3.0));
    CHECK(sys.lambda[0] == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-14));
    CHECK(sys.lambda[1] == doctest::Approx(+1.0 / std::sqrt(3.0)).epsilon(1e-14));
    check_invariants(sys);
}

TEST_CASE("kinetic per-velocity matrix, v = 0.5, phi = 1") {
    const auto sys = eigendecompose(kinetic_transport_matrix(0.5, 1.0));
    CHECK(sys.lambda[0] == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(sys.lambda[1] == doctest::Approx(+0.5).epsilon(1e-14));
    check_invariants(sys);
}

TEST_CASE("half-moment spectrum matches the quartic oracle") {
    for (double phi : {1.0 / 6.0, 1.0 / 12.0}) {
        const auto sys = eigendecompose(halfmoment_transport_matrix(phi));
        const auto oracle = halfmoment_quartic_roots(phi);
        REQUIRE(sys.lambda.size() == 4);
        for (int k = 0; k < 4; ++k)
            CHECK(std::abs(sys.lambda[k] - oracle[k]) <= 1e-12);
        check_invariants(sys);
    }
    // phi = 1/6 values, for the record: +-0.894296836..., +-0.076083665...
    const auto sys = eigendecompose(halfmoment_transport_matrix(1.0 / 6.0));
    CHECK(sys.lambda[3] == doctest::Approx(0.89429683625299920).epsilon(1e-13));
    CHECK(sys.lambda[2] == doctest::Approx(0.07608366594369575).epsilon(1e-13));
}

TEST_CASE("half-moment matrix always has two positive and two negative speeds") {
    for (double phi : {1.0 / 6.0, 0.01, 5.0, 1.0 / 6e-2}) {
        const auto sys = eigendecompose(halfmoment_transport_matrix(phi));
        int pos = 0, neg = 0;
        for (double l : sys.lambda) (l > 0 ? pos : neg)++;
        CHECK(pos == 2);
        CHECK(neg == 2);
    }
}

TEST_CASE("round trip across the model phi family") {
    // phi in {a^2/l^2, a^2/(3 l^2), a^2/(6 l^2)} with lambda = alpha = 1.
    check_invariants(eigendecompose(kinetic_transport_matrix(1.0, 1.0)));
    check_invariants(eigendecompose(kinetic_transport_matrix(0.01, 1.0)));
    check_invariants(eigendecompose(p1_transport_matrix(1.0 / 3.0)));
    check_invariants(eigendecompose(halfmoment_transport_matrix(1.0 / 6.0)));
}

TEST_CASE("general spectra via similarity transforms") {
    // S diag(d) S^-1 exercises the non-biquadratic quartic and cubic paths.
    Mat s3(3, 3);
    const double s3v[9] = {1, 2, 0, 0, 1, 1, 1, 0, 2};
    for (int i = 0; i < 9; ++i) s3(i / 3, i % 3) = s3v[i];
    Mat d3(3, 3);
    d3(0, 0) = -1.0;
    d3(1, 1) = 0.5;
    d3(2, 2) = 2.0;
    const auto sys3 = eigendecompose(s3 * d3 * inverse(s3));
    CHECK(sys3.lambda[0] == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(sys3.lambda[1] == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(sys3.lambda[2] == doctest::Approx(2.0).epsilon(1e-10));

    Mat s4(4, 4);
    const double s4v[16] = {2, 1, 0, 0, 1, 2, 1, 0, 0, 1, 2, 1, 0, 0, 1, 2};
    for (int i = 0; i < 16; ++i) s4(i / 4, i % 4) = s4v[i];
    Mat d4(4, 4);
    d4(0, 0) = -2.0;
    d4(1, 1) = -0.25;
    d4(2, 2) = 1.0;
    d4(3, 3) = 3.0;
    const auto sys4 = eigendecompose(s4 * d4 * inverse(s4));
    CHECK(sys4.lambda[0] == doctest::Approx(-2.0).epsilon(1e-9));
    CHECK(sys4.lambda[1] == doctest::Approx(-0.25).epsilon(1e-9));
    CHECK(sys4.lambda[2] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(sys4.lambda[3] == doctest::Approx(3.0).epsilon(1e-9));
    check_invariants(sys4);
}

TEST_CASE("degenerate and invalid spectra") {
    const auto id = eigendecompose(Mat::identity(2));  // repeated eigenvalue, full basis
    CHECK(id.lambda[0] == doctest::Approx(1.0));
    CHECK(id.lambda[1] == doctest::Approx(1.0));
    check_invariants(id);

    Mat rot(2, 2);  // complex spectrum
    rot(0, 1) = -1.0;
    rot(1, 0) = 1.0;
    CHECK_THROWS_AS(eigendecompose(rot), std::runtime_error);

    Mat nil(2, 2);  // defective (Jordan block)
    nil(0, 1) = 1.0;
    CHECK_THROWS_AS(eigendecompose(nil), std::runtime_error);
}

TEST_CASE("upwind: zero state and zero traces stay zero") {
    const auto sys = eigendecompose(p1_transport_matrix(0.25));
    std::vector<double> state(20, 0.0);
    const std::vector<double> ghost{0.0, 0.0};
    upwind_step(state, sys, 0.01, 0.1, ghost, ghost);
    for (double v : state) CHECK(v == 0.0);
}

TEST_CASE("upwind: constant state with matching ghosts is bit-identical") {
    const auto sys = eigendecompose(halfmoment_transport_matrix(1.0 / 6.0));
    std::vector<double> state;
    const std::vector<double> u{1.25, -0.5, 0.75, 2.0};
    for (int i = 0; i < 12; ++i) state.insert(state.end(), u.begin(), u.end());
    auto before = state;
    upwind_step(state, sys, 0.01, 0.1, u, u);
    CHECK(state == before);
}

TEST_CASE("upwind: single characteristic shifts one cell at unit Courant") {
    const double phi = 0.49;
    const auto sys = eigendecompose(p1_transport_matrix(phi));
    const double lam = sys.lambda[1];  // +sqrt(phi)
    const int n = 10;
    // Pure positive-speed wave: w+ delta at cell 3.
    std::vector<double> w(n, 0.0);
    w[3] = 1.0;
    std::vector<double> state(2 * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int d = 0; d < 2; ++d) state[2 * i + d] = w[i] * sys.right(d, 1);
    const double dx = 0.1;
    const double dt = dx / lam;
    const std::vector<double> ghost{0.0, 0.0};
    upwind_step(state, sys, dt, dx, ghost, ghost);
    for (int i = 0; i < n; ++i) {
        const double expect = (i == 4) ? 1.0 : 0.0;
        for (int d = 0; d < 2; ++d)
            CHECK(state[2 * i + d] == doctest::Approx(expect * sys.right(d, 1)).epsilon(1e-12));
    }
}

TEST_CASE("upwind conserves each characteristic up to boundary fluxes") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const auto sys = eigendecompose(halfmoment_transport_matrix(1.0 / 6.0));
    const int n = 25;
    std::vector<double> state(4 * n), gl(4), gr(4);
    for (auto& v : state) v = dist(rng);
    for (auto& v : gl) v = dist(rng);
    for (auto& v : gr) v = dist(rng);

    auto char_sums = [&](const std::vector<double>& s) {
        std::vector<double> sums(4, 0.0);
        for (int k = 0; k < 4; ++k)
            for (int i = 0; i < n; ++i) {
                double w = 0.0;
                for (int d = 0; d < 4; ++d) w += sys.left(k, d) * s[4 * i + d];
                sums[k] += w;
            }
        return sums;
    };
    auto wk = [&](std::span<const double> u, int k) {
        double w = 0.0;
        for (int d = 0; d < 4; ++d) w += sys.left(k, d) * u[d];
        return w;
    };

    const double dx = 0.04, dt = 0.02;
    const auto before = char_sums(state);
    auto first = std::vector<double>(state.begin(), state.begin() + 4);
    auto last = std::vector<double>(state.end() - 4, state.end());
    upwind_step(state, sys, dt, dx, gl, gr);
    const auto after = char_sums(state);
    for (int k = 0; k < 4; ++k) {
        const double lam = sys.lambda[k];
        const double influx = (lam > 0) ? lam * wk(gl, k) : lam * wk(first, k);
        const double outflux = (lam > 0) ? lam * wk(last, k) : lam * wk(gr, k);
        const double expect = before[k] + dt / dx * (influx - outflux);
        CHECK(after[k] == doctest::Approx(expect).epsilon(5e-13));
    }
}

TEST_CASE("upwind rejects CFL violations") {
    const auto sys = eigendecompose(p1_transport_matrix(1.0));
    std::vector<double> state(10, 0.0);
    const std::vector<double> ghost{0.0, 0.0};
    CHECK_THROWS_AS(upwind_step(state, sys, 0.2, 0.1, ghost, ghost), std::runtime_error);
}

TEST_CASE("cfl_dt: advective, parabolic and min laws") {
    const auto p1 = eigendecompose(p1_transport_matrix(1.0 / 3.0));
    std::vector<EdgeGrid> one{EdgeGrid(2.0, 100)};  // dx = 0.02
    CHECK(cfl_dt({&p1}, one, {}, 0.9) ==
          doctest::Approx(0.9 * 0.02 * std::sqrt(3.0)).epsilon(1e-14));
    CHECK(cfl_dt({}, one, {1.0}, 0.9) == doctest::Approx(0.9 * 0.0002).epsilon(1e-14));

    std::vector<EdgeGrid> two{EdgeGrid(2.0, 100), EdgeGrid(1.0, 100)};
    const double dt_each =
        std::min(cfl_dt({&p1}, {two[0]}, {1.0}, 0.9), cfl_dt({&p1}, {two[1]}, {1.0}, 0.9));
    CHECK(cfl_dt({&p1}, two, {1.0}, 0.9) == doctest::Approx(dt_each).epsilon(1e-15));

    CHECK_THROWS_AS(cfl_dt({&p1}, {}, {}, 0.9), std::invalid_argument);
    CHECK_THROWS_AS(cfl_dt({}, one, {}, 0.9), std::invalid_argument);
    CHECK_THROWS_AS(cfl_dt({&p1}, one, {}, 1.5), std::invalid_argument);
}

TEST_SUITE_END();
