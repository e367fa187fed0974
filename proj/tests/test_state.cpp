#include <catch2/catch_amalgamated.hpp>

#include "qcorr/state.hpp"

using namespace qcorr;
using Catch::Matchers::WithinAbs;

TEST_CASE("eig_hermitian on textbook matrices", "[state]") {
    Spectrum id = eig_hermitian(CMat::Identity(2, 2));
    CHECK_THAT(id.eigenvalues(0), WithinAbs(1.0, 1e-14));
    CHECK_THAT(id.eigenvalues(1), WithinAbs(1.0, 1e-14));

    CMat d(2, 2);
    d.setZero();
    d(0, 0) = 0.7;
    d(1, 1) = 0.3;
    Spectrum sd = eig_hermitian(d);
    CHECK_THAT(sd.eigenvalues(0), WithinAbs(0.7, 1e-14));
    CHECK_THAT(sd.eigenvalues(1), WithinAbs(0.3, 1e-14));

    CMat sx(2, 2);
    sx.setZero();
    sx(0, 1) = 1.0;
    sx(1, 0) = 1.0;
    Spectrum sp = eig_hermitian(sx);
    CHECK_THAT(sp.eigenvalues(0), WithinAbs(1.0, 1e-14));
    CHECK_THAT(sp.eigenvalues(1), WithinAbs(-1.0, 1e-14));
    CHECK_THAT(std::abs(sp.eigenvectors(0, 0)), WithinAbs(1.0 / std::sqrt(2.0), 1e-12));

    CMat skew(2, 2);
    skew.setZero();
    skew(0, 1) = 1.0;  // not Hermitian
    CHECK_THROWS_AS(eig_hermitian(skew), NonHermitian);
}

TEST_CASE("spectrum reconstructs and stays orthonormal", "[state]") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        DensityMatrix rho = random_density_matrix(4, rng, {2, 2});
        Spectrum s = eig_hermitian(rho.mat);
        CMat rebuilt =
            s.eigenvectors * s.eigenvalues.asDiagonal() * s.eigenvectors.adjoint();
        CHECK(max_abs(rebuilt - rho.mat) <= 1e-10);
        CMat gram = s.eigenvectors.adjoint() * s.eigenvectors;
        CHECK(max_abs(gram - CMat::Identity(4, 4)) <= 1e-10);
        CHECK(s.eigenvalues(0) >= s.eigenvalues(3));
        CHECK_THAT(s.eigenvalues.sum(), WithinAbs(1.0, 1e-10));
    }
}

TEST_CASE("matrix_power basics and additivity", "[state]") {
    CMat d(2, 2);
    d.setZero();
    d(0, 0) = 0.25;
    d(1, 1) = 0.75;
    CMat half = matrix_power(d, 0.5);
    CHECK_THAT(half(0, 0).real(), WithinAbs(0.5, 1e-14));
    CHECK_THAT(half(1, 1).real(), WithinAbs(std::sqrt(0.75), 1e-14));

    std::mt19937_64 rng(5);
    DensityMatrix rho = random_density_matrix(4, rng, {2, 2});
    CHECK(max_abs(matrix_power(rho.mat, 1.0) - rho.mat) <= 1e-12);

    CMat inv = matrix_power(CMat::Identity(2, 2) / 2.0, -1.0);
    CHECK(max_abs(inv - 2.0 * CMat::Identity(2, 2)) <= 1e-12);

    // Inverse of a singular matrix must refuse instead of inventing numbers.
    CMat pure = CMat::Zero(2, 2);
    pure(0, 0) = 1.0;
    CHECK_THROWS_AS(matrix_power(pure, -1.0), SingularPower);

    for (double s : {-1.0, 0.5, 1.0, 2.0})
        for (double t : {-1.0, 0.5, 1.0, 2.0}) {
            CMat lhs = matrix_power(rho.mat, s + t);
            CMat rhs = matrix_power(rho.mat, s) * matrix_power(rho.mat, t);
            CHECK(max_abs(lhs - rhs) <= 1e-9);
        }
}

TEST_CASE("kron products", "[state]") {
    CHECK(max_abs(kron(CMat::Identity(2, 2), CMat::Identity(2, 2)) -
                  CMat::Identity(4, 4)) == 0.0);

    CMat a(2, 2), b(2, 2);
    a.setZero();
    b.setZero();
    a(0, 0) = 2.0;
    a(1, 1) = 3.0;
    b(0, 0) = 5.0;
    b(1, 1) = 7.0;
    CMat ab = kron(a, b);
    CHECK_THAT(ab(0, 0).real(), WithinAbs(10.0, 1e-15));
    CHECK_THAT(ab(1, 1).real(), WithinAbs(14.0, 1e-15));
    CHECK_THAT(ab(2, 2).real(), WithinAbs(15.0, 1e-15));
    CHECK_THAT(ab(3, 3).real(), WithinAbs(21.0, 1e-15));

    CMat p0 = CMat::Zero(2, 2), p1 = CMat::Zero(2, 2);
    p0(0, 0) = 1.0;
    p1(1, 1) = 1.0;
    CMat proj01 = kron(p0, p1);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            CHECK_THAT(proj01(i, j).real(), WithinAbs(i == 1 && j == 1 ? 1.0 : 0.0, 1e-15));
}

TEST_CASE("partial_trace recovers factors and marginals", "[state]") {
    DensityMatrix a = make_density_matrix(bloch_qubit(0.2, -0.3, 0.4), {2});
    DensityMatrix b = make_density_matrix(bloch_qubit(-0.1, 0.5, 0.2), {2});
    DensityMatrix prod = make_two_qubit(kron(a.mat, b.mat));
    CHECK(max_abs(partial_trace(prod, 0).mat - a.mat) <= 1e-12);
    CHECK(max_abs(partial_trace(prod, 1).mat - b.mat) <= 1e-12);

    CVec v = bell_phi(+1);
    DensityMatrix bell = make_two_qubit(v * v.adjoint());
    CHECK(max_abs(partial_trace(bell, 1).mat - CMat::Identity(2, 2) / 2.0) <= 1e-12);
    CHECK(max_abs(partial_trace(werner(0.73), 0).mat - CMat::Identity(2, 2) / 2.0) <= 1e-12);

    CHECK_THROWS_AS(partial_trace(bell, 2), BadSubsystem);
}

TEST_CASE("projective measurements satisfy PVM algebra", "[state]") {
    for (auto [theta, phi] : {std::pair{0.0, 0.0}, {1.1, 2.3}, {3.14159, 0.5}, {2.2, 6.0}}) {
        ProjectiveMeasurement m{theta, phi};
        CMat p0 = m.projector0(), p1 = m.projector1();
        CHECK(max_abs(p0 + p1 - CMat::Identity(2, 2)) <= 1e-14);
        CHECK(max_abs(p0 * p0 - p0) <= 1e-14);
        CHECK(max_abs(p1 * p1 - p1) <= 1e-14);
        CHECK(max_abs(p0 * p1) <= 1e-14);
        CHECK_THAT(p0.trace().real(), WithinAbs(1.0, 1e-14));
    }
}

TEST_CASE("apply_pvm_on_B fixed point, dephasing, idempotence", "[state]") {
    // A state already classical on B in the computational basis is untouched.
    CMat p0 = CMat::Zero(2, 2), p1 = CMat::Zero(2, 2);
    p0(0, 0) = 1.0;
    p1(1, 1) = 1.0;
    CMat cls = 0.6 * kron(bloch_qubit(0.3, 0.0, 0.1), p0) +
               0.4 * kron(bloch_qubit(-0.2, 0.1, 0.0), p1);
    DensityMatrix classical = make_two_qubit(cls);
    ProjectiveMeasurement comp{0.0, 0.0};
    CHECK(max_abs(apply_pvm_on_B(classical, comp).mat - classical.mat) <= 1e-12);

    CVec v = bell_phi(+1);
    DensityMatrix bell = make_two_qubit(v * v.adjoint());
    DensityMatrix dephased = apply_pvm_on_B(bell, comp);
    CMat want = 0.5 * kron(p0, p0) + 0.5 * kron(p1, p1);
    CHECK(max_abs(dephased.mat - want) <= 1e-12);

    // Werner spectrum is measurement-direction independent.
    DensityMatrix w = werner(0.64);
    Spectrum ref = eig_hermitian(apply_pvm_on_B(w, ProjectiveMeasurement{0.3, 1.0}).mat);
    for (auto [theta, phi] : {std::pair{1.2, 4.0}, {2.8, 0.1}, {0.7, 3.3}}) {
        Spectrum s = eig_hermitian(apply_pvm_on_B(w, ProjectiveMeasurement{theta, phi}).mat);
        CHECK((s.eigenvalues - ref.eigenvalues).cwiseAbs().maxCoeff() <= 1e-10);
    }

    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> uth(0.0, 3.141592653589793), uph(0.0, 6.283185307);
    for (int trial = 0; trial < 1000; ++trial) {
        DensityMatrix rho = random_density_matrix(4, rng, {2, 2});
        ProjectiveMeasurement m{uth(rng), uph(rng)};
        DensityMatrix once = apply_pvm_on_B(rho, m);
        DensityMatrix twice = apply_pvm_on_B(once, m);
        REQUIRE(max_abs(once.mat - twice.mat) <= 1e-12);
        REQUIRE(std::abs(once.mat.trace().real() - 1.0) <= 1e-12);
    }
}

TEST_CASE("fidelity closed values, symmetry, unitary invariance", "[state]") {
    std::mt19937_64 rng(23);
    DensityMatrix rho = random_density_matrix(4, rng, {2, 2});
    DensityMatrix sigma = random_density_matrix(4, rng, {2, 2});
    CHECK_THAT(fidelity(rho, rho), WithinAbs(1.0, 1e-10));
    CHECK_THAT(fidelity(rho, sigma), WithinAbs(fidelity(sigma, rho), 1e-10));

    CMat p0 = CMat::Zero(2, 2), p1 = CMat::Zero(2, 2);
    p0(0, 0) = 1.0;
    p1(1, 1) = 1.0;
    DensityMatrix s0 = make_density_matrix(p0, {2});
    DensityMatrix s1 = make_density_matrix(p1, {2});
    DensityMatrix mixed = make_density_matrix(CMat::Identity(2, 2) / 2.0, {2});
    CHECK_THAT(fidelity(s0, s1), WithinAbs(0.0, 1e-10));
    CHECK_THAT(fidelity(s0, mixed), WithinAbs(1.0 / std::sqrt(2.0), 1e-12));

    for (int trial = 0; trial < 20; ++trial) {
        CMat u = random_unitary(4, rng);
        DensityMatrix ur = make_two_qubit(u * rho.mat * u.adjoint());
        DensityMatrix us = make_two_qubit(u * sigma.mat * u.adjoint());
        CHECK_THAT(fidelity(ur, us), WithinAbs(fidelity(rho, sigma), 1e-10));
    }
}

TEST_CASE("random states are deterministic and measure-symmetric", "[state]") {
    DensityMatrix one = random_density_matrix(1, 99, {1});
    CHECK_THAT(one.mat(0, 0).real(), WithinAbs(1.0, 1e-14));

    DensityMatrix a = random_density_matrix(2, 42, {2});
    DensityMatrix b = random_density_matrix(2, 42, {2});
    CHECK(max_abs(a.mat - b.mat) == 0.0);

    std::mt19937_64 rng(7);
    CMat mean = CMat::Zero(2, 2);
    const int n = 10000;
    for (int i = 0; i < n; ++i) mean += random_density_matrix(2, rng, {2}).mat;
    mean /= double(n);
    CHECK(max_abs(mean - CMat::Identity(2, 2) / 2.0) <= 0.02);
}

TEST_CASE("density-matrix validation rejects malformed input", "[state]") {
    CMat bad_trace = CMat::Identity(4, 4);  // trace 4
    CHECK_THROWS_AS(make_two_qubit(bad_trace), InvalidState);

    CMat nonherm(2, 2);
    nonherm.setZero();
    nonherm(0, 0) = 0.5;
    nonherm(1, 1) = 0.5;
    nonherm(0, 1) = std::complex<double>(0.0, 0.3);
    nonherm(1, 0) = std::complex<double>(0.0, 0.3);  // equal, not conjugate
    CHECK_THROWS_AS(make_density_matrix(nonherm, {2}), InvalidState);

    CMat neg(2, 2);
    neg.setZero();
    neg(0, 0) = 1.2;
    neg(1, 1) = -0.2;
    CHECK_THROWS_AS(make_density_matrix(neg, {2}), InvalidState);

    CHECK_THROWS_AS(make_density_matrix(CMat::Identity(4, 4) / 4.0, {2, 3}), InvalidState);
}
