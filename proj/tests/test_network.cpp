#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <random>

#include "etd/error.hpp"
#include "etd/linalg.hpp"
#include "etd/network.hpp"
#include "oracles.hpp"

using namespace etd;

namespace {

Eigen::MatrixXi four_cycle() {
  Eigen::MatrixXi a(4, 4);
  a << 0, 1, 0, 1,
       1, 0, 1, 0,
       0, 1, 0, 1,
       1, 0, 1, 0;
  return a;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an etd::Error");
  return ErrorCode::Numerical;
}

}  // namespace

TEST_SUITE("graph_topology") {

TEST_CASE("four-cycle neighbors") {
  const Network net = build_network(four_cycle());
  CHECK(net.size() == 4);
  // Agent 1 of the 1-based listing is index 0; its neighbors are agents 2, 4.
  CHECK(net.neighbors(0) == std::vector<int>{1, 3});
  CHECK(net.neighbors(2) == std::vector<int>{1, 3});
}

TEST_CASE("single isolated agent") {
  const Network net = build_network(Eigen::MatrixXi::Zero(1, 1));
  CHECK(net.neighbors(0).empty());
  const SpectralData sd = spectral_data(net);
  CHECK(sd.laplacian(0, 0) == 0.0);
  CHECK(sd.lambda2 == 0.0);
  CHECK(sd.not_connected);
  CHECK_FALSE(is_connected(net, 1e-9));
}

TEST_CASE("invalid adjacency matrices") {
  Eigen::MatrixXi asym(2, 2);
  asym << 0, 1, 0, 0;
  CHECK(code_of([&] { build_network(asym); }) == ErrorCode::NonSymmetric);

  Eigen::MatrixXi loop(2, 2);
  loop << 1, 0, 0, 0;
  CHECK(code_of([&] { build_network(loop); }) == ErrorCode::SelfLoop);

  CHECK(code_of([] { build_network(Eigen::MatrixXi(0, 0)); }) == ErrorCode::Empty);

  Eigen::MatrixXi two(2, 2);
  two << 0, 2, 2, 0;
  CHECK(code_of([&] { build_network(two); }) == ErrorCode::DomainError);
}

TEST_CASE("four-cycle spectrum matches the characteristic polynomial") {
  const SpectralData sd = spectral_data(build_network(four_cycle()));
  // Brute-force det(lambda I - L) = lambda^4 - 8 lambda^3 + 20 lambda^2 - 16 lambda
  //                              = lambda (lambda - 2)^2 (lambda - 4).
  const Eigen::VectorXd poly = oracle::characteristic_polynomial(sd.laplacian);
  CHECK(poly[0] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(poly[1] == doctest::Approx(-16.0));
  CHECK(poly[2] == doctest::Approx(20.0));
  CHECK(poly[3] == doctest::Approx(-8.0));
  CHECK(poly[4] == doctest::Approx(1.0));

  const Eigen::Vector4d expected(0.0, 2.0, 2.0, 4.0);
  CHECK((sd.eigenvalues - expected).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(std::abs(sd.lambda2 - 2.0) < 1e-9);
  CHECK(is_connected(build_network(four_cycle()), 1e-9));
}

TEST_CASE("complete graph on two nodes") {
  Eigen::MatrixXi a(2, 2);
  a << 0, 1, 1, 0;
  const SpectralData sd = spectral_data(build_network(a));
  Eigen::Matrix2d lap;
  lap << 1, -1, -1, 1;
  CHECK(sd.laplacian == lap);
  CHECK(std::abs(sd.eigenvalues[0]) < 1e-12);
  CHECK(std::abs(sd.eigenvalues[1] - 2.0) < 1e-12);
}

TEST_CASE("two disjoint edges are not connected") {
  Eigen::MatrixXi a(4, 4);
  a << 0, 1, 0, 0,
       1, 0, 0, 0,
       0, 0, 0, 1,
       0, 0, 1, 0;
  const SpectralData sd = spectral_data(build_network(a));
  CHECK(std::abs(sd.lambda2) < 1e-12);
  CHECK_FALSE(is_connected(build_network(a), 1e-9));
}

TEST_CASE("random graphs: Laplacian properties and BFS agreement") {
  std::mt19937_64 rng(20240611);
  std::uniform_int_distribution<int> size(1, 8);
  std::uniform_real_distribution<double> density(0.1, 0.9);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::MatrixXi adj = oracle::random_graph(rng, size(rng), density(rng));
    const Network net = build_network(adj);
    const SpectralData sd = spectral_data(net);
    CHECK(sd.laplacian.rowwise().sum().cwiseAbs().maxCoeff() == 0.0);
    CHECK(std::abs(sd.eigenvalues[0]) < 1e-9);
    for (Eigen::Index k = 1; k < sd.eigenvalues.size(); ++k)
      CHECK(sd.eigenvalues[k - 1] <= sd.eigenvalues[k]);
    CHECK(is_connected(net, 1e-9) == oracle::bfs_connected(adj));
    for (int i = 0; i < net.size(); ++i)
      for (int j = 0; j < net.size(); ++j)
        CHECK((std::find(net.neighbors(i).begin(), net.neighbors(i).end(), j) !=
               net.neighbors(i).end()) == (adj(i, j) == 1));
  }
}

}  // TEST_SUITE

TEST_SUITE("linalg") {

TEST_CASE("Jacobi agrees with a reference eigensolver") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 12;
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = g(rng);
    m = (m + m.transpose()).eval();
    const linalg::SymmetricEigen je = linalg::jacobi_eigen(m);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(m);
    CHECK((je.values - ref.eigenvalues()).cwiseAbs().maxCoeff() < 1e-10);
    const Eigen::MatrixXd recon =
        je.vectors * je.values.asDiagonal() * je.vectors.transpose();
    CHECK((recon - m).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("semidefinite Cholesky") {
  SUBCASE("zero covariance") {
    const Eigen::MatrixXd l = linalg::psd_cholesky(Eigen::MatrixXd::Zero(3, 3));
    CHECK(l.isZero());
  }
  SUBCASE("rank-deficient correlated covariance") {
    Eigen::MatrixXd b(3, 2);
    b << 1, 0, 2, 1, 0, 3;
    const Eigen::MatrixXd cov = b * b.transpose();
    const Eigen::MatrixXd l = linalg::psd_cholesky(cov);
    CHECK(l.isLowerTriangular());
    CHECK((l * l.transpose() - cov).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("indefinite matrix is rejected") {
    Eigen::Matrix2d m;
    m << 1, 2, 2, 1;
    CHECK_THROWS_AS(linalg::psd_cholesky(m), Error);
  }
}

}  // TEST_SUITE
