#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "isindy/benchmarks.hpp"
#include "isindy/features.hpp"

using namespace isindy;
using namespace isindy::benchmarks;
using testing::error_code_of;

namespace {

ObservationSet observe(const BenchmarkSystem& sys, double nvr, std::uint64_t seed) {
  return add_noise(simulate_truth(sys), {nvr, seed});
}

Index index_of(const features::FeatureLibrary& lib, const std::string& name) {
  const auto names = lib.names();
  return static_cast<Index>(std::find(names.begin(), names.end(), name) - names.begin());
}

}  // namespace

TEST_CASE("system catalogue") {
  CHECK(system_names() == std::vector<std::string>{"logistic", "lotka_volterra", "lorenz", "sine"});
  CHECK(error_code_of([] { benchmark_system("duffing"); }) == ErrorCode::ConfigError);
  CHECK(simulate_truth(benchmark_system("logistic")).n() == 601);
  CHECK(simulate_truth(benchmark_system("lotka_volterra")).n() == 1001);
  CHECK(simulate_truth(benchmark_system("lorenz")).n() == 1001);
  const auto sys = benchmark_system("lorenz");
  const auto xi = sys.true_xi(sys.library());
  CHECK(xi.rows() == 19);
  CHECK((xi.array() != 0.0).count() == 7);
  CHECK(xi(index_of(sys.library(), "x1x3"), 1) == -1.0);
}

TEST_CASE("window simulation continues the trajectory from t_start") {
  const auto sys = benchmark_system("lorenz");
  const auto full = simulate_truth(sys, 0.0, 7.0);
  const auto window = simulate_truth(sys, 3.0, 7.0);
  CHECK(window.grid.t1() == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(window.n() == 801);
  CHECK(window.values == full.values.bottomRows(801));
  CHECK(error_code_of([&] { simulate_truth(sys, 5.0, 4.0); }) == ErrorCode::BadRange);
}

TEST_CASE("zero noise leaves the truth unchanged") {
  const auto truth = simulate_truth(benchmark_system("logistic"));
  CHECK(add_noise(truth, {0.0, 9}).values == truth.values);
}

TEST_CASE("noise has the requested scale") {
  const auto truth = simulate_truth(benchmark_system("logistic"));
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto obs = add_noise(truth, {0.3, seed});
    const Eigen::VectorXd e = obs.values.col(0) - truth.values.col(0);
    const double sample_sd = std::sqrt((e.array() - e.mean()).square().sum() / (e.size() - 1.0));
    const auto& x = truth.values.col(0);
    const double sd = std::sqrt((x.array() - x.mean()).square().mean());
    CHECK(sample_sd == doctest::Approx(0.3 * sd).epsilon(0.10));
  }
}

TEST_CASE("the seed determines the observations") {
  const auto truth = simulate_truth(benchmark_system("lorenz"));
  const auto a = add_noise(truth, {0.1, 42});
  const auto b = add_noise(truth, {0.1, 42});
  const auto c = add_noise(truth, {0.1, 43});
  CHECK(a.values == b.values);
  CHECK(a.values != c.values);
  CHECK(error_code_of([&] { add_noise(truth, {-0.1, 1}); }) == ErrorCode::ConfigError);
}

TEST_CASE("Gaussian stream statistics and pairing") {
  GaussianStream s(7);
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = s.next();
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(sq / n == doctest::Approx(1.0).epsilon(0.01));

  // one uniform pair yields a cosine then a sine draw with the same radius
  GaussianStream u(11), g(11);
  const double u1 = u.uniform(), u2 = u.uniform();
  const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
  CHECK(g.next() == doctest::Approx(r * std::cos(2.0 * std::numbers::pi * u2)).epsilon(1e-15));
  CHECK(g.next() == doctest::Approx(r * std::sin(2.0 * std::numbers::pi * u2)).epsilon(1e-15));
}

TEST_CASE("finite differences") {
  const TimeGrid grid(0.0, 0.5, 4);
  Eigen::MatrixXd v(4, 1);
  v << 0.0, 1.0, 4.0, 9.0;
  const auto dy = finite_difference_derivatives(ObservationSet{grid, v, {"x1"}});
  CHECK(dy(0, 0) == 2.0);
  CHECK(dy(1, 0) == 4.0);
  CHECK(dy(2, 0) == 8.0);
  CHECK(dy(3, 0) == 10.0);
}

TEST_CASE("SINDy baseline on noise-free logistic data") {
  const auto sys = benchmark_system("logistic");
  const auto model = sindy_identify(observe(sys, 0.0, 1), sys.library(), {0.1});
  CHECK(std::abs(model.xi()(0, 0) - 1.6) < 2e-2);
  CHECK(std::abs(model.xi()(1, 0) + 1.0) < 2e-2);
  CHECK(model.xi()(2, 0) == 0.0);
  CHECK(model.eta_assumed());
  CHECK(model.eta()[0] == 0.1);
  CHECK(model.meta().method == "sindy");
}

TEST_CASE("SINDy recovers linear decay") {
  const odeint::VectorField decay{1, "decay", [](const Eigen::VectorXd& x) { return Eigen::VectorXd(-x); }};
  const auto truth = odeint::rk4_integrate(decay, Eigen::VectorXd::Ones(1), TimeGrid::with_step(0.0, 5.0, 0.01));
  const auto model = sindy_identify(ObservationSet{truth.grid, truth.values, {"x1"}},
                                    features::polynomial_library(1, 3), {0.1});
  CHECK(model.support(0) == std::vector<Index>{0});
  CHECK(std::abs(model.xi()(0, 0) + 1.0) < 1e-3);
}

TEST_CASE("SINDy degrades at 30% noise") {
  const auto sys = benchmark_system("logistic");
  const auto lib = sys.library();
  const auto truth = sys.true_xi(lib);
  int degraded = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    try {
      const auto model = sindy_identify(observe(sys, 0.3, seed), lib, {0.1});
      if (!support_matches(model, truth) || max_coefficient_error(model, truth) > 0.5) ++degraded;
    } catch (const Error&) {
      ++degraded;
    }
  }
  CHECK(degraded > 10);
}

TEST_CASE("InSINDy baseline on noise-free logistic data") {
  const auto sys = benchmark_system("logistic");
  const auto model = insindy_identify(observe(sys, 0.0, 1), sys.library(), {0.1});
  CHECK(std::abs(model.xi()(0, 0) - 1.5975) < 2e-2);
  CHECK(std::abs(model.xi()(1, 0) + 0.9980) < 2e-2);
  CHECK(model.xi()(2, 0) == 0.0);
  CHECK(model.eta_assumed());
  CHECK(model.meta().method == "insindy");
}

TEST_CASE("InSINDy picks up a cubic term at 30% noise") {
  const auto sys = benchmark_system("logistic");
  const auto lib = sys.library();
  int with_cubic = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto model = insindy_identify(observe(sys, 0.3, seed), lib, {0.1});
    if (model.xi()(2, 0) != 0.0) ++with_cubic;
  }
  CHECK(with_cubic > 10);
}

TEST_CASE("InSINDy recovers Euler-generated data exactly") {
  const auto sys = benchmark_system("lotka_volterra");
  const auto states = testing::euler_forward(sys.field, sys.eta, sys.grid());
  const auto lib = sys.library();
  const auto model =
      insindy_identify(ObservationSet{states.grid, states.values, {"x1", "x2"}}, lib, {0.3});
  CHECK(support_matches(model, sys.true_xi(lib)));
  CHECK(max_coefficient_error(model, sys.true_xi(lib)) < 1e-9);
}

TEST_CASE("ISINDy canonical logistic run") {
  const auto sys = benchmark_system("logistic");
  const auto [model, diag] = isindy_identify(observe(sys, 0.0, 1), sys.library(), {0.1});
  CHECK(std::abs(model.xi()(0, 0) - 1.6) < 1e-3);
  CHECK(std::abs(model.xi()(1, 0) + 1.0) < 1e-3);
  CHECK(model.xi()(2, 0) == 0.0);
  CHECK(std::abs(model.eta()[0] - 0.1) < 1e-3);
  CHECK_FALSE(model.eta_assumed());
  CHECK(model.meta().rho_per_column.size() == 1);
  CHECK(diag.all_converged());
}

TEST_CASE("ISINDy Lorenz first component") {
  const auto sys = benchmark_system("lorenz");
  const auto lib = sys.library();
  const auto [model, diag] = isindy_identify(observe(sys, 0.0, 1), lib, {0.8});
  CHECK(model.support(0) == std::vector<Index>{index_of(lib, "x1"), index_of(lib, "x2")});
  CHECK(std::abs(model.xi()(index_of(lib, "x1"), 0) + 10.0013) < 5e-2);
  CHECK(std::abs(model.xi()(index_of(lib, "x2"), 0) - 10.0013) < 5e-2);
  CHECK(std::abs(model.eta()[0] + 5.0046) < 5e-2);
}

TEST_CASE("ISINDy sine system with a degree-5 library") {
  const auto sys = benchmark_system("sine");
  const auto lib = features::polynomial_library(1, 5);
  const auto [model, diag] = isindy_identify(observe(sys, 0.0, 1), lib, {sys.lambda});
  CHECK(model.support(0) == std::vector<Index>{0, 2, 4});
  CHECK(std::abs(model.xi()(0, 0) + 1.0) < 2e-3);
  CHECK(std::abs(model.xi()(2, 0) - 0.1666) < 2e-3);
  CHECK(std::abs(model.xi()(4, 0) + 0.0083) < 2e-3);
}

TEST_CASE("trapezoid quadrature beats Euler on noise-free logistic data") {
  const auto sys = benchmark_system("logistic");
  const auto lib = sys.library();
  const auto obs = observe(sys, 0.0, 1);
  const auto truth = sys.true_xi(lib);
  const double isindy_err = max_coefficient_error(isindy_identify(obs, lib, {0.1}).first, truth);
  const double insindy_err = max_coefficient_error(insindy_identify(obs, lib, {0.1}), truth);
  CHECK(isindy_err <= insindy_err);
}

TEST_CASE("method names") {
  for (auto m : {Method::Sindy, Method::Insindy, Method::Isindy}) CHECK(parse_method(to_string(m)) == m);
  CHECK(error_code_of([] { parse_method("lasso"); }) == ErrorCode::ConfigError);
}
