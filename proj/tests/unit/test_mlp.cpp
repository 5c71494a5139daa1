#include <random>

#include "doctest.h"
#include "kanbench/error.hpp"
#include "kanbench/mlp.hpp"
#include "oracles.hpp"

using namespace kanbench;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1, 1);
    Matrix m(r, c);
    for (double& v : m.data()) v = u(rng);
    return m;
}

double weighted_output(const MlpNetwork& net, const Matrix& x, const Matrix& w) {
    const Matrix out = mlp_predict(net, x);
    double s = 0;
    for (std::size_t i = 0; i < out.size(); ++i) s += out.data()[i] * w.data()[i];
    return s;
}

}  // namespace

TEST_CASE("parameter counts") {
    const std::vector<std::size_t> moons{2, 8, 4, 1}, wine{13, 32, 8, 3}, bean{16, 20, 15, 10, 7}, mush{8, 64, 64, 2};
    CHECK(mlp_param_count(moons) == 65);
    CHECK(mlp_param_count(wine) == 739);
    CHECK(mlp_param_count(bean) == 892);
    CHECK(mlp_param_count(mush) == 4866);
    using A = Activation;
    CHECK(mlp_init(bean, {A::relu, A::relu, A::relu, A::softmax}, 1).params().size() == 892);
}

TEST_CASE("construction errors") {
    using A = Activation;
    CHECK_THROWS_AS(mlp_init({2, 3, 1}, {A::softmax, A::sigmoid}, 0), Error);
    CHECK_THROWS_AS(mlp_init({2, 3, 1}, {A::relu}, 0), Error);
    CHECK_THROWS_AS(mlp_init({2}, {}, 0), Error);
    CHECK(activation_from_string("relu") == A::relu);
    CHECK_THROWS_AS(activation_from_string("gelu"), Error);
}

TEST_CASE("he initialisation and zero bias") {
    auto net = mlp_init({200, 100, 1}, {Activation::relu, Activation::linear}, 5);
    double sq = 0;
    for (std::size_t o = 0; o < 100; ++o) {
        CHECK(net.bias(0, o) == 0.0);
        for (std::size_t i = 0; i < 200; ++i) sq += net.weight(0, o, i) * net.weight(0, o, i);
    }
    CHECK(std::sqrt(sq / 20000) == doctest::Approx(std::sqrt(2.0 / 200)).epsilon(0.05));
    CHECK(net == mlp_init({200, 100, 1}, {Activation::relu, Activation::linear}, 5));
}

TEST_CASE("hand-computed forward pass") {
    MlpNetwork net({2, 2, 1}, {Activation::relu, Activation::sigmoid});
    net.weight(0, 0, 0) = 1;
    net.weight(0, 0, 1) = -1;
    net.weight(0, 1, 0) = 0.5;
    net.weight(0, 1, 1) = 0.5;
    net.bias(0, 1) = -2;
    net.weight(1, 0, 0) = 2;
    net.weight(1, 0, 1) = 3;
    net.bias(1, 0) = 0.1;
    Matrix x(1, 2);
    x(0, 0) = 2;
    x(0, 1) = 0.5;
    // hidden = relu(1.5), relu(-0.75) = 1.5, 0
    const double expect = 1.0 / (1.0 + std::exp(-(3.0 + 0.1)));
    CHECK(mlp_predict(net, x)(0, 0) == doctest::Approx(expect).epsilon(1e-15));
}

TEST_CASE("softmax rows sum to one and survive large logits") {
    Matrix m(2, 3);
    m(0, 0) = 1000;
    m(0, 1) = 1001;
    m(0, 2) = 999;
    m(1, 0) = -3;
    softmax_rows(m);
    for (std::size_t r = 0; r < 2; ++r) CHECK(m(r, 0) + m(r, 1) + m(r, 2) == doctest::Approx(1.0));
    CHECK(m(0, 1) > m(0, 0));
    CHECK(std::isfinite(m(0, 2)));
}

TEST_CASE("gradient matches finite differences") {
    using A = Activation;
    const std::vector<std::vector<A>> acts = {{A::sigmoid, A::linear}, {A::relu, A::softmax}, {A::sigmoid, A::sigmoid}};
    std::mt19937_64 rng(13);
    for (const auto& a : acts) {
        auto net = mlp_init({3, 4, 3}, a, 17);
        for (std::size_t o = 0; o < 4; ++o) net.bias(0, o) = 0.3;
        const Matrix x = random_matrix(5, 3, rng);
        const Matrix w = random_matrix(5, 3, rng);
        auto [out, cache] = mlp_forward(net, x);
        const auto grad = mlp_backward(net, cache, w);
        for (std::size_t p = 0; p < grad.size(); ++p) {
            MlpNetwork plus = net, minus = net;
            plus.params()[p] += 1e-6;
            minus.params()[p] -= 1e-6;
            const double fd = (weighted_output(plus, x, w) - weighted_output(minus, x, w)) / 2e-6;
            CHECK(oracle::rel_error(grad[p], fd, 1e-6) <= 1e-4);
        }
    }
}

TEST_CASE("logit seat skips the output activation") {
    auto net = mlp_init({3, 4, 3}, {Activation::relu, Activation::softmax}, 3);
    std::mt19937_64 rng(2);
    const Matrix x = random_matrix(4, 3, rng);
    const Matrix g = random_matrix(4, 3, rng);
    auto [out, cache] = mlp_forward(net, x);
    const auto via_logits = mlp_backward(net, cache, softmax_backward(out, g), GradientSeat::logits);
    const auto via_output = mlp_backward(net, cache, g, GradientSeat::output);
    REQUIRE(via_logits.size() == via_output.size());
    for (std::size_t i = 0; i < via_logits.size(); ++i) CHECK(via_logits[i] == doctest::Approx(via_output[i]));
}
