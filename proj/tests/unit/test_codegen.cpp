#include <random>

#include "c_harness.hpp"
#include "doctest.h"
#include "kanbench/codegen.hpp"

using namespace kanbench;

namespace {

Matrix random_inputs(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-2, 2);
    Matrix m(rows, cols);
    for (double& v : m.data()) v = static_cast<float>(u(rng));
    return m;
}

SymbolicNetwork every_candidate_network() {
    SymbolicNetwork s;
    s.layer_sizes = {5, 3, 2};
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-0.8, 0.8);
    std::size_t q = 0;
    s.edges.resize(2);
    for (std::size_t l = 0; l < 2; ++l) {
        s.edges[l].resize(s.layer_sizes[l] * s.layer_sizes[l + 1]);
        for (auto& e : s.edges[l]) {
            e.candidate = kCandidates[q++ % kCandidates.size()];
            e.a = u(rng);
            e.b = u(rng) + 2.5;  // keep reciprocal/log arguments away from 0
            e.c = u(rng);
            e.d = u(rng);
        }
    }
    return s;
}

}  // namespace

TEST_CASE("mlp cost by hand enumeration") {
    const auto net = mlp_init({2, 8, 4, 1}, {Activation::relu, Activation::relu, Activation::sigmoid}, 1);
    const CostReport c = cost_report(net);
    CHECK(c.muls == 2 * 8 + 8 * 4 + 4 * 1);
    CHECK(c.adds == (16 + 8) + (32 + 4) + (4 + 1) + 1);
    CHECK(c.comparisons == 12);
    CHECK(c.transcendental_calls == 1);
    CHECK(c.divs == 1);
    CHECK(c.constant_memory_words == 65);
    CHECK(c.weighted_dsp_equiv() == 52 + 4 + 8);
}

TEST_CASE("single constant edge") {
    SymbolicNetwork s;
    s.layer_sizes = {1, 1};
    s.edges = {{AffineFit{}}};
    const CostReport c = cost_report(s);
    CHECK(c.transcendental_calls == 0);
    CHECK(c.muls == 2);
}

TEST_CASE("cost is additive over layers") {
    using A = Activation;
    const auto net = mlp_init({4, 6, 5, 3}, {A::relu, A::sigmoid, A::softmax}, 2);
    CHECK(cost_report(net) ==
          mlp_layer_cost(4, 6, A::relu) + mlp_layer_cost(6, 5, A::sigmoid) + mlp_layer_cost(5, 3, A::softmax));
    const SymbolicNetwork s = every_candidate_network();
    CostReport sum;
    for (const auto& layer : s.edges) {
        for (const auto& e : layer) sum += symbolic_edge_cost(e.candidate);
    }
    sum.adds += 3 * 4 + 2 * 2;
    CHECK(cost_report(s) == sum);
}

TEST_CASE("multiplication audit matches the cost report") {
    using A = Activation;
    const auto net = mlp_init({4, 6, 5, 3}, {A::relu, A::sigmoid, A::softmax}, 2);
    CHECK(count_multiplication_sites(emit_inference_source(net, "f")) == cost_report(net).muls);
    const SymbolicNetwork s = every_candidate_network();
    CHECK(count_multiplication_sites(emit_inference_source(s, "g")) == cost_report(s).muls);
    CHECK(count_multiplication_sites("a = b * c; // x * y\n/* p * q */ d = e;") == 1);
}

TEST_CASE("emitted source is self contained") {
    const auto net = mlp_init({2, 3, 1}, {Activation::relu, Activation::sigmoid}, 2);
    const std::string src = emit_inference_source(net, "moons_infer");
    CHECK(src.find("void moons_infer(const float in[2], float out[1])") != std::string::npos);
    CHECK(src.find("#include <math.h>") != std::string::npos);
    CHECK(src.find("double") == std::string::npos);
    CHECK(src.find("/*") == std::string::npos);
}

TEST_CASE("identity network source reduces to sums") {
    SymbolicNetwork s;
    s.layer_sizes = {2, 1};
    AffineFit id;
    id.candidate = Candidate::identity;
    id.c = 1;
    s.edges = {{id, id}};
    const std::string src = emit_inference_source(s, "f");
    CHECK(src.find("in[0]") != std::string::npos);
    CHECK(src.find("in[1]") != std::string::npos);
    CHECK(src.find("expf") == std::string::npos);
}

TEST_CASE("compiled mlp source matches in-memory inference") {
    using A = Activation;
    auto net = mlp_init({3, 7, 4, 3}, {A::relu, A::sigmoid, A::softmax}, 5);
    for (std::size_t o = 0; o < 7; ++o) net.bias(0, o) = 0.1 * o;
    const Matrix x = random_inputs(200, 3, 1);
    const auto got = harness::run_emitted(emit_inference_source(net, "f"), "f", x, 3, "mlp");
    if (!got) {
        MESSAGE("no C compiler found; compile test skipped");
        return;
    }
    REQUIRE(got->rows() == 200);
    const Matrix want = mlp_predict(net, x);
    for (std::size_t i = 0; i < want.size(); ++i) CHECK(std::abs(got->data()[i] - want.data()[i]) <= 1e-5);
}

TEST_CASE("compiled mlp with zero weights returns activation of bias") {
    MlpNetwork net({2, 2, 1}, {Activation::relu, Activation::sigmoid});
    net.bias(1, 0) = 0.75;
    const Matrix x = random_inputs(10, 2, 2);
    const auto got = harness::run_emitted(emit_inference_source(net, "f"), "f", x, 1, "zero");
    if (!got) return;
    REQUIRE(got->rows() == 10);
    for (double v : got->data()) CHECK(v == doctest::Approx(1.0 / (1.0 + std::exp(-0.75))).epsilon(1e-6));
}

TEST_CASE("compiled symbolic source matches in-memory inference") {
    const SymbolicNetwork s = every_candidate_network();
    const Matrix x = random_inputs(200, 5, 3);
    const auto got = harness::run_emitted(emit_inference_source(s, "g"), "g", x, 2, "sym");
    if (!got) {
        MESSAGE("no C compiler found; compile test skipped");
        return;
    }
    REQUIRE(got->rows() == 200);
    const Matrix want = symbolic_eval(s, x);
    for (std::size_t i = 0; i < want.size(); ++i) {
        CHECK(std::abs(got->data()[i] - want.data()[i]) <= 1e-4 * std::max(1.0, std::abs(want.data()[i])));
    }
}
