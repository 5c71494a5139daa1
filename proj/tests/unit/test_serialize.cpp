#include <random>

#include "doctest.h"
#include "kanbench/error.hpp"
#include "kanbench/serialize.hpp"

using namespace kanbench;

TEST_CASE("kan round trip is exact for random shapes") {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 20; ++t) {
        std::vector<std::size_t> sizes{1 + rng() % 4, 1 + rng() % 4, 1 + rng() % 3};
        std::vector<Interval> dom;
        for (std::size_t i = 0; i < sizes[0]; ++i) dom.push_back({-1.0 - 0.1 * i, 1.3 + 0.01 * t});
        const auto net = kan_init(sizes, 1 + t % 6, t % 4, rng(), dom);
        const auto back = kan_from_json(nlohmann::json::parse(to_json(net).dump()));
        CHECK(back == net);
    }
}

TEST_CASE("mlp round trip is exact") {
    using A = Activation;
    const auto net = mlp_init({5, 7, 3}, {A::sigmoid, A::softmax}, 12345678901234ULL);
    const auto back = mlp_from_json(nlohmann::json::parse(to_json(net).dump()));
    CHECK(back == net);
    CHECK(back.seed() == 12345678901234ULL);
}

TEST_CASE("symbolic round trip keeps fits and audit") {
    auto net = kan_init({2, 2, 1}, 3, 3, 4);
    Matrix x(60, 2);
    for (std::size_t r = 0; r < 60; ++r) {
        x(r, 0) = std::sin(0.4 * r);
        x(r, 1) = std::cos(0.9 * r);
    }
    const auto s = symbolify_network(net, collect_edge_samples(net, x));
    const auto back = symbolic_from_json(nlohmann::json::parse(to_json(s).dump()));
    REQUIRE(back.edges.size() == s.edges.size());
    for (std::size_t l = 0; l < s.edges.size(); ++l) {
        for (std::size_t e = 0; e < s.edges[l].size(); ++e) {
            CHECK(back.edges[l][e].candidate == s.edges[l][e].candidate);
            CHECK(back.edges[l][e].a == s.edges[l][e].a);
            CHECK(back.edges[l][e].d == s.edges[l][e].d);
            CHECK(back.edges[l][e].r2 == s.edges[l][e].r2);
        }
    }
    CHECK(back.audit.size() == s.audit.size());
    CHECK(back.audit[3].r2 == s.audit[3].r2);
    CHECK(symbolic_eval(back, x) == symbolic_eval(s, x));
}

TEST_CASE("kind dispatch") {
    const auto net = kan_init({2, 1}, 3, 1, 0);
    CHECK(std::holds_alternative<KanNetwork>(model_from_json(to_json(net))));
    auto doc = to_json(net);
    doc["kind"] = "transformer";
    CHECK_THROWS_AS(model_from_json(doc), Error);
    doc = to_json(net);
    doc["coefficients"][0][0][0].erase(0);
    CHECK_THROWS_AS(kan_from_json(doc), Error);
}

TEST_CASE("cost report json") {
    CostReport c;
    c.muls = 3;
    c.divs = 1;
    c.transcendental_calls = 2;
    const auto j = to_json(c);
    CHECK(j.at("muls") == 3);
    CHECK(j.at("weighted_dsp_equiv").get<double>() == 23.0);
}
