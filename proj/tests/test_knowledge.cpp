#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "support.hpp"
#include "utilisvm/json_io.hpp"
#include "utilisvm/knowledge.hpp"

using namespace utilisvm;

namespace {

KnowledgeRegion random_region(std::mt19937_64& rng, std::size_t n) {
    switch (testsupport::pick(rng, 4)) {
        case 0: {
            Vec a(n);
            for (auto& v : a) v = testsupport::uniform(rng, -2.0, 2.0);
            return KnowledgeRegion::halfspace(std::move(a),
                                              testsupport::uniform(rng, -1.0, 1.0));
        }
        case 1: {
            Vec c(n);
            for (auto& v : c) v = testsupport::uniform(rng, -1.0, 1.0);
            return KnowledgeRegion::ball(std::move(c), testsupport::uniform(rng, 0.1, 1.5));
        }
        case 2: {
            Vec lo(n), hi(n);
            for (std::size_t k = 0; k < n; ++k) {
                lo[k] = testsupport::uniform(rng, -1.0, 0.0);
                hi[k] = testsupport::uniform(rng, 0.0, 1.0);
            }
            return KnowledgeRegion::box(Box{std::move(lo), std::move(hi)});
        }
        default:
            return KnowledgeRegion::empty();
    }
}

}  // namespace

TEST_CASE("region membership") {
    const KnowledgeRegion none = KnowledgeRegion::empty();
    CHECK_FALSE(region_membership(none, {0.0, 0.0}));
    CHECK_FALSE(region_membership(none, {100.0}));

    const KnowledgeRegion ball = KnowledgeRegion::ball({0.0, 0.0}, 1.0);
    CHECK(region_membership(ball, {0.0, 0.0}));
    CHECK(region_membership(ball, {1.0, 0.0}));  // boundary
    CHECK_FALSE(region_membership(ball, {1.5, 0.0}));

    const KnowledgeRegion half = KnowledgeRegion::halfspace({1.0, 0.0}, -0.5);
    CHECK(region_membership(half, {0.5, 9.0}));  // g = 0 is inside
    CHECK(region_membership(half, {0.0, -4.0}));
    CHECK_FALSE(region_membership(half, {0.6, 0.0}));

    const KnowledgeRegion box = KnowledgeRegion::box(Box{{0.0, 0.0}, {1.0, 2.0}});
    CHECK(region_membership(box, {0.5, 1.0}));
    CHECK(region_membership(box, {1.0, 2.0}));  // corner
    CHECK_FALSE(region_membership(box, {1.1, 1.0}));

    CHECK_THROWS_AS(region_membership(ball, {1.0}), InputError);
}

TEST_CASE("region construction errors") {
    CHECK_THROWS_AS(KnowledgeRegion::ball({0.0}, 0.0), InputError);
    CHECK_THROWS_AS(KnowledgeRegion::ball({0.0}, -1.0), InputError);
    CHECK_THROWS_AS(KnowledgeRegion::box(Box{{1.0}, {0.0}}), InputError);
    CHECK_THROWS_AS(KnowledgeRegion::halfspace({}, 0.0), InputError);
}

TEST_CASE("chi indicator") {
    const KnowledgeRegion ball = KnowledgeRegion::ball({0.0}, 1.0);
    CHECK(chi_indicator(ball, {0.2}) == -1);
    CHECK(chi_indicator(ball, {2.0}) == 1);
    CHECK(chi_indicator(KnowledgeRegion::empty(), {0.0}) == 1);
}

TEST_CASE("sample weights") {
    const KnowledgeRegion ball = KnowledgeRegion::ball({0.0}, 1.0);
    const Vec inside = {0.0};
    const Vec outside = {3.0};

    CHECK(sample_weight(CostStructure{1.0, 1.0, 1.0}, ball, inside, 1) == 1.0);
    CHECK(sample_weight(CostStructure{1.0, 1.0, 1.0}, ball, outside, -1) == 1.0);
    CHECK(sample_weight(CostStructure{1.0, 1.0, 2.0}, ball, inside, 1) == 2.0);
    CHECK(sample_weight(CostStructure{4.0, 2.0, 2.0}, ball, inside, -1) == 0.5);
    CHECK(sample_weight(CostStructure{4.0, 2.0, 2.0}, ball, outside, 1) == 0.5);

    CHECK_THROWS_AS(sample_weight(CostStructure{1.0, 1.0, 1.0}, ball, inside, 0), InputError);
    CHECK_THROWS_AS(sample_weight(CostStructure{0.0, 1.0, 1.0}, ball, inside, 1), InputError);
}

TEST_CASE("piecewise loss") {
    const KnowledgeRegion ball = KnowledgeRegion::ball({0.0}, 1.0);
    CHECK(piecewise_loss(CostStructure{1.0, 1.0, 1.0}, ball, {0.0}, 1, 1.0) == 0.0);
    CHECK(piecewise_loss(CostStructure{1.0, 1.0, 1.0}, ball, {0.0}, 1, 2.5) == 0.0);
    CHECK(piecewise_loss(CostStructure{1.0, 1.0, 2.0}, ball, {0.0}, 1, 0.0) == 2.0);
    CHECK(piecewise_loss(CostStructure{2.0, 1.0, 3.0}, ball, {5.0}, -1, 1.0) == 1.0);
    CHECK_THROWS_AS(
        piecewise_loss(CostStructure{1.0, 1.0, 1.0}, ball, {0.0}, 1,
                       std::numeric_limits<double>::infinity()),
        InputError);
}

TEST_CASE("piecewise form matches the chi closed form") {
    std::mt19937_64 rng(23);
    for (int t = 0; t < 20000; ++t) {
        const std::size_t n = 1 + testsupport::pick(rng, 3);
        const KnowledgeRegion region = random_region(rng, n);
        const CostStructure costs{testsupport::uniform(rng, 0.25, 4.0),
                                  testsupport::uniform(rng, 0.25, 4.0),
                                  testsupport::uniform(rng, 0.5, 8.0)};
        Vec x(n);
        for (auto& v : x) v = testsupport::uniform(rng, -2.0, 2.0);
        const int y = rng() % 2 == 0 ? 1 : -1;
        const double direct = sample_weight(costs, region, x, y);
        const double chi = sample_weight_chi_form(costs, region, x, y);
        CHECK(std::abs(direct - chi) <= 1e-12 * std::max(direct, chi));
    }
}

TEST_CASE("loss bound by beta") {
    std::mt19937_64 rng(29);
    for (int t = 0; t < 5000; ++t) {
        const std::size_t n = 1 + testsupport::pick(rng, 3);
        const KnowledgeRegion region = random_region(rng, n);
        const CostStructure costs{testsupport::uniform(rng, 0.25, 4.0),
                                  testsupport::uniform(rng, 0.25, 4.0),
                                  testsupport::uniform(rng, 1.0, 8.0)};
        Vec x(n);
        for (auto& v : x) v = testsupport::uniform(rng, -2.0, 2.0);
        const int y = rng() % 2 == 0 ? 1 : -1;
        const double f = testsupport::uniform(rng, -5.0, 5.0);
        CHECK(piecewise_loss(costs, region, x, y, f) <=
              costs.beta() * (1.0 + std::abs(f)) * (1.0 + 1e-12));
    }
}

TEST_CASE("reductions of the loss") {
    std::mt19937_64 rng(31);
    const KnowledgeRegion ball = KnowledgeRegion::ball({0.0}, 1.0);
    for (int t = 0; t < 2000; ++t) {
        const Vec x = {testsupport::uniform(rng, -2.0, 2.0)};
        const int y = rng() % 2 == 0 ? 1 : -1;
        const double f = testsupport::uniform(rng, -3.0, 3.0);
        const double hinge = std::max(0.0, 1.0 - y * f);

        // c_hat = 1: the cost-ratio weighted hinge, region plays no role
        const CostStructure lin{2.0, 3.0, 1.0};
        CHECK(piecewise_loss(lin, ball, x, y, f) ==
              doctest::Approx((3.0 / 2.0) * hinge).epsilon(1e-14));

        // c_hat = 1 and c+ = c-: the plain hinge
        const CostStructure plain{2.0, 2.0, 1.0};
        CHECK(piecewise_loss(plain, ball, x, y, f) == doctest::Approx(hinge).epsilon(1e-14));
    }
}

TEST_CASE("loss is strictly increasing in c_hat for in-region positives") {
    const KnowledgeRegion ball = KnowledgeRegion::ball({0.0}, 1.0);
    const Vec x = {0.2};
    const double f = 0.4;  // y f < 1
    double prev = 0.0;
    for (double c_hat : {0.5, 1.0, 2.0, 4.0, 8.0}) {
        const double loss = piecewise_loss(CostStructure{1.0, 1.0, c_hat}, ball, x, 1, f);
        CHECK(loss > prev);
        prev = loss;
    }
}

TEST_CASE("c_hat warning") {
    const KnowledgeRegion ball = KnowledgeRegion::ball({0.0}, 1.0);
    CHECK(cost_region_warning(CostStructure{1.0, 1.0, 0.5}, ball).has_value());
    CHECK(cost_region_warning(CostStructure{1.0, 1.0, 1.0}, ball).has_value());
    CHECK_FALSE(cost_region_warning(CostStructure{1.0, 1.0, 2.0}, ball).has_value());
    CHECK_FALSE(
        cost_region_warning(CostStructure{1.0, 1.0, 0.5}, KnowledgeRegion::empty()).has_value());
}

TEST_CASE("knowledge config json round trip") {
    const auto parsed = knowledge_config_from_json(nlohmann::json::parse(R"({
        "region": {"kind": "ball", "center": [0.3, 0.7], "radius": 0.25},
        "costs": {"c_plus": 1.0, "c_minus": 2.0, "c_hat": 4.0}
    })"));
    CHECK(parsed.region.kind == RegionKind::ball);
    CHECK(parsed.region.center == Vec{0.3, 0.7});
    CHECK(parsed.region.radius == 0.25);
    CHECK(parsed.costs.c_minus == 2.0);

    const auto again = knowledge_config_from_json(knowledge_config_to_json(parsed));
    CHECK(again.region.radius == parsed.region.radius);
    CHECK(again.costs.c_hat == parsed.costs.c_hat);

    CHECK_THROWS_AS(knowledge_config_from_json(nlohmann::json::parse(
                        R"({"region": {"kind": "torus"}, "costs": {}})")),
                    FormatError);
    CHECK_THROWS_AS(knowledge_config_from_json(nlohmann::json::parse(
                        R"({"region": {"kind": "empty"}, "costs": {"c_plus": 1.0}})")),
                    FormatError);

    for (const char* kind : {"halfspace", "box", "empty"}) {
        nlohmann::json j;
        if (std::string(kind) == "halfspace")
            j = {{"kind", "halfspace"}, {"a", Vec{1.0, 0.0}}, {"b", -0.5}};
        else if (std::string(kind) == "box")
            j = {{"kind", "box"}, {"lower", Vec{0.0}}, {"upper", Vec{1.0}}};
        else
            j = {{"kind", "empty"}};
        const KnowledgeRegion r = region_from_json(j);
        const KnowledgeRegion r2 = region_from_json(region_to_json(r));
        CHECK(r2.kind == r.kind);
    }
}
