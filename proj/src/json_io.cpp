#include "utilisvm/json_io.hpp"

#include <fstream>

namespace utilisvm {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) { throw FormatError(what); }

template <typename Fn>
auto wrap(const std::string& context, Fn&& fn) {
    try {
        return fn();
    } catch (const json::exception& e) {
        throw FormatError(context + ": " + e.what());
    }
}

}  // namespace

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open file: " + path);
    try {
        json j;
        in >> j;
        return j;
    } catch (const json::exception& e) {
        throw FormatError(path + ": " + e.what());
    }
}

nlohmann::json kernel_to_json(const KernelSpec& spec) {
    switch (spec.kind) {
        case KernelKind::gaussian:
            return {{"kind", "gaussian"}, {"sigma", spec.sigma}};
        case KernelKind::linear:
            return {{"kind", "linear"}};
        case KernelKind::polynomial:
            return {{"kind", "polynomial"}, {"degree", spec.degree}, {"offset", spec.offset}};
    }
    bad("kernel: unknown kind");
}

KernelSpec kernel_from_json(const nlohmann::json& j) {
    return wrap("kernel", [&] {
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "gaussian") return KernelSpec::gaussian(j.at("sigma").get<double>());
        if (kind == "linear") return KernelSpec::linear();
        if (kind == "polynomial")
            return KernelSpec::polynomial(j.at("degree").get<int>(),
                                          j.value("offset", 0.0));
        bad("kernel: unknown kind '" + kind + "'");
    });
}

nlohmann::json region_to_json(const KnowledgeRegion& region) {
    switch (region.kind) {
        case RegionKind::halfspace:
            return {{"kind", "halfspace"}, {"a", region.a}, {"b", region.b}};
        case RegionKind::ball:
            return {{"kind", "ball"}, {"center", region.center}, {"radius", region.radius}};
        case RegionKind::box:
            return {{"kind", "box"},
                    {"lower", region.bounds.lower},
                    {"upper", region.bounds.upper}};
        case RegionKind::empty:
            return {{"kind", "empty"}};
    }
    bad("region: unknown kind");
}

KnowledgeRegion region_from_json(const nlohmann::json& j) {
    return wrap("region", [&] {
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "halfspace")
            return KnowledgeRegion::halfspace(j.at("a").get<Vec>(), j.at("b").get<double>());
        if (kind == "ball")
            return KnowledgeRegion::ball(j.at("center").get<Vec>(),
                                         j.at("radius").get<double>());
        if (kind == "box")
            return KnowledgeRegion::box(
                Box{j.at("lower").get<Vec>(), j.at("upper").get<Vec>()});
        if (kind == "empty") return KnowledgeRegion::empty();
        bad("region: unknown kind '" + kind + "'");
    });
}

nlohmann::json costs_to_json(const CostStructure& costs) {
    return {{"c_plus", costs.c_plus}, {"c_minus", costs.c_minus}, {"c_hat", costs.c_hat}};
}

CostStructure costs_from_json(const nlohmann::json& j) {
    return wrap("costs", [&] {
        CostStructure c{j.at("c_plus").get<double>(), j.at("c_minus").get<double>(),
                        j.at("c_hat").get<double>()};
        c.validate();
        return c;
    });
}

KnowledgeConfig knowledge_config_from_json(const nlohmann::json& j) {
    return wrap("knowledge config", [&] {
        return KnowledgeConfig{region_from_json(j.at("region")), costs_from_json(j.at("costs"))};
    });
}

nlohmann::json knowledge_config_to_json(const KnowledgeConfig& config) {
    return {{"region", region_to_json(config.region)}, {"costs", costs_to_json(config.costs)}};
}

KnowledgeConfig load_knowledge_config(const std::string& path) {
    return knowledge_config_from_json(load_json_file(path));
}

nlohmann::json distribution_to_json(const SyntheticDistribution& dist) {
    json marginal;
    if (dist.marginal.kind == MarginalSpec::Kind::uniform) {
        marginal = {{"kind", "uniform"}};
    } else {
        json comps = json::array();
        for (const auto& c : dist.marginal.components)
            comps.push_back({{"weight", c.weight}, {"mean", c.mean}, {"sigma", c.sigma}});
        marginal = {{"kind", "gaussian_mixture"}, {"components", comps}};
    }
    json eta;
    switch (dist.eta_spec.kind) {
        case EtaSpec::Kind::constant:
            eta = {{"kind", "constant"}, {"value", dist.eta_spec.value}};
            break;
        case EtaSpec::Kind::logistic:
            eta = {{"kind", "logistic"}, {"w", dist.eta_spec.w}, {"b", dist.eta_spec.b}};
            break;
        case EtaSpec::Kind::linear:
            eta = {{"kind", "linear"}, {"w", dist.eta_spec.w}, {"b", dist.eta_spec.b}};
            break;
        case EtaSpec::Kind::piecewise_constant:
            eta = {{"kind", "piecewise_constant"},
                   {"axis", dist.eta_spec.axis},
                   {"edges", dist.eta_spec.edges},
                   {"values", dist.eta_spec.values}};
            break;
    }
    return {{"marginal", marginal},
            {"eta", eta},
            {"box", {{"lower", dist.domain.lower}, {"upper", dist.domain.upper}}}};
}

SyntheticDistribution distribution_from_json(const nlohmann::json& j) {
    return wrap("distribution", [&] {
        SyntheticDistribution dist;
        dist.domain.lower = j.at("box").at("lower").get<Vec>();
        dist.domain.upper = j.at("box").at("upper").get<Vec>();

        const json& marginal = j.at("marginal");
        const std::string mkind = marginal.at("kind").get<std::string>();
        if (mkind == "uniform") {
            dist.marginal.kind = MarginalSpec::Kind::uniform;
        } else if (mkind == "gaussian_mixture") {
            dist.marginal.kind = MarginalSpec::Kind::gaussian_mixture;
            for (const auto& c : marginal.at("components"))
                dist.marginal.components.push_back({c.at("weight").get<double>(),
                                                    c.at("mean").get<Vec>(),
                                                    c.at("sigma").get<Vec>()});
        } else {
            bad("distribution: unknown marginal kind '" + mkind + "'");
        }

        const json& eta = j.at("eta");
        const std::string ekind = eta.at("kind").get<std::string>();
        if (ekind == "constant") {
            dist.eta_spec.kind = EtaSpec::Kind::constant;
            dist.eta_spec.value = eta.at("value").get<double>();
        } else if (ekind == "logistic" || ekind == "linear") {
            dist.eta_spec.kind =
                ekind == "logistic" ? EtaSpec::Kind::logistic : EtaSpec::Kind::linear;
            dist.eta_spec.w = eta.at("w").get<Vec>();
            dist.eta_spec.b = eta.at("b").get<double>();
        } else if (ekind == "piecewise_constant") {
            dist.eta_spec.kind = EtaSpec::Kind::piecewise_constant;
            dist.eta_spec.axis = eta.at("axis").get<std::size_t>();
            dist.eta_spec.edges = eta.at("edges").get<Vec>();
            dist.eta_spec.values = eta.at("values").get<Vec>();
        } else {
            bad("distribution: unknown eta kind '" + ekind + "'");
        }
        dist.validate();
        return dist;
    });
}

SyntheticDistribution load_distribution(const std::string& path) {
    return distribution_from_json(load_json_file(path));
}

QuadratureSpec quadrature_from_json(const nlohmann::json& j) {
    return wrap("quadrature", [&] {
        QuadratureSpec q;
        q.nodes_per_axis = j.value("nodes_per_axis", q.nodes_per_axis);
        q.abs_tolerance = j.value("abs_tolerance", q.abs_tolerance);
        q.mc_samples = j.value("mc_samples", q.mc_samples);
        q.mc_seed = j.value("mc_seed", q.mc_seed);
        q.validate();
        return q;
    });
}

SolverConfig solver_from_json(const nlohmann::json& j) {
    return wrap("solver", [&] {
        SolverConfig s;
        s.tolerance = j.value("tolerance", s.tolerance);
        s.max_passes = j.value("max_passes", s.max_passes);
        s.shuffle_seed = j.value("shuffle_seed", s.shuffle_seed);
        s.validate();
        return s;
    });
}

nlohmann::json plan_to_json(const ExperimentPlan& plan) {
    return {{"distribution", distribution_to_json(plan.distribution)},
            {"costs", costs_to_json(plan.costs)},
            {"region", region_to_json(plan.region)},
            {"kernel", kernel_to_json(plan.kernel)},
            {"gamma", plan.gamma},
            {"m_grid", plan.m_grid},
            {"repetitions", plan.repetitions},
            {"base_seed", plan.base_seed},
            {"solver",
             {{"tolerance", plan.solver.tolerance},
              {"max_passes", plan.solver.max_passes},
              {"shuffle_seed", plan.solver.shuffle_seed}}},
            {"quadrature",
             {{"nodes_per_axis", plan.quadrature.nodes_per_axis},
              {"abs_tolerance", plan.quadrature.abs_tolerance},
              {"mc_samples", plan.quadrature.mc_samples},
              {"mc_seed", plan.quadrature.mc_seed}}}};
}

ExperimentPlan plan_from_json(const nlohmann::json& j) {
    return wrap("plan", [&] {
        ExperimentPlan plan;
        plan.distribution = distribution_from_json(j.at("distribution"));
        plan.costs = costs_from_json(j.at("costs"));
        plan.region = region_from_json(j.at("region"));
        plan.kernel = kernel_from_json(j.at("kernel"));
        plan.gamma = j.at("gamma").get<double>();
        plan.m_grid = j.at("m_grid").get<std::vector<std::size_t>>();
        plan.repetitions = j.at("repetitions").get<std::size_t>();
        plan.base_seed = j.at("base_seed").get<std::uint64_t>();
        if (j.contains("solver")) plan.solver = solver_from_json(j.at("solver"));
        if (j.contains("quadrature")) plan.quadrature = quadrature_from_json(j.at("quadrature"));
        plan.validate();
        return plan;
    });
}

ExperimentPlan load_plan(const std::string& path) { return plan_from_json(load_json_file(path)); }

std::vector<VariantSpec> variants_from_json(const nlohmann::json& j) {
    return wrap("variants", [&] {
        std::vector<VariantSpec> out;
        for (const auto& e : j.at("variants")) {
            VariantSpec v;
            const std::string kind = e.at("kind").get<std::string>();
            if (kind == "standard") v.kind = VariantSpec::Kind::standard;
            else if (kind == "lin") v.kind = VariantSpec::Kind::lin;
            else if (kind == "knowledge") v.kind = VariantSpec::Kind::knowledge;
            else if (kind == "confidence") v.kind = VariantSpec::Kind::confidence;
            else if (kind == "knowledge_points") v.kind = VariantSpec::Kind::knowledge_points;
            else bad("variants: unknown kind '" + kind + "'");
            if (e.contains("h")) {
                const std::string hk = e.at("h").at("kind").get<std::string>();
                if (hk == "identity") v.h.kind = HMapSpec::Kind::identity;
                else if (hk == "power") {
                    v.h.kind = HMapSpec::Kind::power;
                    v.h.exponent = e.at("h").at("exponent").get<double>();
                } else {
                    bad("variants: unknown h kind '" + hk + "'");
                }
            }
            v.confidence = e.value("confidence", v.confidence);
            v.v = e.value("v", v.v);
            if (e.contains("grid_counts"))
                v.grid_counts = e.at("grid_counts").get<std::vector<std::size_t>>();
            v.validate();
            out.push_back(std::move(v));
        }
        if (out.empty()) bad("variants: empty list");
        return out;
    });
}

std::vector<VariantSpec> load_variants(const std::string& path) {
    return variants_from_json(load_json_file(path));
}

}  // namespace utilisvm
