#include "netkin/netio.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace netkin::io {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error("config: " + msg); }

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CattaneoVariant variant_from_name(const std::string& s) {
    if (s == "kinetic_derived") return CattaneoVariant::KineticDerived;
    if (s == "alpha_transmission") return CattaneoVariant::AlphaTransmission;
    if (s == "density_continuity") return CattaneoVariant::DensityContinuity;
    fail("unknown cattaneo_variant '" + s + "'");
}

std::string variant_name(CattaneoVariant v) {
    switch (v) {
        case CattaneoVariant::KineticDerived: return "kinetic_derived";
        case CattaneoVariant::AlphaTransmission: return "alpha_transmission";
        case CattaneoVariant::DensityContinuity: return "density_continuity";
    }
    return "?";
}

std::vector<ModelKind> models_from_string(const std::string& s) {
    if (s == "all")
        return {ModelKind::Kinetic, ModelKind::HalfMoment, ModelKind::Cattaneo,
                ModelKind::KellerSegel};
    return {model_from_name(s)};
}

}  // namespace

RunRequest request_from_preset(const std::string& preset) {
    ScenarioConfig cfg = [&] {
        if (preset == "interval") return preset_interval_riemann();
        if (preset == "tripod") return preset_tripod();
        if (preset == "large") return preset_large_network();
        fail("unknown preset '" + preset + "' (expected interval|tripod|large)");
    }();
    RunRequest req(std::move(cfg));
    req.preset = preset;
    req.models = {req.scenario.model};
    return req;
}

void override_dx(ScenarioConfig& cfg, double dx) {
    if (!(dx > 0.0)) fail("dx must be positive");
    std::vector<NodeRecord> nodes = cfg.net.nodes();
    std::vector<EdgeRecord> edges = cfg.net.edges();
    for (auto& e : edges)
        e.cells = std::max(2, static_cast<int>(std::llround(e.length / dx)));
    cfg.net = Network(std::move(nodes), std::move(edges));
}

RunRequest parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(std::string("syntax error: ") + e.what());
    }

    RunRequest req = [&]() -> RunRequest {
        if (j.contains("preset")) return request_from_preset(j.at("preset").get<std::string>());
        if (j.contains("network")) {
            ScenarioConfig cfg(parse_network(j.at("network").dump()));
            cfg.name = "custom";
            cfg.init.assign(cfg.net.edge_count(), EdgeInit::constant(0.0));
            RunRequest r(std::move(cfg));
            r.models = {r.scenario.model};
            return r;
        }
        if (j.contains("network_file")) {
            ScenarioConfig cfg(parse_network(read_file(j.at("network_file").get<std::string>())));
            cfg.name = "custom";
            cfg.init.assign(cfg.net.edge_count(), EdgeInit::constant(0.0));
            RunRequest r(std::move(cfg));
            r.models = {r.scenario.model};
            return r;
        }
        fail("one of 'preset', 'network', 'network_file' is required");
    }();
    auto& cfg = req.scenario;

    if (j.contains("model")) {
        req.models = models_from_string(j.at("model").get<std::string>());
        cfg.model = req.models.front();
    }
    if (j.contains("params")) {
        const auto& p = j.at("params");
        if (p.contains("lambda")) cfg.params.lambda = p.at("lambda").get<double>();
        if (p.contains("alpha")) cfg.params.alpha = p.at("alpha").get<double>();
        if (p.contains("D")) cfg.params.D = p.at("D").get<double>();
        if (p.contains("gamma_rho")) cfg.params.gamma_rho = p.at("gamma_rho").get<double>();
        if (p.contains("gamma_m")) cfg.params.gamma_m = p.at("gamma_m").get<double>();
        if (p.contains("epsilon")) cfg.params.epsilon = p.at("epsilon").get<double>();
        if (p.contains("phi") && !p.at("phi").is_null()) cfg.params.phi = p.at("phi").get<double>();
    }
    if (j.contains("epsilon")) cfg.params.epsilon = j.at("epsilon").get<double>();
    if (j.contains("n_velocity")) cfg.n_velocity = j.at("n_velocity").get<int>();
    if (j.contains("t_end")) cfg.t_end = j.at("t_end").get<double>();
    if (j.contains("snapshots")) cfg.snapshot_count = j.at("snapshots").get<int>();
    if (j.contains("dx")) override_dx(cfg, j.at("dx").get<double>());
    if (j.contains("cattaneo_variant"))
        cfg.options.cattaneo_variant = variant_from_name(j.at("cattaneo_variant").get<std::string>());
    if (j.contains("alpha_ij"))
        cfg.options.alpha_transmission_weight = j.at("alpha_ij").get<double>();
    if (j.contains("workers")) cfg.options.workers = j.at("workers").get<int>();
    if (j.contains("cfl_safety")) cfg.options.cfl_safety = j.at("cfl_safety").get<double>();
    if (j.contains("boundaries")) {
        for (const auto& [key, val] : j.at("boundaries").items()) {
            BoundaryCondition bc;
            const std::string type = val.at("type").get<std::string>();
            if (type == "neumann") {
                bc.kind = BoundaryCondition::Kind::Neumann;
            } else if (type == "dirichlet") {
                bc.kind = BoundaryCondition::Kind::DirichletDensity;
                bc.rho = val.at("rho").get<double>();
            } else {
                fail("unknown boundary type '" + type + "'");
            }
            cfg.boundaries[std::stoi(key)] = bc;
        }
    }
    if (j.contains("init")) {
        for (const auto& entry : j.at("init")) {
            const int edge = entry.at("edge").get<int>();
            if (edge < 0 || edge >= cfg.net.edge_count()) fail("init references unknown edge");
            EdgeInit init;
            init.values = entry.at("values").get<std::vector<double>>();
            if (entry.contains("breaks")) init.breaks = entry.at("breaks").get<std::vector<double>>();
            if (entry.contains("m0")) init.m0 = entry.at("m0").get<double>();
            if (init.values.size() != init.breaks.size() + 1)
                fail("init needs values.size() == breaks.size() + 1");
            for (std::size_t k = 1; k < init.breaks.size(); ++k)
                if (!(init.breaks[k] > init.breaks[k - 1]))
                    fail("init breaks must be strictly increasing");
            cfg.init[edge] = std::move(init);
        }
    }
    cfg.params.validate();
    return req;
}

std::string config_echo(const RunRequest& req) {
    const auto& cfg = req.scenario;
    json j;
    if (req.preset)
        j["preset"] = *req.preset;
    else
        j["network"] = json::parse(serialize_network(cfg.net));
    if (req.models.size() == 4)
        j["model"] = "all";
    else
        j["model"] = model_name(req.models.empty() ? cfg.model : req.models.front());
    j["params"] = {{"lambda", cfg.params.lambda},   {"alpha", cfg.params.alpha},
                   {"D", cfg.params.D},             {"gamma_rho", cfg.params.gamma_rho},
                   {"gamma_m", cfg.params.gamma_m}, {"epsilon", cfg.params.epsilon}};
    if (cfg.params.phi) j["params"]["phi"] = *cfg.params.phi;
    j["n_velocity"] = cfg.n_velocity;
    j["t_end"] = cfg.t_end;
    j["snapshots"] = cfg.snapshot_count;
    j["cattaneo_variant"] = variant_name(cfg.options.cattaneo_variant);
    j["alpha_ij"] = cfg.options.alpha_transmission_weight;
    j["cfl_safety"] = cfg.options.cfl_safety;
    j["workers"] = cfg.options.workers;
    if (!req.preset) {
        json init = json::array();
        for (int ei = 0; ei < cfg.net.edge_count(); ++ei) {
            json entry;
            entry["edge"] = ei;
            entry["values"] = cfg.init[ei].values;
            entry["breaks"] = cfg.init[ei].breaks;
            entry["m0"] = cfg.init[ei].m0;
            init.push_back(entry);
        }
        j["init"] = init;
        json bounds = json::object();
        for (const auto& [node, bc] : cfg.boundaries) {
            json b;
            if (bc.kind == BoundaryCondition::Kind::Neumann) {
                b["type"] = "neumann";
            } else {
                b["type"] = "dirichlet";
                b["rho"] = bc.rho;
            }
            bounds[std::to_string(node)] = b;
        }
        j["boundaries"] = bounds;
    }
    return j.dump(2);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunArtifacts write_run_csv(const RunDiagnostics& diag, const Network& net,
                           const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const std::string model = model_name(diag.model);
    const bool has_q = diag.model != ModelKind::KellerSegel;
    const bool has_hat = diag.model == ModelKind::HalfMoment;

    RunArtifacts art;
    art.model = diag.model;
    art.dt = diag.dt;
    art.steps = diag.steps;
    art.wall_seconds = diag.wall_seconds;

    for (int ei = 0; ei < net.edge_count(); ++ei) {
        const auto& e = net.edge(ei);
        const double dx = e.length / e.cells;
        char name[64];
        std::snprintf(name, sizeof(name), "%s_edge_%03d.csv", model.c_str(), ei);
        const std::string path = (fs::path(out_dir) / name).string();
        std::ofstream out(path, std::ios::binary);
        out << "t,edge,x";
        out << ",rho";
        if (has_q) out << ",q";
        if (has_hat) out << ",rho_hat,q_hat";
        out << ",m\n";
        for (const auto& snap : diag.snapshots) {
            const auto& es = snap.edges[ei];
            for (int i = 0; i < e.cells; ++i) {
                out << fmt(snap.t) << ',' << ei << ',' << fmt((i + 0.5) * dx);
                out << ',' << fmt(es.rho[i]);
                if (has_q) out << ',' << fmt(es.q[i]);
                if (has_hat) out << ',' << fmt(es.rho_hat[i]) << ',' << fmt(es.q_hat[i]);
                out << ',' << fmt(es.m[i]) << '\n';
            }
        }
        art.files.push_back(path);
    }

    const std::string mass_path = (fs::path(out_dir) / (model + "_mass.csv")).string();
    std::ofstream out(mass_path, std::ios::binary);
    out << "t,model,total_mass\n";
    for (std::size_t i = 0; i < diag.times.size(); ++i)
        out << fmt(diag.times[i]) << ',' << model << ',' << fmt(diag.mass[i]) << '\n';
    art.files.push_back(mass_path);
    return art;
}

void write_manifest(const std::string& out_dir, const RunRequest& req,
                    const std::vector<RunArtifacts>& runs) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    nlohmann::json j;
    j["solver"] = "netkin 0.1.0";
    j["config"] = nlohmann::json::parse(config_echo(req));
    j["runs"] = nlohmann::json::array();
    for (const auto& r : runs) {
        nlohmann::json rj;
        rj["model"] = model_name(r.model);
        rj["dt"] = r.dt;
        rj["steps"] = r.steps;
        rj["wall_seconds"] = r.wall_seconds;
        rj["outputs"] = r.files;
        j["runs"].push_back(rj);
    }
    std::ofstream out((fs::path(out_dir) / "manifest.json").string(), std::ios::binary);
    out << j.dump(2) << '\n';
}

}  // namespace netkin::io
