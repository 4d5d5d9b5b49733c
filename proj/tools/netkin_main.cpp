#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "netkin/coupling.hpp"
#include "netkin/netio.hpp"

using namespace netkin;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;

struct CommonFlags {
    std::string config_path;
    std::string preset;
    std::string model;
    std::string out_dir = "out";
    double epsilon = -1.0;
    double dx = -1.0;
    double t_end = -1.0;
    int n_velocity = -1;
    int snapshots = -1;
    int workers = 1;
    std::string variant;
    double alpha_ij = -1.0;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "Run configuration document (JSON)");
    cmd->add_option("--preset", f.preset, "Scenario preset: interval|tripod|large");
    cmd->add_option("--model", f.model, "Model: kinetic|halfmoment|p1|ks|all");
    cmd->add_option("--epsilon", f.epsilon, "Scaling parameter eps");
    cmd->add_option("--dx", f.dx, "Target cell width (rebuilds per-edge cell counts)");
    cmd->add_option("--tend", f.t_end, "Final time");
    cmd->add_option("--nv", f.n_velocity, "Velocity cells for the kinetic model");
    cmd->add_option("--snapshots", f.snapshots, "Number of output snapshots");
    cmd->add_option("--workers", f.workers, "Worker threads (capped by NETKIN_THREADS)");
    cmd->add_option("--cattaneo-variant", f.variant,
                    "kinetic_derived|alpha_transmission|density_continuity");
    cmd->add_option("--alpha-ij", f.alpha_ij, "Uniform alpha_ij for alpha_transmission");
}

int thread_cap() {
    const char* env = std::getenv("NETKIN_THREADS");
    if (env == nullptr) return std::max(1u, std::thread::hardware_concurrency());
    return std::max(1, std::atoi(env));
}

io::RunRequest build_request(const CommonFlags& f) {
    if (!f.config_path.empty() && !f.preset.empty())
        throw std::runtime_error("config: give either --config or --preset, not both");
    io::RunRequest req = !f.config_path.empty()
                             ? io::parse_config(io::read_file(f.config_path))
                             : io::request_from_preset(f.preset.empty() ? "interval" : f.preset);
    auto& cfg = req.scenario;
    if (!f.model.empty()) {
        if (f.model == "all")
            req.models = {ModelKind::Kinetic, ModelKind::HalfMoment, ModelKind::Cattaneo,
                          ModelKind::KellerSegel};
        else
            req.models = {model_from_name(f.model)};
        cfg.model = req.models.front();
    }
    if (f.epsilon > 0.0) cfg.params.epsilon = f.epsilon;
    if (f.dx > 0.0) io::override_dx(cfg, f.dx);
    if (f.t_end > 0.0) cfg.t_end = f.t_end;
    if (f.n_velocity > 0) cfg.n_velocity = f.n_velocity;
    if (f.snapshots > 0) cfg.snapshot_count = f.snapshots;
    if (!f.variant.empty()) {
        if (f.variant == "kinetic_derived")
            cfg.options.cattaneo_variant = CattaneoVariant::KineticDerived;
        else if (f.variant == "alpha_transmission")
            cfg.options.cattaneo_variant = CattaneoVariant::AlphaTransmission;
        else if (f.variant == "density_continuity")
            cfg.options.cattaneo_variant = CattaneoVariant::DensityContinuity;
        else
            throw std::runtime_error("config: unknown cattaneo variant '" + f.variant + "'");
    }
    if (f.alpha_ij > 0.0) cfg.options.alpha_transmission_weight = f.alpha_ij;
    cfg.options.workers = std::min(std::max(1, f.workers), thread_cap());
    cfg.params.validate();
    return req;
}

int cmd_run(const CommonFlags& flags) {
    auto req = build_request(flags);
    std::vector<io::RunArtifacts> artifacts;
    for (ModelKind model : req.models) {
        auto cfg = req.scenario;
        cfg.model = model;
        const auto diag = run(cfg);
        auto art = io::write_run_csv(diag, cfg.net, flags.out_dir);
        std::cout << "ran " << model_name(model) << ": dt = " << diag.dt
                  << ", steps = " << diag.steps << ", final mass = " << diag.mass.back()
                  << ", wall = " << diag.wall_seconds << " s\n";
        artifacts.push_back(std::move(art));
    }
    io::write_manifest(flags.out_dir, req, artifacts);
    std::cout << "wrote " << flags.out_dir << "/manifest.json\n";
    return kExitOk;
}

int cmd_compare(const CommonFlags& flags, const std::string& variants) {
    auto req = build_request(flags);
    if (flags.model.empty() && variants.empty())
        req.models = {ModelKind::Kinetic, ModelKind::HalfMoment, ModelKind::Cattaneo,
                      ModelKind::KellerSegel};

    struct Entry {
        std::string label;
        RunDiagnostics diag;
    };
    std::vector<Entry> entries;
    if (!variants.empty()) {
        std::stringstream ss(variants);
        std::string item;
        while (std::getline(ss, item, ',')) {
            auto cfg = req.scenario;
            cfg.model = ModelKind::Cattaneo;
            if (item == "kinetic_derived")
                cfg.options.cattaneo_variant = CattaneoVariant::KineticDerived;
            else if (item == "alpha_transmission")
                cfg.options.cattaneo_variant = CattaneoVariant::AlphaTransmission;
            else if (item == "density_continuity")
                cfg.options.cattaneo_variant = CattaneoVariant::DensityContinuity;
            else
                throw std::runtime_error("config: unknown cattaneo variant '" + item + "'");
            entries.push_back({"cattaneo:" + item, run(cfg)});
        }
    } else {
        for (ModelKind model : req.models) {
            auto cfg = req.scenario;
            cfg.model = model;
            entries.push_back({model_name(model), run(cfg)});
        }
    }

    namespace fs = std::filesystem;
    fs::create_directories(flags.out_dir);
    std::ofstream l1((fs::path(flags.out_dir) / "l1_table.csv").string(), std::ios::binary);
    l1 << "a,b,l1\n";
    std::cout << "pairwise L1 distances at t = " << req.scenario.t_end << ":\n";
    if (entries.size() == 1) {
        // Degenerate comparison: a model against itself.
        l1 << entries[0].label << ',' << entries[0].label << ",0\n";
        std::cout << "  " << entries[0].label << " vs " << entries[0].label << ": 0\n";
    }
    for (std::size_t i = 0; i < entries.size(); ++i)
        for (std::size_t j = i + 1; j < entries.size(); ++j) {
            const double d = l1_density_distance(entries[i].diag.snapshots.back(),
                                                 entries[j].diag.snapshots.back(), req.scenario.net);
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.17g", d);
            l1 << entries[i].label << ',' << entries[j].label << ',' << buf << '\n';
            std::cout << "  " << entries[i].label << " vs " << entries[j].label << ": " << d
                      << "\n";
        }
    std::ofstream ms((fs::path(flags.out_dir) / "mass_summary.csv").string(), std::ios::binary);
    ms << "label,final_mass\n";
    std::cout << "final total mass:\n";
    for (const auto& e : entries) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", e.diag.mass.back());
        ms << e.label << ',' << buf << '\n';
        std::cout << "  " << e.label << ": " << e.diag.mass.back() << "\n";
    }
    return kExitOk;
}

struct CheckReport {
    bool ok = true;
    void row(const std::string& name, bool pass, const std::string& detail) {
        std::cout << (pass ? "[PASS] " : "[FAIL] ") << name;
        if (!detail.empty()) std::cout << " (" << detail << ")";
        std::cout << "\n";
        ok = ok && pass;
    }
};

int cmd_check(const CommonFlags& flags, bool quick) {
    if (!flags.config_path.empty() || !flags.preset.empty()) {
        build_request(flags);  // usage errors surface as exit 2
        std::cout << "[PASS] configuration is valid\n";
        return kExitOk;
    }

    CheckReport report;
    const double t_end = quick ? 0.02 : 0.1;
    const int nv = quick ? 8 : 20;

    for (double eps : {1.0, 1e-6}) {
        auto cfg = preset_tripod();
        cfg.t_end = t_end;
        cfg.snapshot_count = 2;
        cfg.n_velocity = nv;
        cfg.params.epsilon = eps;
        for (ModelKind model : {ModelKind::Kinetic, ModelKind::HalfMoment, ModelKind::Cattaneo,
                                ModelKind::KellerSegel}) {
            cfg.model = model;
            const auto diag = run(cfg);
            double drift = 0.0;
            for (double m : diag.mass) drift = std::max(drift, std::abs(m - diag.mass.front()));
            const double rel = drift / diag.mass.front();
            report.row("mass conservation " + model_name(model) + " eps=" + std::to_string(eps),
                       rel <= 1e-12, "relative drift " + std::to_string(rel));
            if (model == ModelKind::Kinetic)
                report.row("positivity kinetic eps=" + std::to_string(eps),
                           diag.min_parity >= -1e-13,
                           "min parity " + std::to_string(diag.min_parity));
        }
    }

    {
        const Mat c0 = epsilon_limit_check(cattaneo_condition_pair(3), 0.0);
        const std::vector<double> x{2.0, 2.0, 2.0, 0.7, -0.4, -0.3};
        double res = 0.0;
        for (double v : c0 * x) res = std::max(res, std::abs(v));
        auto [pr, pq] = halfmoment_condition_pairs(3);
        for (double v : epsilon_limit_check(pr, 0.0) * x) res = std::max(res, std::abs(v));
        for (double v : epsilon_limit_check(pq, 0.0) * x) res = std::max(res, std::abs(v));
        report.row("coupling limit algebra", res <= 1e-14, "max residual " + std::to_string(res));
    }

    {
        const int cells = 50;
        ModelParams params;
        params.epsilon = 0.5;
        std::vector<NodeRecord> n1(2);
        n1[0].id = 0;
        n1[1].id = 1;
        std::vector<EdgeRecord> e1(1);
        e1[0] = {0, 0, 1, 2.0, 2 * cells};
        ScenarioConfig single{Network(std::move(n1), std::move(e1))};
        single.model = ModelKind::Kinetic;
        single.params = params;
        single.n_velocity = nv;
        single.t_end = t_end;
        single.snapshot_count = 1;
        EdgeInit init;
        init.breaks = {1.0};
        init.values = {1.0, 0.0};
        single.init = {init};

        std::vector<NodeRecord> n2(3);
        for (int i = 0; i < 3; ++i) n2[i].id = i;
        std::vector<EdgeRecord> e2(2);
        e2[0] = {0, 0, 1, 1.0, cells};
        e2[1] = {1, 1, 2, 1.0, cells};
        ScenarioConfig split{Network(std::move(n2), std::move(e2))};
        split.model = ModelKind::Kinetic;
        split.params = params;
        split.n_velocity = nv;
        split.t_end = t_end;
        split.snapshot_count = 1;
        split.init = {EdgeInit::constant(1.0), EdgeInit::constant(0.0)};

        const auto a = run(single);
        const auto b = run(split);
        double diff = 0.0;
        for (int i = 0; i < cells; ++i) {
            diff = std::max(diff, std::abs(a.snapshots.back().edges[0].rho[i] -
                                           b.snapshots.back().edges[0].rho[i]));
            diff = std::max(diff, std::abs(a.snapshots.back().edges[0].rho[cells + i] -
                                           b.snapshots.back().edges[1].rho[i]));
        }
        report.row("1-to-1 coupling equals single interval", diff <= 1e-12,
                   "max cell diff " + std::to_string(diff));
    }

    {
        const auto A = kinetic_coupling_matrix(3);
        const auto sys = eigendecompose(p1_transport_matrix(1.0 / 3.0));
        double worst = 0.0;
        for (double eps : {1.0, 0.1}) {
            CharacteristicNodeSolver kd(
                sys, cattaneo_conditions(A, eps, CattaneoVariant::KineticDerived), 3);
            Mat alpha(3, 3);
            const double w = 2.0 / (3.0 * std::sqrt(3.0) * eps * eps);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) alpha(i, j) = (i == j) ? 0.0 : w;
            CharacteristicNodeSolver at(
                sys, cattaneo_conditions(A, eps, CattaneoVariant::AlphaTransmission, &alpha), 3);
            std::mt19937 rng(97);
            std::uniform_real_distribution<double> dist(-1.0, 1.0);
            for (int trial = 0; trial < (quick ? 20 : 100); ++trial) {
                std::vector<std::vector<double>> traces(3);
                for (auto& t : traces) t = {dist(rng) + 2.0, dist(rng)};
                const auto u = kd.solve(traces);
                const auto v = at.solve(traces);
                for (int i = 0; i < 3; ++i)
                    for (int d = 0; d < 2; ++d)
                        worst = std::max(worst, std::abs(u[i][d] - v[i][d]));
            }
        }
        report.row("cattaneo variant equivalence", worst <= 1e-10,
                   "max deviation " + std::to_string(worst));
    }

    std::cout << (report.ok ? "all checks passed\n" : "some checks FAILED\n");
    return report.ok ? kExitOk : kExitCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"netkin: chemotaxis cell-density models on 1-D edge networks"};
    app.set_version_flag("--version", "netkin 0.1.0");
    app.require_subcommand(1);

    CommonFlags run_flags, cmp_flags, chk_flags;
    auto* run_cmd = app.add_subcommand("run", "Run a scenario and export CSV snapshots");
    add_common(run_cmd, run_flags);
    run_cmd->add_option("--out", run_flags.out_dir, "Output directory");

    auto* cmp_cmd = app.add_subcommand("compare", "Run a model set and tabulate L1 distances");
    add_common(cmp_cmd, cmp_flags);
    cmp_cmd->add_option("--out", cmp_flags.out_dir, "Output directory");
    std::string variants;
    cmp_cmd->add_option("--variants", variants,
                        "Comma-separated Cattaneo coupling variants to compare");

    auto* chk_cmd = app.add_subcommand("check", "Run the built-in invariant checks");
    add_common(chk_cmd, chk_flags);
    bool quick = false;
    chk_cmd->add_flag("--quick", quick, "Smaller/faster check suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (run_cmd->parsed()) return cmd_run(run_flags);
        if (cmp_cmd->parsed()) return cmd_compare(cmp_flags, variants);
        return cmd_check(chk_flags, quick);
    } catch (const SolverAbort& e) {
        std::cerr << "solver abort: " << e.what() << "\n";
        return kExitCheckFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}
