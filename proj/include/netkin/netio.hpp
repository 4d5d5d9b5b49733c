#pragma once

#include <optional>
#include <string>
#include <vector>

#include "netkin/scenarios.hpp"

namespace netkin::io {

/// A run request: one scenario plus the list of models to run on it.
struct RunRequest {
    ScenarioConfig scenario;
    std::vector<ModelKind> models;
    std::optional<std::string> preset;  // set when built from a preset

    explicit RunRequest(ScenarioConfig s) : scenario(std::move(s)) {}
};

/// Build a request from a preset name ("interval", "tripod", "large").
RunRequest request_from_preset(const std::string& preset);

/// Parse a config document (JSON text; see README for the schema).
RunRequest parse_config(const std::string& text);

/// Resolved-config echo; parse_config(dump) reproduces the request.
std::string config_echo(const RunRequest& req);

/// Rebuild every edge's cell count as round(length/dx) (>= 2).
void override_dx(ScenarioConfig& cfg, double dx);

/// Per-model result files of one completed run.
struct RunArtifacts {
    ModelKind model;
    double dt = 0.0;
    long steps = 0;
    double wall_seconds = 0.0;
    std::vector<std::string> files;
};

/// Write per-edge snapshot CSVs and the mass series for one diagnostics
/// record. Columns: edge files `t,edge,x,rho[,q[,rho_hat,q_hat]],m`
/// (model-dependent), mass file `t,model,total_mass`; doubles at full
/// precision, LF line endings. Returns the artifact record.
RunArtifacts write_run_csv(const RunDiagnostics& diag, const Network& net,
                           const std::string& out_dir);

/// Write <out_dir>/manifest.json covering all runs of one invocation.
void write_manifest(const std::string& out_dir, const RunRequest& req,
                    const std::vector<RunArtifacts>& runs);

std::string read_file(const std::string& path);

}  // namespace netkin::io
