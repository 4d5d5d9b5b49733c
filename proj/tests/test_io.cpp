#include "doctest.h"
#include "netkin/netio.hpp"

#include <filesystem>
#include <fstream>

#include "json.hpp"

using namespace netkin;

TEST_SUITE_BEGIN("io");

namespace {

std::string slurp(const std::string& path) { return io::read_file(path); }

}  // namespace

TEST_CASE("preset requests echo and re-parse to themselves") {
    for (const char* name : {"interval", "tripod", "large"}) {
        const auto req = io::request_from_preset(name);
        const std::string echo = io::config_echo(req);
        const auto again = io::parse_config(echo);
        CHECK(io::config_echo(again) == echo);
    }
    CHECK_THROWS(io::request_from_preset("nope"));
}

TEST_CASE("config documents with inline networks") {
    const std::string doc = R"({
      "network": {
        "nodes": [{"id": 0}, {"id": 1}],
        "edges": [{"id": 0, "from": 0, "to": 1, "length": 1.0, "cells": 20}]
      },
      "model": "p1",
      "params": {"epsilon": 0.5, "lambda": 2.0},
      "t_end": 0.1,
      "snapshots": 4,
      "init": [{"edge": 0, "values": [1.0, 0.0], "breaks": [0.5]}],
      "boundaries": {"1": {"type": "dirichlet", "rho": 2.0}}
    })";
    const auto req = io::parse_config(doc);
    CHECK(req.models == std::vector<ModelKind>{ModelKind::Cattaneo});
    CHECK(req.scenario.params.epsilon == 0.5);
    CHECK(req.scenario.params.lambda == 2.0);
    CHECK(req.scenario.init[0].density_at(0.25) == 1.0);
    CHECK(req.scenario.init[0].density_at(0.75) == 0.0);
    CHECK(req.scenario.boundaries.at(1).rho == 2.0);
    // Echo carries the full network and re-parses identically.
    const auto echo = io::config_echo(req);
    CHECK(io::config_echo(io::parse_config(echo)) == echo);
}

TEST_CASE("invalid configs are rejected with diagnostics") {
    CHECK_THROWS(io::parse_config("{"));
    CHECK_THROWS(io::parse_config("{}"));
    // eps > lambda/alpha violates the kinetic positivity constraint
    CHECK_THROWS_AS(io::parse_config(R"({"preset": "tripod", "epsilon": 2.0})"),
                    std::invalid_argument);
    CHECK_THROWS(io::parse_config(R"({"preset": "tripod", "cattaneo_variant": "bogus"})"));
}

TEST_CASE("dx override rebuilds cell counts") {
    auto req = io::request_from_preset("interval");
    io::override_dx(req.scenario, 0.0025);
    CHECK(req.scenario.net.edge(0).cells == 800);
}

TEST_CASE("csv outputs are byte-stable across runs") {
    auto req = io::request_from_preset("tripod");
    req.scenario.model = ModelKind::HalfMoment;
    req.scenario.t_end = 0.01;
    req.scenario.snapshot_count = 2;
    const auto dir1 = std::filesystem::temp_directory_path() / "netkin_io_a";
    const auto dir2 = std::filesystem::temp_directory_path() / "netkin_io_b";
    std::filesystem::remove_all(dir1);
    std::filesystem::remove_all(dir2);

    const auto d1 = run(req.scenario);
    const auto d2 = run(req.scenario);
    const auto a1 = io::write_run_csv(d1, req.scenario.net, dir1.string());
    const auto a2 = io::write_run_csv(d2, req.scenario.net, dir2.string());
    REQUIRE(a1.files.size() == a2.files.size());
    CHECK(a1.files.size() == 4);  // 3 edges + mass series
    for (std::size_t i = 0; i < a1.files.size(); ++i)
        CHECK(slurp(a1.files[i]) == slurp(a2.files[i]));

    // Column sets per model.
    const std::string head = slurp(a1.files[0]).substr(0, slurp(a1.files[0]).find('\n'));
    CHECK(head == "t,edge,x,rho,q,rho_hat,q_hat,m");

    io::write_manifest(dir1.string(), req, {a1});
    const auto manifest = slurp((dir1 / "manifest.json").string());
    CHECK(manifest.find("\"preset\": \"tripod\"") != std::string::npos);
    CHECK(manifest.find("halfmoment_mass.csv") != std::string::npos);
}

TEST_CASE("mass csv and kinetic/ks column sets") {
    auto req = io::request_from_preset("tripod");
    req.scenario.t_end = 0.005;
    req.scenario.snapshot_count = 1;
    req.scenario.n_velocity = 4;
    const auto dir = std::filesystem::temp_directory_path() / "netkin_io_c";
    std::filesystem::remove_all(dir);

    req.scenario.model = ModelKind::Kinetic;
    auto art = io::write_run_csv(run(req.scenario), req.scenario.net, dir.string());
    std::string head = slurp(art.files[0]);
    CHECK(head.substr(0, head.find('\n')) == "t,edge,x,rho,q,m");

    req.scenario.model = ModelKind::KellerSegel;
    art = io::write_run_csv(run(req.scenario), req.scenario.net, dir.string());
    head = slurp(art.files[0]);
    CHECK(head.substr(0, head.find('\n')) == "t,edge,x,rho,m");
    const std::string mass = slurp(art.files.back());
    CHECK(mass.substr(0, mass.find('\n')) == "t,model,total_mass");
    CHECK(mass.find(",ks,") != std::string::npos);
}

TEST_CASE("re-running a manifest's config reproduces outputs byte-for-byte") {
    auto req = io::request_from_preset("tripod");
    req.scenario.model = ModelKind::Cattaneo;
    req.models = {ModelKind::Cattaneo};
    req.scenario.t_end = 0.01;
    req.scenario.snapshot_count = 2;
    const auto dir1 = std::filesystem::temp_directory_path() / "netkin_manifest_a";
    const auto dir2 = std::filesystem::temp_directory_path() / "netkin_manifest_b";
    std::filesystem::remove_all(dir1);
    std::filesystem::remove_all(dir2);

    const auto art = io::write_run_csv(run(req.scenario), req.scenario.net, dir1.string());
    io::write_manifest(dir1.string(), req, {art});

    // Extract the config block back out of the manifest and run it again.
    const auto manifest = nlohmann::json::parse(slurp((dir1 / "manifest.json").string()));
    auto replay = io::parse_config(manifest.at("config").dump());
    replay.scenario.model = ModelKind::Cattaneo;
    const auto art2 = io::write_run_csv(run(replay.scenario), replay.scenario.net, dir2.string());
    REQUIRE(art.files.size() == art2.files.size());
    for (std::size_t i = 0; i < art.files.size(); ++i)
        CHECK(slurp(art.files[i]) == slurp(art2.files[i]));
}

TEST_CASE("shipped large-network data file matches the embedded document") {
    const std::string path = std::string(NETKIN_SOURCE_DIR) + "/data/large_network.json";
    CHECK(slurp(path) == large_network_json());
}

TEST_SUITE_END();
