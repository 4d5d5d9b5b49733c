"""Chemotaxis cell-density models on networks of 1-D edges.

The heavy lifting lives in the compiled extension `netkin._netkin`; this
package re-exports its surface. Typical use:

    import netkin

    cfg = netkin.preset_tripod()
    cfg.model = netkin.ModelKind.kinetic
    diag = netkin.run(cfg)
    print(diag.mass[-1])
"""

from ._netkin import (  # noqa: F401
    CattaneoVariant,
    Edge,
    EdgeSnapshot,
    ModelKind,
    ModelParams,
    Network,
    RunDiagnostics,
    ScenarioConfig,
    Snapshot,
    __version__,
    config_from_json,
    eigendecompose,
    halfmoment_transport_matrix,
    kinetic_coupling_matrix,
    l1_density_distance,
    l1_distance,
    large_network_json,
    model_from_name,
    model_name,
    parse_network,
    preset_interval_riemann,
    preset_large_network,
    preset_tripod,
    run,
    serialize_network,
    set_dx,
    solve_node_chemo,
    solve_node_keller_segel,
    total_mass,
)
