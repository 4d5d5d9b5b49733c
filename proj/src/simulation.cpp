#include "netkin/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

namespace netkin {

namespace {

double limited(double g) { return g / std::sqrt(1.0 + g * g); }

// Parity map v -> -v on a moment-model state in place.
void apply_parity(ModelKind model, std::vector<double>& u) {
    if (model == ModelKind::Cattaneo && u.size() >= 2) {
        u[1] = -u[1];
    } else if (model == ModelKind::HalfMoment && u.size() >= 4) {
        u[1] = -u[1];
        u[2] = -u[2];
    }
}

}  // namespace

double EdgeInit::density_at(double x) const {
    std::size_t k = 0;
    while (k < breaks.size() && x > breaks[k]) ++k;
    return values.at(k);
}

EdgeInit EdgeInit::constant(double rho0, double m0_) {
    EdgeInit e;
    e.values = {rho0};
    e.m0 = m0_;
    return e;
}

struct Simulation::EdgeData {
    int id = 0;
    int nx = 0;
    double dx = 0.0;

    KineticEdgeState kin;
    P1EdgeState p1;
    HalfMomentEdgeState hm;
    KSEdgeState ks;
    ChemoEdgeState chemo;

    std::vector<double> rho;   // refreshed at the top of each step
    std::vector<double> mbar;

    // chemoattractant ghosts: for the explicit step and for the gradient
    double chemo_gl = 0.0, chemo_gr = 0.0;
    double m_gl = 0.0, m_gr = 0.0;

    // transport ghosts (global frame)
    KineticGhosts kghost;
    std::vector<double> gl, gr;

    // relaxation stencil ghosts
    std::vector<double> rgl, rgr;                  // kinetic ghost r per velocity
    std::optional<double> rho_gl, rho_gr;          // Cattaneo
    std::optional<HmRelaxGhost> hm_gl, hm_gr;      // half-moment

    // Keller-Segel end-face fluxes (anti-flux convention of the step)
    double ks_fl = 0.0, ks_fr = 0.0;

    // per-step scratch diagnostics
    bool finite_ok = true;
    double step_min_parity = std::numeric_limits<double>::infinity();
};

struct Simulation::NodeData {
    int id = 0;
    NodeLocalFrame frame;
    bool interior = false;
    BoundaryCondition bc;
    CouplingMatrix A;
    std::unique_ptr<KineticNodeSolver> kin_solver;
    std::unique_ptr<CharacteristicNodeSolver> moment_solver;
    double m_star = 0.0;  // node chemoattractant value of the current step
};

Simulation::~Simulation() = default;

Simulation::Simulation(Network net, ModelKind model, ModelParams params, int n_velocity,
                       std::vector<EdgeInit> init, std::map<int, BoundaryCondition> boundaries,
                       SimulationOptions opts)
    : net_(std::move(net)),
      model_(model),
      params_(params),
      opts_(opts),
      vgrid_(model == ModelKind::Kinetic ? n_velocity : 1),
      min_parity_(std::numeric_limits<double>::infinity()) {
    params_.validate();
    phi_ = params_.phi_for(model_);
    const bool hyperbolic = model_ != ModelKind::KellerSegel;
    if (hyperbolic && !(phi_ > 0.0))
        throw std::invalid_argument(
            "simulation: relaxation speed phi is zero (alpha = 0?); set params.phi > 0");
    if (static_cast<int>(init.size()) != net_.edge_count())
        throw std::invalid_argument("simulation: one EdgeInit per edge required");

    if (model_ == ModelKind::Kinetic) {
        kin_systems_.reserve(vgrid_.count);
        for (int k = 0; k < vgrid_.count; ++k)
            kin_systems_.push_back(eigendecompose(kinetic_transport_matrix(vgrid_.v[k], phi_)));
    } else if (model_ == ModelKind::Cattaneo) {
        moment_system_ = eigendecompose(p1_transport_matrix(phi_));
    } else if (model_ == ModelKind::HalfMoment) {
        moment_system_ = eigendecompose(halfmoment_transport_matrix(phi_));
    }

    grids_.reserve(net_.edge_count());
    for (const auto& e : net_.edges()) grids_.emplace_back(e.length, e.cells);

    // Global time step from the CFL bounds of every edge.
    std::vector<const LinearHyperbolicSystem*> systems;
    std::vector<double> parabolic{params_.D};
    std::optional<LinearHyperbolicSystem> drift_sys;
    if (model_ == ModelKind::Kinetic)
        for (const auto& s : kin_systems_) systems.push_back(&s);
    else if (moment_system_)
        systems.push_back(&*moment_system_);
    if (model_ == ModelKind::KellerSegel) {
        parabolic.push_back(1.0 / (3.0 * params_.lambda));
        if (params_.alpha > 0.0) {
            Mat d(1, 1);
            d(0, 0) = params_.alpha / (3.0 * params_.lambda);
            drift_sys = eigendecompose(d);
            systems.push_back(&*drift_sys);
        }
    }
    dt_ = cfl_dt(systems, grids_, parabolic, opts_.cfl_safety);

    // Edge states from the initial data.
    for (int ei = 0; ei < net_.edge_count(); ++ei) {
        auto e = std::make_unique<EdgeData>();
        e->id = ei;
        e->nx = grids_[ei].cells;
        e->dx = grids_[ei].dx;
        std::vector<double> rho0(e->nx);
        for (int i = 0; i < e->nx; ++i) rho0[i] = init[ei].density_at(grids_[ei].center(i));
        switch (model_) {
            case ModelKind::Kinetic: e->kin = kinetic_from_density(rho0, vgrid_); break;
            case ModelKind::Cattaneo: e->p1 = p1_from_density(rho0); break;
            case ModelKind::HalfMoment: e->hm = halfmoment_from_density(rho0); break;
            case ModelKind::KellerSegel: e->ks = ks_from_density(rho0); break;
        }
        e->chemo = ChemoEdgeState(e->nx);
        std::fill(e->chemo.m.begin(), e->chemo.m.end(), init[ei].m0);
        e->rho = rho0;
        e->mbar.assign(e->nx, 0.0);
        if (model_ == ModelKind::Kinetic) {
            e->kghost.left_r.assign(vgrid_.count, 0.0);
            e->kghost.left_j.assign(vgrid_.count, 0.0);
            e->kghost.right_r.assign(vgrid_.count, 0.0);
            e->kghost.right_j.assign(vgrid_.count, 0.0);
            e->rgl.assign(vgrid_.count, 0.0);
            e->rgr.assign(vgrid_.count, 0.0);
        } else if (hyperbolic) {
            const int dim = moment_system_->dim;
            e->gl.assign(dim, 0.0);
            e->gr.assign(dim, 0.0);
        }
        edges_.push_back(std::move(e));
    }

    // Node data: coupling solvers at junctions, boundary records at ends.
    for (const auto& [node_id, bc] : boundaries) {
        if (node_id < 0 || node_id >= net_.node_count())
            throw std::invalid_argument("simulation: boundary condition on unknown node");
        if (net_.node(node_id).degree() != 1)
            throw std::invalid_argument("simulation: boundary conditions only on degree-1 nodes");
        if (bc.kind == BoundaryCondition::Kind::DirichletDensity && bc.rho < 0.0)
            throw std::invalid_argument("simulation: Dirichlet density must be nonnegative");
    }
    const bool precondition = params_.epsilon < opts_.precondition_eps_threshold;
    for (const auto& n : net_.nodes()) {
        auto nd = std::make_unique<NodeData>();
        nd->id = n.id;
        nd->frame = node_local_frame(net_, n.id);
        nd->interior = n.degree() >= 2;
        if (nd->interior) {
            nd->A = kinetic_coupling_matrix(n.degree());
            if (model_ == ModelKind::Kinetic) {
                nd->kin_solver = std::make_unique<KineticNodeSolver>(nd->A, params_.epsilon, phi_,
                                                                     precondition);
            } else if (model_ == ModelKind::Cattaneo) {
                const Mat* alpha_mat = nullptr;
                Mat amat;
                if (opts_.cattaneo_variant == CattaneoVariant::AlphaTransmission) {
                    amat = Mat(n.degree(), n.degree());
                    for (int i = 0; i < n.degree(); ++i)
                        for (int j = 0; j < n.degree(); ++j)
                            amat(i, j) = (i == j) ? 0.0 : opts_.alpha_transmission_weight;
                    alpha_mat = &amat;
                }
                nd->moment_solver = std::make_unique<CharacteristicNodeSolver>(
                    *moment_system_,
                    cattaneo_conditions(nd->A, params_.epsilon, opts_.cattaneo_variant, alpha_mat,
                                        precondition &&
                                            opts_.cattaneo_variant == CattaneoVariant::KineticDerived),
                    n.degree());
            } else if (model_ == ModelKind::HalfMoment) {
                nd->moment_solver = std::make_unique<CharacteristicNodeSolver>(
                    *moment_system_, halfmoment_conditions(nd->A, params_.epsilon, precondition),
                    n.degree());
            }
        } else {
            auto it = boundaries.find(n.id);
            if (it != boundaries.end()) nd->bc = it->second;
            if (nd->bc.kind == BoundaryCondition::Kind::DirichletDensity) {
                // Isotropic inflow f+ = rho_b/2 expressed through the
                // model's half-range moments; the eps = 0 limits are the
                // plain Dirichlet data rho = rho_b (and q_hat = rho_b/2).
                const double eps = params_.epsilon;
                if (model_ == ModelKind::Cattaneo) {
                    NodeConditions c;
                    c.coeff = Mat(1, 2);
                    c.coeff(0, 0) = 1.0;          // rho
                    c.coeff(0, 1) = 1.5 * eps;    // + (3/2) eps q  (half-range average)
                    c.rhs = {nd->bc.rho};
                    nd->moment_solver =
                        std::make_unique<CharacteristicNodeSolver>(*moment_system_, std::move(c), 1);
                } else if (model_ == ModelKind::HalfMoment) {
                    NodeConditions c;
                    c.coeff = Mat(2, 4);
                    c.coeff(0, 0) = 1.0;   // rho + eps rho_hat = 2 rho+ = rho_b
                    c.coeff(0, 2) = eps;
                    c.coeff(1, 1) = eps;   // eps q + q_hat = 2 q+ = rho_b/2
                    c.coeff(1, 3) = 1.0;
                    c.rhs = {nd->bc.rho, 0.5 * nd->bc.rho};
                    nd->moment_solver =
                        std::make_unique<CharacteristicNodeSolver>(*moment_system_, std::move(c), 1);
                }
            }
        }
        nodes_.push_back(std::move(nd));
    }
}

void Simulation::parallel_edges(const std::function<void(int)>& fn) {
    const int ne = net_.edge_count();
    const int workers = std::min(opts_.workers, ne);
    if (workers <= 1) {
        for (int i = 0; i < ne; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex err_mutex;
    const int chunk = (ne + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const int lo = w * chunk;
        const int hi = std::min(ne, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] {
            try {
                for (int i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!err) err = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

void Simulation::refresh_density() {
    parallel_edges([&](int ei) {
        auto& e = *edges_[ei];
        switch (model_) {
            case ModelKind::Kinetic: {
                std::vector<double> q(e.nx);
                moments_kinetic(e.kin, vgrid_, e.rho, q);
                break;
            }
            case ModelKind::Cattaneo: e.rho = e.p1.rho; break;
            case ModelKind::HalfMoment: e.rho = e.hm.rho; break;
            case ModelKind::KellerSegel: e.rho = e.ks.rho; break;
        }
    });
}

// Node values and ghost cells for the chemoattractant. Degree-1 nodes are
// zero Neumann for m throughout; junctions take the Kirchhoff value.
void Simulation::chemo_node_pass(bool for_gradient) {
    for (auto& ndp : nodes_) {
        auto& nd = *ndp;
        const auto& fr = nd.frame;
        double m_star = 0.0;
        if (nd.interior) {
            std::vector<double> first(fr.degree()), dxs(fr.degree());
            for (int i = 0; i < fr.degree(); ++i) {
                const auto& e = *edges_[fr.edges[i]];
                first[i] = (fr.signs[i] > 0) ? e.chemo.m.front() : e.chemo.m.back();
                dxs[i] = e.dx;
            }
            m_star = solve_node_chemo(first, dxs, params_.D).value;
        }
        for (int i = 0; i < fr.degree(); ++i) {
            auto& e = *edges_[fr.edges[i]];
            const double m_end = (fr.signs[i] > 0) ? e.chemo.m.front() : e.chemo.m.back();
            const double ghost = nd.interior ? 2.0 * m_star - m_end : m_end;
            if (for_gradient) {
                nd.m_star = nd.interior ? m_star : m_end;
                (fr.signs[i] > 0 ? e.m_gl : e.m_gr) = ghost;
            } else {
                (fr.signs[i] > 0 ? e.chemo_gl : e.chemo_gr) = ghost;
            }
        }
    }
}

void Simulation::hyperbolic_node_pass() {
    const int nv = vgrid_.count;
    for (auto& ndp : nodes_) {
        auto& nd = *ndp;
        const auto& fr = nd.frame;
        const int deg = fr.degree();

        if (!nd.interior) {
            auto& e = *edges_[fr.edges[0]];
            const int sign = fr.signs[0];
            const int cell = (sign > 0) ? 0 : e.nx - 1;
            if (nd.bc.kind == BoundaryCondition::Kind::Neumann) {
                // Reflecting wall: parity image of the end cell; the mass
                // flux through the face is exactly zero.
                if (model_ == ModelKind::Kinetic) {
                    for (int k = 0; k < nv; ++k) {
                        const double r = e.kin.r_at(k, cell);
                        const double j = -e.kin.j_at(k, cell);
                        if (sign > 0) {
                            e.kghost.left_r[k] = r;
                            e.kghost.left_j[k] = j;
                        } else {
                            e.kghost.right_r[k] = r;
                            e.kghost.right_j[k] = j;
                        }
                    }
                } else if (model_ == ModelKind::Cattaneo) {
                    std::vector<double> u{e.p1.rho[cell], -e.p1.q[cell]};
                    (sign > 0 ? e.gl : e.gr) = u;
                } else if (model_ == ModelKind::HalfMoment) {
                    std::vector<double> u{e.hm.rho[cell], -e.hm.q[cell], -e.hm.rho_hat[cell],
                                          e.hm.q_hat[cell]};
                    (sign > 0 ? e.gl : e.gr) = u;
                }
            } else {
                // Isotropic Dirichlet inflow of density rho_b.
                const double rho_b = nd.bc.rho;
                if (model_ == ModelKind::Kinetic) {
                    const double s = std::sqrt(phi_);
                    const double eps = params_.epsilon;
                    for (int k = 0; k < nv; ++k) {
                        const double r_tr = e.kin.r_at(k, cell);
                        const double j_tr = (sign > 0 ? 1.0 : -1.0) * e.kin.j_at(k, cell);
                        const double wm = j_tr - s * r_tr;
                        const double r_b = (0.5 * rho_b - eps * wm) / (1.0 + eps * s);
                        const double j_b = wm + s * r_b;
                        if (sign > 0) {
                            e.kghost.left_r[k] = r_b;
                            e.kghost.left_j[k] = j_b;
                        } else {
                            e.kghost.right_r[k] = r_b;
                            e.kghost.right_j[k] = -j_b;
                        }
                    }
                } else if (model_ != ModelKind::KellerSegel) {
                    std::vector<double> trace;
                    if (model_ == ModelKind::Cattaneo)
                        trace = {e.p1.rho[cell], e.p1.q[cell]};
                    else
                        trace = {e.hm.rho[cell], e.hm.q[cell], e.hm.rho_hat[cell],
                                 e.hm.q_hat[cell]};
                    if (sign < 0) apply_parity(model_, trace);
                    auto out = nd.moment_solver->solve({trace});
                    if (sign < 0) apply_parity(model_, out[0]);
                    (sign > 0 ? e.gl : e.gr) = out[0];
                }
            }
            continue;
        }

        if (model_ == ModelKind::Kinetic) {
            thread_local std::vector<double> r_tr, j_tr, r_out, j_out;
            r_tr.resize(deg);
            j_tr.resize(deg);
            r_out.resize(deg);
            j_out.resize(deg);
            for (int k = 0; k < nv; ++k) {
                for (int i = 0; i < deg; ++i) {
                    const auto& e = *edges_[fr.edges[i]];
                    const int cell = (fr.signs[i] > 0) ? 0 : e.nx - 1;
                    r_tr[i] = e.kin.r_at(k, cell);
                    j_tr[i] = (fr.signs[i] > 0 ? 1.0 : -1.0) * e.kin.j_at(k, cell);
                }
                nd.kin_solver->solve(r_tr, j_tr, r_out, j_out);
                for (int i = 0; i < deg; ++i) {
                    auto& e = *edges_[fr.edges[i]];
                    if (fr.signs[i] > 0) {
                        e.kghost.left_r[k] = r_out[i];
                        e.kghost.left_j[k] = j_out[i];
                    } else {
                        e.kghost.right_r[k] = r_out[i];
                        e.kghost.right_j[k] = -j_out[i];
                    }
                }
            }
        } else if (model_ != ModelKind::KellerSegel) {
            std::vector<std::vector<double>> traces(deg);
            for (int i = 0; i < deg; ++i) {
                const auto& e = *edges_[fr.edges[i]];
                const int cell = (fr.signs[i] > 0) ? 0 : e.nx - 1;
                if (model_ == ModelKind::Cattaneo)
                    traces[i] = {e.p1.rho[cell], e.p1.q[cell]};
                else
                    traces[i] = {e.hm.rho[cell], e.hm.q[cell], e.hm.rho_hat[cell],
                                 e.hm.q_hat[cell]};
                if (fr.signs[i] < 0) apply_parity(model_, traces[i]);
            }
            auto out = nd.moment_solver->solve(traces);
            for (int i = 0; i < deg; ++i) {
                auto& e = *edges_[fr.edges[i]];
                if (fr.signs[i] < 0) apply_parity(model_, out[i]);
                (fr.signs[i] > 0 ? e.gl : e.gr) = out[i];
            }
        }
    }
}

// Ghost values for the relaxation stencils, from post-transport traces.
// At a junction the ghost is the A-mixture of the local traces (for the
// even components, which the parity map leaves unchanged); at a wall it is
// the edge's own end value; at Dirichlet ends the boundary state.
void Simulation::relax_ghost_pass() {
    const int nv = vgrid_.count;
    for (auto& ndp : nodes_) {
        auto& nd = *ndp;
        const auto& fr = nd.frame;
        const int deg = fr.degree();

        if (!nd.interior) {
            auto& e = *edges_[fr.edges[0]];
            const int sign = fr.signs[0];
            const int cell = (sign > 0) ? 0 : e.nx - 1;
            if (model_ == ModelKind::Kinetic) {
                auto& ghost = (sign > 0) ? e.rgl : e.rgr;
                if (nd.bc.kind == BoundaryCondition::Kind::Neumann) {
                    for (int k = 0; k < nv; ++k) ghost[k] = e.kin.r_at(k, cell);
                } else {
                    const double s = std::sqrt(phi_);
                    const double eps = params_.epsilon;
                    for (int k = 0; k < nv; ++k) {
                        const double r_tr = e.kin.r_at(k, cell);
                        const double j_tr = (sign > 0 ? 1.0 : -1.0) * e.kin.j_at(k, cell);
                        const double wm = j_tr - s * r_tr;
                        ghost[k] = (0.5 * nd.bc.rho - eps * wm) / (1.0 + eps * s);
                    }
                }
            } else if (model_ == ModelKind::Cattaneo) {
                double g = e.p1.rho[cell];
                if (nd.bc.kind == BoundaryCondition::Kind::DirichletDensity) {
                    std::vector<double> trace{e.p1.rho[cell], e.p1.q[cell]};
                    if (sign < 0) apply_parity(model_, trace);
                    g = nd.moment_solver->solve({trace})[0][0];
                }
                (sign > 0 ? e.rho_gl : e.rho_gr) = g;
            } else if (model_ == ModelKind::HalfMoment) {
                HmRelaxGhost g;
                if (nd.bc.kind == BoundaryCondition::Kind::DirichletDensity) {
                    std::vector<double> trace{e.hm.rho[cell], e.hm.q[cell], e.hm.rho_hat[cell],
                                              e.hm.q_hat[cell]};
                    if (sign < 0) apply_parity(model_, trace);
                    const auto out = nd.moment_solver->solve({trace});
                    g.rho = out[0][0];
                    g.q_hat = out[0][3];
                } else {
                    g.rho = e.hm.rho[cell];
                    g.q_hat = e.hm.q_hat[cell];
                }
                (sign > 0 ? e.hm_gl : e.hm_gr) = g;
            }
            continue;
        }

        if (model_ == ModelKind::Kinetic) {
            thread_local std::vector<double> r_tr;
            r_tr.resize(deg);
            for (int k = 0; k < nv; ++k) {
                for (int i = 0; i < deg; ++i) {
                    const auto& e = *edges_[fr.edges[i]];
                    r_tr[i] = e.kin.r_at(k, (fr.signs[i] > 0) ? 0 : e.nx - 1);
                }
                for (int i = 0; i < deg; ++i) {
                    double mix = 0.0;
                    for (int j = 0; j < deg; ++j) mix += nd.A.a(i, j) * r_tr[j];
                    auto& e = *edges_[fr.edges[i]];
                    (fr.signs[i] > 0 ? e.rgl : e.rgr)[k] = mix;
                }
            }
        } else if (model_ == ModelKind::Cattaneo) {
            std::vector<double> rho_tr(deg);
            for (int i = 0; i < deg; ++i) {
                const auto& e = *edges_[fr.edges[i]];
                rho_tr[i] = e.p1.rho[(fr.signs[i] > 0) ? 0 : e.nx - 1];
            }
            for (int i = 0; i < deg; ++i) {
                double mix = 0.0;
                for (int j = 0; j < deg; ++j) mix += nd.A.a(i, j) * rho_tr[j];
                auto& e = *edges_[fr.edges[i]];
                (fr.signs[i] > 0 ? e.rho_gl : e.rho_gr) = mix;
            }
        } else if (model_ == ModelKind::HalfMoment) {
            std::vector<double> rho_tr(deg), qhat_tr(deg);
            for (int i = 0; i < deg; ++i) {
                const auto& e = *edges_[fr.edges[i]];
                const int cell = (fr.signs[i] > 0) ? 0 : e.nx - 1;
                rho_tr[i] = e.hm.rho[cell];
                qhat_tr[i] = e.hm.q_hat[cell];
            }
            for (int i = 0; i < deg; ++i) {
                HmRelaxGhost g;
                for (int j = 0; j < deg; ++j) {
                    g.rho += nd.A.a(i, j) * rho_tr[j];
                    g.q_hat += nd.A.a(i, j) * qhat_tr[j];
                }
                auto& e = *edges_[fr.edges[i]];
                (fr.signs[i] > 0 ? e.hm_gl : e.hm_gr) = g;
            }
        }
    }
}

// Keller-Segel end-face fluxes from the node balance.
void Simulation::ks_node_pass() {
    const double diff = 1.0 / (3.0 * params_.lambda);
    const double drift = params_.alpha / (3.0 * params_.lambda);
    for (auto& ndp : nodes_) {
        auto& nd = *ndp;
        const auto& fr = nd.frame;
        const int deg = fr.degree();

        auto node_mbar = [&](const EdgeData& e, int sign) {
            const double m_first = (sign > 0) ? e.chemo.m.front() : e.chemo.m.back();
            return limited((m_first - nd.m_star) / (0.5 * e.dx));
        };

        if (!nd.interior) {
            auto& e = *edges_[fr.edges[0]];
            const int sign = fr.signs[0];
            double q_loc = 0.0;
            if (nd.bc.kind == BoundaryCondition::Kind::DirichletDensity) {
                const double rho_first = (sign > 0) ? e.ks.rho.front() : e.ks.rho.back();
                const double mb = node_mbar(e, sign);
                q_loc = -diff * (rho_first - nd.bc.rho) / (0.5 * e.dx) +
                        drift * mb * 0.5 * (nd.bc.rho + rho_first);
            }
            (sign > 0 ? e.ks_fl : e.ks_fr) = (sign > 0) ? -q_loc : q_loc;
            continue;
        }

        std::vector<double> first(deg), mb(deg), dxs(deg);
        for (int i = 0; i < deg; ++i) {
            const auto& e = *edges_[fr.edges[i]];
            first[i] = (fr.signs[i] > 0) ? e.ks.rho.front() : e.ks.rho.back();
            mb[i] = node_mbar(e, fr.signs[i]);
            dxs[i] = e.dx;
        }
        const auto sol = solve_node_keller_segel(first, mb, dxs, params_.lambda, params_.alpha);
        for (int i = 0; i < deg; ++i) {
            auto& e = *edges_[fr.edges[i]];
            (fr.signs[i] > 0 ? e.ks_fl : e.ks_fr) =
                (fr.signs[i] > 0) ? -sol.fluxes[i] : sol.fluxes[i];
        }
    }
}

void Simulation::transport_edges(double dt) {
    parallel_edges([&](int ei) {
        auto& e = *edges_[ei];
        switch (model_) {
            case ModelKind::Kinetic:
                kinetic_transport(e.kin, kin_systems_, dt, e.dx, e.kghost);
                break;
            case ModelKind::Cattaneo:
                p1_transport(e.p1, *moment_system_, dt, e.dx, e.gl, e.gr);
                break;
            case ModelKind::HalfMoment:
                hm_transport(e.hm, *moment_system_, dt, e.dx, e.gl, e.gr);
                break;
            case ModelKind::KellerSegel:
                keller_segel_step(e.ks, e.mbar, params_, dt, e.dx, e.ks_fl, e.ks_fr);
                break;
        }
    });
}

void Simulation::relax_edges(double dt) {
    const double eps = params_.epsilon;
    parallel_edges([&](int ei) {
        auto& e = *edges_[ei];
        e.finite_ok = true;
        e.step_min_parity = std::numeric_limits<double>::infinity();
        switch (model_) {
            case ModelKind::Kinetic: {
                kinetic_relax(e.kin, e.mbar, params_, vgrid_, dt, e.dx, e.rgl, e.rgr);
                double mn = std::numeric_limits<double>::infinity();
                bool ok = true;
                for (std::size_t idx = 0; idx < e.kin.r.size(); ++idx) {
                    const double fp = e.kin.r[idx] + eps * e.kin.j[idx];
                    const double fm = e.kin.r[idx] - eps * e.kin.j[idx];
                    mn = std::min(mn, std::min(fp, fm));
                    ok = ok && std::isfinite(fp) && std::isfinite(fm);
                }
                e.step_min_parity = mn;
                e.finite_ok = ok;
                break;
            }
            case ModelKind::Cattaneo: {
                p1_relax(e.p1, e.mbar, params_, dt, e.dx, e.rho_gl, e.rho_gr);
                for (int i = 0; i < e.nx; ++i)
                    e.finite_ok = e.finite_ok && std::isfinite(e.p1.rho[i]) && std::isfinite(e.p1.q[i]);
                break;
            }
            case ModelKind::HalfMoment: {
                hm_relax(e.hm, e.mbar, params_, dt, e.dx, e.hm_gl, e.hm_gr);
                for (int i = 0; i < e.nx; ++i)
                    e.finite_ok = e.finite_ok && std::isfinite(e.hm.rho[i]) &&
                                  std::isfinite(e.hm.q[i]) && std::isfinite(e.hm.rho_hat[i]) &&
                                  std::isfinite(e.hm.q_hat[i]);
                break;
            }
            case ModelKind::KellerSegel: {
                for (int i = 0; i < e.nx; ++i)
                    e.finite_ok = e.finite_ok && std::isfinite(e.ks.rho[i]);
                break;
            }
        }
        for (int i = 0; i < e.nx; ++i) e.finite_ok = e.finite_ok && std::isfinite(e.chemo.m[i]);
    });
}

void Simulation::check_finite() {
    for (const auto& e : edges_) {
        if (!e->finite_ok)
            throw SolverAbort("instability detected (NaN/Inf) on edge " + std::to_string(e->id) +
                              " at step " + std::to_string(steps_) + ", t = " +
                              std::to_string(time_));
        if (model_ == ModelKind::Kinetic)
            min_parity_ = std::min(min_parity_, e->step_min_parity);
    }
}

void Simulation::step(double dt) {
    refresh_density();
    chemo_node_pass(/*for_gradient=*/false);
    parallel_edges([&](int ei) {
        auto& e = *edges_[ei];
        chemo_step(e.chemo, e.rho, params_, dt, e.dx, e.chemo_gl, e.chemo_gr);
        e.finite_ok = true;
        for (double v : e.chemo.m) e.finite_ok = e.finite_ok && std::isfinite(v);
    });
    for (const auto& e : edges_)
        if (!e->finite_ok)
            throw SolverAbort("instability detected (NaN/Inf) in the chemoattractant on edge " +
                              std::to_string(e->id) + " at step " + std::to_string(steps_) +
                              ", t = " + std::to_string(time_));
    chemo_node_pass(/*for_gradient=*/true);
    parallel_edges([&](int ei) {
        auto& e = *edges_[ei];
        e.mbar = flux_limited_gradient(e.chemo.m, e.dx, e.m_gl, e.m_gr);
    });
    if (model_ == ModelKind::KellerSegel) {
        ks_node_pass();
        transport_edges(dt);
        relax_edges(dt);  // finite scan only
    } else {
        hyperbolic_node_pass();
        transport_edges(dt);
        relax_ghost_pass();
        relax_edges(dt);
    }
    time_ += dt;
    ++steps_;
    check_finite();
}

void Simulation::advance(double t_target) {
    const double tol = 1e-12 * std::max(1.0, std::abs(t_target));
    while (time_ < t_target - tol) {
        step(std::min(dt_, t_target - time_));
    }
    if (std::abs(time_ - t_target) <= tol) time_ = t_target;
}

double Simulation::total_mass() const {
    double mass = 0.0;
    std::vector<double> rho, q;
    for (int ei = 0; ei < net_.edge_count(); ++ei) {
        const auto& e = *edges_[ei];
        double edge_mass = 0.0;
        if (model_ == ModelKind::Kinetic) {
            rho.assign(e.nx, 0.0);
            q.assign(e.nx, 0.0);
            moments_kinetic(e.kin, vgrid_, rho, q);
            for (double v : rho) edge_mass += v;
        } else {
            const auto& r = (model_ == ModelKind::Cattaneo)  ? e.p1.rho
                            : (model_ == ModelKind::HalfMoment) ? e.hm.rho
                                                                : e.ks.rho;
            for (double v : r) edge_mass += v;
        }
        mass += edge_mass * e.dx;
    }
    return mass;
}

std::vector<double> Simulation::density(int edge) const {
    const auto& e = *edges_[edge];
    if (model_ == ModelKind::Kinetic) {
        std::vector<double> rho(e.nx), q(e.nx);
        moments_kinetic(e.kin, vgrid_, rho, q);
        return rho;
    }
    if (model_ == ModelKind::Cattaneo) return e.p1.rho;
    if (model_ == ModelKind::HalfMoment) return e.hm.rho;
    return e.ks.rho;
}

std::vector<double> Simulation::flow(int edge) const {
    const auto& e = *edges_[edge];
    if (model_ == ModelKind::Kinetic) {
        std::vector<double> rho(e.nx), q(e.nx);
        moments_kinetic(e.kin, vgrid_, rho, q);
        return q;
    }
    if (model_ == ModelKind::Cattaneo) return e.p1.q;
    if (model_ == ModelKind::HalfMoment) return e.hm.q;
    return {};
}

std::vector<double> Simulation::rho_hat(int edge) const {
    const auto& e = *edges_[edge];
    return model_ == ModelKind::HalfMoment ? e.hm.rho_hat : std::vector<double>{};
}

std::vector<double> Simulation::q_hat(int edge) const {
    const auto& e = *edges_[edge];
    return model_ == ModelKind::HalfMoment ? e.hm.q_hat : std::vector<double>{};
}

const std::vector<double>& Simulation::chemo(int edge) const { return edges_[edge]->chemo.m; }

}  // namespace netkin
