#include "netkin/models.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace netkin {

std::string model_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::Kinetic: return "kinetic";
        case ModelKind::HalfMoment: return "halfmoment";
        case ModelKind::Cattaneo: return "cattaneo";
        case ModelKind::KellerSegel: return "ks";
    }
    return "?";
}

ModelKind model_from_name(const std::string& name) {
    if (name == "kinetic") return ModelKind::Kinetic;
    if (name == "halfmoment" || name == "half-moment" || name == "hm") return ModelKind::HalfMoment;
    if (name == "cattaneo" || name == "p1") return ModelKind::Cattaneo;
    if (name == "ks" || name == "keller-segel" || name == "kellersegel") return ModelKind::KellerSegel;
    throw std::invalid_argument("unknown model '" + name + "'");
}

void ModelParams::validate() const {
    if (!(lambda > 0.0)) throw std::invalid_argument("params: lambda must be > 0");
    if (!(alpha >= 0.0)) throw std::invalid_argument("params: alpha must be >= 0");
    if (!(D > 0.0)) throw std::invalid_argument("params: D must be > 0");
    if (!(gamma_rho >= 0.0)) throw std::invalid_argument("params: gamma_rho must be >= 0");
    if (!(gamma_m >= 0.0)) throw std::invalid_argument("params: gamma_m must be >= 0");
    if (!(epsilon > 0.0)) throw std::invalid_argument("params: epsilon must be > 0");
    if (epsilon * alpha > lambda)
        throw std::invalid_argument("params: epsilon must satisfy epsilon <= lambda/alpha");
    if (phi && !(*phi >= 0.0)) throw std::invalid_argument("params: phi must be >= 0");
}

double ModelParams::phi_for(ModelKind kind) const {
    const double l2 = lambda * lambda;
    double value = 0.0, cap = 0.0;
    switch (kind) {
        case ModelKind::Kinetic:
            value = alpha * alpha / l2;
            cap = 1.0 / (epsilon * epsilon);
            break;
        case ModelKind::Cattaneo:
            value = alpha * alpha / (3.0 * l2);
            cap = 1.0 / (3.0 * epsilon * epsilon);
            break;
        case ModelKind::HalfMoment:
            value = alpha * alpha / (6.0 * l2);
            cap = 1.0 / (6.0 * epsilon * epsilon);
            break;
        case ModelKind::KellerSegel:
            return 0.0;  // no relaxation speed in the parabolic model
    }
    if (phi) {
        if (*phi < 0.0 || *phi > cap)
            throw std::invalid_argument("params: phi outside the admissible range for " +
                                        model_name(kind));
        return *phi;
    }
    return value;
}

VelocityGrid::VelocityGrid(int n) : count(n) {
    if (n < 1) throw std::invalid_argument("velocity grid needs at least one cell");
    dv = 1.0 / n;
    v.resize(n);
    for (int k = 0; k < n; ++k) v[k] = (k + 0.5) * dv;
}

std::pair<double, double> even_odd(double f_plus, double f_minus, double eps) {
    return {0.5 * (f_plus + f_minus), (f_plus - f_minus) / (2.0 * eps)};
}

std::pair<double, double> even_odd_inverse(double r, double j, double eps) {
    return {r + eps * j, r - eps * j};
}

Mat kinetic_transport_matrix(double v, double phi) {
    Mat m(2, 2);
    m(0, 1) = v;
    m(1, 0) = phi * v;
    return m;
}

Mat p1_transport_matrix(double phi) {
    Mat m(2, 2);
    m(0, 1) = 1.0;
    m(1, 0) = phi;
    return m;
}

Mat halfmoment_transport_matrix(double phi) {
    // d_t (rho, q, rho_hat, q_hat) + M d_x (...) = 0 with fluxes
    // q, phi(-rho + 6 q_hat), phi q_hat, q - rho_hat/6.
    Mat m(4, 4);
    m(0, 1) = 1.0;
    m(1, 0) = -phi;
    m(1, 3) = 6.0 * phi;
    m(2, 3) = phi;
    m(3, 1) = 1.0;
    m(3, 2) = -1.0 / 6.0;
    return m;
}

void moments_kinetic(const KineticEdgeState& state, const VelocityGrid& vgrid,
                     std::span<double> rho, std::span<double> q) {
    const int nx = state.nx;
    if (vgrid.count != state.nv) throw std::invalid_argument("moments: velocity grid mismatch");
    std::fill(rho.begin(), rho.end(), 0.0);
    std::fill(q.begin(), q.end(), 0.0);
    for (int k = 0; k < state.nv; ++k) {
        const double* rk = state.r.data() + static_cast<std::size_t>(k) * nx;
        const double* jk = state.j.data() + static_cast<std::size_t>(k) * nx;
        const double vk = vgrid.v[k];
        for (int i = 0; i < nx; ++i) {
            rho[i] += rk[i];
            q[i] += vk * jk[i];
        }
    }
    const double w = 2.0 * vgrid.dv;
    for (int i = 0; i < nx; ++i) {
        rho[i] *= w;
        q[i] *= w;
    }
}

std::vector<double> flux_limited_gradient(std::span<const double> m, double dx,
                                          std::optional<double> left_ghost,
                                          std::optional<double> right_ghost) {
    const int n = static_cast<int>(m.size());
    if (n < 2) throw std::invalid_argument("flux_limited_gradient: need at least 2 cells");
    std::vector<double> out(n);
    auto limited = [](double g) { return g / std::sqrt(1.0 + g * g); };
    out[0] = limited(left_ghost ? (m[1] - *left_ghost) / (2.0 * dx) : (m[1] - m[0]) / dx);
    out[n - 1] =
        limited(right_ghost ? (*right_ghost - m[n - 2]) / (2.0 * dx) : (m[n - 1] - m[n - 2]) / dx);
    for (int i = 1; i < n - 1; ++i) out[i] = limited((m[i + 1] - m[i - 1]) / (2.0 * dx));
    return out;
}

namespace {

void check_nonnegative(std::span<const double> rho0) {
    for (double v : rho0)
        if (v < 0.0) throw std::invalid_argument("initial density must be nonnegative");
}

}  // namespace

KineticEdgeState kinetic_from_density(std::span<const double> rho0, const VelocityGrid& vgrid) {
    check_nonnegative(rho0);
    KineticEdgeState s(vgrid.count, static_cast<int>(rho0.size()));
    for (int k = 0; k < s.nv; ++k)
        for (int i = 0; i < s.nx; ++i) s.r_at(k, i) = 0.5 * rho0[i];
    return s;
}

P1EdgeState p1_from_density(std::span<const double> rho0) {
    check_nonnegative(rho0);
    P1EdgeState s(static_cast<int>(rho0.size()));
    std::copy(rho0.begin(), rho0.end(), s.rho.begin());
    return s;
}

HalfMomentEdgeState halfmoment_from_density(std::span<const double> rho0) {
    check_nonnegative(rho0);
    HalfMomentEdgeState s(static_cast<int>(rho0.size()));
    for (std::size_t i = 0; i < rho0.size(); ++i) {
        s.rho[i] = rho0[i];
        s.q_hat[i] = 0.5 * rho0[i];  // q_pm = ±rho0/4 for the isotropic start
    }
    return s;
}

KSEdgeState ks_from_density(std::span<const double> rho0) {
    check_nonnegative(rho0);
    KSEdgeState s(static_cast<int>(rho0.size()));
    std::copy(rho0.begin(), rho0.end(), s.rho.begin());
    return s;
}

void kinetic_transport(KineticEdgeState& state,
                       const std::vector<LinearHyperbolicSystem>& per_velocity_sys,
                       double dt, double dx, const KineticGhosts& ghosts) {
    const int nx = state.nx;
    if (static_cast<int>(per_velocity_sys.size()) != state.nv)
        throw std::invalid_argument("kinetic_transport: system count mismatch");
    thread_local std::vector<double> packed;
    packed.resize(static_cast<std::size_t>(2) * nx);
    for (int k = 0; k < state.nv; ++k) {
        double* rk = state.r.data() + static_cast<std::size_t>(k) * nx;
        double* jk = state.j.data() + static_cast<std::size_t>(k) * nx;
        for (int i = 0; i < nx; ++i) {
            packed[2 * i] = rk[i];
            packed[2 * i + 1] = jk[i];
        }
        const double gl[2] = {ghosts.left_r[k], ghosts.left_j[k]};
        const double gr[2] = {ghosts.right_r[k], ghosts.right_j[k]};
        upwind_step(packed, per_velocity_sys[k], dt, dx, gl, gr);
        for (int i = 0; i < nx; ++i) {
            rk[i] = packed[2 * i];
            jk[i] = packed[2 * i + 1];
        }
    }
}

void kinetic_relax(KineticEdgeState& state, std::span<const double> mbar,
                   const ModelParams& params, const VelocityGrid& vgrid, double dt, double dx,
                   std::span<const double> left_ghost_r, std::span<const double> right_ghost_r) {
    const int nx = state.nx;
    const int nv = state.nv;
    const double eps2 = params.epsilon * params.epsilon;
    const double a = dt / eps2;
    const double beta = a * params.lambda;
    const double inv1pb = 1.0 / (1.0 + beta);
    const double phi = params.phi_for(ModelKind::Kinetic);
    const double rem = 1.0 - eps2 * phi;

    thread_local std::vector<double> rho;
    rho.assign(nx, 0.0);
    for (int k = 0; k < nv; ++k) {
        const double* rk = state.r.data() + static_cast<std::size_t>(k) * nx;
        for (int i = 0; i < nx; ++i) rho[i] += rk[i];
    }
    const double w = 2.0 * vgrid.dv;
    for (int i = 0; i < nx; ++i) rho[i] *= w;

    // r relaxes toward rho/2 cell-wise; written in deviation form so the
    // velocity average (the cell mass) is preserved to rounding.
    for (int k = 0; k < nv; ++k) {
        double* rk = state.r.data() + static_cast<std::size_t>(k) * nx;
        for (int i = 0; i < nx; ++i) {
            const double eq = 0.5 * rho[i];
            rk[i] = eq + (rk[i] - eq) * inv1pb;
        }
    }

    // Post-update ghost r per velocity: the same scalar update applied to the
    // ghost values with the ghost's own velocity average.
    const bool has_l = !left_ghost_r.empty();
    const bool has_r = !right_ghost_r.empty();
    thread_local std::vector<double> gl_new, gr_new;
    gl_new.assign(nv, 0.0);
    gr_new.assign(nv, 0.0);
    if (has_l) {
        double rho_g = 0.0;
        for (int k = 0; k < nv; ++k) rho_g += left_ghost_r[k];
        rho_g *= w;
        for (int k = 0; k < nv; ++k) {
            const double eq = 0.5 * rho_g;
            gl_new[k] = eq + (left_ghost_r[k] - eq) * inv1pb;
        }
    }
    if (has_r) {
        double rho_g = 0.0;
        for (int k = 0; k < nv; ++k) rho_g += right_ghost_r[k];
        rho_g *= w;
        for (int k = 0; k < nv; ++k) {
            const double eq = 0.5 * rho_g;
            gr_new[k] = eq + (right_ghost_r[k] - eq) * inv1pb;
        }
    }

    const double inv2dx = 1.0 / (2.0 * dx);
    const double invdx = 1.0 / dx;
    for (int k = 0; k < nv; ++k) {
        const double vk = vgrid.v[k];
        const double* rk = state.r.data() + static_cast<std::size_t>(k) * nx;
        double* jk = state.j.data() + static_cast<std::size_t>(k) * nx;
        const double cs = 0.5 * params.alpha * vk;
        for (int i = 0; i < nx; ++i) {
            double dxr;
            if (i == 0)
                dxr = has_l ? (rk[1] - gl_new[k]) * inv2dx : (rk[1] - rk[0]) * invdx;
            else if (i == nx - 1)
                dxr = has_r ? (gr_new[k] - rk[nx - 2]) * inv2dx : (rk[nx - 1] - rk[nx - 2]) * invdx;
            else
                dxr = (rk[i + 1] - rk[i - 1]) * inv2dx;
            jk[i] = (jk[i] + a * (cs * mbar[i] * rho[i] - rem * vk * dxr)) * inv1pb;
        }
    }
}

void p1_transport(P1EdgeState& state, const LinearHyperbolicSystem& sys, double dt, double dx,
                  std::span<const double> left_ghost, std::span<const double> right_ghost) {
    const int nx = static_cast<int>(state.rho.size());
    thread_local std::vector<double> packed;
    packed.resize(static_cast<std::size_t>(2) * nx);
    for (int i = 0; i < nx; ++i) {
        packed[2 * i] = state.rho[i];
        packed[2 * i + 1] = state.q[i];
    }
    upwind_step(packed, sys, dt, dx, left_ghost, right_ghost);
    for (int i = 0; i < nx; ++i) {
        state.rho[i] = packed[2 * i];
        state.q[i] = packed[2 * i + 1];
    }
}

void p1_relax(P1EdgeState& state, std::span<const double> mbar, const ModelParams& params,
              double dt, double dx, std::optional<double> left_ghost_rho,
              std::optional<double> right_ghost_rho) {
    const int nx = static_cast<int>(state.rho.size());
    const double eps2 = params.epsilon * params.epsilon;
    const double a = dt / eps2;
    const double inv1pb = 1.0 / (1.0 + a * params.lambda);
    const double phi = params.phi_for(ModelKind::Cattaneo);
    const double rem = 1.0 / 3.0 - eps2 * phi;
    const double drift = params.alpha / 3.0;
    const double inv2dx = 1.0 / (2.0 * dx);
    const double invdx = 1.0 / dx;

    const auto& rho = state.rho;
    for (int i = 0; i < nx; ++i) {
        double dxr;
        if (i == 0)
            dxr = left_ghost_rho ? (rho[1] - *left_ghost_rho) * inv2dx : (rho[1] - rho[0]) * invdx;
        else if (i == nx - 1)
            dxr = right_ghost_rho ? (*right_ghost_rho - rho[nx - 2]) * inv2dx
                                  : (rho[nx - 1] - rho[nx - 2]) * invdx;
        else
            dxr = (rho[i + 1] - rho[i - 1]) * inv2dx;
        state.q[i] = (state.q[i] + a * (drift * mbar[i] * rho[i] - rem * dxr)) * inv1pb;
    }
}

void hm_transport(HalfMomentEdgeState& state, const LinearHyperbolicSystem& sys, double dt,
                  double dx, std::span<const double> left_ghost,
                  std::span<const double> right_ghost) {
    const int nx = static_cast<int>(state.rho.size());
    thread_local std::vector<double> packed;
    packed.resize(static_cast<std::size_t>(4) * nx);
    for (int i = 0; i < nx; ++i) {
        packed[4 * i + 0] = state.rho[i];
        packed[4 * i + 1] = state.q[i];
        packed[4 * i + 2] = state.rho_hat[i];
        packed[4 * i + 3] = state.q_hat[i];
    }
    upwind_step(packed, sys, dt, dx, left_ghost, right_ghost);
    for (int i = 0; i < nx; ++i) {
        state.rho[i] = packed[4 * i + 0];
        state.q[i] = packed[4 * i + 1];
        state.rho_hat[i] = packed[4 * i + 2];
        state.q_hat[i] = packed[4 * i + 3];
    }
}

void hm_relax(HalfMomentEdgeState& state, std::span<const double> mbar,
              const ModelParams& params, double dt, double dx, std::optional<HmRelaxGhost> left,
              std::optional<HmRelaxGhost> right) {
    const int nx = static_cast<int>(state.rho.size());
    const double eps2 = params.epsilon * params.epsilon;
    const double a = dt / eps2;
    const double inv1pa = 1.0 / (1.0 + a);
    const double inv1pb = 1.0 / (1.0 + a * params.lambda);
    const double phi = params.phi_for(ModelKind::HalfMoment);
    const double rem_qhat = 1.0 - eps2 * phi;        // multiplies d_x q_hat
    const double rem_q = 1.0 / 6.0 - eps2 * phi;     // multiplies d_x(-rho + 6 q_hat)
    const double inv2dx = 1.0 / (2.0 * dx);
    const double invdx = 1.0 / dx;

    // q_hat first: it relaxes toward rho/2 and feeds the other stencils.
    for (int i = 0; i < nx; ++i)
        state.q_hat[i] = (state.q_hat[i] + a * 0.5 * state.rho[i]) * inv1pa;
    double gl_qhat = 0.0, gl_mix = 0.0, gr_qhat = 0.0, gr_mix = 0.0;
    if (left) {
        gl_qhat = (left->q_hat + a * 0.5 * left->rho) * inv1pa;
        gl_mix = -left->rho + 6.0 * gl_qhat;
    }
    if (right) {
        gr_qhat = (right->q_hat + a * 0.5 * right->rho) * inv1pa;
        gr_mix = -right->rho + 6.0 * gr_qhat;
    }

    auto mix = [&](int i) { return -state.rho[i] + 6.0 * state.q_hat[i]; };
    for (int i = 0; i < nx; ++i) {
        double dx_qhat, dx_mix;
        if (i == 0) {
            dx_qhat = left ? (state.q_hat[1] - gl_qhat) * inv2dx
                           : (state.q_hat[1] - state.q_hat[0]) * invdx;
            dx_mix = left ? (mix(1) - gl_mix) * inv2dx : (mix(1) - mix(0)) * invdx;
        } else if (i == nx - 1) {
            dx_qhat = right ? (gr_qhat - state.q_hat[nx - 2]) * inv2dx
                            : (state.q_hat[nx - 1] - state.q_hat[nx - 2]) * invdx;
            dx_mix = right ? (gr_mix - mix(nx - 2)) * inv2dx : (mix(nx - 1) - mix(nx - 2)) * invdx;
        } else {
            dx_qhat = (state.q_hat[i + 1] - state.q_hat[i - 1]) * inv2dx;
            dx_mix = (mix(i + 1) - mix(i - 1)) * inv2dx;
        }
        const double src = params.alpha * mbar[i] * state.rho[i];
        state.rho_hat[i] = (state.rho_hat[i] + a * (0.5 * src - rem_qhat * dx_qhat)) * inv1pb;
        state.q[i] = (state.q[i] + a * (src / 3.0 - rem_q * dx_mix)) * inv1pb;
    }
}

void keller_segel_step(KSEdgeState& state, std::span<const double> mbar,
                       const ModelParams& params, double dt, double dx, double left_face_flux,
                       double right_face_flux) {
    const int nx = static_cast<int>(state.rho.size());
    const double diff = 1.0 / (3.0 * params.lambda);
    const double drift = params.alpha / (3.0 * params.lambda);
    if (dt > dx * dx / (2.0 * diff) * (1.0 + 1e-12))
        throw std::runtime_error("keller_segel_step: diffusive stability violation");
    if (drift > 0.0 && dt * drift / dx > 1.0 + 1e-12)
        throw std::runtime_error("keller_segel_step: drift stability violation");

    thread_local std::vector<double> flux;
    flux.assign(nx + 1, 0.0);
    flux[0] = left_face_flux;
    flux[nx] = right_face_flux;
    for (int f = 1; f < nx; ++f) {
        const double grad = (state.rho[f] - state.rho[f - 1]) / dx;
        const double rho_face = 0.5 * (state.rho[f] + state.rho[f - 1]);
        const double mbar_face = 0.5 * (mbar[f] + mbar[f - 1]);
        flux[f] = diff * grad - drift * mbar_face * rho_face;
    }
    const double nu = dt / dx;
    for (int i = 0; i < nx; ++i) state.rho[i] += nu * (flux[i + 1] - flux[i]);
}

void chemo_step(ChemoEdgeState& state, std::span<const double> rho, const ModelParams& params,
                double dt, double dx, double left_ghost_m, double right_ghost_m) {
    const int nx = static_cast<int>(state.m.size());
    if (dt > dx * dx / (2.0 * params.D) * (1.0 + 1e-12))
        throw std::runtime_error("chemo_step: stability violation");
    thread_local std::vector<double> out;
    out.resize(nx);
    const double c = params.D / (dx * dx);
    for (int i = 0; i < nx; ++i) {
        const double ml = (i == 0) ? left_ghost_m : state.m[i - 1];
        const double mr = (i == nx - 1) ? right_ghost_m : state.m[i + 1];
        out[i] = state.m[i] + dt * (c * (mr - 2.0 * state.m[i] + ml) + params.gamma_rho * rho[i] -
                                    params.gamma_m * state.m[i]);
    }
    state.m.swap(out);
}

}  // namespace netkin
