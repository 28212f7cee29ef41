// Copyright 2026 The pigates Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pigates/snap.hpp"

#include <cmath>
#include <stdexcept>

namespace pigates {

namespace {

constexpr Complex kImag(0.0, 1.0);
constexpr double kStepPhaseBudget = 0.05;

CVector dephasing_weights(const SnapConfig& cfg) {
    CVector w = CVector::Zero(cfg.levels);
    if (cfg.dephasing == DephasingConvention::ground_projector) {
        w[0] = 1.0;
        return w;
    }
    if (cfg.levels == 2) {
        w[0] = 1.0;
        w[1] = -1.0;
    } else {
        w[0] = 1.0;
        w[1] = 0.0;
        w[2] = -1.0;
    }
    return w;
}

CMatrix number_operator(int fock_dim) {
    CMatrix n = CMatrix::Zero(fock_dim, fock_dim);
    for (int k = 0; k < fock_dim; ++k) n(k, k) = k;
    return n;
}

void validate_config(const SnapConfig& cfg) {
    if (cfg.levels != 2 && cfg.levels != 3) {
        throw std::invalid_argument("snap scenario: levels must be 2 or 3");
    }
    if (cfg.omega < 0) throw std::invalid_argument("snap scenario: omega must be nonnegative");
    if (cfg.omega == 0 && cfg.duration <= 0) {
        throw std::invalid_argument("snap scenario: zero drive needs an explicit duration");
    }
    if (cfg.fock_dim < 1) throw std::invalid_argument("snap scenario: fock_dim must be >= 1");
    if (static_cast<int>(cfg.phases.size()) > cfg.fock_dim) {
        throw std::invalid_argument("snap scenario: more phases than Fock levels");
    }
}

std::vector<JumpOperator> scenario_jumps(const SnapConfig& cfg) {
    std::vector<JumpOperator> jumps;
    if (cfg.t_phi > 0) {
        jumps.push_back(
            dephasing_jump(cfg.levels, cfg.fock_dim, dephasing_weights(cfg), 1.0 / cfg.t_phi));
    }
    if (cfg.levels == 2) {
        if (cfg.t1 > 0) jumps.push_back(relaxation_jump(2, cfg.fock_dim, 0, 1, 1.0 / cfg.t1));
    } else {
        if (cfg.t1 > 0) jumps.push_back(relaxation_jump(3, cfg.fock_dim, 1, 2, 1.0 / cfg.t1));
        if (cfg.t1_ge > 0) jumps.push_back(relaxation_jump(3, cfg.fock_dim, 0, 1, 1.0 / cfg.t1_ge));
    }
    return jumps;
}

std::vector<PiecewiseMatrix> scenario_frames(const SnapConfig& cfg, double duration) {
    const CMatrix dispersive = -cfg.chi * number_operator(cfg.fock_dim);
    std::vector<PiecewiseMatrix> frames;
    frames.push_back(
        PiecewiseMatrix::constant(CMatrix::Zero(cfg.fock_dim, cfg.fock_dim), 0.0, duration));
    for (int m = 1; m < cfg.levels; ++m) {
        frames.push_back(PiecewiseMatrix::constant(dispersive, 0.0, duration));
    }
    return frames;
}

CMatrix scenario_static_hamiltonian(const SnapConfig& cfg) {
    const int dim = cfg.levels * cfg.fock_dim;
    CMatrix h0 = CMatrix::Zero(dim, dim);
    const CMatrix dispersive = -cfg.chi * number_operator(cfg.fock_dim);
    for (int m = 1; m < cfg.levels; ++m) {
        h0.block(m * cfg.fock_dim, m * cfg.fock_dim, cfg.fock_dim, cfg.fock_dim) = dispersive;
    }
    return h0;
}

CMatrix ideal_pair_control(const SnapConfig& cfg, const CMatrix& pair_unitary) {
    const int n = cfg.fock_dim;
    const int x = cfg.upper_level();
    CMatrix h = CMatrix::Zero(cfg.levels * n, cfg.levels * n);
    h.block(0, x * n, n, n) = cfg.omega * pair_unitary;
    h.block(x * n, 0, n, n) = cfg.omega * pair_unitary.adjoint();
    h.block(x * n, x * n, n, n) = cfg.delta * CMatrix::Identity(n, n);
    return h;
}

}  // namespace

CMatrix snap_operator(const std::vector<double>& phases, int fock_dim) {
    if (static_cast<int>(phases.size()) > fock_dim) {
        throw std::invalid_argument("snap_operator: more phases than Fock levels");
    }
    CMatrix s = CMatrix::Identity(fock_dim, fock_dim);
    for (size_t k = 0; k < phases.size(); ++k) {
        s(k, k) = std::exp(kImag * phases[k]);
    }
    return s;
}

SystemModel build_dispersive_scenario(const SnapConfig& cfg, const CMatrix& pair_unitary) {
    validate_config(cfg);
    if (pair_unitary.rows() != cfg.fock_dim || !is_unitary(pair_unitary, kDefaultTol)) {
        throw std::invalid_argument("build_dispersive_scenario: pair operator must be unitary");
    }
    const double duration = cfg.gate_time();
    return build_model(cfg.levels, cfg.fock_dim, scenario_static_hamiltonian(cfg),
                       scenario_frames(cfg, duration),
                       ControlSchedule::constant(ideal_pair_control(cfg, pair_unitary), duration),
                       scenario_jumps(cfg));
}

SystemModel build_snap_scenario(const SnapConfig& cfg) {
    return build_dispersive_scenario(cfg, snap_operator(cfg.phases, cfg.fock_dim));
}

SystemModel build_snap_scenario_schrodinger(const SnapConfig& cfg) {
    validate_config(cfg);
    const double duration = cfg.gate_time();
    const int n = cfg.fock_dim;
    const int x = cfg.upper_level();
    const CMatrix h0 = scenario_static_hamiltonian(cfg);
    const std::vector<double> phases = cfg.phases;
    const SnapConfig local = cfg;

    auto sampler = [local, h0, n, x](double t) {
        CMatrix h = h0;
        for (int fock = 0; fock < n; ++fock) {
            const double phi = fock < static_cast<int>(local.phases.size())
                                   ? local.phases[fock]
                                   : 0.0;
            const Complex amp =
                local.omega * std::exp(kImag * (phi - fock * local.chi * t - local.delta * t));
            h(fock, x * n + fock) += amp;
            h(x * n + fock, fock) += std::conj(amp);
        }
        for (int fock = 0; fock < n; ++fock) {
            h(x * n + fock, x * n + fock) += local.delta;
        }
        return h;
    };
    const double max_freq = (n - 1) * cfg.chi + std::abs(cfg.delta);
    const double step = max_freq > 0 ? kStepPhaseBudget / max_freq : duration;
    return build_model(cfg.levels, n, h0, {},
                       ControlSchedule::sampled(sampler, duration, step, max_freq),
                       scenario_jumps(cfg));
}

ControlSchedule approximate_control(const SnapConfig& cfg) {
    validate_config(cfg);
    if (cfg.omega >= cfg.chi) {
        throw std::invalid_argument("approximate_control: requires omega < chi");
    }
    const double duration = cfg.gate_time();
    const int n = cfg.fock_dim;
    const int x = cfg.upper_level();
    const SnapConfig local = cfg;

    // All Fock tones of the transmon drive, written in the frame picture.
    auto sampler = [local, n, x](double t) {
        CMatrix h = CMatrix::Zero(local.levels * n, local.levels * n);
        Complex drive(0.0, 0.0);
        for (int m = 0; m < n; ++m) {
            const double phi = m < static_cast<int>(local.phases.size()) ? local.phases[m] : 0.0;
            drive += std::exp(kImag * (phi - m * local.chi * t));
        }
        drive *= local.omega * std::exp(-kImag * local.delta * t);
        for (int fock = 0; fock < n; ++fock) {
            const Complex amp = drive * std::exp(kImag * (fock * local.chi * t));
            h(fock, x * n + fock) = amp;
            h(x * n + fock, fock) = std::conj(amp);
        }
        return h;
    };
    const double max_freq = (n - 1) * cfg.chi + std::abs(cfg.delta);
    const double step = kStepPhaseBudget / max_freq;
    return ControlSchedule::sampled(sampler, duration, step, max_freq);
}

SystemModel build_approx_snap_scenario(const SnapConfig& cfg) {
    const double duration = cfg.gate_time();
    return build_model(cfg.levels, cfg.fock_dim, scenario_static_hamiltonian(cfg),
                       scenario_frames(cfg, duration), approximate_control(cfg),
                       scenario_jumps(cfg));
}

CMatrix pair_effective_hamiltonian(Complex omega0, Complex omegaz, Complex omegaxy,
                                   const CMatrix& u) {
    const int n = static_cast<int>(u.rows());
    const CMatrix eye = CMatrix::Identity(n, n);
    CMatrix h = CMatrix::Zero(2 * n, 2 * n);
    h.block(0, 0, n, n) = (omega0 - omegaz) * eye;
    h.block(n, n, n, n) = (omega0 + omegaz) * eye;
    h.block(0, n, n, n) = omegaxy * u;
    h.block(n, 0, n, n) = omegaxy * u.adjoint();
    return h;
}

CMatrix exact_pair_propagator(Complex omega0, Complex omegaz, Complex omegaxy, const CMatrix& u,
                              double dt) {
    if (u.rows() != u.cols() || !is_unitary(u, kDefaultTol)) {
        throw std::invalid_argument("exact_pair_propagator: U must be unitary");
    }
    const int n = static_cast<int>(u.rows());
    const Complex omega = std::sqrt(omegaz * omegaz + omegaxy * omegaxy);
    const Complex arg = kImag * omega * dt;

    const Complex cosh_term = std::cosh(arg);
    // sinh(i w dt)/w, with the series limit at w -> 0.
    Complex sinh_over_omega;
    if (std::abs(arg) < 1e-5) {
        const Complex u2 = arg * arg;
        sinh_over_omega = kImag * dt * (1.0 + u2 / 6.0 + u2 * u2 / 120.0);
    } else {
        sinh_over_omega = std::sinh(arg) / omega;
    }

    const Complex envelope = std::exp(-kImag * omega0 * dt);
    const Complex c_mm = envelope * (cosh_term + omegaz * sinh_over_omega);
    const Complex c_nn = envelope * (cosh_term - omegaz * sinh_over_omega);
    const Complex c_mn = -envelope * omegaxy * sinh_over_omega;

    const CMatrix eye = CMatrix::Identity(n, n);
    CMatrix w = CMatrix::Zero(2 * n, 2 * n);
    w.block(0, 0, n, n) = c_mm * eye;
    w.block(n, n, n, n) = c_nn * eye;
    w.block(0, n, n, n) = c_mn * u;
    w.block(n, 0, n, n) = c_mn * u.adjoint();
    return w;
}

LogicalCode make_code(const std::vector<CVector>& words) {
    if (words.empty()) throw std::invalid_argument("make_code: empty word list");
    const int n = static_cast<int>(words[0].size());
    LogicalCode code;
    code.basis = CMatrix::Zero(n, static_cast<int>(words.size()));
    for (size_t k = 0; k < words.size(); ++k) {
        if (words[k].size() != n) throw std::invalid_argument("make_code: word length mismatch");
        code.basis.col(static_cast<int>(k)) = words[k];
    }
    const CMatrix gram = code.basis.adjoint() * code.basis;
    if ((gram - CMatrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() > 1e-12) {
        throw std::invalid_argument("make_code: words must be orthonormal");
    }
    code.projector = code.basis * code.basis.adjoint();
    return code;
}

LogicalCode binomial_code(int fock_dim) {
    if (fock_dim < 9) {
        throw std::invalid_argument("binomial_code: need fock_dim >= 9 (support up to |4> plus headroom)");
    }
    CVector zero_l = CVector::Zero(fock_dim);
    zero_l[0] = 1.0 / std::sqrt(2.0);
    zero_l[4] = 1.0 / std::sqrt(2.0);
    CVector one_l = CVector::Zero(fock_dim);
    one_l[2] = 1.0;
    return make_code({zero_l, one_l});
}

// ---------------------------------------------------------------------------
// Gate metrics

namespace {

struct CodeChannel {
    CMatrix choi;        // K^2 x K^2 in the Gram convention
    double population = 0;
};

GateMetrics metrics_from_channel(const CodeChannel& ch, const CMatrix& target, int outcome,
                                 const char* route, bool converged) {
    const int k = static_cast<int>(target.rows());
    GateMetrics row;
    row.outcome = outcome;
    row.route = route;
    row.converged = converged;
    row.population = ch.population;
    const double total = ch.choi.real().trace();
    if (total <= 1e-14) {
        return row;
    }
    const CVector target_vec = vectorize(target);
    const double overlap = std::real((target_vec.adjoint() * ch.choi * target_vec)(0, 0));
    row.process_fidelity = overlap / (k * total);
    row.average_fidelity = (k * row.process_fidelity + 1.0) / (k + 1.0);
    row.weighted_infidelity = row.population * (1.0 - row.average_fidelity);
    return row;
}

void check_target(const CMatrix& target, int code_dim) {
    if (target.rows() != code_dim || target.cols() != code_dim ||
        !is_unitary(target, kDefaultTol)) {
        throw std::invalid_argument("gate_metrics: target must be unitary on the code");
    }
}

}  // namespace

std::vector<GateMetrics> gate_metrics(const SystemModel& model, const LogicalCode& code,
                                      const MetricsOptions& options, double t) {
    const int n = model.central_dim();
    const int k = code.dim();
    if (code.basis.rows() != n) throw std::invalid_argument("gate_metrics: code dimension mismatch");
    if (options.targets.empty()) throw std::invalid_argument("gate_metrics: no targets");
    for (const auto& [outcome, target] : options.targets) {
        if (outcome < 0 || outcome >= model.ancilla_dim()) {
            throw std::invalid_argument("gate_metrics: target outcome out of range");
        }
        check_target(target, k);
    }
    if (options.include_unconditioned) check_target(options.unconditioned_target, k);

    std::vector<GateMetrics> rows;
    const CMatrix& v = code.basis;

    for (MetricsRoute route : options.routes) {
        if (route == MetricsRoute::dyson) {
            std::vector<std::pair<int, int>> pairs;
            for (const auto& [outcome, target] : options.targets) {
                pairs.push_back({options.initial, outcome});
            }
            const auto table =
                conditional_channel_table(model, pairs, t, options.dyson_order,
                                          options.quad_points, options.convergence_check);
            const CMatrix restrict_map = kronecker(v.transpose(), v.adjoint());
            const CMatrix mixed_probe = kronecker(code.projector.conjugate(),
                                                  CMatrix::Identity(n, n));
            for (const auto& [outcome, target] : options.targets) {
                const CMatrix choi_full =
                    table.cumulative(options.initial, outcome, options.dyson_order);
                CodeChannel ch;
                ch.choi = restrict_map * choi_full * restrict_map.adjoint();
                ch.population = std::real((choi_full * mixed_probe).trace()) / k;
                rows.push_back(
                    metrics_from_channel(ch, target, outcome, "dyson", table.converged));
            }
            continue;
        }

        // Full Lindblad propagation of the code operator basis.
        std::vector<CMatrix> inputs;
        const int dim = model.joint_dim();
        for (int a = 0; a < k; ++a) {
            for (int b = 0; b < k; ++b) {
                CMatrix x = CMatrix::Zero(dim, dim);
                x.block(options.initial * n, options.initial * n, n, n) =
                    v.col(a) * v.col(b).adjoint();
                inputs.push_back(std::move(x));
            }
        }
        MasterOptions master;
        master.halving_check = options.convergence_check;
        MasterResult master_result;
        const auto outputs = propagate_master(model, std::move(inputs), t, master, &master_result);

        auto conditioned = [&](int outcome) {
            CodeChannel ch;
            ch.choi = CMatrix::Zero(k * k, k * k);
            for (int a = 0; a < k; ++a) {
                for (int b = 0; b < k; ++b) {
                    const CMatrix out_block =
                        outputs[a * k + b].block(outcome * n, outcome * n, n, n);
                    const CMatrix mapped = v.adjoint() * out_block * v;
                    for (int x = 0; x < k; ++x) {
                        for (int y = 0; y < k; ++y) {
                            ch.choi(x + k * a, y + k * b) = mapped(x, y);
                        }
                    }
                    if (a == b) {
                        ch.population += std::real(out_block.trace()) / k;
                    }
                }
            }
            return ch;
        };

        for (const auto& [outcome, target] : options.targets) {
            rows.push_back(metrics_from_channel(conditioned(outcome), target, outcome, "lindblad",
                                                master_result.converged));
        }
        if (options.include_unconditioned) {
            CodeChannel unc;
            unc.choi = CMatrix::Zero(k * k, k * k);
            for (int r = 0; r < model.ancilla_dim(); ++r) {
                const CodeChannel ch = conditioned(r);
                unc.choi += ch.choi;
                unc.population += ch.population;
            }
            rows.push_back(metrics_from_channel(unc, options.unconditioned_target, -1, "lindblad",
                                                master_result.converged));
        }
    }
    return rows;
}

std::map<int, CMatrix> snap_targets(const SnapConfig& cfg, const LogicalCode& code) {
    const CMatrix gate_full = snap_operator(cfg.phases, cfg.fock_dim).adjoint();  // S(-phases)
    const CMatrix on_code = code.basis.adjoint() * gate_full * code.basis;
    if (!is_unitary(on_code, kDefaultTol)) {
        throw std::invalid_argument("snap_targets: gate does not preserve the code subspace");
    }
    std::map<int, CMatrix> targets;
    targets[0] = CMatrix::Identity(code.dim(), code.dim());
    targets[cfg.upper_level()] = on_code;
    if (cfg.levels == 3) targets[1] = on_code;  // heralded decay within the matched pair
    return targets;
}

}  // namespace pigates
