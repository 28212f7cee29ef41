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

#include "pigates/dyson.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pigates {

namespace {

constexpr Complex kImag(0.0, 1.0);
constexpr double kSampledPhaseBudget = 0.05;  // max phase per step of the fastest frame line
constexpr int kCellCacheLimit = 256;

double frame_bandwidth(const SystemModel& model) {
    double bw = 0.0;
    for (const auto& frame : model.frame_terms()) {
        for (int k = 0; k < frame.segments(); ++k) {
            Eigen::SelfAdjointEigenSolver<CMatrix> es(frame.segment_value(k),
                                                      Eigen::EigenvaluesOnly);
            bw = std::max(bw, es.eigenvalues().maxCoeff() - es.eigenvalues().minCoeff());
        }
    }
    return bw;
}

bool decay_part_constant(const SystemModel& model) {
    if (!model.has_frames()) return true;
    for (const auto& jump : model.jumps()) {
        if (jump.rate > 0 && !jump.pi_compatible) return false;
    }
    return true;
}

CMatrix constant_decay_term(const SystemModel& model) {
    const int dim = model.joint_dim();
    CMatrix decay = CMatrix::Zero(dim, dim);
    for (const auto& jump : model.jumps()) {
        if (jump.rate <= 0) continue;
        decay += jump.rate * (jump.op.adjoint() * jump.op);
    }
    return decay;
}

}  // namespace

// ---------------------------------------------------------------------------
// Propagator

Propagator::Propagator(const SystemModel& model) : model_(&model) {
    const double duration = model.duration();
    const bool decay_const = decay_part_constant(model);
    const auto& control = model.control();

    double step = 0.0;
    if (control.is_sampled()) step = control.sample_step();
    if (!decay_const) {
        const double bw = frame_bandwidth(model);
        if (bw > 0) {
            const double h = kSampledPhaseBudget / bw;
            step = (step > 0) ? std::min(step, h) : h;
        }
    }

    if (step > 0) {
        // Midpoint-sampled generator on a uniform grid; evaluated lazily.
        exact_ = false;
        cached_ = false;
        lazy_cells_ = std::max(1, static_cast<int>(std::ceil(duration / step - 1e-9)));
        step_ = duration / lazy_cells_;
        return;
    }

    exact_ = true;
    const CMatrix decay = constant_decay_term(model);
    const int segments = control.segments();
    cached_ = segments <= kCellCacheLimit;
    if (!cached_) {
        // Uncached explicit schedules fall back to per-query products.
        lazy_cells_ = segments;
        step_ = 0;
        return;
    }

    cells_.resize(segments);
    edges_.resize(segments + 1);
    const int dim = model.joint_dim();
    CMatrix prefix = CMatrix::Identity(dim, dim);
    CMatrix prefix_inv = CMatrix::Identity(dim, dim);
    for (int k = 0; k < segments; ++k) {
        Cell& cell = cells_[k];
        cell.t0 = control.segment_begin(k);
        cell.t1 = control.segment_end(k);
        edges_[k] = cell.t0;
        const CMatrix h_eff = control.segment_value(k) - 0.5 * kImag * decay;
        cell.gen = -kImag * h_eff;

        Eigen::ComplexEigenSolver<CMatrix> es(cell.gen);
        if (es.info() == Eigen::Success) {
            const CMatrix v = es.eigenvectors();
            Eigen::FullPivLU<CMatrix> lu(v);
            if (lu.isInvertible()) {
                cell.basis = v;
                cell.basis_inv = lu.inverse();
                cell.evals = es.eigenvalues();
                // Accept the diagonalized step only if it reproduces the Pade
                // exponential over the full cell to near machine precision;
                // otherwise every step falls back to the Pade form.
                cell.eig_valid = true;
                const double width = cell.t1 - cell.t0;
                const CMatrix fast = cell_step(cell, width);
                const CMatrix reference = matrix_exponential(cell.gen * width);
                if ((fast - reference).cwiseAbs().maxCoeff() >
                    1e-13 * (1.0 + reference.cwiseAbs().maxCoeff())) {
                    cell.eig_valid = false;
                }
            }
        }
        cell.prefix = prefix;
        cell.prefix_inv = prefix_inv;
        const CMatrix full = cell_step(cell, cell.t1 - cell.t0);
        prefix = full * prefix;
        prefix_inv = prefix_inv * cell_step(cell, -(cell.t1 - cell.t0));
    }
    edges_[segments] = duration;
}

CMatrix Propagator::cell_step(const Cell& cell, double dt) const {
    if (dt == 0.0) return CMatrix::Identity(cell.gen.rows(), cell.gen.cols());
    if (cell.eig_valid) {
        return cell.basis * (cell.evals * dt).array().exp().matrix().asDiagonal() *
               cell.basis_inv;
    }
    return matrix_exponential(cell.gen * dt);
}

int Propagator::cell_index(double t) const {
    if (cached_) {
        auto it = std::upper_bound(edges_.begin(), edges_.end(), t);
        int k = static_cast<int>(it - edges_.begin()) - 1;
        return std::clamp(k, 0, static_cast<int>(cells_.size()) - 1);
    }
    int k = static_cast<int>(std::floor(t / step_));
    return std::clamp(k, 0, lazy_cells_ - 1);
}

CMatrix Propagator::effective_hamiltonian(double t) const {
    return pigates::effective_hamiltonian(*model_, t);
}

CMatrix Propagator::between(double t1, double t2) const {
    const double eps = 1e-12 * std::max(1.0, model_->duration());
    if (t1 > t2 + eps) throw std::invalid_argument("Propagator::between: t1 > t2");
    t1 = std::clamp(t1, 0.0, model_->duration());
    t2 = std::clamp(t2, 0.0, model_->duration());
    const int dim = model_->joint_dim();
    if (t2 - t1 <= 0) return CMatrix::Identity(dim, dim);

    if (cached_) {
        const int k1 = cell_index(t1);
        const int k2 = cell_index(t2);
        if (k1 == k2) return cell_step(cells_[k1], t2 - t1);
        const CMatrix head = cell_step(cells_[k2], t2 - cells_[k2].t0) * cells_[k2].prefix;
        const CMatrix tail = cells_[k1].prefix_inv * cell_step(cells_[k1], cells_[k1].t0 - t1);
        return head * tail;
    }

    // Lazy path: ordered product of per-cell exponentials across the span.
    CMatrix acc = CMatrix::Identity(dim, dim);
    int k = cell_index(t1);
    double cursor = t1;
    while (cursor < t2 - eps) {
        double c0, c1;
        CMatrix gen;
        if (step_ > 0) {
            c0 = k * step_;
            c1 = std::min(model_->duration(), (k + 1) * step_);
            const double mid = 0.5 * (c0 + c1);
            gen = -kImag * pigates::effective_hamiltonian(*model_, mid);
        } else {
            const auto& control = model_->control();
            c0 = control.segment_begin(k);
            c1 = control.segment_end(k);
            const double mid = 0.5 * (c0 + c1);
            gen = -kImag * pigates::effective_hamiltonian(*model_, mid);
        }
        const double upto = std::min(t2, c1);
        acc = matrix_exponential(gen * (upto - cursor)) * acc;
        cursor = upto;
        ++k;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Free functions

CMatrix effective_hamiltonian(const SystemModel& model, double t) {
    CMatrix h_eff = model.hamiltonian(t);
    for (size_t j = 0; j < model.jumps().size(); ++j) {
        const auto& jump = model.jumps()[j];
        if (jump.rate <= 0) continue;
        if (jump.pi_compatible || !model.has_frames()) {
            h_eff -= 0.5 * kImag * jump.rate * (jump.op.adjoint() * jump.op);
        } else {
            const CMatrix kt = model.jump_in_frame(static_cast<int>(j), t);
            h_eff -= 0.5 * kImag * jump.rate * (kt.adjoint() * kt);
        }
    }
    return h_eff;
}

CMatrix no_jump_propagator(const SystemModel& model, double t1, double t2) {
    if (t1 > t2) throw std::invalid_argument("no_jump_propagator: t1 > t2");
    return Propagator(model).between(t1, t2);
}

CMatrix liouvillian(const SystemModel& model, double t) {
    const int dim = model.joint_dim();
    const CMatrix h_eff = effective_hamiltonian(model, t);
    const CMatrix eye = CMatrix::Identity(dim, dim);
    CMatrix l = -kImag * kronecker(eye, h_eff) + kImag * kronecker(h_eff.conjugate(), eye);
    for (size_t j = 0; j < model.jumps().size(); ++j) {
        const auto& jump = model.jumps()[j];
        if (jump.rate <= 0) continue;
        const CMatrix kt = model.jump_in_frame(static_cast<int>(j), t);
        l += jump.rate * kronecker(kt.conjugate(), kt);
    }
    return l;
}

int default_quad_points(int order) {
    if (order <= 2) return 24;
    if (order == 3) return 12;
    return 8;
}

// ---------------------------------------------------------------------------
// Simplex quadrature walk

namespace {

using TrajectorySink = std::function<void(double, const CMatrix&)>;

// Runs the nested Gauss-Legendre quadrature of W S W ... S W over the ordered
// simplex 0 <= t_1 <= ... <= t_p <= t and feeds each trajectory operator
// W(t,t_p) K_{kp}(t_p) ... K_{k1}(t_1) W(t_1,0), with its quadrature weight
// times the product of jump rates, to the sink. Summation order is fixed.
void dyson_walk(const SystemModel& model, const Propagator& prop, int order, double t,
                int quad_points, const TrajectorySink& sink) {
    if (order == 0) {
        sink(1.0, prop.between(0.0, t));
        return;
    }
    std::vector<int> active;
    for (size_t j = 0; j < model.jumps().size(); ++j) {
        if (model.jumps()[j].rate > 0) active.push_back(static_cast<int>(j));
    }
    if (active.empty()) return;

    std::vector<double> nodes, weights;
    gauss_legendre(quad_points, nodes, weights);

    std::vector<double> times(order, 0.0);
    std::vector<CMatrix> spans(order + 1);
    std::vector<std::vector<CMatrix>> kt(order);  // [slot][active jump]

    auto leaf = [&](double factor) {
        spans[0] = prop.between(0.0, times[0]);
        for (int q = 1; q < order; ++q) spans[q] = prop.between(times[q - 1], times[q]);
        spans[order] = prop.between(times[order - 1], t);
        for (int q = 0; q < order; ++q) {
            kt[q].resize(active.size());
            for (size_t a = 0; a < active.size(); ++a) {
                kt[q][a] = model.jump_in_frame(active[a], times[q]);
            }
        }
        // Branch over jump assignments, reusing partial products.
        std::function<void(int, double, const CMatrix&)> branch =
            [&](int q, double rates, const CMatrix& acc) {
                if (q == order) {
                    sink(factor * rates, acc);
                    return;
                }
                for (size_t a = 0; a < active.size(); ++a) {
                    const CMatrix next = spans[q + 1] * (kt[q][a] * acc);
                    branch(q + 1, rates * model.jumps()[active[a]].rate, next);
                }
            };
        branch(0, 1.0, spans[0]);
    };

    // t_j = u_j * t_{j+1} transforms the simplex to the unit cube with
    // measure factor prod_j t_{j+1}.
    std::function<void(int, double, double)> descend = [&](int level, double upper,
                                                           double factor) {
        for (int i = 0; i < quad_points; ++i) {
            const double tj = upper * nodes[i];
            const double f = factor * weights[i] * upper;
            times[level - 1] = tj;
            if (level == 1) {
                leaf(f);
            } else {
                descend(level - 1, tj, f);
            }
        }
    };
    descend(order, t, 1.0);
}

// Accumulates sum_k w_k v_k v_k^dag with panel-blocked rank updates.
class ChoiAccumulator {
public:
    explicit ChoiAccumulator(Eigen::Index dim, int panel = 32)
        : panel_(CMatrix::Zero(dim, panel)), acc_(CMatrix::Zero(dim, dim)) {}

    void add(double weight, const CVector& v) {
        panel_.col(count_++) = std::sqrt(weight) * v;
        if (count_ == panel_.cols()) flush();
    }

    CMatrix take() {
        flush();
        CMatrix out = 0.5 * (acc_ + acc_.adjoint());
        acc_.setZero();
        return out;
    }

private:
    void flush() {
        if (count_ == 0) return;
        acc_.noalias() += panel_.leftCols(count_) * panel_.leftCols(count_).adjoint();
        count_ = 0;
    }

    CMatrix panel_;
    CMatrix acc_;
    int count_ = 0;
};

}  // namespace

DysonTerm dyson_term(const SystemModel& model, int order, double t, int quad_points) {
    if (order < 0) throw std::invalid_argument("dyson_term: negative order");
    if (quad_points <= 0) quad_points = default_quad_points(order);
    if (order > 0 && quad_points < 2) {
        throw std::invalid_argument("dyson_term: need at least 2 quadrature points");
    }
    const int dim = model.joint_dim();
    Propagator prop(model);
    ChoiAccumulator acc(dim * dim);
    dyson_walk(model, prop, order, t, quad_points,
               [&](double w, const CMatrix& a) { acc.add(w, vectorize(a)); });
    DysonTerm term;
    term.order = order;
    term.quad_points = quad_points;
    term.superoperator = reshuffle(acc.take(), dim);
    return term;
}

std::vector<std::vector<CMatrix>> apply_dyson_terms(const SystemModel& model, int max_order,
                                                    double t,
                                                    const std::vector<CMatrix>& inputs,
                                                    int quad_points) {
    Propagator prop(model);
    std::vector<std::vector<CMatrix>> out(max_order + 1);
    for (int p = 0; p <= max_order; ++p) {
        const int nodes = quad_points > 0 ? quad_points : default_quad_points(p);
        std::vector<CMatrix> acc(inputs.size(),
                                 CMatrix::Zero(model.joint_dim(), model.joint_dim()));
        dyson_walk(model, prop, p, t, nodes, [&](double w, const CMatrix& a) {
            for (size_t j = 0; j < inputs.size(); ++j) {
                acc[j].noalias() += w * (a * inputs[j] * a.adjoint());
            }
        });
        out[p] = std::move(acc);
    }
    return out;
}

CMatrix path_operator_matrices(const SystemModel& model, int initial,
                               const std::vector<std::pair<CMatrix, double>>& insertions,
                               int final_level, double t) {
    const int n = model.central_dim();
    const int dim = model.joint_dim();
    double prev = 0.0;
    for (const auto& [op, when] : insertions) {
        if (when < prev || when > t) {
            throw std::invalid_argument("path_operator: insertion times must be ordered in [0, t]");
        }
        if (op.rows() != dim || op.cols() != dim) {
            throw std::invalid_argument("path_operator: insertion dimension mismatch");
        }
        prev = when;
    }
    Propagator prop(model);
    double cursor = 0.0;
    CMatrix acc = CMatrix::Identity(dim, dim);
    for (const auto& [op, when] : insertions) {
        acc = prop.between(cursor, when) * acc;
        acc = op * acc;
        cursor = when;
    }
    acc = prop.between(cursor, t) * acc;
    return acc.block(final_level * n, initial * n, n, n);
}

CMatrix path_operator(const SystemModel& model, int initial,
                      const std::vector<std::pair<int, double>>& jumps_at_times, int final_level,
                      double t) {
    std::vector<std::pair<CMatrix, double>> insertions;
    insertions.reserve(jumps_at_times.size());
    for (const auto& [jump_index, when] : jumps_at_times) {
        insertions.emplace_back(model.jump_in_frame(jump_index, when), when);
    }
    return path_operator_matrices(model, initial, insertions, final_level, t);
}

// ---------------------------------------------------------------------------
// Conditional channels

PairChannelTable conditional_channel_table(const SystemModel& model,
                                           const std::vector<std::pair<int, int>>& pairs,
                                           double t, int max_order, int quad_points,
                                           bool check_convergence) {
    const int n = model.central_dim();
    for (auto [i, r] : pairs) {
        if (i < 0 || i >= model.ancilla_dim() || r < 0 || r >= model.ancilla_dim()) {
            throw std::invalid_argument("conditional_channel: ancilla index out of range");
        }
    }
    Propagator prop(model);

    auto run_order = [&](int p, int nodes) {
        std::vector<ChoiAccumulator> acc(pairs.size(), ChoiAccumulator(n * n));
        dyson_walk(model, prop, p, t, nodes, [&](double w, const CMatrix& a) {
            for (size_t q = 0; q < pairs.size(); ++q) {
                const auto [i, r] = pairs[q];
                acc[q].add(w, vectorize(a.block(r * n, i * n, n, n)));
            }
        });
        std::map<std::pair<int, int>, CMatrix> by_pair;
        for (size_t q = 0; q < pairs.size(); ++q) by_pair[pairs[q]] = acc[q].take();
        return by_pair;
    };

    PairChannelTable table;
    table.max_order = max_order;
    table.choi_by_order.resize(max_order + 1);
    for (int p = 0; p <= max_order; ++p) {
        const int nodes = quad_points > 0 ? quad_points : default_quad_points(p);
        table.choi_by_order[p] = run_order(p, nodes);
        if (check_convergence && p >= 1) {
            const auto doubled = run_order(p, 2 * nodes);
            for (const auto& [key, choi] : table.choi_by_order[p]) {
                const double delta = (choi - doubled.at(key)).norm();
                table.convergence_delta = std::max(table.convergence_delta, delta);
            }
        }
    }
    table.converged = table.convergence_delta <= 1e-7;
    return table;
}

CMatrix PairChannelTable::cumulative(int i, int r, int k) const {
    CMatrix acc;
    for (int p = 0; p <= k && p < static_cast<int>(choi_by_order.size()); ++p) {
        const auto it = choi_by_order[p].find({i, r});
        if (it == choi_by_order[p].end()) continue;
        if (acc.size() == 0) {
            acc = it->second;
        } else {
            acc += it->second;
        }
    }
    return acc;
}

ConditionalChannel conditional_channel(const SystemModel& model, int initial, int final_level,
                                       double t, int max_order, int quad_points,
                                       bool check_convergence) {
    const auto table = conditional_channel_table(model, {{initial, final_level}}, t, max_order,
                                                 quad_points, check_convergence);
    ConditionalChannel ch;
    ch.initial = initial;
    ch.final_level = final_level;
    ch.max_order = max_order;
    ch.choi = table.cumulative(initial, final_level, max_order);
    ch.success_weight = ch.choi.real().trace() / model.central_dim();
    ch.converged = table.converged;
    ch.convergence_delta = table.convergence_delta;
    return ch;
}

ChannelUnitarity channel_unitarity(const CMatrix& choi, Eigen::Index dim) {
    if (choi.rows() != dim * dim || choi.cols() != dim * dim) {
        throw std::invalid_argument("channel_unitarity: Choi dimension mismatch");
    }
    ChannelUnitarity out;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (choi + choi.adjoint()));
    const auto& vals = es.eigenvalues();
    const Eigen::Index top = dim * dim - 1;
    out.total_weight = choi.real().trace();
    const double lead = vals[top];
    if (lead <= 0) {
        out.subdominant_ratio = 0;
        out.kraus_spread = 0;
        return out;
    }
    out.subdominant_ratio = std::max(0.0, vals[top - 1]) / lead;
    out.kraus = devectorize(es.eigenvectors().col(top), dim, dim);
    Eigen::JacobiSVD<CMatrix> svd(out.kraus);
    const auto& sv = svd.singularValues();
    out.kraus_spread = (sv(0) - sv(sv.size() - 1)) / sv(0);
    return out;
}

// ---------------------------------------------------------------------------
// Master equation

namespace {

struct CellOps {
    CMatrix h;
    std::vector<CMatrix> k;
    std::vector<CMatrix> kdk;
    std::vector<double> rate;
    double norm_estimate = 0;
};

CellOps make_cell_ops(const SystemModel& model, double t_mid) {
    CellOps ops;
    ops.h = model.hamiltonian(t_mid);
    ops.norm_estimate = 2.0 * ops.h.cwiseAbs().rowwise().sum().maxCoeff();
    for (size_t j = 0; j < model.jumps().size(); ++j) {
        const auto& jump = model.jumps()[j];
        if (jump.rate <= 0) continue;
        CMatrix kt = model.jump_dissipator_constant(static_cast<int>(j))
                         ? jump.op
                         : model.jump_in_frame(static_cast<int>(j), t_mid);
        ops.kdk.push_back(kt.adjoint() * kt);
        ops.rate.push_back(jump.rate);
        ops.norm_estimate += jump.rate * (kt.cwiseAbs().rowwise().sum().maxCoeff() *
                                              kt.cwiseAbs().colwise().sum().maxCoeff() +
                                          ops.kdk.back().cwiseAbs().rowwise().sum().maxCoeff());
        ops.k.push_back(std::move(kt));
    }
    return ops;
}

CMatrix lindblad_rhs(const CellOps& ops, const CMatrix& rho) {
    CMatrix out = -kImag * (ops.h * rho - rho * ops.h);
    for (size_t j = 0; j < ops.k.size(); ++j) {
        out.noalias() += ops.rate[j] * (ops.k[j] * rho * ops.k[j].adjoint());
        out.noalias() -= 0.5 * ops.rate[j] * (ops.kdk[j] * rho + rho * ops.kdk[j]);
    }
    return out;
}

// exp(L dt) acting on the batch, Taylor series with norm-based substepping.
void apply_exp_cell(const CellOps& ops, double dt, std::vector<CMatrix>& states) {
    const int substeps = std::max(1, static_cast<int>(std::ceil(ops.norm_estimate * dt / 0.5)));
    const double tau = dt / substeps;
    for (int s = 0; s < substeps; ++s) {
        for (auto& state : states) {
            CMatrix term = state;
            double ref = state.norm();
            for (int k = 1; k <= 40; ++k) {
                term = (tau / k) * lindblad_rhs(ops, term);
                state += term;
                if (term.norm() <= 1e-16 * std::max(1.0, ref)) break;
            }
        }
    }
}

struct StepPlan {
    std::vector<double> edges;  // cell boundaries, ascending, edges[0] = 0
    bool exact = false;         // true when the generator is constant per cell
};

StepPlan make_step_plan(const SystemModel& model, double t, double step_override) {
    const auto& control = model.control();
    bool all_const_jumps = true;
    for (size_t j = 0; j < model.jumps().size(); ++j) {
        if (model.jumps()[j].rate > 0 && !model.jump_dissipator_constant(static_cast<int>(j))) {
            all_const_jumps = false;
        }
    }

    double step = step_override;
    if (step <= 0) {
        if (control.is_sampled()) step = control.sample_step();
        if (!all_const_jumps) {
            const double bw = frame_bandwidth(model);
            if (bw > 0) {
                const double h = kSampledPhaseBudget / bw;
                step = (step > 0) ? std::min(step, h) : h;
            }
        }
    }

    StepPlan plan;
    plan.exact = step <= 0;
    plan.edges.push_back(0.0);
    if (plan.exact) {
        for (int k = 0; k < control.segments() && plan.edges.back() < t - 1e-12; ++k) {
            const double edge = std::min(t, control.segment_end(k));
            if (edge > plan.edges.back()) plan.edges.push_back(edge);
        }
    } else {
        const int cells = std::max(1, static_cast<int>(std::ceil(t / step - 1e-9)));
        for (int k = 1; k <= cells; ++k) plan.edges.push_back(t * k / cells);
    }
    return plan;
}

void run_master(const SystemModel& model, const StepPlan& plan, std::vector<CMatrix>& states) {
    for (size_t k = 0; k + 1 < plan.edges.size(); ++k) {
        const double t0 = plan.edges[k];
        const double t1 = plan.edges[k + 1];
        const CellOps ops = make_cell_ops(model, 0.5 * (t0 + t1));
        apply_exp_cell(ops, t1 - t0, states);
    }
}

}  // namespace

std::vector<CMatrix> propagate_master(const SystemModel& model, std::vector<CMatrix> inputs,
                                      double t, const MasterOptions& options,
                                      MasterResult* result) {
    if (t < 0 || t > model.duration() + 1e-9) {
        throw std::invalid_argument("propagate_master: t outside the schedule");
    }
    const StepPlan plan = make_step_plan(model, t, options.step);
    if (result) {
        result->converged = true;
        result->halving_delta = 0;
    }

    if (!options.halving_check || plan.exact) {
        run_master(model, plan, inputs);
        return inputs;
    }

    std::vector<CMatrix> coarse = inputs;
    run_master(model, plan, coarse);
    const double base_step = plan.edges.size() > 1 ? plan.edges[1] - plan.edges[0] : t;
    MasterOptions fine_opts = options;
    fine_opts.step = base_step / 2;
    fine_opts.halving_check = false;
    const StepPlan fine_plan = make_step_plan(model, t, fine_opts.step);
    run_master(model, fine_plan, inputs);

    double delta = 0;
    for (size_t j = 0; j < inputs.size(); ++j) {
        delta = std::max(delta, (inputs[j] - coarse[j]).norm());
    }
    if (result) {
        result->halving_delta = delta;
        result->converged = delta <= options.halving_tol;
    }
    return inputs;
}

CMatrix evolve_master(const SystemModel& model, const CMatrix& rho0, double t,
                      const MasterOptions& options, MasterResult* result) {
    const int dim = model.joint_dim();
    if (rho0.rows() != dim || rho0.cols() != dim) {
        throw std::invalid_argument("evolve_master: state dimension mismatch");
    }
    if (std::abs(rho0.trace().real() - 1.0) > 1e-8 || std::abs(rho0.trace().imag()) > 1e-8) {
        throw std::invalid_argument("evolve_master: state must have unit trace");
    }
    if (!is_hermitian(rho0, 1e-8)) {
        throw std::invalid_argument("evolve_master: state must be Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(rho0, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10) {
        throw std::invalid_argument("evolve_master: state must be positive semidefinite");
    }
    std::vector<CMatrix> states{rho0};
    states = propagate_master(model, std::move(states), t, options, result);
    return states[0];
}

}  // namespace pigates
