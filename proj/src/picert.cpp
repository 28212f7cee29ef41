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

#include "pigates/picert.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

namespace pigates {

namespace {

constexpr double kPhaseEquivTol = 1e-8;
constexpr double kRankRatioTol = 1e-8;
constexpr double kVacuousWeight = 1e-10;

std::vector<double> merged_edges(const PiecewiseMatrix& a, const PiecewiseMatrix& b,
                                 double duration) {
    std::set<double> edges{0.0, duration};
    for (const auto* pw : {&a, &b}) {
        for (int k = 0; k < pw->segments(); ++k) {
            edges.insert(std::clamp(pw->segment_begin(k), 0.0, duration));
            edges.insert(std::clamp(pw->segment_end(k), 0.0, duration));
        }
    }
    return {edges.begin(), edges.end()};
}

CMatrix frame_value(const SystemModel& model, int level, double t) {
    const auto& frame = model.frame_terms()[level];
    const int n = model.central_dim();
    if (frame.empty()) return CMatrix::Zero(n, n);
    return frame.at(std::min(t, frame.end() - 1e-12));
}

}  // namespace

// ---------------------------------------------------------------------------
// Factorization

PropagatorDecomposition factorize_no_jump(const SystemModel& model, int grid_points) {
    if (grid_points < 2) throw std::invalid_argument("factorize_no_jump: need >= 2 divisions");
    const int d = model.ancilla_dim();
    const int n = model.central_dim();
    const double duration = model.duration();
    const double root_n = std::sqrt(static_cast<double>(n));
    Propagator prop(model);

    PropagatorDecomposition dec;
    for (int a = 0; a <= grid_points; ++a) {
        for (int b = a + 1; b <= grid_points; ++b) {
            dec.grid.emplace_back(duration * a / grid_points, duration * b / grid_points);
        }
    }

    std::vector<CMatrix> props;
    props.reserve(dec.grid.size());
    for (const auto& [t1, t2] : dec.grid) props.push_back(prop.between(t1, t2));

    // Reference unitary per block from the grid pair with the largest block
    // magnitude; coefficients are projections onto that reference.
    dec.edge_strength = Eigen::MatrixXd::Zero(d, d);
    dec.residuals = Eigen::MatrixXd::Zero(d, d);
    dec.unitary_table.assign(d, std::vector<CMatrix>(d));
    Eigen::MatrixXi best(d, d);
    best.setConstant(-1);
    for (size_t g = 0; g < props.size(); ++g) {
        for (int m = 0; m < d; ++m) {
            for (int p = 0; p < d; ++p) {
                const double scale = props[g].block(m * n, p * n, n, n).norm() / root_n;
                if (scale > dec.edge_strength(m, p)) {
                    dec.edge_strength(m, p) = scale;
                    best(m, p) = static_cast<int>(g);
                }
            }
        }
    }
    for (int m = 0; m < d; ++m) {
        for (int p = 0; p < d; ++p) {
            if (dec.edge_strength(m, p) <= kEdgeThreshold) continue;
            dec.unitary_table[m][p] =
                nearest_unitary(props[best(m, p)].block(m * n, p * n, n, n));
        }
    }

    dec.coefficients.assign(props.size(), CMatrix::Zero(d, d));
    dec.pi_form = true;
    for (size_t g = 0; g < props.size(); ++g) {
        for (int m = 0; m < d; ++m) {
            for (int p = 0; p < d; ++p) {
                if (!dec.defined(m, p)) continue;
                const CMatrix block = props[g].block(m * n, p * n, n, n);
                const Complex coeff =
                    (dec.unitary_table[m][p].adjoint() * block).trace() / static_cast<double>(n);
                dec.coefficients[g](m, p) = coeff;
                if (std::abs(coeff) <= kEdgeThreshold) continue;
                const double residual =
                    (block - coeff * dec.unitary_table[m][p]).norm() /
                    (root_n * std::abs(coeff));
                dec.residuals(m, p) = std::max(dec.residuals(m, p), residual);
                if (residual > kFactorizationTol && dec.pi_form) {
                    dec.pi_form = false;
                    std::ostringstream msg;
                    msg << "block (" << m << "," << p << ") on span [" << dec.grid[g].first
                        << "," << dec.grid[g].second << "] has unitary residual " << residual;
                    dec.failure = msg.str();
                }
            }
        }
    }

    // Coefficient composition across consecutive grid times, evaluated on the
    // factored blocks so the per-block phase gauge drops out.
    auto pair_index = [&](double t1, double t2) -> int {
        for (size_t g = 0; g < dec.grid.size(); ++g) {
            if (std::abs(dec.grid[g].first - t1) < 1e-12 &&
                std::abs(dec.grid[g].second - t2) < 1e-12) {
                return static_cast<int>(g);
            }
        }
        return -1;
    };
    for (int a = 0; a <= grid_points; ++a) {
        for (int b = a + 1; b <= grid_points; ++b) {
            for (int c = b + 1; c <= grid_points; ++c) {
                const double ta = duration * a / grid_points;
                const double tb = duration * b / grid_points;
                const double tc = duration * c / grid_points;
                const int g_ac = pair_index(ta, tc);
                const int g_ab = pair_index(ta, tb);
                const int g_bc = pair_index(tb, tc);
                for (int m = 0; m < d; ++m) {
                    for (int p = 0; p < d; ++p) {
                        if (!dec.defined(m, p)) continue;
                        CMatrix lhs = dec.coefficients[g_ac](m, p) * dec.unitary_table[m][p];
                        CMatrix rhs = CMatrix::Zero(n, n);
                        for (int e = 0; e < d; ++e) {
                            if (!dec.defined(m, e) || !dec.defined(e, p)) continue;
                            rhs += dec.coefficients[g_bc](m, e) * dec.coefficients[g_ab](e, p) *
                                   (dec.unitary_table[m][e] * dec.unitary_table[e][p]);
                        }
                        dec.composition_residual = std::max(
                            dec.composition_residual, (lhs - rhs).norm() / root_n);
                    }
                }
            }
        }
    }
    if (dec.composition_residual > kFactorizationTol && dec.pi_form) {
        dec.pi_form = false;
        dec.failure = "coefficient composition residual " +
                      std::to_string(dec.composition_residual);
    }
    return dec;
}

// ---------------------------------------------------------------------------
// Holonomy

HolonomyReport check_holonomy(const std::vector<std::vector<CMatrix>>& table, int d, double tol) {
    HolonomyReport report;
    report.pass = true;
    auto defined = [&](int m, int p) {
        return m != p && table[m][p].size() != 0;
    };
    // Simple cycles up to length d, anchored at their smallest level.
    std::vector<int> cycle;
    std::vector<bool> used(d, false);
    std::function<void(int)> extend = [&](int anchor) {
        const int cur = cycle.back();
        if (cycle.size() >= 2 && defined(anchor, cur)) {
            CMatrix prod = table[anchor][cycle[cycle.size() - 1]];
            for (size_t q = cycle.size() - 1; q >= 1; --q) {
                prod = prod * table[cycle[q]][cycle[q - 1]];
            }
            // prod currently multiplies edges anchor<-v_{k-1}<-...<-v_0; close the loop.
            const double dist = unitary_distance(prod, CMatrix::Identity(prod.rows(), prod.cols()));
            if (dist > report.worst_distance) {
                report.worst_distance = dist;
                report.worst_cycle = cycle;
                report.worst_cycle.push_back(anchor);
            }
        }
        if (static_cast<int>(cycle.size()) >= d) return;
        for (int next = anchor + 1; next < d; ++next) {
            if (used[next] || !defined(next, cur)) continue;
            used[next] = true;
            cycle.push_back(next);
            extend(anchor);
            cycle.pop_back();
            used[next] = false;
        }
    };
    for (int anchor = 0; anchor < d; ++anchor) {
        std::fill(used.begin(), used.end(), false);
        used[anchor] = true;
        cycle.assign(1, anchor);
        extend(anchor);
    }
    report.pass = report.worst_distance <= tol;
    return report;
}

// ---------------------------------------------------------------------------
// Noiseless ancilla subspace

NasPartition detect_nas(const SystemModel& model, double tol) {
    const int d = model.ancilla_dim();
    const int n = model.central_dim();
    const double duration = model.duration();

    auto equivalent = [&](int a, int b) {
        const auto& fa = model.frame_terms()[a];
        const auto& fb = model.frame_terms()[b];
        const auto edges = merged_edges(fa, fb, duration);
        for (size_t k = 0; k + 1 < edges.size(); ++k) {
            if (edges[k + 1] - edges[k] <= 1e-12) continue;
            const double mid = 0.5 * (edges[k] + edges[k + 1]);
            const CMatrix diff = frame_value(model, a, mid) - frame_value(model, b, mid);
            const Complex mean = diff.trace() / static_cast<double>(n);
            const double scale =
                std::max({1.0, frame_value(model, a, mid).norm(), frame_value(model, b, mid).norm()});
            if (std::abs(mean.imag()) > tol * scale) return false;
            if ((diff - mean * CMatrix::Identity(n, n)).cwiseAbs().maxCoeff() > tol * scale) {
                return false;
            }
        }
        return true;
    };

    // Union-find over pairwise frame equivalence.
    std::vector<int> parent(d);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    for (int a = 0; a < d; ++a) {
        for (int b = a + 1; b < d; ++b) {
            if (find(a) != find(b) && equivalent(a, b)) parent[find(b)] = find(a);
        }
    }

    NasPartition nas;
    nas.group_index.assign(d, -1);
    for (int lvl = 0; lvl < d; ++lvl) {
        const int root = find(lvl);
        int g = -1;
        for (size_t q = 0; q < nas.groups.size(); ++q) {
            if (find(nas.groups[q][0]) == root) g = static_cast<int>(q);
        }
        if (g == -1) {
            g = static_cast<int>(nas.groups.size());
            nas.groups.push_back({});
        }
        nas.groups[g].push_back(lvl);
        nas.group_index[lvl] = g;
    }

    // Offsets relative to the group representative: H_lvl(t) - H_ref(t) = c(t) I
    // gives lambda_lvl(t) = -c(t) with lambda_ref = 0.
    nas.offsets.assign(d, {});
    for (const auto& group : nas.groups) {
        const int ref = group.front();
        for (int lvl : group) {
            const auto edges = merged_edges(model.frame_terms()[lvl], model.frame_terms()[ref],
                                            duration);
            for (size_t k = 0; k + 1 < edges.size(); ++k) {
                if (edges[k + 1] - edges[k] <= 1e-12) continue;
                const double mid = 0.5 * (edges[k] + edges[k + 1]);
                const CMatrix diff = frame_value(model, lvl, mid) - frame_value(model, ref, mid);
                nas.offsets[lvl].push_back(
                    {edges[k], edges[k + 1], -diff.trace().real() / n});
            }
        }
    }
    return nas;
}

// ---------------------------------------------------------------------------
// Path enumeration

PathGraph build_path_graph(const SystemModel& model, const PropagatorDecomposition& decomposition,
                           const NasPartition& nas) {
    const int d = model.ancilla_dim();
    PathGraph graph;
    graph.levels = d;
    graph.nas = nas;
    graph.unitary = decomposition.unitary_table;
    graph.drive_edge.assign(d, std::vector<bool>(d, false));
    for (int m = 0; m < d; ++m) {
        for (int p = 0; p < d; ++p) {
            graph.drive_edge[m][p] = decomposition.edge_strength(m, p) > kEdgeThreshold;
        }
    }
    for (size_t j = 0; j < model.jumps().size(); ++j) {
        const auto& jump = model.jumps()[j];
        if (jump.rate <= 0) continue;
        if (jump.kind == JumpKind::dephasing) continue;
        if (jump.kind == JumpKind::relaxation) {
            graph.jump_edges.push_back({jump.from_level, jump.to_level, static_cast<int>(j),
                                        nas.same_group(jump.from_level, jump.to_level)});
            continue;
        }
        if (jump.ancilla_unitary.size() == 0) continue;  // not PI-form; no symbolic edges
        for (int to = 0; to < d; ++to) {
            for (int from = 0; from < d; ++from) {
                if (to == from) continue;  // diagonal action is dephasing-like
                if (jump.level_weights[from] <= 0) continue;
                if (std::abs(jump.ancilla_unitary(to, from)) *
                        std::sqrt(jump.level_weights[from]) <=
                    kEdgeThreshold) {
                    continue;
                }
                graph.jump_edges.push_back(
                    {from, to, static_cast<int>(j), nas.same_group(from, to)});
            }
        }
    }
    return graph;
}

std::vector<PathRecord> enumerate_paths(const PathGraph& graph, int i, int r, int max_jumps) {
    if (max_jumps > 4) throw std::invalid_argument("enumerate_paths: max_jumps > 4");
    int central_dim = 1;
    for (int m = 0; m < graph.levels; ++m) {
        for (int p = 0; p < graph.levels; ++p) {
            if (graph.unitary[m][p].size() != 0) {
                central_dim = static_cast<int>(graph.unitary[m][p].rows());
            }
        }
    }
    std::vector<PathRecord> out;
    PathRecord current;
    current.levels.push_back(i);

    // Each stage: one no-jump span (a single drive edge, since the propagator
    // connects any block pair directly) optionally followed by a jump edge.
    std::function<void(int, const CMatrix&, int)> visit = [&](int level, const CMatrix& op,
                                                              int jumps_used) {
        for (int next = 0; next < graph.levels; ++next) {
            if (!graph.drive_edge[next][level]) continue;
            CMatrix span_op = graph.unitary[next][level] * op;
            current.levels.push_back(next);
            if (next == r) {
                PathRecord rec = current;
                rec.op = span_op;
                out.push_back(std::move(rec));
            }
            if (jumps_used < max_jumps) {
                for (size_t e = 0; e < graph.jump_edges.size(); ++e) {
                    const auto& edge = graph.jump_edges[e];
                    if (edge.from != next) continue;
                    current.jump_edges.push_back(static_cast<int>(e));
                    current.levels.push_back(edge.to);
                    const bool was_nas_only = current.nas_only;
                    const bool was_td = current.time_dependent;
                    if (!edge.in_nas) {
                        current.nas_only = false;
                        current.time_dependent = true;
                    }
                    visit(edge.to, span_op, jumps_used + 1);
                    current.nas_only = was_nas_only;
                    current.time_dependent = was_td;
                    current.levels.pop_back();
                    current.jump_edges.pop_back();
                }
            }
            current.levels.pop_back();
        }
    };

    visit(i, CMatrix::Identity(central_dim, central_dim), 0);
    return out;
}

// ---------------------------------------------------------------------------
// Certification

PiCertifier::PiCertifier(const SystemModel& model, int max_order, bool use_numeric,
                         int quad_points)
    : model_(&model),
      max_order_(max_order),
      use_numeric_(use_numeric),
      quad_points_(quad_points) {
    decomposition_ = factorize_no_jump(model);
    nas_ = detect_nas(model);
    graph_ = build_path_graph(model, decomposition_, nas_);
}

void PiCertifier::ensure_channels() {
    if (channels_) return;
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < model_->ancilla_dim(); ++i) {
        for (int r = 0; r < model_->ancilla_dim(); ++r) pairs.push_back({i, r});
    }
    channels_ = conditional_channel_table(*model_, pairs, model_->duration(), max_order_,
                                          quad_points_, false);
}

PiOrderResult PiCertifier::certify(int initial, int final_level) {
    PiOrderResult result;
    result.initial = initial;
    result.final_level = final_level;

    // Symbolic route: phase-equivalence of all <= k-jump path operators, with
    // non-NAS jumps breaking independence outright.
    std::vector<PathRecord> paths;
    if (decomposition_.pi_form) {
        paths = enumerate_paths(graph_, initial, final_level, max_order_);
    }
    int symbolic = -1;
    bool any_path = false;
    std::vector<PathRecord> witnesses;
    for (int k = 0; k <= max_order_; ++k) {
        const CMatrix* ref = nullptr;
        bool consistent = true;
        std::vector<PathRecord> breakers;
        for (const auto& path : paths) {
            if (static_cast<int>(path.jump_edges.size()) > k) continue;
            any_path = true;
            if (path.time_dependent) {
                consistent = false;
                breakers.push_back(path);
                continue;
            }
            if (!ref) {
                ref = &path.op;
                if (result.gate.size() == 0) result.gate = path.op;
                continue;
            }
            if (unitary_distance(*ref, path.op) > kPhaseEquivTol) {
                consistent = false;
                breakers.push_back(path);
            }
        }
        if (!consistent) {
            witnesses = std::move(breakers);
            break;
        }
        symbolic = k;
    }
    result.symbolic_order = decomposition_.pi_form ? symbolic : -1;
    if (!decomposition_.pi_form) {
        result.order = 0;
        result.unreachable = false;
        result.at_max_checked = false;
        return result;
    }
    const bool symbolic_unreachable = !any_path;

    int numeric = -1;
    bool numeric_unreachable = true;
    if (use_numeric_) {
        ensure_channels();
        result.numeric_used = true;
        for (int k = 0; k <= max_order_; ++k) {
            const CMatrix choi = channels_->cumulative(initial, final_level, k);
            const double weight = choi.real().trace();
            if (weight <= kVacuousWeight) {
                numeric = k;  // vacuous level: no amplitude reaches this pair yet
                continue;
            }
            numeric_unreachable = false;
            const ChannelUnitarity diag = channel_unitarity(choi, model_->central_dim());
            if (diag.subdominant_ratio <= kRankRatioTol && diag.kraus_spread <= kRankRatioTol) {
                numeric = k;
            } else {
                break;
            }
        }
        if (numeric_unreachable) numeric = -1;
        result.numeric_order = numeric;
    }

    if (use_numeric_) {
        result.unreachable = numeric_unreachable && symbolic_unreachable;
        result.methods_agree =
            (symbolic_unreachable == numeric_unreachable) &&
            (symbolic_unreachable || symbolic == numeric);
        // Numeric route wins the report; symbolic witnesses are retained.
        result.order = result.unreachable ? -1 : numeric;
    } else {
        result.unreachable = symbolic_unreachable;
        result.order = symbolic_unreachable ? -1 : symbolic;
    }
    result.at_max_checked = !result.unreachable && result.order == max_order_;
    result.witnesses = std::move(witnesses);
    return result;
}

std::vector<PiOrderResult> PiCertifier::certify_all() {
    std::vector<PiOrderResult> out;
    for (int i = 0; i < model_->ancilla_dim(); ++i) {
        for (int r = 0; r < model_->ancilla_dim(); ++r) {
            out.push_back(certify(i, r));
        }
    }
    return out;
}

PiOrderResult pi_order(const SystemModel& model, int initial, int final_level, int max_order,
                       bool use_numeric) {
    PiCertifier certifier(model, max_order, use_numeric);
    return certifier.certify(initial, final_level);
}

PiReport certify_model(const SystemModel& model, int max_order, bool use_numeric) {
    PiCertifier certifier(model, max_order, use_numeric);
    PiReport report;
    report.max_order = max_order;
    report.entries = certifier.certify_all();
    report.nas = certifier.nas();
    report.pi_form = certifier.decomposition().pi_form;
    return report;
}

std::string to_json(const PiReport& report) {
    nlohmann::ordered_json root;
    root["pi_form"] = report.pi_form;
    root["max_order"] = report.max_order;
    root["nas"] = report.nas.groups;
    root["pairs"] = nlohmann::ordered_json::array();
    for (const auto& entry : report.entries) {
        nlohmann::ordered_json item;
        item["pair"] = {entry.initial, entry.final_level};
        if (entry.unreachable) {
            item["order"] = "unreachable";
        } else {
            item["order"] = entry.order;
        }
        item["at_max_checked"] = entry.at_max_checked;
        item["methods_agree"] = entry.methods_agree;
        item["witnesses"] = nlohmann::ordered_json::array();
        for (const auto& witness : entry.witnesses) {
            nlohmann::ordered_json w;
            w["jumps"] = witness.jump_edges;
            w["levels"] = witness.levels;
            w["time_dependent"] = witness.time_dependent;
            item["witnesses"].push_back(w);
        }
        root["pairs"].push_back(item);
    }
    return root.dump(2);
}

}  // namespace pigates
