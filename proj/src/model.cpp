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

#include "pigates/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pigates {

namespace {

constexpr double kHermitianTol = 1e-12;
constexpr double kBlockTol = 1e-12;
constexpr double kPolarTol = 1e-10;

void check_square(const CMatrix& m, int dim, const char* what) {
    if (m.rows() != dim || m.cols() != dim) {
        throw std::invalid_argument(std::string(what) + ": wrong dimension");
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// PiecewiseMatrix

PiecewiseMatrix PiecewiseMatrix::constant(CMatrix value, double t_begin, double t_end) {
    PiecewiseMatrix out(t_begin);
    out.append(t_end, std::move(value));
    return out;
}

void PiecewiseMatrix::append(double t_end, CMatrix value) {
    if (edges_.empty()) edges_.push_back(0.0);
    if (t_end <= edges_.back()) {
        throw std::invalid_argument("PiecewiseMatrix: segments must advance in time");
    }
    edges_.push_back(t_end);
    values_.push_back(std::move(value));
}

int PiecewiseMatrix::segment_index(double t) const {
    if (values_.empty()) throw std::out_of_range("PiecewiseMatrix: empty schedule");
    const double eps = 1e-12 * std::max(1.0, std::abs(edges_.back()));
    if (t < edges_.front() - eps || t > edges_.back() + eps) {
        throw std::out_of_range("PiecewiseMatrix: time outside coverage");
    }
    auto it = std::upper_bound(edges_.begin(), edges_.end(), t);
    int k = static_cast<int>(it - edges_.begin()) - 1;
    return std::clamp(k, 0, segments() - 1);
}

// ---------------------------------------------------------------------------
// ControlSchedule

ControlSchedule ControlSchedule::constant(const CMatrix& h, double duration) {
    ControlSchedule out;
    out.duration_ = duration;
    out.explicit_ = PiecewiseMatrix::constant(h, 0.0, duration);
    return out;
}

ControlSchedule ControlSchedule::piecewise(PiecewiseMatrix segments) {
    if (segments.empty()) throw std::invalid_argument("ControlSchedule: empty schedule");
    if (std::abs(segments.begin()) > 1e-12) {
        throw std::invalid_argument("ControlSchedule: schedule must start at t = 0");
    }
    ControlSchedule out;
    out.duration_ = segments.end();
    out.explicit_ = std::move(segments);
    return out;
}

ControlSchedule ControlSchedule::sampled(std::function<CMatrix(double)> h, double duration,
                                         double step, double max_frequency) {
    if (duration <= 0 || step <= 0) {
        throw std::invalid_argument("ControlSchedule: duration and step must be positive");
    }
    ControlSchedule out;
    out.duration_ = duration;
    out.sampler_ = std::move(h);
    out.sampled_segments_ = std::max(1, static_cast<int>(std::ceil(duration / step - 1e-9)));
    out.step_ = duration / out.sampled_segments_;
    out.max_frequency_ = max_frequency;
    return out;
}

int ControlSchedule::segments() const {
    return sampler_ ? sampled_segments_ : explicit_.segments();
}

double ControlSchedule::segment_begin(int k) const {
    return sampler_ ? k * step_ : explicit_.segment_begin(k);
}

double ControlSchedule::segment_end(int k) const {
    return sampler_ ? std::min(duration_, (k + 1) * step_) : explicit_.segment_end(k);
}

CMatrix ControlSchedule::segment_value(int k) const {
    if (!sampler_) return explicit_.segment_value(k);
    const double mid = 0.5 * (segment_begin(k) + segment_end(k));
    return sampler_(mid);
}

int ControlSchedule::segment_index(double t) const {
    if (!sampler_) return explicit_.segment_index(t);
    const double eps = 1e-12 * std::max(1.0, duration_);
    if (t < -eps || t > duration_ + eps) {
        throw std::out_of_range("ControlSchedule: time outside coverage");
    }
    int k = static_cast<int>(std::floor(t / step_));
    return std::clamp(k, 0, sampled_segments_ - 1);
}

CMatrix ControlSchedule::at(double t) const { return segment_value(segment_index(t)); }

ControlSchedule ControlSchedule::refined(int factor) const {
    if (!sampler_) return *this;
    return sampled(sampler_, duration_, step_ / factor, max_frequency_);
}

// ---------------------------------------------------------------------------
// SystemModel

CMatrix SystemModel::frame_rotation_level(int m, double t) const {
    if (m < 0 || m >= d_) throw std::invalid_argument("frame_rotation_level: bad level");
    const auto& frame = frames_[m];
    if (frame.empty()) return CMatrix::Identity(n_, n_);
    if (t < frame.begin() - 1e-12) throw std::out_of_range("frame_rotation_level: t < 0");
    CMatrix r = CMatrix::Identity(n_, n_);
    const Complex mi(0.0, -1.0);
    for (int k = 0; k < frame.segments() && frame.segment_begin(k) < t; ++k) {
        const double dt = std::min(t, frame.segment_end(k)) - frame.segment_begin(k);
        if (dt <= 0) break;
        r = matrix_exponential(mi * dt * frame.segment_value(k)) * r;
    }
    return r;
}

CMatrix SystemModel::jump_in_frame(int jump_index, double t) const {
    const JumpOperator& jump = jumps_.at(jump_index);
    if (!has_frames_) return jump.op;
    CMatrix out = CMatrix::Zero(joint_dim(), joint_dim());
    std::vector<CMatrix> rot(d_);
    for (int m = 0; m < d_; ++m) rot[m] = frame_rotation_level(m, t);
    for (int m = 0; m < d_; ++m) {
        for (int n = 0; n < d_; ++n) {
            const auto block = jump.op.block(m * n_, n * n_, n_, n_);
            if (block.cwiseAbs().maxCoeff() == 0.0) continue;
            out.block(m * n_, n * n_, n_, n_) = rot[m].adjoint() * block * rot[n];
        }
    }
    return out;
}

bool SystemModel::jump_dissipator_constant(int jump_index) const {
    return jump_const_.at(jump_index);
}

Eigen::Block<const CMatrix> SystemModel::ancilla_block(const CMatrix& joint, int m, int n) const {
    return joint.block(m * n_, n * n_, n_, n_);
}

SystemModel build_model(int ancilla_dim, int central_dim, const CMatrix& static_h,
                        std::vector<PiecewiseMatrix> frame_terms, ControlSchedule control,
                        std::vector<JumpOperator> jumps, RVector ancilla_energies) {
    if (ancilla_dim < 1 || central_dim < 1) {
        throw std::invalid_argument("build_model: dimensions must be positive");
    }
    const int joint = ancilla_dim * central_dim;

    SystemModel model;
    model.d_ = ancilla_dim;
    model.n_ = central_dim;

    if (static_h.size() == 0) {
        model.static_h_ = CMatrix::Zero(joint, joint);
    } else {
        check_square(static_h, joint, "build_model: static Hamiltonian");
        model.static_h_ = static_h;
    }
    // The static Hamiltonian must preserve the ancilla eigenbasis.
    for (int m = 0; m < ancilla_dim; ++m) {
        for (int n = 0; n < ancilla_dim; ++n) {
            if (m == n) continue;
            const double off =
                model.static_h_.block(m * central_dim, n * central_dim, central_dim, central_dim)
                    .norm();
            if (off > kBlockTol * std::max(1.0, model.static_h_.norm())) {
                throw std::invalid_argument(
                    "build_model: static Hamiltonian has off-block-diagonal ancilla coupling");
            }
        }
    }

    if (frame_terms.empty()) {
        frame_terms.assign(ancilla_dim, PiecewiseMatrix{});
    }
    if (static_cast<int>(frame_terms.size()) != ancilla_dim) {
        throw std::invalid_argument("build_model: one frame term per ancilla level required");
    }
    for (const auto& frame : frame_terms) {
        for (int k = 0; k < frame.segments(); ++k) {
            check_square(frame.segment_value(k), central_dim, "build_model: frame term");
            if (!is_hermitian(frame.segment_value(k), kHermitianTol)) {
                throw std::invalid_argument("build_model: frame terms must be Hermitian");
            }
        }
        model.has_frames_ = model.has_frames_ || !frame.empty();
    }
    model.frames_ = std::move(frame_terms);

    if (control.duration() <= 0) {
        throw std::invalid_argument("build_model: control schedule must have positive duration");
    }
    if (!control.is_sampled()) {
        for (int k = 0; k < control.segments(); ++k) {
            const CMatrix h = control.segment_value(k);
            check_square(h, joint, "build_model: control segment");
            if (!is_hermitian(h, kHermitianTol * std::max(1.0, h.norm()))) {
                throw std::invalid_argument("build_model: control segments must be Hermitian");
            }
        }
    } else {
        // Spot-check Hermiticity of a sampled drive at a few cells.
        for (double frac : {0.0, 0.5, 0.99}) {
            const CMatrix h = control.at(frac * control.duration());
            check_square(h, joint, "build_model: control sample");
            if (!is_hermitian(h, kHermitianTol * std::max(1.0, h.norm()))) {
                throw std::invalid_argument("build_model: control samples must be Hermitian");
            }
        }
    }
    model.control_ = std::move(control);

    if (ancilla_energies.size() == 0) {
        model.energies_ = RVector::Zero(ancilla_dim);
    } else if (ancilla_energies.size() == ancilla_dim) {
        model.energies_ = std::move(ancilla_energies);
    } else {
        throw std::invalid_argument("build_model: ancilla energy count mismatch");
    }

    for (auto& jump : jumps) {
        check_square(jump.op, joint, "build_model: jump operator");
        if (jump.rate < 0) throw std::invalid_argument("build_model: negative jump rate");
    }
    model.jumps_ = std::move(jumps);

    // A jump's dissipator is time independent in the working picture when its
    // frame-transformed form differs from the constant one by at most a global
    // phase. Probed at two interior times.
    model.jump_const_.resize(model.jumps_.size(), true);
    if (model.has_frames_) {
        for (size_t j = 0; j < model.jumps_.size(); ++j) {
            bool constant = true;
            for (double frac : {0.37, 0.73}) {
                const CMatrix kt = model.jump_in_frame(static_cast<int>(j),
                                                       frac * model.duration());
                const CMatrix& k0 = model.jumps_[j].op;
                if (kt.norm() == 0.0) continue;
                if (proportionality_distance(kt, k0) > 1e-9) {
                    constant = false;
                    break;
                }
            }
            model.jump_const_[j] = constant;
        }
    }

    return model;
}

CMatrix frame_rotation(const SystemModel& model, double t) {
    const int d = model.ancilla_dim();
    const int n = model.central_dim();
    CMatrix r = CMatrix::Zero(d * n, d * n);
    for (int m = 0; m < d; ++m) {
        r.block(m * n, m * n, n, n) = model.frame_rotation_level(m, t);
    }
    return r;
}

CMatrix build_pi_control(const SystemModel& frame_model, const PiControlSpec& spec, double t) {
    const int d = frame_model.ancilla_dim();
    const int n = frame_model.central_dim();
    std::vector<bool> used(d, false);
    for (const auto& pair : spec.pairs) {
        if (pair.level_m < 0 || pair.level_m >= d || pair.level_n < 0 || pair.level_n >= d ||
            pair.level_m == pair.level_n) {
            throw std::invalid_argument("build_pi_control: bad level pair");
        }
        if (used[pair.level_m] || used[pair.level_n]) {
            throw std::invalid_argument("build_pi_control: overlapping level pairs");
        }
        used[pair.level_m] = used[pair.level_n] = true;
        if (pair.unitary.rows() != n || pair.unitary.cols() != n ||
            !is_unitary(pair.unitary, kDefaultTol)) {
            throw std::invalid_argument("build_pi_control: pair operator must be unitary");
        }
    }

    CMatrix h = CMatrix::Zero(d * n, d * n);
    for (const auto& pair : spec.pairs) {
        const CMatrix rm = frame_model.frame_rotation_level(pair.level_m, t);
        const CMatrix rn = frame_model.frame_rotation_level(pair.level_n, t);
        const CMatrix drive = pair.amplitude * (rm * pair.unitary * rn.adjoint());
        h.block(pair.level_m * n, pair.level_n * n, n, n) += drive;
        h.block(pair.level_n * n, pair.level_m * n, n, n) += drive.adjoint();
        h.block(pair.level_m * n, pair.level_m * n, n, n) +=
            pair.detuning_m * CMatrix::Identity(n, n);
        h.block(pair.level_n * n, pair.level_n * n, n, n) +=
            pair.detuning_n * CMatrix::Identity(n, n);
    }
    return h;
}

JumpOperator validate_jump(const SystemModel& model, const CMatrix& k, double rate) {
    const int d = model.ancilla_dim();
    const int n = model.central_dim();
    check_square(k, d * n, "validate_jump: operator");
    if (rate < 0) throw std::invalid_argument("validate_jump: negative rate");

    JumpOperator jump;
    jump.op = k;
    jump.rate = rate;

    const CMatrix eye = CMatrix::Identity(n, n);

    // Dephasing: every diagonal block proportional to I, no off-diagonal blocks.
    bool dephasing = true;
    CVector weights = CVector::Zero(d);
    for (int m = 0; m < d && dephasing; ++m) {
        for (int p = 0; p < d && dephasing; ++p) {
            const CMatrix block = model.ancilla_block(k, m, p);
            if (m == p) {
                const Complex w = block.trace() / static_cast<double>(n);
                if ((block - w * eye).cwiseAbs().maxCoeff() > kPolarTol) dephasing = false;
                weights[m] = w;
            } else if (block.cwiseAbs().maxCoeff() > kPolarTol) {
                dephasing = false;
            }
        }
    }
    if (dephasing) {
        jump.kind = JumpKind::dephasing;
        jump.dephasing_weights = weights;
        jump.level_weights = weights.cwiseAbs2().real();
        return jump;
    }

    // Relaxation: a single off-diagonal block equal to the identity.
    int to = -1, from = -1;
    bool relaxation = true;
    for (int m = 0; m < d && relaxation; ++m) {
        for (int p = 0; p < d && relaxation; ++p) {
            const CMatrix block = model.ancilla_block(k, m, p);
            if (block.cwiseAbs().maxCoeff() <= kPolarTol) continue;
            if (m == p || to != -1 || (block - eye).cwiseAbs().maxCoeff() > kPolarTol) {
                relaxation = false;
            } else {
                to = m;
                from = p;
            }
        }
    }
    if (relaxation && to != -1) {
        jump.kind = JumpKind::relaxation;
        jump.to_level = to;
        jump.from_level = from;
        jump.level_weights = RVector::Zero(d);
        jump.level_weights[from] = 1.0;
        return jump;
    }

    // General kind: require K^dag K = sum_m lambda_m |m><m| (x) I, then take the
    // polar decomposition K = (S (x) I) sqrt(K^dag K) with S on the ancilla.
    jump.kind = JumpKind::general;
    const CMatrix gram = k.adjoint() * k;
    RVector lambdas = RVector::Zero(d);
    bool diagonal_gram = true;
    for (int m = 0; m < d; ++m) {
        for (int p = 0; p < d; ++p) {
            const CMatrix block = model.ancilla_block(gram, m, p);
            if (m == p) {
                const Complex w = block.trace() / static_cast<double>(n);
                if ((block - w * eye).cwiseAbs().maxCoeff() > kPolarTol ||
                    std::abs(w.imag()) > kPolarTol) {
                    diagonal_gram = false;
                }
                lambdas[m] = std::max(0.0, w.real());
            } else if (block.cwiseAbs().maxCoeff() > kPolarTol) {
                diagonal_gram = false;
            }
        }
    }
    jump.pi_compatible = diagonal_gram;
    if (!diagonal_gram) return jump;

    jump.level_weights = lambdas;
    // Ancilla-level matrix k_anc(m, p) from the blocks (each proportional to I),
    // then S from its polar decomposition.
    CMatrix k_anc(d, d);
    for (int m = 0; m < d; ++m) {
        for (int p = 0; p < d; ++p) {
            k_anc(m, p) = model.ancilla_block(k, m, p).trace() / static_cast<double>(n);
        }
    }
    CMatrix s = nearest_unitary(k_anc);
    // Columns with lambda = 0 are gauge freedom of the polar factor; keep the
    // SVD choice. Verify the reconstruction on the joint space.
    CMatrix sqrt_gram = CMatrix::Zero(d, d);
    for (int m = 0; m < d; ++m) sqrt_gram(m, m) = std::sqrt(lambdas[m]);
    const CMatrix rebuilt = kronecker(s * sqrt_gram, eye);
    if ((rebuilt - k).cwiseAbs().maxCoeff() > kPolarTol * std::max(1.0, k.norm())) {
        // Blocks not proportional to central identity: simulable, not PI-form.
        jump.pi_compatible = false;
        return jump;
    }
    jump.ancilla_unitary = s;
    return jump;
}

JumpOperator dephasing_jump(int ancilla_dim, int central_dim, const CVector& weights,
                            double rate) {
    if (weights.size() != ancilla_dim) {
        throw std::invalid_argument("dephasing_jump: weight count mismatch");
    }
    const int joint = ancilla_dim * central_dim;
    CMatrix op = CMatrix::Zero(joint, joint);
    for (int m = 0; m < ancilla_dim; ++m) {
        op.block(m * central_dim, m * central_dim, central_dim, central_dim) =
            weights[m] * CMatrix::Identity(central_dim, central_dim);
    }
    JumpOperator jump;
    jump.kind = JumpKind::dephasing;
    jump.rate = rate;
    jump.op = std::move(op);
    jump.dephasing_weights = weights;
    jump.level_weights = weights.cwiseAbs2().real();
    return jump;
}

JumpOperator relaxation_jump(int ancilla_dim, int central_dim, int to_level, int from_level,
                             double rate) {
    if (to_level == from_level || to_level < 0 || from_level < 0 || to_level >= ancilla_dim ||
        from_level >= ancilla_dim) {
        throw std::invalid_argument("relaxation_jump: bad level pair");
    }
    const int joint = ancilla_dim * central_dim;
    CMatrix op = CMatrix::Zero(joint, joint);
    op.block(to_level * central_dim, from_level * central_dim, central_dim, central_dim) =
        CMatrix::Identity(central_dim, central_dim);
    JumpOperator jump;
    jump.kind = JumpKind::relaxation;
    jump.rate = rate;
    jump.op = std::move(op);
    jump.to_level = to_level;
    jump.from_level = from_level;
    jump.level_weights = RVector::Zero(ancilla_dim);
    jump.level_weights[from_level] = 1.0;
    return jump;
}

}  // namespace pigates
