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

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pigates/numerics.hpp"

namespace pigates {

// Conventions used throughout: frequencies are angular (rad/us), times are us.
// Ordinary frequencies from configs (MHz) are multiplied by 2*pi on ingestion.

/// Piecewise-constant matrix-valued function of time on contiguous segments.
class PiecewiseMatrix {
public:
    PiecewiseMatrix() = default;

    static PiecewiseMatrix constant(CMatrix value, double t_begin, double t_end);

    /// Starts an empty schedule at t_begin; segments are appended in order.
    explicit PiecewiseMatrix(double t_begin) { edges_.push_back(t_begin); }

    void append(double t_end, CMatrix value);

    bool empty() const { return values_.empty(); }
    int segments() const { return static_cast<int>(values_.size()); }
    double begin() const { return edges_.front(); }
    double end() const { return edges_.back(); }
    double segment_begin(int k) const { return edges_[k]; }
    double segment_end(int k) const { return edges_[k + 1]; }
    const CMatrix& segment_value(int k) const { return values_[k]; }

    /// Index of the segment containing t (right-open; the last segment is closed).
    int segment_index(double t) const;
    const CMatrix& at(double t) const { return values_[segment_index(t)]; }

private:
    std::vector<double> edges_;
    std::vector<CMatrix> values_;
};

/// A control Hamiltonian schedule: either explicit piecewise-constant segments
/// or a closed-form drive discretized at cell midpoints with a fixed step
/// (the standard midpoint rule for continuous drives; convergence is verified
/// by halving the step).
class ControlSchedule {
public:
    ControlSchedule() = default;

    static ControlSchedule constant(const CMatrix& h, double duration);
    static ControlSchedule piecewise(PiecewiseMatrix segments);
    static ControlSchedule sampled(std::function<CMatrix(double)> h, double duration,
                                   double step, double max_frequency);

    double duration() const { return duration_; }
    bool is_sampled() const { return static_cast<bool>(sampler_); }
    double sample_step() const { return step_; }
    /// Largest angular frequency present in a sampled drive (rad/us); zero for
    /// explicit schedules.
    double max_frequency() const { return max_frequency_; }
    int segments() const;
    double segment_begin(int k) const;
    double segment_end(int k) const;
    CMatrix segment_value(int k) const;
    int segment_index(double t) const;
    CMatrix at(double t) const;

    /// Same drive discretized with the step divided by `factor`.
    ControlSchedule refined(int factor) const;

private:
    double duration_ = 0.0;
    PiecewiseMatrix explicit_;
    std::function<CMatrix(double)> sampler_;
    double step_ = 0.0;
    double max_frequency_ = 0.0;
    int sampled_segments_ = 0;
};

enum class JumpKind { dephasing, relaxation, general };

/// A validated Lindblad jump operator on the joint ancilla x central space,
/// classified by its ancilla structure.
///
/// dephasing:  sum_m w_m |m><m| (x) I
/// relaxation: |to><from| (x) I
/// general:    polar form K = (S (x) I) sqrt(K^dag K) with K^dag K
///             ancilla-diagonal (x) I; S unitary on the ancilla.
struct JumpOperator {
    JumpKind kind = JumpKind::general;
    double rate = 0.0;  // 1/us
    CMatrix op;         // joint-space matrix

    CVector dephasing_weights;  // per-level weights (dephasing kind)
    int from_level = -1;        // relaxation |to><from|
    int to_level = -1;
    CMatrix ancilla_unitary;    // S (general kind), d x d
    RVector level_weights;      // lambda_m >= 0 with K^dag K = sum lambda_m |m><m| (x) I

    // False when K^dag K is not ancilla-diagonal (x) I within tolerance. Such
    // operators are still simulated but cannot take part in a PI factorization.
    bool pi_compatible = true;
};

/// The composite d-level ancilla (x) N-dim central system with its working
/// Hamiltonian, per-level frame generators and validated jump operators.
///
/// The model's dynamics run in a fixed working picture: the generator of the
/// coherent part is `control()` alone. `frame_terms()` define the rotation
/// R(t) = sum_m |m><m| (x) R_m(t) that relates the working picture to the
/// picture in which the jump operators are the given constants; the dynamics
/// therefore use the transformed jumps K(t) = R^dag(t) K R(t). A model built
/// directly in the frame of its static Hamiltonian has `control()` equal to
/// the interaction-picture drive; a plain Schrodinger-picture model has zero
/// frame terms and the full Hamiltonian in `control()`.
class SystemModel {
public:
    SystemModel() = default;

    int ancilla_dim() const { return d_; }
    int central_dim() const { return n_; }
    int joint_dim() const { return d_ * n_; }
    double duration() const { return control_.duration(); }

    const RVector& ancilla_energies() const { return energies_; }
    const CMatrix& static_hamiltonian() const { return static_h_; }
    const std::vector<PiecewiseMatrix>& frame_terms() const { return frames_; }
    const ControlSchedule& control() const { return control_; }
    const std::vector<JumpOperator>& jumps() const { return jumps_; }

    bool has_frames() const { return has_frames_; }

    /// Working-picture Hamiltonian at time t (equals the control schedule).
    CMatrix hamiltonian(double t) const { return control_.at(t); }

    /// Central-system frame rotation R_m(t) for ancilla level m.
    CMatrix frame_rotation_level(int m, double t) const;

    /// Jump operator in the working picture, R^dag(t) K R(t).
    CMatrix jump_in_frame(int jump_index, double t) const;

    /// True when the jump's dissipator contribution is time independent in the
    /// working picture (dephasing operators, and jumps whose frame factor is a
    /// pure phase).
    bool jump_dissipator_constant(int jump_index) const;

    /// Extract the (m, n) ancilla block of a joint-space matrix.
    Eigen::Block<const CMatrix> ancilla_block(const CMatrix& joint, int m, int n) const;

    friend SystemModel build_model(int ancilla_dim, int central_dim, const CMatrix& static_h,
                                   std::vector<PiecewiseMatrix> frame_terms,
                                   ControlSchedule control, std::vector<JumpOperator> jumps,
                                   RVector ancilla_energies);

private:
    int d_ = 0;
    int n_ = 0;
    RVector energies_;
    CMatrix static_h_;
    std::vector<PiecewiseMatrix> frames_;
    ControlSchedule control_;
    std::vector<JumpOperator> jumps_;
    bool has_frames_ = false;
    std::vector<bool> jump_const_;
};

/// Pair drives for a path-independent control Hamiltonian: mutually disjoint
/// ancilla level pairs (m, n), each carrying a central-system unitary, a drive
/// amplitude and per-level detunings (rad/us).
struct PiControlPair {
    int level_m = 0;
    int level_n = 1;
    CMatrix unitary;      // central-system unitary attached to |m><n|
    double amplitude = 0; // rad/us
    double detuning_m = 0;
    double detuning_n = 0;
};

struct PiControlSpec {
    std::vector<PiControlPair> pairs;
};

/// Validates invariants (block-diagonal static Hamiltonian, Hermitian control
/// segments, conformable dimensions) and assembles the model.
/// Throws std::invalid_argument on violations.
SystemModel build_model(int ancilla_dim, int central_dim, const CMatrix& static_h,
                        std::vector<PiecewiseMatrix> frame_terms, ControlSchedule control,
                        std::vector<JumpOperator> jumps, RVector ancilla_energies = {});

/// Joint frame rotation R(t) = sum_m |m><m| (x) R_m(t).
CMatrix frame_rotation(const SystemModel& model, double t);

/// Control Hamiltonian of the general pair-drive form at time t,
///   sum_mu amp_mu (|m><n| (x) R_m(t) U_mu R_n^dag(t) + h.c.) + detuning terms,
/// evaluated against the model's frame terms. With zero frames this reduces to
/// the constant drive sum_mu amp_mu (|m><n| (x) U_mu + h.c.) + detunings.
CMatrix build_pi_control(const SystemModel& frame_model, const PiControlSpec& spec, double t);

/// Classifies a joint-space operator as a jump operator. For the general kind
/// the ancilla polar factor S and the nonnegative diagonal weights are
/// extracted and the reconstruction K = (S (x) I) sqrt(K^dag K) is verified.
/// Operators whose K^dag K is not ancilla-diagonal (x) I are flagged
/// (pi_compatible = false) but still usable for simulation.
JumpOperator validate_jump(const SystemModel& model, const CMatrix& k, double rate);

// Convenience constructors for the common jump kinds (central-identity form).
JumpOperator dephasing_jump(int ancilla_dim, int central_dim, const CVector& weights, double rate);
JumpOperator relaxation_jump(int ancilla_dim, int central_dim, int to_level, int from_level,
                             double rate);

}  // namespace pigates
