// Copyright 2026 The nlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Entropies, divergences and distances. Logarithms are base 2 throughout.
// Matrix logarithms and negative powers act on the support only.

#ifndef NLAB_INFOMETRICS_HPP
#define NLAB_INFOMETRICS_HPP

#include <cmath>
#include <limits>

#include "nlab/instruments.hpp"

namespace nlab {

/// A real value or +infinity. Infinity is a flag, never a sentinel float.
struct MetricValue {
    double value = 0.0;
    bool finite = true;

    static MetricValue infinite() {
        return MetricValue{std::numeric_limits<double>::infinity(), false};
    }
    /// Plain double, +inf when not finite.
    double as_double() const {
        return finite ? value : std::numeric_limits<double>::infinity();
    }
};

namespace detail {

inline void require_same_dim(const DensityMatrix &a, const DensityMatrix &b) {
    if (a.dim() != b.dim()) {
        throw_dimension_mismatch("states have dimensions " + std::to_string(a.dim()) + " and " +
                                 std::to_string(b.dim()));
    }
}

/// Sum of x log2 x over clamped eigenvalues, with 0 log 0 = 0.
inline double xlogx_sum(const RealVector &eigenvalues) {
    double acc = 0.0;
    for (Index k = 0; k < eigenvalues.size(); ++k) {
        const double x = eigenvalues(k);
        if (x > 0.0) {
            acc += x * std::log2(x);
        }
    }
    return acc;
}

/// Weight of `rho` outside the support of `sigma`.
inline double support_leak(const Matrix &rho, const Matrix &sigma) {
    const Matrix outside = identity(sigma.rows()) - support_projector(sigma);
    return real_trace(outside * rho);
}

inline bool support_contained(const Matrix &rho, const Matrix &sigma) {
    return support_leak(rho, sigma) <= support_epsilon(hermitian_eig(rho).largest());
}

}  // namespace detail

inline MetricValue shannon_entropy(const OutcomeDistribution &p) {
    double acc = 0.0;
    for (double x : p.probs()) {
        if (x > 0.0) {
            acc -= x * std::log2(x);
        }
    }
    return {std::max(acc, 0.0), true};
}

/// alpha == 1 gives the Shannon entropy.
inline MetricValue renyi_entropy(const OutcomeDistribution &p, double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw_domain("Renyi order", "alpha must be a positive real, got " + std::to_string(alpha));
    }
    if (alpha == 1.0) {
        return shannon_entropy(p);
    }
    double acc = 0.0;
    for (double x : p.probs()) {
        if (x > 0.0) {
            acc += std::pow(x, alpha);
        }
    }
    return {std::log2(acc) / (1.0 - alpha), true};
}

inline MetricValue von_neumann_entropy(const DensityMatrix &rho) {
    return {std::max(-detail::xlogx_sum(hermitian_eig(rho.mat()).eigenvalues), 0.0), true};
}

/// Tr[rho (log rho - log sigma)]; infinite when supp rho is not inside supp sigma.
inline MetricValue quantum_relative_entropy(const DensityMatrix &rho, const DensityMatrix &sigma) {
    detail::require_same_dim(rho, sigma);
    if (!detail::support_contained(rho.mat(), sigma.mat())) {
        return MetricValue::infinite();
    }
    const double self = detail::xlogx_sum(hermitian_eig(rho.mat()).eigenvalues);
    const double cross = real_trace(rho.mat() * log2_psd(sigma.mat()));
    return {self - cross, true};
}

/// Tr[(sigma^g rho sigma^g)^alpha] with g = (1-alpha)/(2 alpha).
inline double sandwiched_trace(const DensityMatrix &rho, const DensityMatrix &sigma, double alpha) {
    detail::require_same_dim(rho, sigma);
    const double g = (1.0 - alpha) / (2.0 * alpha);
    const Matrix s = power_psd(sigma.mat(), g, SupportMode::kSupportOnly);
    const Matrix inner = hermitian_part(s * rho.mat() * s);
    return real_trace(power_psd(inner, alpha, SupportMode::kSupportOnly));
}

/// (alpha-1)^{-1} log2 Tr[(sigma^g rho sigma^g)^alpha], g = (1-alpha)/(2 alpha),
/// for alpha in [1/2, 1) or (1, inf).
inline MetricValue sandwiched_renyi_divergence(const DensityMatrix &rho, const DensityMatrix &sigma, double alpha) {
    detail::require_same_dim(rho, sigma);
    if (!(alpha >= 0.5) || alpha == 1.0 || !std::isfinite(alpha)) {
        throw_domain("Renyi order", "sandwiched divergence needs alpha in [1/2, 1) or (1, inf), got " +
                                        std::to_string(alpha));
    }
    if (alpha > 1.0 && !detail::support_contained(rho.mat(), sigma.mat())) {
        return MetricValue::infinite();
    }
    const double t = sandwiched_trace(rho, sigma, alpha);
    if (!(t > 0.0)) {
        return MetricValue::infinite();
    }
    return {std::log2(t) / (alpha - 1.0), true};
}

/// (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
inline MetricValue fidelity(const DensityMatrix &rho, const DensityMatrix &sigma) {
    detail::require_same_dim(rho, sigma);
    const Matrix r = sqrt_psd(rho.mat());
    const HermitianSpectrum spec = hermitian_eig(hermitian_part(r * sigma.mat() * r));
    // Off-support noise of size 1e-16 would otherwise add 1e-8 after the root.
    const double eps = spec.epsilon();
    double acc = 0.0;
    for (Index k = 0; k < spec.eigenvalues.size(); ++k) {
        if (spec.eigenvalues(k) > eps) {
            acc += std::sqrt(spec.eigenvalues(k));
        }
    }
    return {std::min(acc * acc, 1.0), true};
}

inline MetricValue trace_distance(const DensityMatrix &rho, const DensityMatrix &sigma) {
    detail::require_same_dim(rho, sigma);
    return {std::min(0.5 * trace_norm(hermitian_part(rho.mat() - sigma.mat())), 1.0), true};
}

/// 1 - sum_i p_i^2.
inline MetricValue invariant_information(const OutcomeDistribution &p) {
    double acc = 0.0;
    for (double x : p.probs()) {
        acc += x * x;
    }
    return {1.0 - acc, true};
}

/// S(rho) - sum_i p_i S(post_i); null branches contribute nothing.
inline MetricValue groenewold_gain(const DensityMatrix &rho, const InstrumentOutput &out) {
    double acc = von_neumann_entropy(rho).value;
    for (const Branch &b : out.branches) {
        if (const auto post = b.normalized()) {
            acc -= b.probability * von_neumann_entropy(*post).value;
        }
    }
    return {acc, true};
}

/// sum_i Q_i X Q_i, plus the leftover block when the PVM is incomplete.
inline Matrix dephase(const Matrix &x, const Pvm &q) {
    Matrix acc = Matrix::Zero(x.rows(), x.cols());
    for (const Matrix &p : q.projectors()) {
        acc += p * x * p;
    }
    const Matrix rest = q.complement();
    if (!q.complete()) {
        acc += rest * x * rest;
    }
    return acc;
}

/// S(joint || sum_i Q_i joint Q_i).
inline MetricValue intrinsic_randomness(const DensityMatrix &joint, const Pvm &q) {
    if (joint.dim() != q.dim()) {
        throw_dimension_mismatch("PVM acts on dimension " + std::to_string(q.dim()) + ", state has dimension " +
                                 std::to_string(joint.dim()));
    }
    return quantum_relative_entropy(joint, DensityMatrix::from_matrix(hermitian_part(dephase(joint.mat(), q))));
}

/// sum_i p_i log2(p_i / q_i); infinite if some p_i > 0 where q_i = 0.
inline MetricValue classical_relative_entropy(const OutcomeDistribution &p, const OutcomeDistribution &q) {
    if (p.size() != q.size()) {
        throw_dimension_mismatch("distributions have lengths " + std::to_string(p.size()) + " and " +
                                 std::to_string(q.size()));
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0) {
            continue;
        }
        if (q[i] <= 0.0) {
            return MetricValue::infinite();
        }
        acc += p[i] * std::log2(p[i] / q[i]);
    }
    return {acc, true};
}

}  // namespace nlab

#endif
