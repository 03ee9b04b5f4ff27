#pragma once

#include <optional>

#include "lsmor/state_space.hpp"

namespace lsmor {

struct GramianSet {
    MatrixXd p;                     // reachability, noise weighted
    MatrixXd q;                     // observability
    std::optional<MatrixXd> p_det;  // variant with identity noise covariance
};

struct FiniteTimeGramian {
    double t = 0.0;
    MatrixXd value;
};

// Solves A P + P A^T = -B q_m B^T. q_m must be symmetric PSD (m x m);
// identity q_m yields the deterministic Gramian.
MatrixXd reachability_gramian(const StateSpaceSystem& sys, const MatrixXd& q_m);

// Solves A^T Q + Q A = -C^T C.
MatrixXd observability_gramian(const StateSpaceSystem& sys);

GramianSet compute_gramians(const StateSpaceSystem& sys, const MatrixXd& q_m,
                            bool with_deterministic = false);

// Integrates Xdot = A X + X A^T + B q_m B^T from X(0) = 0 with the classical
// fourth-order one-step method. Requires h * ||A||_2 < 0.1.
FiniteTimeGramian finite_time_gramian(const StateSpaceSystem& sys, const MatrixXd& q_m,
                                      double t, int steps);

enum class ImageRelation { Equal, XSubsetY, YSubsetX, Incomparable };

// Compares the column spaces of two symmetric PSD matrices at the numerical
// rank threshold rank_tol (relative to each argument's largest eigenvalue).
// The zero matrix compares as a subset of everything.
ImageRelation image_relation(const MatrixXd& x, const MatrixXd& y, double rank_tol);

const char* to_string(ImageRelation rel);

}  // namespace lsmor
