#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>

namespace a2sa {

// The seven feature-space distances selectable for roll/feature DTW.
enum class DistanceKind {
    cosine,
    euclidean,
    manhattan,
    canberra,
    chebyshev,
    braycurtis,
    correlation,
};

const char* distance_name(DistanceKind kind);
std::optional<DistanceKind> distance_from_name(const std::string& name);

// Distance between two equal-length vectors; always finite and >= 0.
// Zero-vector convention for the normalized distances (cosine/correlation):
// two degenerate vectors are identical (distance 0), a degenerate vector
// against a regular one is maximally far (distance 1).
double vector_distance(DistanceKind kind, const Eigen::Ref<const Eigen::VectorXd>& a,
                       const Eigen::Ref<const Eigen::VectorXd>& b);

} // namespace a2sa
