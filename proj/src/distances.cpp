#include "a2sa/distances.hpp"

#include <cmath>

#include "a2sa/errors.hpp"

namespace a2sa {

const char* distance_name(DistanceKind kind) {
    switch (kind) {
        case DistanceKind::cosine: return "cosine";
        case DistanceKind::euclidean: return "euclidean";
        case DistanceKind::manhattan: return "manhattan";
        case DistanceKind::canberra: return "canberra";
        case DistanceKind::chebyshev: return "chebyshev";
        case DistanceKind::braycurtis: return "braycurtis";
        case DistanceKind::correlation: return "correlation";
    }
    return "?";
}

std::optional<DistanceKind> distance_from_name(const std::string& name) {
    for (auto kind : {DistanceKind::cosine, DistanceKind::euclidean, DistanceKind::manhattan,
                      DistanceKind::canberra, DistanceKind::chebyshev, DistanceKind::braycurtis,
                      DistanceKind::correlation}) {
        if (name == distance_name(kind)) return kind;
    }
    return std::nullopt;
}

namespace {

double cosine_of(const Eigen::Ref<const Eigen::VectorXd>& a,
                 const Eigen::Ref<const Eigen::VectorXd>& b) {
    const double na = a.norm();
    const double nb = b.norm();
    if (na == 0.0 && nb == 0.0) return 0.0;
    if (na == 0.0 || nb == 0.0) return 1.0;
    const double c = 1.0 - a.dot(b) / (na * nb);
    return c < 0.0 ? 0.0 : c;
}

} // namespace

double vector_distance(DistanceKind kind, const Eigen::Ref<const Eigen::VectorXd>& a,
                       const Eigen::Ref<const Eigen::VectorXd>& b) {
    if (a.size() != b.size())
        raise(errc::dimension_mismatch, "vectors of length " + std::to_string(a.size()) +
                                            " and " + std::to_string(b.size()));
    switch (kind) {
        case DistanceKind::cosine:
            return cosine_of(a, b);
        case DistanceKind::euclidean:
            return (a - b).norm();
        case DistanceKind::manhattan:
            return (a - b).lpNorm<1>();
        case DistanceKind::canberra: {
            double d = 0.0;
            for (Eigen::Index i = 0; i < a.size(); ++i) {
                const double den = std::abs(a[i]) + std::abs(b[i]);
                if (den > 0.0) d += std::abs(a[i] - b[i]) / den;
            }
            return d;
        }
        case DistanceKind::chebyshev:
            return (a - b).lpNorm<Eigen::Infinity>();
        case DistanceKind::braycurtis: {
            const double num = (a - b).lpNorm<1>();
            const double den = (a + b).lpNorm<1>();
            return den > 0.0 ? num / den : 0.0;
        }
        case DistanceKind::correlation: {
            const Eigen::VectorXd ca = a.array() - a.mean();
            const Eigen::VectorXd cb = b.array() - b.mean();
            return cosine_of(ca, cb);
        }
    }
    raise(errc::internal, "unknown distance kind");
}

} // namespace a2sa
