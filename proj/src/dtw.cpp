#include "a2sa/dtw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace a2sa {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// moves: 0 = diagonal, 1 = (1,0) advance A, 2 = (0,1) advance B
enum : std::uint8_t { kDiag = 0, kUp = 1, kLeft = 2, kStart = 3 };

struct Window {
    std::vector<int> lo, hi; // inclusive column range per row
};

Window full_window(int n, int m) {
    Window w;
    w.lo.assign(static_cast<std::size_t>(n), 0);
    w.hi.assign(static_cast<std::size_t>(n), m - 1);
    return w;
}

// Project a coarse path one resolution level up and inflate it by `radius`
// cells in both directions. Ranges stay monotone, (0,0) and (n-1,m-1)
// included.
Window expand_window(const WarpingPath& coarse, int n, int m, int radius) {
    Window w;
    w.lo.assign(static_cast<std::size_t>(n), m);
    w.hi.assign(static_cast<std::size_t>(n), -1);
    const auto clampi = [](int v, int lim) { return std::clamp(v, 0, lim - 1); };
    for (const IndexPair& p : coarse) {
        const int r0 = clampi(2 * p.a - radius, n);
        const int r1 = clampi(2 * p.a + 1 + radius, n);
        const int c0 = clampi(2 * p.b - radius, m);
        const int c1 = clampi(2 * p.b + 1 + radius, m);
        for (int i = r0; i <= r1; ++i) {
            w.lo[i] = std::min(w.lo[i], c0);
            w.hi[i] = std::max(w.hi[i], c1);
        }
    }
    w.lo[0] = 0;
    w.hi[n - 1] = m - 1;
    for (int i = 1; i < n; ++i) w.lo[i] = std::max(w.lo[i], w.lo[i - 1]);
    for (int i = n - 2; i >= 0; --i) w.hi[i] = std::min(w.hi[i], w.hi[i + 1]);
    return w;
}

// Corridor DP over per-row column ranges. Cost storage is two sliding rows;
// backpointers are kept per window cell only.
template <typename CellCost>
DtwResult dtw_windowed(int n, int m, const Window& w, CellCost&& cell, DtwStats* stats,
                       const ResourceBudget* budget) {
    std::vector<std::vector<std::uint8_t>> moves(static_cast<std::size_t>(n));
    std::vector<double> prev, cur;
    std::uint64_t cells = 0;

    for (int i = 0; i < n; ++i) {
        const int lo = w.lo[i];
        const int hi = w.hi[i];
        const int width = hi - lo + 1;
        cur.assign(static_cast<std::size_t>(width), kInf);
        moves[i].assign(static_cast<std::size_t>(width), kStart);
        cells += static_cast<std::uint64_t>(width);
        if (budget && (i & 63) == 0) budget->check_time("dtw");

        const int plo = i > 0 ? w.lo[i - 1] : 0;
        const int phi = i > 0 ? w.hi[i - 1] : -1;
        for (int j = lo; j <= hi; ++j) {
            double best;
            std::uint8_t mv;
            if (i == 0 && j == 0) {
                best = 0.0;
                mv = kStart;
            } else {
                const double diag = (i > 0 && j > 0 && j - 1 >= plo && j - 1 <= phi)
                                        ? prev[j - 1 - plo]
                                        : kInf;
                const double up = (i > 0 && j >= plo && j <= phi) ? prev[j - plo] : kInf;
                const double left = (j > lo) ? cur[j - 1 - lo] : kInf;
                best = diag;
                mv = kDiag;
                if (up < best) {
                    best = up;
                    mv = kUp;
                }
                if (left < best) {
                    best = left;
                    mv = kLeft;
                }
            }
            if (best < kInf) {
                cur[j - lo] = best + cell(i, j);
                moves[i][j - lo] = mv;
            }
        }
        prev.swap(cur);
    }

    if (stats) stats->dp_cells += cells;

    DtwResult result;
    result.total_cost = prev[m - 1 - w.lo[n - 1]];
    if (!std::isfinite(result.total_cost))
        raise(errc::internal, "search corridor does not connect the endpoints");
    int i = n - 1, j = m - 1;
    while (true) {
        result.path.push_back({i, j});
        const std::uint8_t mv = moves[i][j - w.lo[i]];
        if (mv == kStart) break;
        if (mv == kDiag) {
            --i;
            --j;
        } else if (mv == kUp) {
            --i;
        } else {
            --j;
        }
    }
    std::reverse(result.path.begin(), result.path.end());
    return result;
}

// Column-sequence cell cost with precomputed norms for the normalized
// distances (they dominate the corridor inner loop). Correlation centers the
// columns once up front; the other kinds reference the caller's storage.
struct SeqCellCost {
    DistanceKind kind;
    Eigen::Ref<const Eigen::MatrixXd> a, b;
    Eigen::MatrixXd ca, cb; // centered columns, correlation only
    Eigen::VectorXd norm_a, norm_b;

    SeqCellCost(const Eigen::Ref<const Eigen::MatrixXd>& a_in,
                const Eigen::Ref<const Eigen::MatrixXd>& b_in, DistanceKind k)
        : kind(k), a(a_in), b(b_in) {
        if (kind == DistanceKind::correlation) {
            ca = a_in;
            cb = b_in;
            ca.array().rowwise() -= ca.colwise().mean().array();
            cb.array().rowwise() -= cb.colwise().mean().array();
            norm_a = ca.colwise().norm();
            norm_b = cb.colwise().norm();
        } else if (kind == DistanceKind::cosine) {
            norm_a = a.colwise().norm();
            norm_b = b.colwise().norm();
        }
    }

    static double normalized_distance(const Eigen::Ref<const Eigen::VectorXd>& x,
                                      const Eigen::Ref<const Eigen::VectorXd>& y, double nx,
                                      double ny) {
        if (nx == 0.0 && ny == 0.0) return 0.0;
        if (nx == 0.0 || ny == 0.0) return 1.0;
        const double c = 1.0 - x.dot(y) / (nx * ny);
        return c < 0.0 ? 0.0 : c;
    }

    double operator()(int i, int j) const {
        switch (kind) {
            case DistanceKind::cosine:
                return normalized_distance(a.col(i), b.col(j), norm_a[i], norm_b[j]);
            case DistanceKind::correlation:
                return normalized_distance(ca.col(i), cb.col(j), norm_a[i], norm_b[j]);
            default:
                return vector_distance(kind, a.col(i), b.col(j));
        }
    }
};

void check_sequences(const Eigen::Ref<const Eigen::MatrixXd>& a,
                     const Eigen::Ref<const Eigen::MatrixXd>& b) {
    if (a.cols() == 0 || b.cols() == 0) raise(errc::empty_sequence, "DTW input sequence is empty");
    if (a.rows() != b.rows())
        raise(errc::dimension_mismatch, "feature dimensions " + std::to_string(a.rows()) +
                                            " and " + std::to_string(b.rows()));
}

void check_cost_matrix(const Eigen::Ref<const Eigen::MatrixXd>& cost) {
    if (cost.rows() == 0 || cost.cols() == 0) raise(errc::empty_matrix, "empty cost matrix");
    if (!cost.allFinite() || cost.minCoeff() < 0.0)
        raise(errc::negative_cost, "cost matrix entries must be finite and non-negative");
}

Eigen::MatrixXd halve_columns(const Eigen::Ref<const Eigen::MatrixXd>& a) {
    const Eigen::Index n = a.cols();
    const Eigen::Index half = (n + 1) / 2;
    Eigen::MatrixXd out(a.rows(), half);
    for (Eigen::Index k = 0; k < n / 2; ++k)
        out.col(k) = 0.5 * (a.col(2 * k) + a.col(2 * k + 1));
    if (n % 2 != 0) out.col(half - 1) = a.col(n - 1);
    return out;
}

Eigen::MatrixXd halve_matrix(const Eigen::Ref<const Eigen::MatrixXd>& c) {
    const Eigen::Index n2 = (c.rows() + 1) / 2;
    const Eigen::Index m2 = (c.cols() + 1) / 2;
    Eigen::MatrixXd out(n2, m2);
    for (Eigen::Index i = 0; i < n2; ++i) {
        const Eigen::Index rh = std::min(2 * i + 2, c.rows());
        for (Eigen::Index j = 0; j < m2; ++j) {
            const Eigen::Index ch = std::min(2 * j + 2, c.cols());
            out(i, j) = c.block(2 * i, 2 * j, rh - 2 * i, ch - 2 * j).mean();
        }
    }
    return out;
}

int base_case_size(int radius) { return std::max(radius + 2, 10); }

template <typename CellCost>
DtwResult dtw_exact(int n, int m, CellCost&& cell, DtwStats* stats,
                    const ResourceBudget* budget) {
    return dtw_windowed(n, m, full_window(n, m), std::forward<CellCost>(cell), stats, budget);
}

DtwResult fastdtw_seq_rec(const Eigen::Ref<const Eigen::MatrixXd>& a,
                          const Eigen::Ref<const Eigen::MatrixXd>& b, DistanceKind dist,
                          int radius, DtwStats* stats, const ResourceBudget* budget) {
    const int n = static_cast<int>(a.cols());
    const int m = static_cast<int>(b.cols());
    if (n <= base_case_size(radius) || m <= base_case_size(radius))
        return dtw_exact(n, m, SeqCellCost(a, b, dist), stats, budget);

    const Eigen::MatrixXd ac = halve_columns(a);
    const Eigen::MatrixXd bc = halve_columns(b);
    const DtwResult coarse = fastdtw_seq_rec(ac, bc, dist, radius, stats, budget);
    if (stats) ++stats->levels;
    const Window w = expand_window(coarse.path, n, m, radius);
    return dtw_windowed(n, m, w, SeqCellCost(a, b, dist), stats, budget);
}

DtwResult fastdtw_matrix_rec(const Eigen::Ref<const Eigen::MatrixXd>& cost, int radius,
                             DtwStats* stats, const ResourceBudget* budget) {
    const int n = static_cast<int>(cost.rows());
    const int m = static_cast<int>(cost.cols());
    const auto cell = [&cost](int i, int j) { return cost(i, j); };
    if (n <= base_case_size(radius) || m <= base_case_size(radius))
        return dtw_exact(n, m, cell, stats, budget);

    const Eigen::MatrixXd coarse_cost = halve_matrix(cost);
    const DtwResult coarse = fastdtw_matrix_rec(coarse_cost, radius, stats, budget);
    if (stats) ++stats->levels;
    const Window w = expand_window(coarse.path, n, m, radius);
    return dtw_windowed(n, m, w, cell, stats, budget);
}

} // namespace

DtwResult dtw_full(const Eigen::Ref<const Eigen::MatrixXd>& a,
                   const Eigen::Ref<const Eigen::MatrixXd>& b, DistanceKind dist,
                   const ResourceBudget* budget) {
    check_sequences(a, b);
    if (budget)
        budget->check_allocation(static_cast<std::uint64_t>(a.cols()) *
                                     static_cast<std::uint64_t>(b.cols()),
                                 "dtw move matrix");
    return dtw_exact(static_cast<int>(a.cols()), static_cast<int>(b.cols()),
                     SeqCellCost(a, b, dist), nullptr, budget);
}

DtwResult dtw_on_matrix(const Eigen::Ref<const Eigen::MatrixXd>& cost,
                        const ResourceBudget* budget) {
    check_cost_matrix(cost);
    return dtw_exact(static_cast<int>(cost.rows()), static_cast<int>(cost.cols()),
                     [&cost](int i, int j) { return cost(i, j); }, nullptr, budget);
}

DtwResult fastdtw(const Eigen::Ref<const Eigen::MatrixXd>& a,
                  const Eigen::Ref<const Eigen::MatrixXd>& b, DistanceKind dist, int radius,
                  DtwStats* stats, const ResourceBudget* budget) {
    check_sequences(a, b);
    if (radius < 1) raise(errc::usage, "fastdtw radius must be >= 1");
    return fastdtw_seq_rec(a, b, dist, radius, stats, budget);
}

DtwResult fastdtw_on_matrix(const Eigen::Ref<const Eigen::MatrixXd>& cost, int radius,
                            DtwStats* stats, const ResourceBudget* budget) {
    check_cost_matrix(cost);
    if (radius < 1) raise(errc::usage, "fastdtw radius must be >= 1");
    return fastdtw_matrix_rec(cost, radius, stats, budget);
}

TimeMap path_to_time_map(const WarpingPath& path, double frame_period_a,
                         double frame_period_b) {
    TimeMap map;
    std::size_t i = 0;
    while (i < path.size()) {
        std::size_t j = i;
        double sum_b = 0.0;
        while (j < path.size() && path[j].a == path[i].a) {
            sum_b += static_cast<double>(path[j].b);
            ++j;
        }
        const double mean_b = sum_b / static_cast<double>(j - i);
        map.anchors.push_back({path[i].a * frame_period_a, mean_b * frame_period_b});
        i = j;
    }
    return map;
}

} // namespace a2sa
