#include "a2sa/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace a2sa {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum : std::uint8_t { kMatch = 0, kSkipScore = 1, kSkipPerf = 2, kBoundary = 3 };

bool note_key_less(const Note& a, const Note& b) {
    if (a.onset != b.onset) return a.onset < b.onset;
    if (a.pitch != b.pitch) return a.pitch < b.pitch;
    return a.offset < b.offset;
}

void require_sorted(const NoteSequence& seq, const char* name) {
    if (!sequence_is_sorted(seq))
        raise(errc::usage, std::string(name) + " sequence must be in canonical order");
}

} // namespace

double match_pair_cost(const Note& score, const Note& perf, const MatchConfig& cfg) {
    double cost = cfg.onset_weight * std::abs(score.onset - perf.onset);
    const int dp = std::abs(score.pitch - perf.pitch);
    if (dp != 0) {
        const bool near_miss = dp == 12 || dp == 7; // false octaves and fifths
        cost += cfg.pitch_mismatch_cost * (near_miss ? cfg.octave_fifth_discount : 1.0);
    }
    return cost;
}

NoteMatching match_notes(const NoteSequence& score, const NoteSequence& perf,
                         const MatchConfig& cfg, const ResourceBudget* budget) {
    require_sorted(score, "score");
    require_sorted(perf, "performance");
    const int n = static_cast<int>(score.size());
    const int m = static_cast<int>(perf.size());

    // per-row DP column bands; the onset-difference corridor narrows them
    std::vector<int> blo(static_cast<std::size_t>(n) + 1, 0);
    std::vector<int> bhi(static_cast<std::size_t>(n) + 1, m);
    if (cfg.onset_window > 0.0 && n > 0 && m > 0) {
        for (int i = 1; i <= n; ++i) {
            const double onset = score[i - 1].onset;
            const auto lo_it = std::lower_bound(
                perf.begin(), perf.end(), onset - cfg.onset_window,
                [](const Note& note, double t) { return note.onset < t; });
            const auto hi_it = std::upper_bound(
                perf.begin(), perf.end(), onset + cfg.onset_window,
                [](double t, const Note& note) { return t < note.onset; });
            blo[i] = static_cast<int>(lo_it - perf.begin());
            bhi[i] = std::min(static_cast<int>(hi_it - perf.begin()) + 1, m);
        }
        blo[0] = 0;
        bhi[n] = m;
        for (int i = 1; i <= n; ++i) blo[i] = std::max(blo[i], blo[i - 1]);
        for (int i = n - 1; i >= 0; --i) bhi[i] = std::min(std::max(bhi[i], blo[i + 1]), bhi[i + 1]);
        bhi[0] = std::max(bhi[0], blo[1]);
    }

    if (budget)
        budget->check_allocation(
            (static_cast<std::uint64_t>(n) + 1) * (static_cast<std::uint64_t>(m) + 1),
            "matcher move matrix");

    // moves are dense (backtracking), costs are two sliding rows
    std::vector<std::vector<std::uint8_t>> moves(static_cast<std::size_t>(n) + 1);
    std::vector<double> prev, cur;
    for (int i = 0; i <= n; ++i) {
        const int lo = blo[i];
        const int hi = bhi[i];
        cur.assign(static_cast<std::size_t>(hi - lo) + 1, kInf);
        moves[i].assign(static_cast<std::size_t>(hi - lo) + 1, kBoundary);
        if (budget && (i & 255) == 0) budget->check_time("note matching");

        const int plo = i > 0 ? blo[i - 1] : 0;
        const int phi = i > 0 ? bhi[i - 1] : -1;
        for (int j = lo; j <= hi; ++j) {
            double best;
            std::uint8_t mv;
            if (i == 0 && j == 0) {
                best = 0.0;
                mv = kBoundary;
            } else {
                double cm = kInf;
                if (i > 0 && j > 0 && j - 1 >= plo && j - 1 <= phi &&
                    prev[j - 1 - plo] < kInf) {
                    const Note& s = score[i - 1];
                    const Note& p = perf[j - 1];
                    if (cfg.onset_window <= 0.0 ||
                        std::abs(s.onset - p.onset) <= cfg.onset_window)
                        cm = prev[j - 1 - plo] + match_pair_cost(s, p, cfg);
                }
                const double cs = (i > 0 && j >= plo && j <= phi) ? prev[j - plo] + cfg.skip_cost
                                                                  : kInf;
                const double cp = (j > lo) ? cur[j - 1 - lo] + cfg.skip_cost : kInf;

                best = cm;
                mv = kMatch;
                if (cs < best) {
                    best = cs;
                    mv = kSkipScore;
                }
                if (cp < best) {
                    best = cp;
                    mv = kSkipPerf;
                } else if (cp == best && best < kInf && mv == kSkipScore) {
                    // equal-cost skips: drop whichever note is later so the
                    // result transposes under input swap
                    if (note_key_less(score[i - 1], perf[j - 1])) mv = kSkipPerf;
                }
            }
            cur[j - lo] = best;
            moves[i][j - lo] = best < kInf ? mv : std::uint8_t{kBoundary};
        }
        prev.swap(cur);
    }
    if (!std::isfinite(prev[m - blo[n]]))
        raise(errc::internal, "matching band does not connect the endpoints");

    NoteMatching result;
    int i = n, j = m;
    while (i > 0 || j > 0) {
        const std::uint8_t mv = moves[i][j - blo[i]];
        if (mv == kMatch) {
            result.matched.push_back({i - 1, j - 1});
            --i;
            --j;
        } else if (mv == kSkipScore) {
            result.missing.push_back(i - 1);
            --i;
        } else if (mv == kSkipPerf) {
            result.extra.push_back(j - 1);
            --j;
        } else {
            raise(errc::internal, "matcher backtrack left the computed band");
        }
    }
    std::reverse(result.matched.begin(), result.matched.end());
    std::reverse(result.missing.begin(), result.missing.end());
    std::reverse(result.extra.begin(), result.extra.end());
    return result;
}

TimeMap matching_to_time_map(const NoteMatching& matching, const NoteSequence& score,
                             const NoteSequence& perf) {
    if (matching.matched.size() < 2)
        raise(errc::too_few_matches, "need at least 2 matched pairs, have " +
                                         std::to_string(matching.matched.size()));

    std::vector<TimeAnchor> raw;
    raw.reserve(matching.matched.size());
    for (const auto& [si, pi] : matching.matched)
        raw.push_back({score[si].onset, perf[pi].onset});
    std::sort(raw.begin(), raw.end(), [](const TimeAnchor& a, const TimeAnchor& b) {
        return a.time_a < b.time_a || (a.time_a == b.time_a && a.time_b < b.time_b);
    });

    TimeMap map;
    std::size_t i = 0;
    while (i < raw.size()) {
        std::size_t j = i;
        double sum = 0.0;
        while (j < raw.size() && raw[j].time_a == raw[i].time_a) {
            sum += raw[j].time_b;
            ++j;
        }
        map.anchors.push_back({raw[i].time_a, sum / static_cast<double>(j - i)});
        i = j;
    }
    if (map.anchors.size() < 2)
        raise(errc::too_few_matches, "matched onsets collapse to fewer than 2 anchors");
    return map;
}

} // namespace a2sa
