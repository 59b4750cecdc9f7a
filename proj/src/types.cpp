#include "a2sa/types.hpp"

#include <algorithm>
#include <string>

namespace a2sa {

NoteSequence validate_sequence(NoteSequence notes) {
    for (std::size_t i = 0; i < notes.size(); ++i) {
        const Note& n = notes[i];
        if (n.pitch < 0 || n.pitch > 127)
            raise(errc::pitch_out_of_range,
                  "note " + std::to_string(i) + ": pitch " + std::to_string(n.pitch) +
                      " outside [0,127]");
        if (!(n.offset > n.onset))
            raise(errc::non_positive_duration,
                  "note " + std::to_string(i) + ": offset " + std::to_string(n.offset) +
                      " not after onset " + std::to_string(n.onset));
        if (n.velocity && (*n.velocity < 0 || *n.velocity > 127))
            raise(errc::pitch_out_of_range,
                  "note " + std::to_string(i) + ": velocity outside [0,127]");
    }
    std::stable_sort(notes.begin(), notes.end(), [](const Note& a, const Note& b) {
        if (a.onset != b.onset) return a.onset < b.onset;
        if (a.pitch != b.pitch) return a.pitch < b.pitch;
        return a.offset < b.offset;
    });
    return notes;
}

bool warping_path_is_valid(const WarpingPath& path, int size_a, int size_b) {
    if (path.empty()) return false;
    if (path.front().a != 0 || path.front().b != 0) return false;
    if (path.back().a != size_a - 1 || path.back().b != size_b - 1) return false;
    for (std::size_t i = 1; i < path.size(); ++i) {
        const int da = path[i].a - path[i - 1].a;
        const int db = path[i].b - path[i - 1].b;
        const bool ok = (da == 1 && db == 0) || (da == 0 && db == 1) || (da == 1 && db == 1);
        if (!ok) return false;
    }
    return true;
}

bool time_map_is_valid(const TimeMap& map) {
    if (map.anchors.size() < 2) return false;
    for (std::size_t i = 1; i < map.anchors.size(); ++i) {
        if (!(map.anchors[i].time_a > map.anchors[i - 1].time_a)) return false;
        if (map.anchors[i].time_b < map.anchors[i - 1].time_b) return false;
    }
    return true;
}

double time_map_lookup(const TimeMap& map, double t) {
    const auto& a = map.anchors;
    if (a.size() < 2) raise(errc::too_few_anchors, "time map needs at least 2 anchors");
    // locate the segment whose [time_a_i, time_a_i+1] brackets t; edge
    // segments extend beyond the anchor range (slope extrapolation)
    std::size_t hi = 1;
    if (t >= a.back().time_a) {
        hi = a.size() - 1;
    } else if (t > a.front().time_a) {
        const auto it =
            std::upper_bound(a.begin(), a.end(), t,
                             [](double v, const TimeAnchor& x) { return v < x.time_a; });
        hi = static_cast<std::size_t>(it - a.begin());
    }
    const TimeAnchor& p = a[hi - 1];
    const TimeAnchor& q = a[hi];
    const double slope = (q.time_b - p.time_b) / (q.time_a - p.time_a);
    return p.time_b + (t - p.time_a) * slope;
}

} // namespace a2sa
