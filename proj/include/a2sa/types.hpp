#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "a2sa/errors.hpp"

namespace a2sa {

// A pitched event. Times are real-valued seconds everywhere; frame indices
// exist only inside pianoroll/audio feature code.
struct Note {
    int pitch = 0;             // MIDI pitch, [0, 127]
    double onset = 0.0;        // seconds, >= 0
    double offset = 0.0;       // seconds, > onset
    std::optional<int> velocity{}; // [0, 127]; never used by alignment

    friend bool operator==(const Note& a, const Note& b) {
        return a.pitch == b.pitch && a.onset == b.onset && a.offset == b.offset &&
               a.velocity == b.velocity;
    }
};

// Canonical order is ascending (onset, pitch, offset). A freshly built
// vector may be unsorted; validate_sequence() canonicalizes.
using NoteSequence = std::vector<Note>;

inline double note_duration(const Note& n) { return n.offset - n.onset; }

// Sorts into canonical order and checks Note invariants.
// Throws Error{non_positive_duration, pitch_out_of_range} with the index of
// the offending note in the *input* order.
NoteSequence validate_sequence(NoteSequence notes);

inline bool sequence_is_sorted(const NoteSequence& notes);

// One step of a DTW warping path.
struct IndexPair {
    int a = 0;
    int b = 0;
    friend bool operator==(IndexPair x, IndexPair y) { return x.a == y.a && x.b == y.b; }
};

// Monotone index correspondences: both coordinates non-decreasing,
// consecutive steps in {(1,0),(0,1),(1,1)}, endpoints (0,0)..(N-1,M-1).
using WarpingPath = std::vector<IndexPair>;

bool warping_path_is_valid(const WarpingPath& path, int size_a, int size_b);

// Partition of two note sequences: matched (score, performance) index pairs
// plus score-only ("missing") and performance-only ("extra") indices.
struct NoteMatching {
    std::vector<std::pair<int, int>> matched;
    std::vector<int> missing;
    std::vector<int> extra;
};

// Piecewise-linear continuous-time map. timeA strictly increasing, timeB
// non-decreasing; >= 2 anchors required for lookup.
struct TimeAnchor {
    double time_a = 0.0;
    double time_b = 0.0;
    friend bool operator==(TimeAnchor x, TimeAnchor y) {
        return x.time_a == y.time_a && x.time_b == y.time_b;
    }
};

struct TimeMap {
    std::vector<TimeAnchor> anchors;
};

bool time_map_is_valid(const TimeMap& map);

// Piecewise-linear interpolation; outside the anchor range extrapolates
// with the first (resp. last) segment's slope.
double time_map_lookup(const TimeMap& map, double t);

inline bool sequence_is_sorted(const NoteSequence& notes) {
    for (std::size_t i = 1; i < notes.size(); ++i) {
        const Note& p = notes[i - 1];
        const Note& n = notes[i];
        if (p.onset > n.onset) return false;
        if (p.onset == n.onset && (p.pitch > n.pitch ||
                                   (p.pitch == n.pitch && p.offset > n.offset)))
            return false;
    }
    return true;
}

} // namespace a2sa
