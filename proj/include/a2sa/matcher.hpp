#pragma once

#include "a2sa/budget.hpp"
#include "a2sa/types.hpp"

namespace a2sa {

// Costs for the monotone note-matching DP. Defaults keep a pitch-correct
// note within 1 s of onset error cheaper than a skip pair.
struct MatchConfig {
    double onset_weight = 1.0;          // per second of |onset difference|
    double pitch_mismatch_cost = 4.0;   // full-cost wrong pitch
    double skip_cost = 2.0;             // per skipped note (either side)
    double octave_fifth_discount = 0.5; // multiplier when off by +-12 or +-7
    double onset_window = 0.0;          // corridor: matches beyond this onset
                                        // difference are forbidden; 0 = off
};

double match_pair_cost(const Note& score, const Note& perf, const MatchConfig& cfg);

// Minimum-cost partition of two onset-sorted sequences into matched pairs,
// missing (score-only) and extra (performance-only) notes, via DP with moves
// {match, skip-score, skip-perf}. Cost ties prefer matching; between the two
// skip moves the note later in (onset, pitch, offset) order is skipped, so
// swapping the inputs transposes the result.
NoteMatching match_notes(const NoteSequence& score, const NoteSequence& perf,
                         const MatchConfig& cfg = {}, const ResourceBudget* budget = nullptr);

// Matched onsets as a continuous-time map. Pairs sharing one score onset
// collapse to the mean performance onset; score times end up strictly
// increasing. Throws TooFewMatches below 2 anchors.
TimeMap matching_to_time_map(const NoteMatching& matching, const NoteSequence& score,
                             const NoteSequence& perf);

} // namespace a2sa
