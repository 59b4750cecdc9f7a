#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "a2sa/types.hpp"

namespace a2sa {

// Binned empirical distribution: len(edges) == len(counts) + 1, edges
// strictly increasing, counts non-negative with positive total for sampling.
struct Histogram {
    std::vector<double> edges;
    std::vector<double> counts;

    friend bool operator==(const Histogram& a, const Histogram& b) {
        return a.edges == b.edges && a.counts == b.counts;
    }
};

bool histogram_is_sampleable(const Histogram& h);

// Statistical misalignment model: standardized per-note onset shifts and
// duration ratios plus the piece-level means and standard deviations of both.
struct MisalignmentModel {
    Histogram x_ons;     // standardized onset misalignments
    Histogram x_dur;     // standardized duration ratios
    Histogram y_ons_m;   // piece-level onset-shift means
    Histogram y_ons_std; // piece-level onset-shift standard deviations
    Histogram y_dur_m;   // piece-level duration-ratio means
    Histogram y_dur_std; // piece-level duration-ratio standard deviations

    friend bool operator==(const MisalignmentModel& a, const MisalignmentModel& b) {
        return a.x_ons == b.x_ons && a.x_dur == b.x_dur && a.y_ons_m == b.y_ons_m &&
               a.y_ons_std == b.y_ons_std && a.y_dur_m == b.y_dur_m &&
               a.y_dur_std == b.y_dur_std;
    }
};

inline constexpr int kModelBinCount = 100;

struct AlignedPair {
    NoteSequence score; // stretched to the performance duration
    NoteSequence perf;
    NoteMatching matching;
};

// Builds the six histograms from matched notes of score/performance pairs.
// Per piece, onset misalignment (perf onset - score onset) and duration
// ratio (perf/score) series are standardized; a zero-variance series
// contributes standardized values of 0 and a piece std of 0.
MisalignmentModel fit_model(const std::vector<AlignedPair>& pairs);

// Draws piece-level (mean, std) once and per-note standardized values, then
// de-standardizes: onset += z*s + m, duration *= max(z*s + m, 0.05). Bit-
// deterministic for a fixed seed.
NoteSequence sample_misaligned(const NoteSequence& score, const MisalignmentModel& model,
                               std::uint64_t seed);

inline constexpr double kDurationRatioFloor = 0.05;

// Single-linkage clustering of onset times, stopping once every
// inter-cluster gap is >= threshold; each note's onset becomes its cluster
// mean. Omitted threshold is drawn uniformly from [0.03, 0.07] by seed.
// Offsets that end up <= the new onset are clamped to onset + 0.01.
NoteSequence cluster_chord_onsets(const NoteSequence& seq, std::optional<double> threshold,
                                  std::uint64_t seed);

struct MissingExtraLabels {
    std::vector<int> missing; // original score indices
    std::vector<int> extra;
    double p_missing = 0.0;   // region-label probability drawn for the piece
    int requested = 0;        // n, the total number of labeled notes
};

struct MissingExtraResult {
    NoteSequence score_without_extras;
    MissingExtraLabels labels;
};

// Labels contiguous note regions as missing/extra until n ~ U(0.1L, 0.5L)
// notes are covered; each region is missing with probability p1 ~
// U(0.25, 0.75), extra otherwise. The returned sequence has the extra-
// labeled notes removed; consumers drop the missing-labeled counterparts
// from the transcription side.
MissingExtraResult inject_missing_extra(const NoteSequence& score, std::uint64_t seed);

} // namespace a2sa
