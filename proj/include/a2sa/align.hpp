#pragma once

#include <cstdint>
#include <string>

#include "a2sa/audio.hpp"
#include "a2sa/budget.hpp"
#include "a2sa/distances.hpp"
#include "a2sa/matcher.hpp"
#include "a2sa/pianoroll.hpp"
#include "a2sa/types.hpp"

namespace a2sa {

enum class AlignMethod { seba, tafe, eife };

const char* align_method_name(AlignMethod method);

// Where realigned note offsets come from in the note-level pipeline:
// interpolation through the matched-onset time map (default; transcription
// offsets are unreliable) or copied from the transcription.
enum class OffsetSource { interp, amt };

struct AlignDiagnostics {
    int matched = 0;
    int missing = 0;
    int extra = 0;
    double elapsed_seconds = 0.0;
    std::uint64_t peak_bytes_estimate = 0;
    bool seba_fallback = false; // note-level pipeline fell back to full SEBA
};

// realigned_score keeps the input score's note count, pitches and identity
// order; only times move to the performance domain.
struct AlignmentResult {
    NoteSequence realigned_score;
    AlignMethod method = AlignMethod::seba;
    AlignDiagnostics diagnostics;
};

struct AlignOptions {
    double frame_period = kDefaultFramePeriod;
    DistanceKind distance = DistanceKind::cosine; // roll alignment default
    int radius = 178;                             // FastDTW corridor radius
    OffsetSource offsets = OffsetSource::interp;
    MatchConfig match;
};

inline constexpr int kDefaultRadius = 178;

// Translate the earliest onset to 0 and scale so the last offset lands on
// target_duration (the performance's average-BPM time base).
NoteSequence stretch_to_duration(const NoteSequence& score, double target_duration);

// Audio-domain pipeline: synthesize the stretched score, build the summed
// cost matrix, DTW (corridor search once the matrix outgrows the exact-DP
// budget) and remap the score times through the path.
AlignmentResult align_seba(const NoteSequence& score, const AudioBuffer& perf_audio,
                           const AlignOptions& opt = {},
                           const ResourceBudget& budget = ResourceBudget());

// Frame-level transcription pipeline: 3-valued rolls of stretched score and
// transcription, FastDTW between the roll columns, remap through the path.
// Transcription note times are never copied.
AlignmentResult align_tafe(const NoteSequence& score, const NoteSequence& transcription,
                           double audio_duration, const AlignOptions& opt = {},
                           const ResourceBudget& budget = ResourceBudget());

// Note-level pipeline: match stretched score against the transcription;
// matched notes take their partner's onset, everything non-matched gets the
// full-piece SEBA refinement; matched offsets follow opt.offsets. Fewer than
// 2 matches falls back to SEBA for the whole piece.
AlignmentResult align_eife(const NoteSequence& score, const NoteSequence& transcription,
                           const AudioBuffer& perf_audio, const AlignOptions& opt = {},
                           const ResourceBudget& budget = ResourceBudget());

} // namespace a2sa
