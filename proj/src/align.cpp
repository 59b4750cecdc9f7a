#include "a2sa/align.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "a2sa/dtw.hpp"
#include "a2sa/pianoroll.hpp"

namespace a2sa {

namespace {

// exact DP is preferred while the full cost matrix stays desk-sized
constexpr std::uint64_t kExactDtwCellLimit = 25'000'000;

constexpr double kMinRealignedDuration = 1e-4; // flat map segments would
                                               // otherwise zero a duration

NoteSequence remap_times(const NoteSequence& notes, const TimeMap& map) {
    NoteSequence out = notes;
    for (Note& n : out) {
        n.onset = time_map_lookup(map, n.onset);
        n.offset = std::max(time_map_lookup(map, n.offset), n.onset + kMinRealignedDuration);
    }
    return out;
}

// One synthesis + summed-matrix + DTW pass over the whole piece; both the
// audio pipeline and the note-level refinement sample this map.
TimeMap seba_time_map(const NoteSequence& stretched, const AudioBuffer& perf_audio,
                      const AlignOptions& opt, const ResourceBudget& budget,
                      AlignDiagnostics& diag) {
    const AudioBuffer score_audio = synthesize(stretched);
    budget.check_time("score synthesis");

    const Eigen::MatrixXd cost =
        seba_cost_matrix(score_audio, perf_audio, opt.frame_period, &budget);
    diag.peak_bytes_estimate =
        std::max(diag.peak_bytes_estimate,
                 static_cast<std::uint64_t>(cost.size()) * sizeof(double) * 2);

    const auto cells = static_cast<std::uint64_t>(cost.rows()) *
                       static_cast<std::uint64_t>(cost.cols());
    const DtwResult dtw = cells <= kExactDtwCellLimit
                              ? dtw_on_matrix(cost, &budget)
                              : fastdtw_on_matrix(cost, opt.radius, nullptr, &budget);
    return path_to_time_map(dtw.path, opt.frame_period, opt.frame_period);
}

} // namespace

const char* align_method_name(AlignMethod method) {
    switch (method) {
        case AlignMethod::seba: return "seba";
        case AlignMethod::tafe: return "tafe";
        case AlignMethod::eife: return "eife";
    }
    return "?";
}

NoteSequence stretch_to_duration(const NoteSequence& score, double target_duration) {
    if (score.empty()) raise(errc::empty_score, "cannot stretch an empty score");
    if (!(target_duration > 0.0)) raise(errc::usage, "target duration must be positive");

    double min_onset = std::numeric_limits<double>::infinity();
    double max_offset = -std::numeric_limits<double>::infinity();
    for (const Note& n : score) {
        min_onset = std::min(min_onset, n.onset);
        max_offset = std::max(max_offset, n.offset);
    }
    const double scale = target_duration / (max_offset - min_onset);

    NoteSequence out = score;
    for (Note& n : out) {
        n.onset = (n.onset - min_onset) * scale;
        n.offset = (n.offset - min_onset) * scale;
    }
    return out;
}

AlignmentResult align_seba(const NoteSequence& score, const AudioBuffer& perf_audio,
                           const AlignOptions& opt, const ResourceBudget& budget) {
    AlignmentResult result;
    result.method = AlignMethod::seba;

    const NoteSequence stretched = stretch_to_duration(score, perf_audio.duration());
    const TimeMap map = seba_time_map(stretched, perf_audio, opt, budget, result.diagnostics);
    result.realigned_score = remap_times(stretched, map);
    result.diagnostics.elapsed_seconds = budget.elapsed_seconds();
    return result;
}

AlignmentResult align_tafe(const NoteSequence& score, const NoteSequence& transcription,
                           double audio_duration, const AlignOptions& opt,
                           const ResourceBudget& budget) {
    AlignmentResult result;
    result.method = AlignMethod::tafe;

    const NoteSequence stretched = stretch_to_duration(score, audio_duration);
    const PianoRoll score_roll = notes_to_roll(stretched, opt.frame_period);
    const PianoRoll trans_roll = notes_to_roll(transcription, opt.frame_period);
    result.diagnostics.peak_bytes_estimate =
        static_cast<std::uint64_t>(score_roll.values.size() + trans_roll.values.size()) *
        sizeof(double);
    budget.check_time("piano rolls");

    const DtwResult dtw = fastdtw(roll_columns(score_roll), roll_columns(trans_roll),
                                  opt.distance, opt.radius, nullptr, &budget);
    const TimeMap map = path_to_time_map(dtw.path, opt.frame_period, opt.frame_period);
    result.realigned_score = remap_times(stretched, map);
    result.diagnostics.elapsed_seconds = budget.elapsed_seconds();
    return result;
}

AlignmentResult align_eife(const NoteSequence& score, const NoteSequence& transcription,
                           const AudioBuffer& perf_audio, const AlignOptions& opt,
                           const ResourceBudget& budget) {
    AlignmentResult result;
    result.method = AlignMethod::eife;

    const NoteSequence stretched = stretch_to_duration(score, perf_audio.duration());
    const NoteMatching matching = match_notes(stretched, transcription, opt.match, &budget);
    result.diagnostics.peak_bytes_estimate =
        (static_cast<std::uint64_t>(stretched.size()) + 1) *
        (static_cast<std::uint64_t>(transcription.size()) + 1);
    result.diagnostics.matched = static_cast<int>(matching.matched.size());
    result.diagnostics.missing = static_cast<int>(matching.missing.size());
    result.diagnostics.extra = static_cast<int>(matching.extra.size());

    TimeMap onset_map;
    try {
        onset_map = matching_to_time_map(matching, stretched, transcription);
    } catch (const Error& e) {
        if (e.code() != errc::too_few_matches) throw;
        AlignmentResult fallback = align_seba(score, perf_audio, opt, budget);
        fallback.method = AlignMethod::eife;
        fallback.diagnostics.matched = result.diagnostics.matched;
        fallback.diagnostics.missing = result.diagnostics.missing;
        fallback.diagnostics.extra = result.diagnostics.extra;
        fallback.diagnostics.seba_fallback = true;
        return fallback;
    }

    // interpolate everything through the matched-onset map first...
    NoteSequence realigned = stretched;
    for (Note& n : realigned) {
        n.onset = time_map_lookup(onset_map, n.onset);
        n.offset = time_map_lookup(onset_map, n.offset);
    }
    // ...then let the full-piece SEBA pass take over the non-matched notes
    const TimeMap seba_map =
        seba_time_map(stretched, perf_audio, opt, budget, result.diagnostics);
    std::vector<bool> is_matched(stretched.size(), false);
    for (const auto& [si, pi] : matching.matched) is_matched[si] = true;
    for (std::size_t i = 0; i < realigned.size(); ++i) {
        if (is_matched[i]) continue;
        realigned[i].onset = time_map_lookup(seba_map, stretched[i].onset);
        realigned[i].offset = time_map_lookup(seba_map, stretched[i].offset);
    }
    // matched notes: exact transcription onsets; offsets per configuration
    for (const auto& [si, pi] : matching.matched) {
        realigned[si].onset = transcription[pi].onset;
        realigned[si].offset = opt.offsets == OffsetSource::amt
                                   ? transcription[pi].offset
                                   : time_map_lookup(onset_map, stretched[si].offset);
    }
    for (Note& n : realigned)
        n.offset = std::max(n.offset, n.onset + kMinRealignedDuration);

    result.realigned_score = std::move(realigned);
    result.diagnostics.elapsed_seconds = budget.elapsed_seconds();
    return result;
}

} // namespace a2sa
