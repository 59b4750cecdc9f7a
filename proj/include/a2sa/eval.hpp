#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "a2sa/types.hpp"

namespace a2sa {

enum class TimeField { onsets, offsets };

// Ratio of index-aligned notes whose predicted time falls within each
// threshold of the truth. Ratios are non-decreasing in the threshold.
struct ThresholdCurve {
    std::vector<double> thresholds; // seconds, increasing
    std::vector<double> ratios;     // [0, 1]
};

inline const std::vector<double>& default_threshold_grid() {
    static const std::vector<double> grid{0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0};
    return grid;
}

// predicted and truth must be index-aligned (identity order preserved by the
// alignment pipelines); throws LengthMismatch otherwise.
ThresholdCurve threshold_curve(const NoteSequence& predicted, const NoteSequence& truth,
                               TimeField which, const std::vector<double>& thresholds);

double curve_ratio_at(const ThresholdCurve& curve, double threshold);

// Pointwise mean over curves sharing one threshold grid.
ThresholdCurve macro_average(const std::vector<ThresholdCurve>& curves);

struct L1Stats {
    double mean = 0.0;
    double std = 0.0; // population std across pieces
};

// Per piece, the mean |predicted - truth| of the chosen field; returns the
// across-piece (macro) mean and standard deviation.
L1Stats l1_macro_error(const std::vector<std::pair<NoteSequence, NoteSequence>>& pairs,
                       TimeField which);

// Synthetic transcriber noise, the AMT stand-in for closed-loop tests.
struct NoiseSpec {
    double onset_jitter_std = 0.0; // seconds; offsets jitter at twice this
    double pitch_error_rate = 0.0; // replaced by +-12 or +-7 semitones
    double deletion_rate = 0.0;
    double insertion_rate = 0.0;
    std::uint64_t seed = 0;
};

NoteSequence oracle_transcribe(const NoteSequence& truth, const NoiseSpec& noise);

// `threshold_sec,ratio` rows, LF line endings.
void write_curve_csv(const ThresholdCurve& curve, const std::filesystem::path& path);

} // namespace a2sa
