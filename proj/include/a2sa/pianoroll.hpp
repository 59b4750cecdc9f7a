#pragma once

#include <Eigen/Core>
#include <optional>

#include "a2sa/types.hpp"

namespace a2sa {

// 3-valued pitch x frame matrix: 0 = off, 1 = sustain, 2 = onset. Onset
// frames double as DTW anchors and keep back-to-back repeated notes apart.
struct PianoRoll {
    static constexpr int kPitchCount = 128;
    static constexpr double kOff = 0.0;
    static constexpr double kSustain = 1.0;
    static constexpr double kOnset = 2.0;

    Eigen::MatrixXd values;    // kPitchCount x frames
    double frame_period = 0.02; // seconds per frame

    int frames() const { return static_cast<int>(values.cols()); }
};

inline constexpr double kDefaultFramePeriod = 0.02;

// Rasterizes a note sequence. Each note marks floor(onset/frame_period) with
// the onset value and sustains up to (excluding) ceil(offset/frame_period);
// onset marks win over sustain at collisions. total_duration == nullopt uses
// the max offset; frames outside [0, total_duration) are clipped.
PianoRoll notes_to_roll(const NoteSequence& seq, double frame_period,
                        std::optional<double> total_duration = std::nullopt);

// Frame-major adapter feeding the DTW engines (column n = the 128 pitch
// values at frame n). Returns a reference-counted copy-free view.
inline const Eigen::MatrixXd& roll_columns(const PianoRoll& roll) { return roll.values; }

} // namespace a2sa
