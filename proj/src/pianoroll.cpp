#include "a2sa/pianoroll.hpp"

#include <algorithm>
#include <cmath>

namespace a2sa {

PianoRoll notes_to_roll(const NoteSequence& seq, double frame_period,
                        std::optional<double> total_duration) {
    if (!(frame_period > 0.0))
        raise(errc::invalid_frame_period, "frame period must be positive");

    double duration = 0.0;
    if (total_duration) {
        duration = *total_duration;
    } else {
        for (const Note& n : seq) duration = std::max(duration, n.offset);
    }

    // the 1e-9 guard keeps boundary times on their intended frame despite
    // frame_period not being exactly representable
    const auto to_frame_floor = [frame_period](double t) {
        return static_cast<int>(std::floor(t / frame_period + 1e-9));
    };
    const auto to_frame_ceil = [frame_period](double t) {
        return static_cast<int>(std::ceil(t / frame_period - 1e-9));
    };

    const int frames = std::max(to_frame_ceil(duration), 0);
    PianoRoll roll;
    roll.frame_period = frame_period;
    roll.values = Eigen::MatrixXd::Zero(PianoRoll::kPitchCount, frames);

    // sustain first, then onsets so the onset value wins every collision;
    // frames outside [0, frames) are clipped
    for (const Note& n : seq) {
        const int first = to_frame_floor(n.onset);
        const int last = std::max(to_frame_ceil(n.offset), first + 1); // exclusive
        const int lo = std::clamp(first, 0, frames);
        const int hi = std::clamp(last, 0, frames);
        for (int f = lo; f < hi; ++f)
            roll.values(n.pitch, f) = std::max(roll.values(n.pitch, f), PianoRoll::kSustain);
    }
    for (const Note& n : seq) {
        const int first = to_frame_floor(n.onset);
        if (first >= 0 && first < frames) roll.values(n.pitch, first) = PianoRoll::kOnset;
    }
    return roll;
}

} // namespace a2sa
