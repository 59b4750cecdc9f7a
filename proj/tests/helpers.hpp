#pragma once

#include <atomic>
#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>

#include "a2sa/io.hpp"
#include "a2sa/rng.hpp"
#include "a2sa/types.hpp"

namespace testutil {

// Unique scratch directory, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("a2sa_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

// The MIDI writer's quantized image of a sequence (960 PPQ at 120 BPM);
// read_midi returns exactly this, re-sorted canonically.
inline a2sa::NoteSequence quantize_to_midi_ticks(const a2sa::NoteSequence& seq) {
    a2sa::NoteSequence out = seq;
    for (a2sa::Note& n : out) {
        auto on = std::llround(n.onset * a2sa::kMidiWriteTicksPerSecond);
        auto off = std::llround(n.offset * a2sa::kMidiWriteTicksPerSecond);
        if (off <= on) off = on + 1;
        n.onset = static_cast<double>(on) / a2sa::kMidiWriteTicksPerSecond;
        n.offset = static_cast<double>(off) / a2sa::kMidiWriteTicksPerSecond;
        if (!n.velocity) n.velocity = 64;
    }
    return a2sa::validate_sequence(std::move(out));
}

// Random valid sequence; same-pitch notes never overlap, so it survives a
// MIDI round trip.
inline a2sa::NoteSequence random_sequence(a2sa::Rng& rng, int count, double max_time = 30.0) {
    a2sa::NoteSequence notes;
    std::vector<double> last_offset(128, 0.0);
    for (int i = 0; i < count; ++i) {
        a2sa::Note n;
        n.pitch = static_cast<int>(rng.uniform_int(21, 108));
        const double start = std::max(rng.uniform(0.0, max_time), last_offset[n.pitch] + 0.002);
        n.onset = start;
        n.offset = start + rng.uniform(0.01, 1.5);
        last_offset[n.pitch] = n.offset;
        if (rng.bernoulli(0.8)) n.velocity = static_cast<int>(rng.uniform_int(1, 127));
        notes.push_back(n);
    }
    return a2sa::validate_sequence(std::move(notes));
}

// Melodic piano-style fixture: chords and runs at a steady pace, distinct
// enough for spectral features.
inline a2sa::NoteSequence piano_fixture(a2sa::Rng& rng, int count, double note_spacing = 0.2) {
    static const int kScale[] = {0, 2, 4, 5, 7, 9, 11};
    a2sa::NoteSequence notes;
    double t = 0.0;
    int degree = 14; // around middle C on the scale ladder
    for (int i = 0; i < count;) {
        degree += static_cast<int>(rng.uniform_int(-3, 3));
        degree = std::clamp(degree, 7, 28);
        const int pitch = 36 + 12 * (degree / 7) + kScale[degree % 7];
        const double dur = note_spacing * rng.uniform(1.2, 2.8);
        notes.push_back({pitch, t, t + dur, 80});
        ++i;
        if (i < count && rng.bernoulli(0.25)) { // chord tone
            const int third = std::min(degree + 2, 28);
            const int chord_pitch = 36 + 12 * (third / 7) + kScale[third % 7];
            if (chord_pitch != pitch) {
                notes.push_back({chord_pitch, t, t + dur * 0.9, 70});
                ++i;
            }
        }
        t += note_spacing * rng.uniform(0.8, 1.4);
    }
    return a2sa::validate_sequence(std::move(notes));
}

} // namespace testutil
