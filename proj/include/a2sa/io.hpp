#pragma once

#include <filesystem>
#include <string>

#include "a2sa/misalign.hpp"
#include "a2sa/types.hpp"

namespace a2sa {

// Standard MIDI File input: type 0/1, all tracks merged, times in seconds
// via the file's tempo map, channel-10 percussion excluded. Note-on with
// velocity 0 is a note-off; a second note-on on an open pitch closes the
// first; note-ons left open are closed at the final event time.
NoteSequence read_midi(const std::filesystem::path& path);

// SMF type 0 output at a fixed 120 BPM and 960 PPQ. Round-trips through
// read_midi up to one tick (1/1920 s) of quantization.
void write_midi(const NoteSequence& seq, const std::filesystem::path& path);

inline constexpr int kMidiWritePpq = 960;
inline constexpr double kMidiWriteTicksPerSecond = 1920.0; // 960 PPQ at 120 BPM

// Note CSV: UTF-8, LF line endings, mandatory header
// `onset_sec,offset_sec,pitch,velocity`, velocity column may be empty.
// Times are printed losslessly (shortest round-trip decimal form).
NoteSequence read_notes_csv(const std::filesystem::path& path);
void write_notes_csv(const NoteSequence& seq, const std::filesystem::path& path);

// Dispatch on extension: .mid/.midi/.smf go through MIDI, everything else
// through CSV.
NoteSequence read_notes_auto(const std::filesystem::path& path);

// Misalignment-model JSON, schema version 1: six histogram objects of the
// form {"edges":[...],"counts":[...]}.
MisalignmentModel read_model_json(const std::filesystem::path& path);
void write_model_json(const MisalignmentModel& model, const std::filesystem::path& path);

} // namespace a2sa
