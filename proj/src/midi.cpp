#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <vector>

#include "a2sa/io.hpp"

namespace a2sa {

namespace {

struct ByteReader {
    const std::vector<std::uint8_t>& data;
    std::size_t pos = 0;

    bool eof() const { return pos >= data.size(); }

    std::uint8_t u8() {
        if (pos >= data.size()) raise(errc::malformed_midi, "unexpected end of file");
        return data[pos++];
    }

    std::uint32_t u16() {
        const std::uint32_t hi = u8();
        return (hi << 8) | u8();
    }

    std::uint32_t u32() {
        const std::uint32_t hi = u16();
        return (hi << 16) | u16();
    }

    std::uint32_t vlq() {
        std::uint32_t value = 0;
        for (int i = 0; i < 4; ++i) {
            const std::uint8_t byte = u8();
            value = (value << 7) | (byte & 0x7f);
            if (!(byte & 0x80)) return value;
        }
        raise(errc::malformed_midi, "variable-length quantity longer than 4 bytes");
    }

    void skip(std::size_t n) {
        if (pos + n > data.size()) raise(errc::malformed_midi, "unexpected end of file");
        pos += n;
    }

    void expect_magic(const char* magic) {
        for (const char* p = magic; *p; ++p)
            if (u8() != static_cast<std::uint8_t>(*p))
                raise(errc::malformed_midi, std::string("missing chunk marker ") + magic);
    }
};

struct NoteEvent {
    std::int64_t tick = 0;
    int order = 0; // 0 = note-off, 1 = note-on; offs sort first within a tick
    int channel = 0;
    int pitch = 0;
    int velocity = 0;
};

struct TempoEvent {
    std::int64_t tick = 0;
    double us_per_quarter = 500000.0;
};

// Piecewise-linear tick clock for PPQ files; SMPTE division is a fixed rate.
class TickClock {
public:
    TickClock(int division, std::vector<TempoEvent> tempi) {
        if (division & 0x8000) {
            const int fps_code = 256 - ((division >> 8) & 0xff);
            const double fps = fps_code == 29 ? 29.97 : static_cast<double>(fps_code);
            const int ticks_per_frame = division & 0xff;
            if (fps <= 0 || ticks_per_frame <= 0)
                raise(errc::malformed_midi, "bad SMPTE division");
            smpte_rate_ = fps * ticks_per_frame;
            return;
        }
        if (division <= 0) raise(errc::malformed_midi, "bad PPQ division");
        ppq_ = division;
        std::stable_sort(tempi.begin(), tempi.end(),
                         [](const TempoEvent& a, const TempoEvent& b) { return a.tick < b.tick; });
        double seconds = 0.0;
        std::int64_t tick = 0;
        double uspq = 500000.0;
        for (const TempoEvent& t : tempi) {
            seconds += static_cast<double>(t.tick - tick) * uspq / (1e6 * ppq_);
            tick = t.tick;
            uspq = t.us_per_quarter;
            segments_.push_back({tick, seconds, uspq});
        }
        if (segments_.empty() || segments_.front().tick > 0)
            segments_.insert(segments_.begin(), {0, 0.0, 500000.0});
    }

    double seconds_at(std::int64_t tick) const {
        if (smpte_rate_ > 0.0) return static_cast<double>(tick) / smpte_rate_;
        auto it = std::upper_bound(
            segments_.begin(), segments_.end(), tick,
            [](std::int64_t t, const Segment& s) { return t < s.tick; });
        const Segment& seg = *std::prev(it);
        return seg.seconds + static_cast<double>(tick - seg.tick) * seg.uspq / (1e6 * ppq_);
    }

private:
    struct Segment {
        std::int64_t tick;
        double seconds;
        double uspq;
    };
    std::vector<Segment> segments_;
    int ppq_ = 0;
    double smpte_rate_ = 0.0;
};

void parse_track(ByteReader& r, std::vector<NoteEvent>& notes, std::vector<TempoEvent>& tempi) {
    r.expect_magic("MTrk");
    const std::uint32_t length = r.u32();
    const std::size_t end = r.pos + length;
    if (end > r.data.size()) raise(errc::malformed_midi, "track length beyond end of file");

    std::int64_t tick = 0;
    std::uint8_t running_status = 0;
    while (r.pos < end) {
        tick += r.vlq();
        std::uint8_t status = r.data[r.pos];
        if (status & 0x80) {
            ++r.pos;
        } else {
            if (!(running_status & 0x80))
                raise(errc::malformed_midi, "data byte without running status");
            status = running_status;
        }

        if (status == 0xff) {
            const std::uint8_t type = r.u8();
            const std::uint32_t len = r.vlq();
            if (type == 0x51 && len == 3) {
                const double uspq = (static_cast<double>(r.u8()) * 65536.0) +
                                    (static_cast<double>(r.u8()) * 256.0) +
                                    static_cast<double>(r.u8());
                tempi.push_back({tick, uspq});
            } else {
                r.skip(len);
                if (type == 0x2f) break; // end of track
            }
            continue;
        }
        if (status == 0xf0 || status == 0xf7) {
            r.skip(r.vlq());
            continue;
        }
        if (status < 0x80) raise(errc::malformed_midi, "invalid status byte");
        running_status = status;

        const int kind = status >> 4;
        const int channel = status & 0x0f;
        switch (kind) {
            case 0x8:
            case 0x9: {
                const int pitch = r.u8() & 0x7f;
                const int velocity = r.u8() & 0x7f;
                const bool is_on = kind == 0x9 && velocity > 0;
                if (channel != 9) // drop percussion
                    notes.push_back({tick, is_on ? 1 : 0, channel, pitch, velocity});
                break;
            }
            case 0xa:
            case 0xb:
            case 0xe:
                r.skip(2);
                break;
            case 0xc:
            case 0xd:
                r.skip(1);
                break;
            default:
                raise(errc::malformed_midi, "unsupported status byte");
        }
    }
    r.pos = end;
}

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(errc::io_failure, "cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void append_vlq(std::vector<std::uint8_t>& out, std::uint32_t value) {
    std::uint8_t bytes[4];
    int n = 0;
    do {
        bytes[n++] = value & 0x7f;
        value >>= 7;
    } while (value > 0);
    for (int i = n - 1; i > 0; --i) out.push_back(bytes[i] | 0x80);
    out.push_back(bytes[0]);
}

} // namespace

NoteSequence read_midi(const std::filesystem::path& path) {
    const auto bytes = slurp(path);
    ByteReader r{bytes};

    r.expect_magic("MThd");
    if (r.u32() != 6) raise(errc::malformed_midi, "bad header length");
    const std::uint32_t format = r.u16();
    const std::uint32_t ntracks = r.u16();
    const int division = static_cast<int>(r.u16());
    if (format > 1) raise(errc::malformed_midi, "only SMF type 0 and 1 are supported");

    std::vector<NoteEvent> events;
    std::vector<TempoEvent> tempi;
    for (std::uint32_t t = 0; t < ntracks; ++t) parse_track(r, events, tempi);

    const TickClock clock(division, std::move(tempi));
    std::stable_sort(events.begin(), events.end(), [](const NoteEvent& a, const NoteEvent& b) {
        if (a.tick != b.tick) return a.tick < b.tick;
        return a.order < b.order; // offs before ons at the same tick
    });

    NoteSequence notes;
    std::map<std::pair<int, int>, std::size_t> open; // (channel, pitch) -> index
    std::int64_t last_tick = 0;
    for (const NoteEvent& e : events) {
        last_tick = std::max(last_tick, e.tick);
        const auto key = std::make_pair(e.channel, e.pitch);
        const double t = clock.seconds_at(e.tick);
        const auto it = open.find(key);
        if (e.order == 1) {
            if (it != open.end()) {
                notes[it->second].offset = t; // overlapping same-pitch note
                open.erase(it);
            }
            notes.push_back({e.pitch, t, t, e.velocity});
            open[key] = notes.size() - 1;
        } else if (it != open.end()) {
            notes[it->second].offset = t;
            open.erase(it);
        }
    }
    const double final_time = clock.seconds_at(last_tick);
    for (const auto& [key, idx] : open) notes[idx].offset = final_time;

    // zero-length notes (degenerate files, same-tick on/off) keep one tick
    const double tick_seconds = clock.seconds_at(1) - clock.seconds_at(0);
    for (Note& n : notes)
        if (n.offset <= n.onset) n.offset = n.onset + std::max(tick_seconds, 1e-9);

    return validate_sequence(std::move(notes));
}

void write_midi(const NoteSequence& seq, const std::filesystem::path& path) {
    struct WireEvent {
        std::int64_t tick;
        int order; // offs first within a tick
        int pitch;
        int velocity;
    };
    std::vector<WireEvent> events;
    events.reserve(seq.size() * 2);
    for (const Note& n : seq) {
        // ticks cannot go negative; clamp anything reaching before t=0
        const auto on = std::max<std::int64_t>(
            0, static_cast<std::int64_t>(std::llround(n.onset * kMidiWriteTicksPerSecond)));
        auto off = static_cast<std::int64_t>(std::llround(n.offset * kMidiWriteTicksPerSecond));
        if (off <= on) off = on + 1;
        events.push_back({on, 1, n.pitch, n.velocity.value_or(64)});
        events.push_back({off, 0, n.pitch, 0});
    }
    std::sort(events.begin(), events.end(), [](const WireEvent& a, const WireEvent& b) {
        if (a.tick != b.tick) return a.tick < b.tick;
        if (a.order != b.order) return a.order < b.order;
        return a.pitch < b.pitch;
    });

    std::vector<std::uint8_t> track;
    // fixed 120 BPM
    track.insert(track.end(), {0x00, 0xff, 0x51, 0x03, 0x07, 0xa1, 0x20});
    std::int64_t tick = 0;
    for (const WireEvent& e : events) {
        append_vlq(track, static_cast<std::uint32_t>(e.tick - tick));
        tick = e.tick;
        track.push_back(e.order == 1 ? 0x90 : 0x80);
        track.push_back(static_cast<std::uint8_t>(e.pitch));
        track.push_back(static_cast<std::uint8_t>(e.order == 1 ? e.velocity : 64));
    }
    track.insert(track.end(), {0x00, 0xff, 0x2f, 0x00});

    std::vector<std::uint8_t> out;
    const auto push_u16 = [&out](std::uint32_t v) {
        out.push_back((v >> 8) & 0xff);
        out.push_back(v & 0xff);
    };
    const auto push_u32 = [&out](std::uint32_t v) {
        out.push_back((v >> 24) & 0xff);
        out.push_back((v >> 16) & 0xff);
        out.push_back((v >> 8) & 0xff);
        out.push_back(v & 0xff);
    };
    out.insert(out.end(), {'M', 'T', 'h', 'd'});
    push_u32(6);
    push_u16(0); // type 0
    push_u16(1);
    push_u16(kMidiWritePpq);
    out.insert(out.end(), {'M', 'T', 'r', 'k'});
    push_u32(static_cast<std::uint32_t>(track.size()));
    out.insert(out.end(), track.begin(), track.end());

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) raise(errc::io_failure, "cannot open " + path.string() + " for writing");
    f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (!f) raise(errc::io_failure, "short write to " + path.string());
}

} // namespace a2sa
