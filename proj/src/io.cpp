#include "a2sa/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace a2sa {

namespace {

// shortest fixed-point form that round-trips, zero-padded to 6 decimals
std::string format_time(double v) {
    char buf[384];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed);
    std::string s(buf, res.ptr);
    const auto dot = s.find('.');
    if (dot == std::string::npos)
        return s + ".000000";
    const auto decimals = s.size() - dot - 1;
    if (decimals < 6) s.append(6 - decimals, '0');
    return s;
}

[[noreturn]] void bad_csv(std::size_t line, const std::string& why) {
    raise(errc::malformed_csv, "line " + std::to_string(line) + ": " + why);
}

double parse_double_field(const std::string& s, std::size_t line) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        bad_csv(line, "not a number: '" + s + "'");
    return v;
}

int parse_int_field(const std::string& s, std::size_t line) {
    int v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        bad_csv(line, "not an integer: '" + s + "'");
    return v;
}

constexpr const char* kCsvHeader = "onset_sec,offset_sec,pitch,velocity";

nlohmann::json histogram_to_json(const Histogram& h) {
    return nlohmann::json{{"edges", h.edges}, {"counts", h.counts}};
}

Histogram histogram_from_json(const nlohmann::json& j, const char* key) {
    if (!j.contains(key))
        raise(errc::schema_version_mismatch, std::string("missing histogram key '") + key + "'");
    const auto& hj = j.at(key);
    if (!hj.is_object() || !hj.contains("edges") || !hj.contains("counts"))
        raise(errc::malformed_json, std::string("histogram '") + key + "' needs edges and counts");
    Histogram h;
    h.edges = hj.at("edges").get<std::vector<double>>();
    h.counts = hj.at("counts").get<std::vector<double>>();
    if (h.edges.size() != h.counts.size() + 1)
        raise(errc::malformed_json,
              std::string("histogram '") + key + "': len(edges) must be len(counts)+1");
    for (std::size_t i = 1; i < h.edges.size(); ++i)
        if (!(h.edges[i] > h.edges[i - 1]))
            raise(errc::malformed_json,
                  std::string("histogram '") + key + "': edges must be strictly increasing");
    for (double c : h.counts)
        if (c < 0.0)
            raise(errc::malformed_json, std::string("histogram '") + key + "': negative count");
    return h;
}

} // namespace

NoteSequence read_notes_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(errc::io_failure, "cannot open " + path.string());

    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) raise(errc::malformed_csv, "missing header row");
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader)
        bad_csv(lineno, "expected header '" + std::string(kCsvHeader) + "'");

    NoteSequence notes;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::vector<std::string> fields;
        std::stringstream row(line);
        std::string field;
        while (std::getline(row, field, ',')) fields.push_back(field);
        if (line.back() == ',') fields.push_back("");
        if (fields.size() != 4) bad_csv(lineno, "expected 4 fields");

        Note n;
        n.onset = parse_double_field(fields[0], lineno);
        n.offset = parse_double_field(fields[1], lineno);
        n.pitch = parse_int_field(fields[2], lineno);
        if (!fields[3].empty()) n.velocity = parse_int_field(fields[3], lineno);
        try {
            validate_sequence({n});
        } catch (const Error& e) {
            bad_csv(lineno, std::string(errc_name(e.code())) + ": " + e.what());
        }
        notes.push_back(n);
    }
    return validate_sequence(std::move(notes));
}

void write_notes_csv(const NoteSequence& seq, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) raise(errc::io_failure, "cannot open " + path.string() + " for writing");
    out << kCsvHeader << '\n';
    for (const Note& n : seq) {
        out << format_time(n.onset) << ',' << format_time(n.offset) << ',' << n.pitch << ',';
        if (n.velocity) out << *n.velocity;
        out << '\n';
    }
    if (!out) raise(errc::io_failure, "short write to " + path.string());
}

NoteSequence read_notes_auto(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".mid" || ext == ".midi" || ext == ".smf") return read_midi(path);
    return read_notes_csv(path);
}

MisalignmentModel read_model_json(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(errc::io_failure, "cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        raise(errc::malformed_json, e.what());
    }
    if (!j.is_object() || !j.contains("version"))
        raise(errc::schema_version_mismatch, "missing model schema version");
    if (j.at("version") != 1)
        raise(errc::schema_version_mismatch, "unsupported model schema version");

    try {
        MisalignmentModel m;
        m.x_ons = histogram_from_json(j, "x_ons");
        m.x_dur = histogram_from_json(j, "x_dur");
        m.y_ons_m = histogram_from_json(j, "y_ons_m");
        m.y_ons_std = histogram_from_json(j, "y_ons_std");
        m.y_dur_m = histogram_from_json(j, "y_dur_m");
        m.y_dur_std = histogram_from_json(j, "y_dur_std");
        return m;
    } catch (const nlohmann::json::exception& e) {
        raise(errc::malformed_json, e.what());
    }
}

void write_model_json(const MisalignmentModel& model, const std::filesystem::path& path) {
    nlohmann::json j{{"version", 1},
                     {"x_ons", histogram_to_json(model.x_ons)},
                     {"x_dur", histogram_to_json(model.x_dur)},
                     {"y_ons_m", histogram_to_json(model.y_ons_m)},
                     {"y_ons_std", histogram_to_json(model.y_ons_std)},
                     {"y_dur_m", histogram_to_json(model.y_dur_m)},
                     {"y_dur_std", histogram_to_json(model.y_dur_std)}};
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) raise(errc::io_failure, "cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
    if (!out) raise(errc::io_failure, "short write to " + path.string());
}

} // namespace a2sa
