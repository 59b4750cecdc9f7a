#include "a2sa/errors.hpp"

namespace a2sa {

const char* errc_name(errc code) {
    switch (code) {
        case errc::non_positive_duration: return "NonPositiveDuration";
        case errc::pitch_out_of_range: return "PitchOutOfRange";
        case errc::too_few_anchors: return "TooFewAnchors";
        case errc::empty_sequence: return "EmptySequence";
        case errc::empty_score: return "EmptyScore";
        case errc::dimension_mismatch: return "DimensionMismatch";
        case errc::negative_cost: return "NegativeCost";
        case errc::empty_matrix: return "EmptyMatrix";
        case errc::invalid_frame_period: return "InvalidFramePeriod";
        case errc::frame_period_too_small: return "FramePeriodTooSmall";
        case errc::too_few_matches: return "TooFewMatches";
        case errc::too_few_notes: return "TooFewNotes";
        case errc::length_mismatch: return "LengthMismatch";
        case errc::grid_mismatch: return "GridMismatch";
        case errc::empty_list: return "EmptyList";
        case errc::io_failure: return "IoFailure";
        case errc::malformed_midi: return "MalformedMidi";
        case errc::malformed_csv: return "MalformedCsv";
        case errc::malformed_json: return "MalformedJson";
        case errc::schema_version_mismatch: return "SchemaVersionMismatch";
        case errc::malformed_wav: return "MalformedWav";
        case errc::unsupported_encoding: return "UnsupportedEncoding";
        case errc::resource_budget_exceeded: return "ResourceBudgetExceeded";
        case errc::usage: return "Usage";
        case errc::internal: return "Internal";
    }
    return "Unknown";
}

int exit_code_for(errc code) {
    switch (code) {
        case errc::resource_budget_exceeded:
            return 3;
        case errc::internal:
            return 1;
        default:
            return 2; // everything else is an input/validation problem
    }
}

} // namespace a2sa
