#pragma once

#include <stdexcept>
#include <string>

namespace a2sa {

// Error taxonomy shared by the whole library. Each value maps to a CLI
// exit code through exit_code_for().
enum class errc {
    // domain / validation
    non_positive_duration,
    pitch_out_of_range,
    too_few_anchors,
    empty_sequence,
    empty_score,
    dimension_mismatch,
    negative_cost,
    empty_matrix,
    invalid_frame_period,
    frame_period_too_small,
    too_few_matches,
    too_few_notes,
    length_mismatch,
    grid_mismatch,
    empty_list,
    // io
    io_failure,
    malformed_midi,
    malformed_csv,
    malformed_json,
    schema_version_mismatch,
    malformed_wav,
    unsupported_encoding,
    // runtime
    resource_budget_exceeded,
    usage,
    internal,
};

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    errc code() const noexcept { return code_; }

private:
    errc code_;
};

const char* errc_name(errc code);

// CLI contract: 0 success, 2 input/validation error, 3 budget exceeded,
// 1 internal error.
int exit_code_for(errc code);

[[noreturn]] inline void raise(errc code, const std::string& what) { throw Error(code, what); }

} // namespace a2sa
