#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace traclets {

/// Machine-readable reason attached to every rejected value.
enum class Violation {
    lon_out_of_range,
    lat_out_of_range,
    non_finite_value,
    time_not_increasing,
    too_few_points,
    empty_label,
    length_mismatch,
    negative_speed,
    image_too_small,
    bad_bucket_count,
    bad_ceiling,
    palette_not_distinct,
    pixel_not_in_palette,
    bad_bounding_box,
    bad_preprocess_config,
    bad_schema,
};

inline std::string_view to_string(Violation v) {
    switch (v) {
        case Violation::lon_out_of_range: return "lon_out_of_range";
        case Violation::lat_out_of_range: return "lat_out_of_range";
        case Violation::non_finite_value: return "non_finite_value";
        case Violation::time_not_increasing: return "time_not_increasing";
        case Violation::too_few_points: return "too_few_points";
        case Violation::empty_label: return "empty_label";
        case Violation::length_mismatch: return "length_mismatch";
        case Violation::negative_speed: return "negative_speed";
        case Violation::image_too_small: return "image_too_small";
        case Violation::bad_bucket_count: return "bad_bucket_count";
        case Violation::bad_ceiling: return "bad_ceiling";
        case Violation::palette_not_distinct: return "palette_not_distinct";
        case Violation::pixel_not_in_palette: return "pixel_not_in_palette";
        case Violation::bad_bounding_box: return "bad_bounding_box";
        case Violation::bad_preprocess_config: return "bad_preprocess_config";
        case Violation::bad_schema: return "bad_schema";
    }
    return "unknown";
}

/// Bad input data, files, or configuration. CLI exit code 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A value failed its type invariants.
class ValidationError : public InputError {
public:
    ValidationError(Violation reason, const std::string& detail)
        : InputError(std::string(to_string(reason)) + ": " + detail), reason_(reason) {}

    Violation reason() const noexcept { return reason_; }

private:
    Violation reason_;
};

/// An internal invariant broke; indicates a bug, not bad input. CLI exit code 3.
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace traclets
