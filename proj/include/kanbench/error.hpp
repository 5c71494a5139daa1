#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kanbench {

enum class ErrorCode {
    invalid_domain,
    invalid_grid,
    degree_zero,
    empty_input,
    invalid_shape,
    shape_mismatch,
    stale_cache,
    softmax_not_last,
    non_one_hot,
    dimension_mismatch,
    non_finite,
    line_search_failure,
    width_rule_mismatch,
    degenerate_samples,
    insufficient_samples,
    invalid_n,
    missing_column,
    unparsable_cell,
    empty_file,
    class_too_small,
    fraction_out_of_range,
    unsupported_activation,
    io_failure,
    invalid_config,
    dataset_unresolvable,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (and tests) can branch on the kind rather than the message.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace kanbench
