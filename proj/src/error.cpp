#include "kanbench/error.hpp"

namespace kanbench {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::invalid_domain: return "invalid-domain";
    case ErrorCode::invalid_grid: return "invalid-grid";
    case ErrorCode::degree_zero: return "degree-zero";
    case ErrorCode::empty_input: return "empty-input";
    case ErrorCode::invalid_shape: return "invalid-shape";
    case ErrorCode::shape_mismatch: return "shape-mismatch";
    case ErrorCode::stale_cache: return "stale-cache";
    case ErrorCode::softmax_not_last: return "softmax-not-last";
    case ErrorCode::non_one_hot: return "non-one-hot";
    case ErrorCode::dimension_mismatch: return "dimension-mismatch";
    case ErrorCode::non_finite: return "non-finite";
    case ErrorCode::line_search_failure: return "line-search-failure";
    case ErrorCode::width_rule_mismatch: return "width-rule-mismatch";
    case ErrorCode::degenerate_samples: return "degenerate-samples";
    case ErrorCode::insufficient_samples: return "insufficient-samples";
    case ErrorCode::invalid_n: return "invalid-n";
    case ErrorCode::missing_column: return "missing-column";
    case ErrorCode::unparsable_cell: return "unparsable-cell";
    case ErrorCode::empty_file: return "empty-file";
    case ErrorCode::class_too_small: return "class-too-small";
    case ErrorCode::fraction_out_of_range: return "fraction-out-of-range";
    case ErrorCode::unsupported_activation: return "unsupported-activation";
    case ErrorCode::io_failure: return "io-failure";
    case ErrorCode::invalid_config: return "invalid-config";
    case ErrorCode::dataset_unresolvable: return "dataset-unresolvable";
    }
    return "unknown";
}

}  // namespace kanbench
