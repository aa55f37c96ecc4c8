#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace synclab {

// Base for all library failures so callers can catch one type.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad user-supplied configuration (unknown keys, out-of-domain parameters,
// malformed matrices).  The CLI maps this to exit code 2.
struct config_error : error {
    using error::error;
};

// A trajectory or slave state left the representable range.  last_valid is
// the index of the final finite state.
struct divergence_error : error {
    std::size_t last_valid;
    divergence_error(const std::string& msg, std::size_t lv)
        : error(msg), last_valid(lv) {}
};

// Sampling or unwrap resolution too coarse to give an unambiguous answer;
// the caller should retry with a finer grid.
struct resolution_error : error {
    using error::error;
};

// A search (fixed point, intersection) exhausted its budget without a hit.
struct not_found_error : error {
    using error::error;
};

}  // namespace synclab
