#pragma once

#include <stdexcept>
#include <string>

namespace eqa {

/// Raised for any input, shape, or numeric contract violation. CLI maps
/// these to exit code 2 (data error), as opposed to usage errors (1).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace eqa
