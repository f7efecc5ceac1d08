#pragma once

#include <stdexcept>
#include <string>

namespace cactus {

// Base for every typed error the library throws. `code()` is a stable
// machine-readable tag (e.g. "no_prefix_found"); what() carries the detail.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

} // namespace cactus
