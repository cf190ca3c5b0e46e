#pragma once

#include <stdexcept>
#include <string>

namespace fluidnet {

// Analysis failure tagged with a stable machine-readable code such as NOT_ERGODIC.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const { return code_; }

private:
    std::string code_;
};

}  // namespace fluidnet
