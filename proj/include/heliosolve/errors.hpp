#pragma once

#include <stdexcept>
#include <string>

namespace heliosolve {

// Exception carrying a machine-readable (module, code, detail) triple.
// The CLI renders these as "E:<module>:<code>:<detail>" on stderr.
class Error : public std::runtime_error {
public:
    Error(std::string module, std::string code, std::string detail)
        : std::runtime_error("E:" + module + ":" + code + ":" + detail),
          module_(std::move(module)), code_(std::move(code)), detail_(std::move(detail)) {}

    const std::string& module() const noexcept { return module_; }
    const std::string& code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    std::string module_, code_, detail_;
};

inline Error domain_error(const std::string& module, const std::string& detail) {
    return Error(module, "domain", detail);
}
inline Error accuracy_loss(const std::string& module, const std::string& detail) {
    return Error(module, "accuracy-loss", detail);
}
inline Error io_error(const std::string& module, const std::string& detail) {
    return Error(module, "io", detail);
}

}  // namespace heliosolve
