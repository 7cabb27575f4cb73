#pragma once

#include <iostream>
#include <mutex>
#include <string_view>

namespace forge {

inline std::mutex& log_mutex() {
    static std::mutex m;
    return m;
}

inline void log_warn(std::string_view msg) {
    std::lock_guard lock(log_mutex());
    std::cerr << "forge: warning: " << msg << '\n';
}

inline void log_info(std::string_view msg) {
    std::lock_guard lock(log_mutex());
    std::cerr << "forge: " << msg << '\n';
}

}  // namespace forge
