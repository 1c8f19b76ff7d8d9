#pragma once

#include <sstream>
#include <string>

namespace drlcheck {

enum class LogLevel { Off = 0, Info = 1, Debug = 2 };

// Level comes from the DRLCHECK_LOG environment variable ("info", "debug",
// "off" or empty). Parsed once, overridable for tests.
LogLevel log_level();
void set_log_level(LogLevel level);

void log_line(LogLevel level, const std::string& msg);

namespace detail {
inline void log_fold(std::ostringstream&) {}
template <typename T, typename... Rest>
void log_fold(std::ostringstream& os, const T& v, const Rest&... rest) {
    os << v;
    log_fold(os, rest...);
}
}

template <typename... Args>
void log_info(const Args&... args) {
    if (log_level() < LogLevel::Info)
        return;
    std::ostringstream os;
    detail::log_fold(os, args...);
    log_line(LogLevel::Info, os.str());
}

template <typename... Args>
void log_debug(const Args&... args) {
    if (log_level() < LogLevel::Debug)
        return;
    std::ostringstream os;
    detail::log_fold(os, args...);
    log_line(LogLevel::Debug, os.str());
}

}
