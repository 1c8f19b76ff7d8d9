#include "drlcheck/log.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>

namespace drlcheck {

namespace {

LogLevel parse_env() {
    const char* raw = std::getenv("DRLCHECK_LOG");
    if (raw == nullptr)
        return LogLevel::Off;
    std::string v(raw);
    if (v == "debug" || v == "2")
        return LogLevel::Debug;
    if (v == "info" || v == "1")
        return LogLevel::Info;
    return LogLevel::Off;
}

LogLevel g_level = parse_env();
std::mutex g_mutex;

}

LogLevel log_level() {
    return g_level;
}

void set_log_level(LogLevel level) {
    g_level = level;
}

void log_line(LogLevel level, const std::string& msg) {
    std::lock_guard<std::mutex> lock(g_mutex);
    std::cerr << (level == LogLevel::Debug ? "[drlcheck:debug] " : "[drlcheck] ")
              << msg << "\n";
}

}
