#ifndef DAGFAULT_LOG_HPP_
#define DAGFAULT_LOG_HPP_

#include <cstdlib>
#include <cstring>
#include <iostream>
#include <sstream>
#include <string>

namespace dagfault::log {

enum class Level { debug = 0, info = 1, warn = 2, error = 3, off = 4 };

// Level comes from the DAGFAULT_LOG env var: debug|info|warn|error|off.
inline Level threshold() {
    static Level lvl = [] {
        const char* e = std::getenv("DAGFAULT_LOG");
        if (!e) return Level::warn;
        if (!std::strcmp(e, "debug")) return Level::debug;
        if (!std::strcmp(e, "info")) return Level::info;
        if (!std::strcmp(e, "warn")) return Level::warn;
        if (!std::strcmp(e, "error")) return Level::error;
        if (!std::strcmp(e, "off")) return Level::off;
        return Level::warn;
    }();
    return lvl;
}

inline void emit(Level lvl, const std::string& msg) {
    if (lvl < threshold()) return;
    static const char* names[] = {"debug", "info", "warn", "error"};
    std::cerr << "[dagfault:" << names[static_cast<int>(lvl)] << "] " << msg
              << "\n";
}

inline void debug(const std::string& m) { emit(Level::debug, m); }
inline void info(const std::string& m) { emit(Level::info, m); }
inline void warn(const std::string& m) { emit(Level::warn, m); }
inline void error(const std::string& m) { emit(Level::error, m); }

}  // namespace dagfault::log

#endif  // DAGFAULT_LOG_HPP_
