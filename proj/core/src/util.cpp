#include "pltig/util.hpp"

#include <iostream>

namespace pltig {

namespace {
int g_log_level = 1;
}

int log_level() { return g_log_level; }
void set_log_level(int level) { g_log_level = level; }

void log_info(const std::string& msg) {
    if (g_log_level >= 1) std::cerr << msg << "\n";
}

void log_debug(const std::string& msg) {
    if (g_log_level >= 2) std::cerr << msg << "\n";
}

}  // namespace pltig
