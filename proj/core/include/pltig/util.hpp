#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace pltig {

// Exit-code conventions used by the CLI: ConfigError/UsageError map to 2,
// everything else to 1.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ParseError : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};
struct VocabError : Error {
    using Error::Error;
};
struct TrainError : Error {
    using Error::Error;
};
struct NoParseError : Error {
    using Error::Error;
};
struct IoError : Error {
    using Error::Error;
};

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double log2_add(double a, double b) {
    // log2(2^a + 2^b), safe for -inf operands.
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    if (a < b) std::swap(a, b);
    return a + std::log2(1.0 + std::exp2(b - a));
}

// Seeded RNG with explicitly specified draw algorithms so that results are
// identical across standard libraries (std::uniform_* distributions and
// std::shuffle leave the draw sequence implementation-defined).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n), rejection-sampled to avoid modulo bias.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw Error("Rng::below: n must be positive");
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t x = gen_();
            if (x >= threshold) return x % n;
        }
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    std::mt19937_64 gen_;
};

inline std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

// Global stderr verbosity: 0 = quiet, 1 = info, 2 = debug.
int log_level();
void set_log_level(int level);
void log_info(const std::string& msg);
void log_debug(const std::string& msg);

}  // namespace pltig
