#pragma once

// Small helpers shared by the test binaries: random text generators for property tests and
// temporary paths.

#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace encyclogen::testutil {

inline std::string random_word(std::mt19937& rng, const std::vector<std::string>& pool) {
    return pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
}

inline std::vector<std::string> word_pool(std::size_t n, const std::string& prefix = "w") {
    std::vector<std::string> pool;
    for (std::size_t i = 0; i < n; ++i) pool.push_back(prefix + std::string(1, static_cast<char>('a' + i % 26)) + std::to_string(i / 26));
    return pool;
}

inline std::string random_sentence(std::mt19937& rng, const std::vector<std::string>& pool, std::size_t min_len, std::size_t max_len) {
    std::size_t n = std::uniform_int_distribution<std::size_t>(min_len, max_len)(rng);
    std::string s;
    for (std::size_t i = 0; i < n; ++i) {
        if (i) s += ' ';
        s += random_word(rng, pool);
    }
    return s + ".";
}

inline std::filesystem::path temp_path(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "encyclogen-tests";
    std::filesystem::create_directories(dir);
    auto p = dir / (name + "-" + std::to_string(std::random_device{}()));
    std::filesystem::remove_all(p);
    return p;
}

}  // namespace encyclogen::testutil
