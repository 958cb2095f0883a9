#pragma once

// Runs the command-line tool and captures its standard output and exit status.

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace encyclogen::testutil {

struct CliResult {
    int status = -1;
    std::string out;
};

inline std::string shell_quote(const std::string& s) {
    std::string q = "'";
    for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return q + "'";
}

inline CliResult run_cli(const std::vector<std::string>& args, const std::string& env = "") {
    std::string cmd = env.empty() ? "" : env + " ";
    cmd += shell_quote(ENCYCLOGEN_CLI);
    for (const auto& a : args) cmd += " " + shell_quote(a);
    cmd += " 2>/dev/null";
    CliResult r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    int raw = ::pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline std::string fixture(const std::string& name) { return (std::filesystem::path(ENCYCLOGEN_FIXTURES) / name).string(); }

inline std::string default_patterns() {
    return (std::filesystem::path(ENCYCLOGEN_DATA) / "patterns" / "en-default.txt").string();
}

/// `generate` over the fixture corpus for the fixture terms.
inline CliResult generate_fixture(const std::filesystem::path& store, const std::vector<std::string>& extra = {}) {
    std::vector<std::string> args{"generate", "--corpus", fixture("corpus.jsonl"), "--patterns", default_patterns(),
                                  "--lexicon", fixture("lexicon.tsv"), "--reference", fixture("reference.jsonl"),
                                  "--store", store.string(), "--term", "router", "--term", "pipeline", "--term", "cache"};
    args.insert(args.end(), extra.begin(), extra.end());
    return run_cli(args);
}

}  // namespace encyclogen::testutil
