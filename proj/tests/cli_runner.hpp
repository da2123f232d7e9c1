#pragma once

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace l1inf::testing {

/// Runs the CLI with `args`, output streams discarded unless redirected in
/// `args`. Returns the exit status, or -1 if the process did not exit.
inline int run_cli(const std::string& args) {
    const std::string cmd = std::string("\"") + L1INF_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    if (rc == -1 || !WIFEXITED(rc)) {
        return -1;
    }
    return WEXITSTATUS(rc);
}

inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::path(L1INF_TEST_TMPDIR) / name;
    std::filesystem::create_directories(dir);
    return dir;
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream(p) << text;
}

inline std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline nlohmann::json read_json(const std::filesystem::path& p) {
    std::ifstream in(p);
    return nlohmann::json::parse(in);
}

inline std::string q(const std::filesystem::path& p) {
    return "\"" + p.string() + "\"";
}

} // namespace l1inf::testing
