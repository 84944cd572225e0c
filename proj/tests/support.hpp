#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "caresim/config.hpp"

namespace support {

inline std::filesystem::path data_dir() { return CARESIM_DATA_DIR; }
inline std::filesystem::path mountain_config() { return data_dir() / "mountain_town" / "config.json"; }

/// Fresh, empty scratch directory under the build tree.
inline std::filesystem::path scratch(const std::string& name)
{
    auto p = std::filesystem::path(CARESIM_SCRATCH_DIR) / name;
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

inline std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void spit(const std::filesystem::path& p, const std::string& s)
{
    std::ofstream out(p, std::ios::binary);
    out << s;
}

} // namespace support
