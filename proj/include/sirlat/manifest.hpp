#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/crc.hpp>

namespace sirlat {

inline constexpr const char* kVersion = "0.1.0";

/// CRC-32 (IEEE) of a file's bytes, as 8 hex digits.
inline std::string file_crc32(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + path.string());
    }
    boost::crc_32_type crc;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        crc.process_bytes(buf, static_cast<std::size_t>(in.gcount()));
    }
    std::ostringstream hex;
    hex << std::hex << std::setw(8) << std::setfill('0') << crc.checksum();
    return hex.str();
}

/// Record of one command run: the effective configuration, the outputs and
/// their checksums. Only `wall_clock_seconds` varies between identical runs.
struct RunManifest {
    std::string command;
    std::vector<std::pair<std::string, std::string>> config;
    std::vector<std::string> outputs;  ///< paths relative to the output directory
    double wall_clock_seconds = 0.0;

    void note(const std::string& key, const std::string& value) { config.emplace_back(key, value); }

    void write(const std::filesystem::path& dir, const std::string& name = "manifest.txt") const
    {
        std::ofstream out(dir / name);
        out << "software=sirlat\n";
        out << "version=" << kVersion << '\n';
        out << "command=" << command << '\n';
        for (const auto& [k, v] : config) {
            out << "config." << k << '=' << v << '\n';
        }
        std::ostringstream wall;
        wall << std::fixed << std::setprecision(3) << wall_clock_seconds;
        out << "wall_clock_seconds=" << wall.str() << '\n';
        for (const auto& f : outputs) {
            const auto p = dir / f;
            out << "output." << f << "=crc32:" << file_crc32(p) << " bytes:" << std::filesystem::file_size(p)
                << '\n';
        }
    }
};

/// Wall-clock stopwatch.
class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}

    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

}  // namespace sirlat
