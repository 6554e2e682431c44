#pragma once

#include "winterrisk/cli/commands.hpp"
#include "winterrisk/time.hpp"

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

namespace winterrisk::testkit {

namespace fs = std::filesystem;

inline std::vector<HourStamp> hours_from(CivilHour start, std::size_t n)
{
    std::vector<HourStamp> ts(n);
    const HourStamp s = to_stamp(start);
    for (std::size_t i = 0; i < n; ++i) ts[i] = s + static_cast<std::int64_t>(i);
    return ts;
}

/// Every December-February hour of seasons first..last.
inline std::vector<HourStamp> winter_hours(int first_season, int last_season)
{
    std::vector<HourStamp> ts;
    for (int y = first_season; y <= last_season; ++y)
        for (HourStamp t = to_stamp({y - 1, 12, 1, 0}); t < to_stamp({y, 3, 1, 0}); t = t + 1) ts.push_back(t);
    return ts;
}

/// Fresh empty directory under the system temp dir.
inline fs::path scratch_dir(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / "winterrisk-tests" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

inline std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void spit(const fs::path& p, const std::string& text)
{
    fs::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << text;
}

struct CliResult {
    int code = 0;
    std::string out;
    std::string err;
};

inline CliResult run_cli(std::vector<std::string> args)
{
    std::ostringstream out, err;
    CliResult r;
    r.code = cli::run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

inline fs::path fixture_dir()
{
    return fs::path(WINTERRISK_FIXTURES) / "desk";
}

/// Copies the desk fixture into `dir` and synthesizes its weather series.
inline CliResult prepare_desk(const fs::path& dir, int years = 72)
{
    fs::copy(fixture_dir(), dir, fs::copy_options::recursive | fs::copy_options::overwrite_existing);
    std::vector<std::string> args{"synth-weather", "--out", (dir / "weather").string(),
                                  "--years", std::to_string(years), "--spells", (dir / "spells.csv").string()};
    for (const char* name : {"population", "gas", "coal", "wind-north", "wind-south"}) {
        args.push_back("--sites");
        args.push_back(std::string(name) + "=" + (dir / "sites" / (std::string(name) + ".csv")).string());
    }
    return run_cli(args);
}

}  // namespace winterrisk::testkit
