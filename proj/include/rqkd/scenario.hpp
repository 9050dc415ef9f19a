#pragma once

#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rqkd/cv_engine.hpp"
#include "rqkd/dv_engine.hpp"
#include "rqkd/lidar_monitor.hpp"
#include "rqkd/result_table.hpp"

namespace rqkd::scenario {

enum class Mode { cv_rr, cv_dr_m1, cv_dr_m2, dv_sps, dv_wcp, lidar_profile, lidar_elevation };

std::string_view to_string(Mode mode);
std::optional<Mode> parse_mode(std::string_view text);

enum class Scale { linear, log };

struct Sweep {
    std::string variable;
    double start = 0.0;
    double stop = 1.0;
    int points = 2;
    Scale scale = Scale::linear;

    std::vector<double> values() const;
};

enum class CvEvaluation { worst_case, point };

/// Everything a scenario file can set. Defaults are the nominal values used
/// throughout the figures.
struct Config {
    Mode mode = Mode::cv_rr;
    Sweep sweep;

    cv::CvScenario cv_scenario;
    cv::ChannelObservation cv_obs;
    cv::GridSpec cv_grid;
    CvEvaluation cv_evaluation = CvEvaluation::worst_case;

    dv::DvParams dv;
    dv::MuSearch mu_search;
    bool dv_optimize_mu = true;

    lidar::MonitorSetup monitor;
    lidar::RadarParams radar;
    double altitude = 500e3;   // m, orbit height for elevation sweeps
    int profile_points = 999;  // positions per pass when taking maxima
};

/// Parse and validation failures, with the offending line and key when
/// known (line 0 = not tied to a line).
class ScenarioError : public std::runtime_error {
public:
    enum class Kind { parse, validation };
    ScenarioError(Kind kind, std::string origin, int line, std::string key, const std::string& what);

    Kind kind() const { return kind_; }
    int line() const { return line_; }
    const std::string& key() const { return key_; }

private:
    Kind kind_;
    int line_;
    std::string key_;
};

/// Raised when the scenario file cannot be read.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One settable parameter: `section.key` in the file.
struct ParamSpec {
    std::string section;
    std::string key;
    std::function<void(Config&, std::string_view)> set;  // throws std::invalid_argument
    std::function<std::string(const Config&)> get;
    std::function<double*(Config&)> real;                // null unless sweepable
};

const std::vector<ParamSpec>& parameter_registry();

/// Sections a mode reads; any other section in the file is rejected.
std::vector<std::string> sections_for(Mode mode);

/// Variables the sweep may name for a mode.
std::vector<std::string> sweep_variables(Mode mode);

Config parse_scenario(std::string_view text, const std::string& origin = "<scenario>");
Config load_scenario(const std::filesystem::path& path);

/// Checks every sweep point against the engine invariants.
void validate(const Config& cfg, const std::string& origin = "<scenario>");

/// Evaluates the sweep. Rows come back in sweep order for any thread count.
io::ResultTable run_scenario(const Config& cfg, int threads = 1);

}  // namespace rqkd::scenario
