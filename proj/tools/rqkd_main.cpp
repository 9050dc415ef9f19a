// Command-line front end: run, validate and list scenario files.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rqkd/result_table.hpp"
#include "rqkd/scenario.hpp"

namespace fs = std::filesystem;
using namespace rqkd;

namespace {

enum Exit { kOk = 0, kValidation = 1, kRuntime = 2, kIo = 3 };

std::string first_comment(const fs::path& p)
{
    std::ifstream in(p);
    std::string line;
    while (std::getline(in, line))
        if (line.rfind("#", 0) == 0) {
            const auto b = line.find_first_not_of("# ");
            return b == std::string::npos ? std::string() : line.substr(b);
        }
    return {};
}

int list_scenarios(const fs::path& dir)
{
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) {
        std::cerr << "rqkd: scenario directory " << dir << " not found\n";
        return kIo;
    }
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".ini")
            files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files)
        std::cout << f.filename().string() << "\t" << first_comment(f) << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Key-rate bounds for satellite QKD with restricted eavesdropping"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_path;
    std::string format_name = "csv";
    int threads = 1;
    auto* run = app.add_subcommand("run", "Evaluate a scenario and write the result table");
    run->add_option("scenario", scenario_path, "Scenario file")->required();
    run->add_option("-o,--out", out_path, "Output file (default: stdout)");
    run->add_option("--format", format_name, "csv or tsv")->check(CLI::IsMember({"csv", "tsv"}));
    run->add_option("--threads", threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "Parse and check a scenario without running it");
    validate->add_option("scenario", validate_path, "Scenario file")->required();

    std::string dir = RQKD_SCENARIO_DIR;
    auto* list = app.add_subcommand("list-scenarios", "List shipped scenario files");
    list->add_option("--dir", dir, "Scenario directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kValidation;
    }

    if (*list)
        return list_scenarios(dir);

    try {
        if (*validate) {
            const auto cfg = scenario::load_scenario(validate_path);
            std::cout << validate_path << ": ok (" << scenario::to_string(cfg.mode) << ", "
                      << cfg.sweep.points << " points)\n";
            return kOk;
        }

        const auto cfg = scenario::load_scenario(scenario_path);
        const auto table = scenario::run_scenario(cfg, threads);
        const auto format = *io::parse_format(format_name);
        if (out_path.empty()) {
            io::emit(table, format, std::cout);
        } else {
            std::ofstream out(out_path, std::ios::binary);
            if (!out)
                throw scenario::IoError("cannot open " + out_path + " for writing");
            io::emit(table, format, out);
            out.close();
            if (!out)
                throw scenario::IoError("write to " + out_path + " failed");
        }
        std::cerr << "rqkd: " << table.rows.size() << " rows in " << table.wall_time_s << " s\n";
        return kOk;
    } catch (const scenario::ScenarioError& e) {
        std::cerr << e.what() << "\n";
        return kValidation;
    } catch (const scenario::IoError& e) {
        std::cerr << "rqkd: " << e.what() << "\n";
        return kIo;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "rqkd: " << e.what() << "\n";
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "rqkd: " << e.what() << "\n";
        return kRuntime;
    }
}
