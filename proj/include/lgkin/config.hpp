// Experiment configuration (line-oriented "key = value" files), run manifest
// (JSON), and the acceptance-check record types shared by the CLI and the
// acceptance suite.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lgkin/kernels.hpp"

namespace lgkin {

inline constexpr const char* kVersion = "lgkin 0.1.0";

struct ExperimentConfig {
    std::size_t n_theta = 16, n_s = 24, n_h = 16;
    double s_max = 20.0;
    double T = 10.0, dt = 0.025;
    std::string init = "cosine";  // equilibrium | cosine | custom-file
    std::string init_file;
    std::vector<Vec2> k_list{{1.0, 0.0}};
    std::size_t mode_n_theta = 64;
    std::size_t mc_particles = 1000000;
    std::uint64_t seed = 1;
    std::vector<double> snapshot_times{2, 5, 10};
    double sigma = 1.0;  // Gaussian test-function width for the pairing
    std::string out_dir = ".";
    std::string norms = "1,2,inf";

    /// Parse a config file; unknown keys are rejected with their line number.
    static ExperimentConfig from_file(const std::string& path);
    static ExperimentConfig from_string(const std::string& text, const std::string& origin);
    std::map<std::string, std::string> echo() const;
};

struct CheckResult {
    std::string name;
    double measured = 0.0;
    double threshold = 0.0;
    std::string relation;  // e.g. "<", "<=", "in"
    bool pass = false;
    std::string detail;
};

struct RunManifest {
    std::string version = kVersion;
    std::string command;
    std::map<std::string, std::string> config_echo;
    double wall_clock_sec = 0.0;
    std::vector<CheckResult> checks;
    std::map<std::string, double> constants;

    bool all_pass() const;
    std::string to_json() const;
};

/// Serialize the manifest atomically.
void write_manifest(const std::string& path, const RunManifest& m);

/// Parse "kx,ky;kx,ky;..." into wave vectors.
std::vector<Vec2> parse_k_list(const std::string& text);

}  // namespace lgkin
