#pragma once

#include "magsi/config.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace magsi::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kSolverFailure = 3, kThresholdViolation = 4 };

struct GlobalOptions {
    std::string config_path;
    std::string out_dir = ".";
    unsigned long seed = 0;
    bool no_timestamp = false;
};

struct ForwardArgs {
    std::string f_csv;
    std::string u_csv;
    std::string report;
};

struct DtnArgs {
    std::string f_csv;
    bool partial = false;
    std::string lambda_csv;
    std::string report;
};

struct LinearizeArgs {
    std::optional<int> order;
    bool sweep = false;
    std::string report;
};

struct IdentityArgs {
    std::optional<int> order;
    std::optional<double> threshold;
    std::string report;
};

struct DecayArgs {
    std::string zeta_kind;
    std::vector<double> h_list;
    std::optional<double> c;
    std::string csv;
    std::string report;
};

struct ReconstructArgs {
    std::optional<int> order;
    std::optional<int> K;
    std::string a_csv;
    std::string q_csv;
    std::string report;
    std::optional<double> max_error;
};

/// Report skeleton: command, seed, resolved config and (optionally) a timestamp.
nlohmann::json report_header(const std::string& command, const RunConfig& cfg, const GlobalOptions& g);
void write_report(const std::string& path, const nlohmann::json& j);
/// `name` when absolute or explicitly set, else out_dir/default_name.
std::string output_path(const GlobalOptions& g, const std::string& name, const std::string& default_name);

int run_forward(const RunConfig& cfg, const GlobalOptions& g, const ForwardArgs& a);
int run_dtn(const RunConfig& cfg, const GlobalOptions& g, const DtnArgs& a);
int run_linearize(const RunConfig& cfg, const GlobalOptions& g, const LinearizeArgs& a);
int run_verify_identity(const RunConfig& cfg, const GlobalOptions& g, const IdentityArgs& a);
int run_cgo_decay(const RunConfig& cfg, const GlobalOptions& g, const DecayArgs& a);
int run_reconstruct(const RunConfig& cfg, const GlobalOptions& g, const ReconstructArgs& a);
/// Trivial-tier checks on a small grid; one PASS/FAIL line each.
int run_selftest();

}  // namespace magsi::cli
