#ifndef BDDGEN_CLI_HPP
#define BDDGEN_CLI_HPP

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bddgen/prompts.hpp"
#include "bddgen/provider.hpp"
#include "bddgen/stories.hpp"

namespace bddgen::cli {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Exit codes: 0 success (lint findings allowed), 1 usage/config error,
/// 2 runtime failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitRuntime = 2;

struct RunManifest {
    std::string run_id;  // deterministic content hash, not a timestamp
    std::string timestamp;
    std::string dataset_path;
    prompts::Technique technique = prompts::Technique::ZeroShot;
    std::string provider_name;
    std::string model_id;
    llm::GenerationParams params;
    std::string prompt_digest;
    std::string tool_version;
    std::vector<std::string> feature_files;  // relative to the output root
    std::vector<std::pair<std::string, std::string>> failures;  // story id -> error
    long fence_stripped = 0;

    std::string to_json() const;
    static RunManifest from_json_file(const std::filesystem::path& path);
};

struct GenerateOptions {
    std::filesystem::path dataset;
    stories::CsvSchema schema;
    std::string provider;
    std::optional<std::filesystem::path> providers_file;
    prompts::Technique technique = prompts::Technique::ZeroShot;
    std::optional<std::filesystem::path> params_file;
    std::filesystem::path out_dir;
    std::optional<std::filesystem::path> replay;  // fixture path
    bool record = false;                          // live call, persist into --replay
    std::optional<std::filesystem::path> template_file;
    int jobs = 4;
};

struct LintOptions {
    std::filesystem::path feature_dir;
    std::optional<std::filesystem::path> lint_config;
    std::filesystem::path report_path;
};

struct EvaluateOptions {
    std::vector<std::filesystem::path> reports;
    std::vector<std::filesystem::path> manifests;
    std::filesystem::path out_dir;
};

struct RunOptions {
    std::filesystem::path dataset;
    stories::CsvSchema schema;
    std::vector<std::string> providers;
    std::optional<std::filesystem::path> providers_file;
    std::vector<prompts::Technique> techniques;
    std::optional<std::filesystem::path> params_file;
    std::filesystem::path out_dir;
    std::optional<std::filesystem::path> replay;
    bool record = false;
    std::optional<std::filesystem::path> template_file;
    std::optional<std::filesystem::path> lint_config;
    int jobs = 4;
};

int cmd_generate(const GenerateOptions& opts, std::ostream& out, std::ostream& err);
int cmd_lint(const LintOptions& opts, std::ostream& out, std::ostream& err);
int cmd_evaluate(const EvaluateOptions& opts, std::ostream& out, std::ostream& err);
int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace bddgen::cli

#endif
