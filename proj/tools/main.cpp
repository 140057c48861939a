#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bddgen/cli.hpp"

namespace {

using bddgen::cli::kExitConfig;

std::optional<bddgen::prompts::Technique> to_technique(const std::string& name,
                                                       std::ostream& err) {
    auto t = bddgen::prompts::parse_technique(name);
    if (!t) err << "unknown technique '" << name << "' (expected zero|few)\n";
    return t;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generate, validate, and evaluate BDD feature files from user stories"};
    app.require_subcommand(1);

    std::string dataset;
    std::vector<std::string> providers;
    std::string providers_file;
    std::vector<std::string> techniques;
    std::string params_file;
    std::string out_dir;
    std::string replay;
    bool record = false;
    std::string template_file;
    std::string lint_config;
    std::string feature_dir;
    std::string report_path = "findings.json";
    std::vector<std::string> reports;
    std::vector<std::string> manifests;
    int jobs = 4;
    bddgen::stories::CsvSchema schema;

    auto* generate = app.add_subcommand("generate",
                                        "Generate one .feature file per user story");
    generate->add_option("--dataset", dataset, "User-story CSV")->required();
    generate->add_option("--id-column", schema.id_column, "Dataset id column name");
    generate->add_option("--description-column", schema.description_column,
                         "Dataset description column name");
    generate->add_option("--source-column", schema.source_column,
                         "Dataset source column name");
    generate->add_option("--provider", providers, "Provider name")->required();
    generate->add_option("--providers", providers_file, "Providers config JSON");
    generate->add_option("--technique", techniques, "zero|few")->required();
    generate->add_option("--params", params_file, "Generation params JSON");
    generate->add_option("--out", out_dir, "Output directory")->required();
    generate->add_option("--replay", replay, "Replay fixture JSON");
    generate->add_flag("--record", record, "Record live responses into --replay");
    generate->add_option("--template", template_file, "Prompt template body file");
    generate->add_option("--jobs", jobs, "Parallel provider calls")->check(CLI::PositiveNumber);

    auto* lint = app.add_subcommand("lint", "Validate .feature files and emit findings");
    lint->add_option("dir", feature_dir, "Directory of .feature files")->required();
    lint->add_option("--lint-config", lint_config, "Lint config JSON");
    lint->add_option("--report", report_path, "Findings report output path");

    auto* evaluate = app.add_subcommand("evaluate",
                                        "Compute accuracy and error-distribution reports");
    evaluate->add_option("reports", reports, "Findings report JSON files")->required();
    evaluate->add_option("--manifest", manifests, "Run manifest JSON files");
    evaluate->add_option("--out", out_dir, "Report bundle directory")->required();

    auto* run = app.add_subcommand("run", "generate + lint + evaluate in one pass");
    run->add_option("--dataset", dataset, "User-story CSV")->required();
    run->add_option("--id-column", schema.id_column, "Dataset id column name");
    run->add_option("--description-column", schema.description_column,
                    "Dataset description column name");
    run->add_option("--source-column", schema.source_column,
                    "Dataset source column name");
    run->add_option("--provider", providers, "Provider name (repeatable)")->required();
    run->add_option("--providers", providers_file, "Providers config JSON");
    run->add_option("--technique", techniques, "zero|few (repeatable)")->required();
    run->add_option("--params", params_file, "Generation params JSON");
    run->add_option("--out", out_dir, "Run output root")->required();
    run->add_option("--replay", replay, "Replay fixture JSON");
    run->add_flag("--record", record, "Record live responses into --replay");
    run->add_option("--template", template_file, "Prompt template body file");
    run->add_option("--lint-config", lint_config, "Lint config JSON");
    run->add_option("--jobs", jobs, "Parallel provider calls")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    auto opt_path = [](const std::string& s) -> std::optional<std::filesystem::path> {
        if (s.empty()) return std::nullopt;
        return std::filesystem::path(s);
    };

    if (generate->parsed()) {
        auto technique = to_technique(techniques.front(), std::cerr);
        if (!technique) return kExitConfig;
        bddgen::cli::GenerateOptions opts;
        opts.dataset = dataset;
        opts.schema = schema;
        opts.provider = providers.front();
        opts.providers_file = opt_path(providers_file);
        opts.technique = *technique;
        opts.params_file = opt_path(params_file);
        opts.out_dir = out_dir;
        opts.replay = opt_path(replay);
        opts.record = record;
        opts.template_file = opt_path(template_file);
        opts.jobs = jobs;
        return bddgen::cli::cmd_generate(opts, std::cout, std::cerr);
    }

    if (lint->parsed()) {
        bddgen::cli::LintOptions opts;
        opts.feature_dir = feature_dir;
        opts.lint_config = opt_path(lint_config);
        opts.report_path = report_path;
        return bddgen::cli::cmd_lint(opts, std::cout, std::cerr);
    }

    if (evaluate->parsed()) {
        bddgen::cli::EvaluateOptions opts;
        for (const auto& r : reports) opts.reports.emplace_back(r);
        for (const auto& m : manifests) opts.manifests.emplace_back(m);
        opts.out_dir = out_dir;
        return bddgen::cli::cmd_evaluate(opts, std::cout, std::cerr);
    }

    bddgen::cli::RunOptions opts;
    opts.dataset = dataset;
    opts.schema = schema;
    opts.providers = providers;
    opts.providers_file = opt_path(providers_file);
    for (const auto& t : techniques) {
        auto technique = to_technique(t, std::cerr);
        if (!technique) return kExitConfig;
        opts.techniques.push_back(*technique);
    }
    opts.params_file = opt_path(params_file);
    opts.out_dir = out_dir;
    opts.replay = opt_path(replay);
    opts.record = record;
    opts.template_file = opt_path(template_file);
    opts.lint_config = opt_path(lint_config);
    opts.jobs = jobs;
    return bddgen::cli::cmd_run(opts, std::cout, std::cerr);
}
