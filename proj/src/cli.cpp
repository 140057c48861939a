#include "bddgen/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <map>
#include <ctime>
#include <map>
#include <ostream>
#include <thread>

#include <nlohmann/json.hpp>

#include "bddgen/evaluation.hpp"
#include "bddgen/gherkin.hpp"
#include "bddgen/lint.hpp"
#include "bddgen/stories.hpp"
#include "bddgen/util.hpp"

namespace bddgen::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Usage/config problems exit 1, runtime failures exit 2.
struct CliFailure {
    int exit_code;
    std::string message;
};

std::string iso8601_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json params_to_json(const llm::GenerationParams& p) {
    return {{"model_id", p.model_id},
            {"temperature", p.temperature},
            {"top_p", p.top_p},
            {"max_tokens", p.max_tokens},
            {"extra", p.extra}};
}

llm::GenerationParams params_from_json(const json& j) {
    llm::GenerationParams p;
    p.model_id = j.value("model_id", std::string{});
    p.temperature = j.value("temperature", p.temperature);
    p.top_p = j.value("top_p", p.top_p);
    p.max_tokens = j.value("max_tokens", p.max_tokens);
    if (j.contains("extra")) {
        for (auto it = j["extra"].begin(); it != j["extra"].end(); ++it) {
            p.extra[it.key()] = it.value().get<std::string>();
        }
    }
    return p;
}

}  // namespace

std::string RunManifest::to_json() const {
    json j;
    j["run_id"] = run_id;
    j["timestamp"] = timestamp;
    j["dataset_path"] = dataset_path;
    j["technique"] = std::string(prompts::technique_name(technique));
    j["provider"] = provider_name;
    j["model_id"] = model_id;
    j["params"] = params_to_json(params);
    j["prompt_digest"] = prompt_digest;
    j["tool_version"] = tool_version;
    j["feature_files"] = feature_files;
    json fails = json::array();
    for (const auto& [story, message] : failures) {
        fails.push_back({{"story_id", story}, {"error", message}});
    }
    j["failures"] = std::move(fails);
    j["fence_stripped"] = fence_stripped;
    return j.dump(2) + "\n";
}

RunManifest RunManifest::from_json_file(const fs::path& path) {
    json j = json::parse(util::read_file(path));
    RunManifest m;
    m.run_id = j.value("run_id", std::string{});
    m.timestamp = j.value("timestamp", std::string{});
    m.dataset_path = j.value("dataset_path", std::string{});
    if (auto t = prompts::parse_technique(j.value("technique", std::string{}))) {
        m.technique = *t;
    }
    m.provider_name = j.value("provider", std::string{});
    m.model_id = j.value("model_id", std::string{});
    if (j.contains("params")) m.params = params_from_json(j["params"]);
    m.prompt_digest = j.value("prompt_digest", std::string{});
    m.tool_version = j.value("tool_version", std::string{});
    if (j.contains("feature_files")) {
        m.feature_files = j["feature_files"].get<std::vector<std::string>>();
    }
    if (j.contains("failures")) {
        for (const auto& f : j["failures"]) {
            m.failures.emplace_back(f.value("story_id", std::string{}),
                                    f.value("error", std::string{}));
        }
    }
    m.fence_stripped = j.value("fence_stripped", 0L);
    return m;
}

namespace {

struct ResolvedProvider {
    std::unique_ptr<llm::Provider> provider;
    llm::GenerationParams params;
    std::string name;
    bool record = false;
    fs::path fixture_path;
};

ResolvedProvider resolve_provider(const std::string& provider_name,
                                  const std::optional<fs::path>& providers_file,
                                  const std::optional<fs::path>& params_file,
                                  const std::optional<fs::path>& replay, bool record) {
    ResolvedProvider resolved;
    resolved.name = provider_name;

    llm::GenerationParams params;
    params.model_id = provider_name;  // fallback when no config names a model
    std::optional<llm::ProviderConfig> config;

    if (providers_file) {
        if (!fs::exists(*providers_file)) {
            throw CliFailure{kExitConfig,
                             "providers config not found: " + providers_file->string()};
        }
        try {
            auto configs = llm::load_provider_configs(*providers_file);
            config = llm::find_provider_config(configs, provider_name);
        } catch (const std::exception& e) {
            throw CliFailure{kExitConfig, e.what()};
        }
        params = config->default_params;
    }

    if (params_file) {
        try {
            json j = json::parse(util::read_file(*params_file));
            llm::GenerationParams file_params = params_from_json(j);
            if (file_params.model_id.empty()) file_params.model_id = params.model_id;
            params = file_params;
        } catch (const CliFailure&) {
            throw;
        } catch (const std::exception& e) {
            throw CliFailure{kExitConfig,
                             "params file " + params_file->string() + ": " + e.what()};
        }
    }
    try {
        params.validate();
    } catch (const std::exception& e) {
        throw CliFailure{kExitConfig, e.what()};
    }
    resolved.params = params;

    if (record) {
        if (!replay) {
            throw CliFailure{kExitConfig, "--record requires --replay <fixture path>"};
        }
        if (!config) {
            throw CliFailure{kExitConfig,
                             "--record needs a providers config naming '" + provider_name +
                                 "'"};
        }
        resolved.provider = std::make_unique<llm::HttpChatProvider>(*config);
        resolved.record = true;
        resolved.fixture_path = *replay;
        return resolved;
    }

    if (replay) {
        llm::ReplayFixture fixture;
        try {
            fixture = llm::ReplayFixture::load(*replay);
        } catch (const std::exception& e) {
            throw CliFailure{kExitConfig, e.what()};
        }
        resolved.provider =
            std::make_unique<llm::ReplayProvider>(provider_name, std::move(fixture));
        return resolved;
    }

    if (!config) {
        throw CliFailure{kExitConfig,
                         "provider '" + provider_name +
                             "' needs either --providers <config> or --replay <fixture>"};
    }
    resolved.provider = std::make_unique<llm::HttpChatProvider>(*config);
    return resolved;
}

prompts::PromptTemplate select_template(const prompts::TemplatePair& pair,
                                        prompts::Technique technique) {
    return technique == prompts::Technique::ZeroShot ? pair.zero : pair.few;
}

std::string deterministic_run_id(const std::string& dataset_digest,
                                 const std::string& provider_name,
                                 const std::string& model_id,
                                 prompts::Technique technique,
                                 const llm::GenerationParams& params,
                                 const std::string& prompt_digest) {
    json canon = {{"dataset", dataset_digest},
                  {"provider", provider_name},
                  {"model", model_id},
                  {"technique", std::string(prompts::technique_name(technique))},
                  {"params", params_to_json(params)},
                  {"prompts", prompt_digest},
                  {"tool", std::string(kToolVersion)}};
    return util::sha256_hex(canon.dump()).substr(0, 16);
}

struct StoryOutcome {
    std::optional<std::string> feature_text;  // fence-stripped
    std::string error;
    bool stripped = false;
};

}  // namespace

int cmd_generate(const GenerateOptions& opts, std::ostream& out, std::ostream& err) {
    try {
        std::vector<stories::UserStory> dataset;
        std::string dataset_bytes;
        try {
            dataset_bytes = util::read_file(opts.dataset);
            dataset = stories::parse_stories_csv(dataset_bytes, opts.schema);
        } catch (const std::exception& e) {
            throw CliFailure{kExitConfig, e.what()};
        }

        prompts::TemplatePair templates = prompts::default_templates();
        if (opts.template_file) {
            std::string body;
            try {
                body = util::read_file(*opts.template_file);
            } catch (const std::exception& e) {
                throw CliFailure{kExitConfig, e.what()};
            }
            templates.zero = prompts::with_body(templates.zero, body);
            templates.few = prompts::with_body(templates.few, body);
        }
        const std::string prompt_digest = prompts::templates_digest(templates);
        const prompts::PromptTemplate tmpl = select_template(templates, opts.technique);

        ResolvedProvider resolved =
            resolve_provider(opts.provider, opts.providers_file, opts.params_file,
                             opts.replay, opts.record);

        RunManifest manifest;
        manifest.timestamp = iso8601_now();
        manifest.dataset_path = opts.dataset.string();
        manifest.technique = opts.technique;
        manifest.provider_name = resolved.name;
        manifest.model_id = resolved.params.model_id;
        manifest.params = resolved.params;
        manifest.prompt_digest = prompt_digest;
        manifest.tool_version = std::string(kToolVersion);
        manifest.run_id = deterministic_run_id(util::sha256_hex(dataset_bytes),
                                               resolved.name, resolved.params.model_id,
                                               opts.technique, resolved.params,
                                               prompt_digest);

        // Bounded worker pool; one slot per story keeps outputs ordered.
        std::vector<StoryOutcome> outcomes(dataset.size());
        std::atomic<size_t> next{0};
        const int jobs = std::max(1, std::min<int>(opts.jobs,
                                                   static_cast<int>(dataset.size())));
        auto worker = [&]() {
            while (true) {
                const size_t i = next.fetch_add(1);
                if (i >= dataset.size()) break;
                try {
                    const auto payload = prompts::build_prompt(dataset[i], tmpl);
                    llm::ProviderResponse response =
                        resolved.record
                            ? llm::record(*resolved.provider, payload, resolved.params,
                                          resolved.fixture_path)
                            : resolved.provider->generate(payload, resolved.params);
                    std::string text = llm::strip_fences(response.text);
                    outcomes[i].stripped = text != response.text;
                    outcomes[i].feature_text = std::move(text);
                } catch (const std::exception& e) {
                    outcomes[i].error = e.what();
                }
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();

        const std::string model_dir = util::sanitize_path_component(resolved.params.model_id);
        const std::string technique_dir{prompts::technique_name(opts.technique)};
        size_t written = 0;

        for (size_t i = 0; i < dataset.size(); ++i) {
            if (!outcomes[i].feature_text) {
                manifest.failures.emplace_back(dataset[i].id, outcomes[i].error);
                err << "generate: story " << dataset[i].id << " failed: "
                    << outcomes[i].error << "\n";
                continue;
            }
            if (outcomes[i].stripped) ++manifest.fence_stripped;
            const fs::path rel = fs::path(model_dir) / technique_dir /
                                 (util::sanitize_path_component(dataset[i].id) + ".feature");
            std::string content = "# run: " + manifest.run_id + "\n" +
                                  *outcomes[i].feature_text;
            if (content.empty() || content.back() != '\n') content.push_back('\n');
            util::write_file_atomic(opts.out_dir / rel, content);
            manifest.feature_files.push_back(rel.generic_string());
            ++written;
        }

        const fs::path manifest_path =
            opts.out_dir / ("manifest_" + model_dir + "_" + technique_dir + ".json");
        util::write_file_atomic(manifest_path, manifest.to_json());

        out << "generate: " << written << "/" << dataset.size() << " feature files ("
            << manifest.failures.size() << " failures) under " << opts.out_dir.string()
            << "\n";
        if (written == 0) {
            err << "generate: every story failed\n";
            return kExitRuntime;
        }
        return kExitOk;
    } catch (const CliFailure& f) {
        err << "generate: " << f.message << "\n";
        return f.exit_code;
    } catch (const std::exception& e) {
        err << "generate: " << e.what() << "\n";
        return kExitRuntime;
    }
}

namespace {

std::vector<fs::path> collect_feature_files(const fs::path& root) {
    std::vector<fs::path> files;
    if (!fs::exists(root)) return files;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (entry.is_regular_file() && entry.path().extension() == ".feature") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    return files;
}

lint::LintConfig load_lint_config(const std::optional<fs::path>& path) {
    if (!path) return lint::LintConfig::defaults();
    try {
        return lint::config_from_json(util::read_file(*path));
    } catch (const std::exception& e) {
        throw CliFailure{kExitConfig, e.what()};
    }
}

}  // namespace

int cmd_lint(const LintOptions& opts, std::ostream& out, std::ostream& err) {
    try {
        const lint::LintConfig config = load_lint_config(opts.lint_config);
        const auto files = collect_feature_files(opts.feature_dir);
        if (files.empty()) {
            throw CliFailure{kExitRuntime,
                             "no .feature files under " + opts.feature_dir.string()};
        }

        json report;
        json file_list = json::array();
        json findings = json::array();
        size_t total_findings = 0;

        for (const auto& file : files) {
            const std::string rel =
                fs::relative(file, opts.feature_dir).generic_string();
            file_list.push_back(rel);
            auto doc = gherkin::parse_document(util::read_file(file), rel);
            for (const auto& f : lint::lint(doc, config)) {
                findings.push_back({{"path", f.source_path},
                                    {"line", f.line},
                                    {"rule", std::string(lint::rule_name(f.rule))},
                                    {"message", f.message}});
                ++total_findings;
            }
        }
        report["files"] = std::move(file_list);
        report["findings"] = std::move(findings);
        util::write_file_atomic(opts.report_path, report.dump(2) + "\n");

        out << "lint: " << files.size() << " files, " << total_findings
            << " findings -> " << opts.report_path.string() << "\n";
        return kExitOk;
    } catch (const CliFailure& f) {
        err << "lint: " << f.message << "\n";
        return f.exit_code;
    } catch (const std::exception& e) {
        err << "lint: " << e.what() << "\n";
        return kExitRuntime;
    }
}

namespace {

// Output layout is <model>/<technique>/<story>.feature; grouping is
// recoverable from the path alone.
std::optional<eval::FileVerdict> verdict_from_path(const std::string& rel_path) {
    const fs::path p(rel_path);
    std::vector<std::string> parts;
    for (const auto& c : p) parts.push_back(c.generic_string());
    if (parts.size() < 3) return std::nullopt;
    const auto technique = prompts::parse_technique(parts[parts.size() - 2]);
    if (!technique) return std::nullopt;
    eval::FileVerdict v;
    v.model_id = parts[parts.size() - 3];
    v.technique = *technique;
    v.story_id = p.stem().string();
    v.path = rel_path;
    return v;
}

}  // namespace

int cmd_evaluate(const EvaluateOptions& opts, std::ostream& out, std::ostream& err) {
    try {
        if (opts.reports.empty()) {
            throw CliFailure{kExitConfig, "no findings reports given"};
        }

        std::vector<eval::FileVerdict> verdicts;
        for (const auto& report_path : opts.reports) {
            json report;
            try {
                report = json::parse(util::read_file(report_path));
            } catch (const std::exception& e) {
                throw CliFailure{kExitRuntime,
                                 "findings report " + report_path.string() + ": " + e.what()};
            }
            std::map<std::string, std::vector<lint::Finding>> by_path;
            for (const auto& f : report.value("findings", json::array())) {
                lint::Finding finding;
                finding.source_path = f.value("path", std::string{});
                finding.line = f.value("line", 0);
                finding.message = f.value("message", std::string{});
                const auto rule = lint::parse_rule_name(f.value("rule", std::string{}));
                if (!rule) {
                    throw CliFailure{kExitRuntime,
                                     "findings report " + report_path.string() +
                                         " names unknown rule '" +
                                         f.value("rule", std::string{}) + "'"};
                }
                finding.rule = *rule;
                by_path[finding.source_path].push_back(std::move(finding));
            }
            for (const auto& file : report.value("files", json::array())) {
                const std::string rel = file.get<std::string>();
                auto verdict = verdict_from_path(rel);
                if (!verdict) {
                    throw CliFailure{kExitRuntime,
                                     "feature path '" + rel +
                                         "' does not follow <model>/<technique>/<story>.feature"};
                }
                auto it = by_path.find(rel);
                if (it != by_path.end()) verdict->findings = it->second;
                verdicts.push_back(std::move(*verdict));
            }
        }
        if (verdicts.empty()) {
            throw CliFailure{kExitRuntime, "findings reports list no feature files"};
        }

        std::vector<std::string> run_ids;
        long generation_failures = 0;
        for (const auto& manifest_path : opts.manifests) {
            try {
                RunManifest m = RunManifest::from_json_file(manifest_path);
                run_ids.push_back(m.run_id);
                generation_failures += static_cast<long>(m.failures.size());
            } catch (const std::exception& e) {
                throw CliFailure{kExitRuntime,
                                 "manifest " + manifest_path.string() + ": " + e.what()};
            }
        }
        std::sort(run_ids.begin(), run_ids.end());

        const auto summaries = eval::accuracy_by_group(verdicts);
        const auto matrix = eval::error_matrix(verdicts);
        fs::create_directories(opts.out_dir);
        eval::write_accuracy_csv(opts.out_dir / "accuracy.csv", summaries);
        eval::write_error_matrix_csv(opts.out_dir / "error_matrix.csv", matrix);
        eval::write_errors_long_csv(opts.out_dir / "errors_long.csv", matrix);
        eval::write_summary_json(opts.out_dir / "summary.json", summaries, matrix,
                                 run_ids, generation_failures);

        out << "evaluate: " << verdicts.size() << " verdicts, " << matrix.total()
            << " findings -> " << opts.out_dir.string() << "\n";
        return kExitOk;
    } catch (const CliFailure& f) {
        err << "evaluate: " << f.message << "\n";
        return f.exit_code;
    } catch (const std::exception& e) {
        err << "evaluate: " << e.what() << "\n";
        return kExitRuntime;
    }
}

int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err) {
    if (opts.providers.empty()) {
        err << "run: at least one --provider is required\n";
        return kExitConfig;
    }
    const std::vector<prompts::Technique> techniques =
        opts.techniques.empty()
            ? std::vector<prompts::Technique>{prompts::Technique::ZeroShot}
            : opts.techniques;

    const fs::path features_dir = opts.out_dir / "features";
    std::vector<fs::path> manifest_paths;

    for (const auto& provider : opts.providers) {
        for (const auto technique : techniques) {
            GenerateOptions gen;
            gen.dataset = opts.dataset;
            gen.schema = opts.schema;
            gen.provider = provider;
            gen.providers_file = opts.providers_file;
            gen.technique = technique;
            gen.params_file = opts.params_file;
            gen.out_dir = features_dir;
            gen.replay = opts.replay;
            gen.record = opts.record;
            gen.template_file = opts.template_file;
            gen.jobs = opts.jobs;
            const int rc = cmd_generate(gen, out, err);
            if (rc != kExitOk) return rc;
        }
    }
    for (const auto& entry : fs::directory_iterator(features_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json" &&
            entry.path().filename().string().starts_with("manifest_")) {
            manifest_paths.push_back(entry.path());
        }
    }
    std::sort(manifest_paths.begin(), manifest_paths.end());

    LintOptions lint_opts;
    lint_opts.feature_dir = features_dir;
    lint_opts.lint_config = opts.lint_config;
    lint_opts.report_path = opts.out_dir / "findings.json";
    const int lint_rc = cmd_lint(lint_opts, out, err);
    if (lint_rc != kExitOk) return lint_rc;

    EvaluateOptions eval_opts;
    eval_opts.reports = {opts.out_dir / "findings.json"};
    eval_opts.manifests = manifest_paths;
    eval_opts.out_dir = opts.out_dir / "reports";
    return cmd_evaluate(eval_opts, out, err);
}

}  // namespace bddgen::cli
