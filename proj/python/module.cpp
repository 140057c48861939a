#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "bddgen/cli.hpp"
#include "bddgen/evaluation.hpp"
#include "bddgen/gherkin.hpp"
#include "bddgen/lint.hpp"
#include "bddgen/prompts.hpp"
#include "bddgen/provider.hpp"
#include "bddgen/stories.hpp"

namespace py = pybind11;

using namespace bddgen;

PYBIND11_MODULE(_bddgen, m) {
    m.doc() = "BDD feature-file generation, validation, and evaluation";

    // --- stories ---
    py::class_<stories::UserStory>(m, "UserStory")
        .def(py::init([](std::string id, std::string description,
                         std::optional<std::string> source) {
                 return stories::UserStory{std::move(id), std::move(description),
                                           std::move(source)};
             }),
             py::arg("id"), py::arg("description"), py::arg("source") = py::none())
        .def_readonly("id", &stories::UserStory::id)
        .def_readonly("description", &stories::UserStory::description)
        .def_readonly("source", &stories::UserStory::source)
        .def("__repr__", [](const stories::UserStory& s) {
            return "UserStory(id='" + s.id + "')";
        });

    py::class_<stories::CsvSchema>(m, "CsvSchema")
        .def(py::init<>())
        .def_readwrite("id_column", &stories::CsvSchema::id_column)
        .def_readwrite("description_column", &stories::CsvSchema::description_column)
        .def_readwrite("source_column", &stories::CsvSchema::source_column);

    m.def("load_stories", &stories::load_stories, py::arg("path"),
          py::arg("schema") = stories::CsvSchema{});
    m.def("parse_stories_csv",
          [](const std::string& text, const stories::CsvSchema& schema) {
              return stories::parse_stories_csv(text, schema);
          },
          py::arg("text"), py::arg("schema") = stories::CsvSchema{});
    m.def("write_stories_csv", &stories::write_stories_csv, py::arg("stories"),
          py::arg("schema") = stories::CsvSchema{});

    // --- prompts ---
    py::enum_<prompts::Technique>(m, "Technique")
        .value("ZERO_SHOT", prompts::Technique::ZeroShot)
        .value("FEW_SHOT", prompts::Technique::FewShot);

    py::enum_<prompts::Role>(m, "Role")
        .value("SYSTEM", prompts::Role::System)
        .value("USER", prompts::Role::User)
        .value("ASSISTANT", prompts::Role::Assistant);

    py::class_<prompts::Message>(m, "Message")
        .def_readonly("role", &prompts::Message::role)
        .def_readonly("text", &prompts::Message::text);

    py::class_<prompts::PromptTemplate>(m, "PromptTemplate")
        .def_readonly("technique", &prompts::PromptTemplate::technique)
        .def_readonly("body", &prompts::PromptTemplate::body)
        .def_readonly("instruction_lines", &prompts::PromptTemplate::instruction_lines)
        .def_readonly("exemplar", &prompts::PromptTemplate::exemplar);

    py::class_<prompts::PromptPayload>(m, "PromptPayload")
        .def_readonly("messages", &prompts::PromptPayload::messages)
        .def_readonly("technique", &prompts::PromptPayload::technique)
        .def_readonly("story_id", &prompts::PromptPayload::story_id);

    py::class_<prompts::TemplatePair>(m, "TemplatePair")
        .def_readonly("zero", &prompts::TemplatePair::zero)
        .def_readonly("few", &prompts::TemplatePair::few);

    m.def("default_templates", &prompts::default_templates);
    m.def("build_prompt", &prompts::build_prompt, py::arg("story"), py::arg("template"));

    // --- gherkin ---
    py::enum_<gherkin::StepKeyword>(m, "StepKeyword")
        .value("GIVEN", gherkin::StepKeyword::Given)
        .value("WHEN", gherkin::StepKeyword::When)
        .value("THEN", gherkin::StepKeyword::Then)
        .value("AND", gherkin::StepKeyword::And)
        .value("BUT", gherkin::StepKeyword::But);

    py::class_<gherkin::Step>(m, "Step")
        .def_readonly("keyword", &gherkin::Step::keyword)
        .def_readonly("text", &gherkin::Step::text)
        .def_readonly("line", &gherkin::Step::line);

    py::class_<gherkin::SourceLine>(m, "SourceLine")
        .def_readonly("text", &gherkin::SourceLine::text)
        .def_readonly("line", &gherkin::SourceLine::line);

    py::class_<gherkin::RawLine>(m, "RawLine")
        .def_readonly("text", &gherkin::RawLine::text)
        .def_readonly("line", &gherkin::RawLine::line);

    py::class_<gherkin::Tag>(m, "Tag")
        .def_readonly("text", &gherkin::Tag::text)
        .def_readonly("line", &gherkin::Tag::line);

    py::class_<gherkin::Scenario>(m, "Scenario")
        .def_readonly("name", &gherkin::Scenario::name)
        .def_readonly("tags", &gherkin::Scenario::tags)
        .def_readonly("description", &gherkin::Scenario::description)
        .def_readonly("steps", &gherkin::Scenario::steps)
        .def_readonly("raw_lines", &gherkin::Scenario::raw_lines)
        .def_readonly("line", &gherkin::Scenario::line);

    py::class_<gherkin::Background>(m, "Background")
        .def_readonly("name", &gherkin::Background::name)
        .def_readonly("description", &gherkin::Background::description)
        .def_readonly("steps", &gherkin::Background::steps)
        .def_readonly("raw_lines", &gherkin::Background::raw_lines)
        .def_readonly("line", &gherkin::Background::line);

    py::class_<gherkin::GherkinDocument>(m, "GherkinDocument")
        .def_readonly("feature_name", &gherkin::GherkinDocument::feature_name)
        .def_readonly("feature_description", &gherkin::GherkinDocument::feature_description)
        .def_readonly("feature_tags", &gherkin::GherkinDocument::feature_tags)
        .def_readonly("background", &gherkin::GherkinDocument::background)
        .def_readonly("scenarios", &gherkin::GherkinDocument::scenarios)
        .def_readonly("trailing_raw", &gherkin::GherkinDocument::trailing_raw)
        .def_readonly("source_path", &gherkin::GherkinDocument::source_path);

    m.def("parse_document",
          [](const std::string& text, const std::string& source_path) {
              return gherkin::parse_document(text, source_path);
          },
          py::arg("text"), py::arg("source_path") = std::string{});
    m.def("serialize", &gherkin::serialize, py::arg("document"));
    m.def("structurally_equal", &gherkin::structurally_equal, py::arg("a"), py::arg("b"));

    // --- lint ---
    py::enum_<lint::RuleId>(m, "RuleId")
        .value("KEYWORDS_NOT_IN_LOGICAL_ORDER", lint::RuleId::KeywordsNotInLogicalOrder)
        .value("KEYWORD_NOT_PRESENT_IN_STEP", lint::RuleId::KeywordNotPresentInStep)
        .value("MISSING_TAGS", lint::RuleId::MissingTags)
        .value("RESTRICTED_PATTERNS_PRESENT", lint::RuleId::RestrictedPatternsPresent)
        .value("NO_FEATURE", lint::RuleId::NoFeature);

    m.def("rule_name", [](lint::RuleId id) { return std::string(lint::rule_name(id)); });

    py::enum_<lint::MissingTagsScope>(m, "MissingTagsScope")
        .value("SCENARIOS_ONLY", lint::MissingTagsScope::ScenariosOnly)
        .value("SCENARIOS_AND_FEATURE", lint::MissingTagsScope::ScenariosAndFeature);

    py::class_<lint::LintConfig>(m, "LintConfig")
        .def(py::init(&lint::LintConfig::defaults))
        .def_static("defaults", &lint::LintConfig::defaults)
        .def_readwrite("enabled", &lint::LintConfig::enabled)
        .def_readwrite("restricted_patterns", &lint::LintConfig::restricted_patterns)
        .def_readwrite("missing_tags_scope", &lint::LintConfig::missing_tags_scope);

    py::class_<lint::Finding>(m, "Finding")
        .def_readonly("rule", &lint::Finding::rule)
        .def_readonly("message", &lint::Finding::message)
        .def_readonly("line", &lint::Finding::line)
        .def_readonly("source_path", &lint::Finding::source_path)
        .def("__repr__", [](const lint::Finding& f) {
            return "Finding(rule='" + std::string(lint::rule_name(f.rule)) +
                   "', line=" + std::to_string(f.line) + ")";
        });

    m.def("lint",
          [](const gherkin::GherkinDocument& doc, std::optional<lint::LintConfig> config) {
              return lint::lint(doc, config.value_or(lint::LintConfig::defaults()));
          },
          py::arg("document"), py::arg("config") = py::none());
    m.def("check_logical_order",
          [](const std::vector<gherkin::Step>& steps) {
              return lint::check_logical_order(steps);
          },
          py::arg("steps"));
    m.def("findings_to_json", &lint::findings_to_json, py::arg("findings"));

    // --- provider ---
    py::class_<llm::GenerationParams>(m, "GenerationParams")
        .def(py::init<>())
        .def_readwrite("model_id", &llm::GenerationParams::model_id)
        .def_readwrite("temperature", &llm::GenerationParams::temperature)
        .def_readwrite("top_p", &llm::GenerationParams::top_p)
        .def_readwrite("max_tokens", &llm::GenerationParams::max_tokens)
        .def("validate", &llm::GenerationParams::validate);

    m.def("strip_fences", &llm::strip_fences, py::arg("text"));
    m.def("request_digest", &llm::request_digest, py::arg("payload"), py::arg("params"));

    // --- evaluation ---
    py::class_<eval::FileVerdict>(m, "FileVerdict")
        .def(py::init([](std::string story_id, std::string model_id,
                         prompts::Technique technique, std::string path,
                         std::vector<lint::Finding> findings) {
                 return eval::FileVerdict{std::move(story_id), std::move(model_id),
                                          technique, std::move(path), std::move(findings)};
             }),
             py::arg("story_id"), py::arg("model_id"), py::arg("technique"),
             py::arg("path") = std::string{},
             py::arg("findings") = std::vector<lint::Finding>{})
        .def_readonly("story_id", &eval::FileVerdict::story_id)
        .def_readonly("model_id", &eval::FileVerdict::model_id)
        .def_readonly("technique", &eval::FileVerdict::technique)
        .def_readonly("findings", &eval::FileVerdict::findings)
        .def("clean", &eval::FileVerdict::clean);

    py::class_<eval::AccuracySummary>(m, "AccuracySummary")
        .def_readonly("model_id", &eval::AccuracySummary::model_id)
        .def_readonly("technique", &eval::AccuracySummary::technique)
        .def_readonly("clean_count", &eval::AccuracySummary::clean_count)
        .def_readonly("total_count", &eval::AccuracySummary::total_count)
        .def_readonly("accuracy", &eval::AccuracySummary::accuracy);

    py::class_<eval::ErrorMatrix>(m, "ErrorMatrix")
        .def("total", &eval::ErrorMatrix::total)
        .def("technique_total", &eval::ErrorMatrix::technique_total)
        .def("cell", &eval::ErrorMatrix::cell)
        .def_readonly("counts", &eval::ErrorMatrix::counts);

    m.def("accuracy", &eval::accuracy, py::arg("verdicts"), py::arg("model_id"),
          py::arg("technique"));
    m.def("accuracy_by_group", &eval::accuracy_by_group, py::arg("verdicts"));
    m.def("error_matrix", &eval::error_matrix, py::arg("verdicts"));
    m.def("technique_share", &eval::technique_share, py::arg("matrix"));

    m.attr("__version__") = std::string(cli::kToolVersion);

    py::register_exception<stories::CsvError>(m, "CsvError");
    py::register_exception<prompts::PromptError>(m, "PromptError");
    py::register_exception<gherkin::InvalidEncoding>(m, "InvalidEncodingError");
    py::register_exception<lint::LintConfigError>(m, "LintConfigError");
    py::register_exception<llm::ProviderError>(m, "ProviderError");
    py::register_exception<eval::EvalError>(m, "EvalError");
}
