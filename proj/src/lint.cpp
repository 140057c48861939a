#include "bddgen/lint.hpp"

#include <algorithm>
#include <regex>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bddgen/util.hpp"

namespace bddgen::lint {

using gherkin::GherkinDocument;
using gherkin::Step;
using gherkin::StepKeyword;

std::string_view rule_name(RuleId id) {
    switch (id) {
        case RuleId::KeywordsNotInLogicalOrder: return "gherkin-keywords-not-in-logical-order";
        case RuleId::KeywordNotPresentInStep: return "gherkin-keyword-not-present-in-step";
        case RuleId::MissingTags: return "missing-tags";
        case RuleId::RestrictedPatternsPresent: return "restricted-patterns-present";
        case RuleId::NoFeature: return "no-feature";
    }
    return "";
}

std::optional<RuleId> parse_rule_name(std::string_view name) {
    for (RuleId id : kAllRules) {
        if (rule_name(id) == name) return id;
    }
    return std::nullopt;
}

LintConfig LintConfig::defaults() {
    LintConfig cfg;
    cfg.enabled.insert(std::begin(kAllRules), std::end(kAllRules));
    // Lines that are nothing but a run (>=3) of -, =, *, _ with optional
    // surrounding quotes/whitespace, covering forms like `-----" ----"`.
    cfg.restricted_patterns = {R"(^[-=*_"\s]*[-=*_]{3,}[-=*_"\s]*$)"};
    cfg.missing_tags_scope = MissingTagsScope::ScenariosOnly;
    return cfg;
}

namespace {

std::vector<std::regex> compile_patterns(const std::vector<std::string>& patterns) {
    std::vector<std::regex> res;
    res.reserve(patterns.size());
    for (const auto& p : patterns) {
        try {
            res.emplace_back(p, std::regex::ECMAScript);
        } catch (const std::regex_error& e) {
            throw LintConfigError("restricted pattern '" + p + "' does not compile: " + e.what());
        }
    }
    return res;
}

void check_order_into(const std::vector<Step>& steps,
                      std::optional<StepKeyword> antecedent,
                      std::string_view source_path, std::vector<Finding>& out) {
    int max_phase = 0;
    std::optional<StepKeyword> last_primary = antecedent;
    bool flagged_opening = false;

    for (const auto& step : steps) {
        if (gherkin::is_primary(step.keyword)) {
            const int phase = gherkin::keyword_phase(step.keyword);
            if (phase < max_phase) {
                out.push_back(Finding{
                    RuleId::KeywordsNotInLogicalOrder,
                    std::string(gherkin::keyword_name(step.keyword)) +
                        " step appears after a later phase; expected Given, When, Then order",
                    step.line, std::string(source_path)});
            }
            max_phase = std::max(max_phase, phase);
            last_primary = step.keyword;
        } else if (last_primary) {
            // And/But inherit the preceding primary phase and never violate
            // the order on their own.
            max_phase = std::max(max_phase, gherkin::keyword_phase(*last_primary));
        } else if (!flagged_opening) {
            out.push_back(Finding{
                RuleId::KeywordsNotInLogicalOrder,
                std::string(gherkin::keyword_name(step.keyword)) +
                    " opens the scenario with nothing to inherit a keyword from",
                step.line, std::string(source_path)});
            flagged_opening = true;
        }
    }
}

void check_patterns_line(const std::vector<std::regex>& regexes,
                         const std::vector<std::string>& patterns,
                         std::string_view text, int line,
                         std::string_view source_path, std::vector<Finding>& out) {
    const std::string subject = util::trim(text);
    for (size_t i = 0; i < regexes.size(); ++i) {
        if (std::regex_search(subject, regexes[i])) {
            out.push_back(Finding{RuleId::RestrictedPatternsPresent,
                                  "matches restricted pattern '" + patterns[i] + "'",
                                  line, std::string(source_path)});
        }
    }
}

void check_no_keyword_raw(const std::vector<gherkin::RawLine>& raws,
                          std::string_view source_path, std::vector<Finding>& out) {
    for (const auto& r : raws) {
        out.push_back(Finding{
            RuleId::KeywordNotPresentInStep,
            "line does not start with Given, When, Then, And, or But: '" +
                util::trim(r.text) + "'",
            r.line, std::string(source_path)});
    }
}

}  // namespace

std::vector<Finding> check_logical_order(const std::vector<Step>& steps,
                                         std::optional<StepKeyword> antecedent,
                                         std::string_view source_path) {
    std::vector<Finding> out;
    check_order_into(steps, antecedent, source_path, out);
    return out;
}

std::vector<Finding> check_restricted_patterns(const GherkinDocument& doc,
                                               const std::vector<std::string>& patterns) {
    const auto regexes = compile_patterns(patterns);
    std::vector<Finding> out;
    const std::string& path = doc.source_path;

    for (const auto& d : doc.feature_description) {
        check_patterns_line(regexes, patterns, d.text, d.line, path, out);
    }
    if (doc.background) {
        if (!doc.background->name.empty()) {
            check_patterns_line(regexes, patterns, doc.background->name,
                                doc.background->line, path, out);
        }
        for (const auto& d : doc.background->description) {
            check_patterns_line(regexes, patterns, d.text, d.line, path, out);
        }
        for (const auto& r : doc.background->raw_lines) {
            check_patterns_line(regexes, patterns, r.text, r.line, path, out);
        }
    }
    for (const auto& sc : doc.scenarios) {
        if (!sc.name.empty()) {
            check_patterns_line(regexes, patterns, sc.name, sc.line, path, out);
        }
        for (const auto& d : sc.description) {
            check_patterns_line(regexes, patterns, d.text, d.line, path, out);
        }
        for (const auto& r : sc.raw_lines) {
            check_patterns_line(regexes, patterns, r.text, r.line, path, out);
        }
    }
    for (const auto& r : doc.trailing_raw) {
        check_patterns_line(regexes, patterns, r.text, r.line, path, out);
    }
    return out;
}

std::vector<Finding> lint(const GherkinDocument& doc, const LintConfig& config) {
    // Validate patterns up front so InvalidConfig fires even when the rule
    // ends up producing nothing.
    const auto regexes = compile_patterns(config.restricted_patterns);
    (void)regexes;

    std::vector<Finding> out;
    const auto enabled = [&](RuleId id) { return config.enabled.count(id) > 0; };

    if (enabled(RuleId::NoFeature) && !doc.feature_name) {
        out.push_back(Finding{RuleId::NoFeature, "no 'Feature:' header found", 1,
                              doc.source_path});
    }

    if (enabled(RuleId::KeywordsNotInLogicalOrder)) {
        std::optional<StepKeyword> background_antecedent;
        if (doc.background) {
            check_order_into(doc.background->steps, std::nullopt, doc.source_path, out);
            for (const auto& s : doc.background->steps) {
                if (gherkin::is_primary(s.keyword)) background_antecedent = s.keyword;
            }
        }
        for (const auto& sc : doc.scenarios) {
            check_order_into(sc.steps, background_antecedent, doc.source_path, out);
        }
    }

    if (enabled(RuleId::KeywordNotPresentInStep)) {
        if (doc.background) check_no_keyword_raw(doc.background->raw_lines, doc.source_path, out);
        for (const auto& sc : doc.scenarios) {
            check_no_keyword_raw(sc.raw_lines, doc.source_path, out);
        }
        check_no_keyword_raw(doc.trailing_raw, doc.source_path, out);
    }

    if (enabled(RuleId::MissingTags)) {
        if (config.missing_tags_scope == MissingTagsScope::ScenariosAndFeature &&
            doc.feature_name && doc.feature_tags.empty()) {
            out.push_back(Finding{RuleId::MissingTags, "feature has no tags", 1,
                                  doc.source_path});
        }
        for (const auto& sc : doc.scenarios) {
            if (sc.tags.empty()) {
                out.push_back(Finding{RuleId::MissingTags,
                                      "scenario '" + sc.name + "' has no tags", sc.line,
                                      doc.source_path});
            }
        }
    }

    if (enabled(RuleId::RestrictedPatternsPresent)) {
        auto pf = check_restricted_patterns(doc, config.restricted_patterns);
        out.insert(out.end(), std::make_move_iterator(pf.begin()),
                   std::make_move_iterator(pf.end()));
    }

    std::stable_sort(out.begin(), out.end(), [](const Finding& a, const Finding& b) {
        if (a.line != b.line) return a.line < b.line;
        return static_cast<int>(a.rule) < static_cast<int>(b.rule);
    });
    return out;
}

std::string findings_to_json(const std::vector<Finding>& findings) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& f : findings) {
        arr.push_back({{"path", f.source_path},
                       {"line", f.line},
                       {"rule", std::string(rule_name(f.rule))},
                       {"message", f.message}});
    }
    return arr.dump(2);
}

LintConfig config_from_json(std::string_view json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw LintConfigError(std::string("lint config is not valid JSON: ") + e.what());
    }
    LintConfig cfg = LintConfig::defaults();
    if (j.contains("enabled")) {
        if (!j["enabled"].is_array()) throw LintConfigError("'enabled' must be an array");
        cfg.enabled.clear();
        for (const auto& name : j["enabled"]) {
            auto id = parse_rule_name(name.get<std::string>());
            if (!id) {
                throw LintConfigError("unknown rule '" + name.get<std::string>() + "'");
            }
            cfg.enabled.insert(*id);
        }
    }
    if (j.contains("restricted_patterns")) {
        if (!j["restricted_patterns"].is_array()) {
            throw LintConfigError("'restricted_patterns' must be an array");
        }
        cfg.restricted_patterns.clear();
        for (const auto& p : j["restricted_patterns"]) {
            cfg.restricted_patterns.push_back(p.get<std::string>());
        }
    }
    if (j.contains("missing_tags_scope")) {
        const std::string scope = j["missing_tags_scope"].get<std::string>();
        if (scope == "scenarios_only") {
            cfg.missing_tags_scope = MissingTagsScope::ScenariosOnly;
        } else if (scope == "scenarios_and_feature") {
            cfg.missing_tags_scope = MissingTagsScope::ScenariosAndFeature;
        } else {
            throw LintConfigError("unknown missing_tags_scope '" + scope + "'");
        }
    }
    compile_patterns(cfg.restricted_patterns);  // surfaces bad patterns at load time
    return cfg;
}

}  // namespace bddgen::lint
