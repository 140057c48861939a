#ifndef BDDGEN_LINT_HPP
#define BDDGEN_LINT_HPP

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bddgen/gherkin.hpp"

namespace bddgen::lint {

enum class RuleId {
    KeywordsNotInLogicalOrder,
    KeywordNotPresentInStep,
    MissingTags,
    RestrictedPatternsPresent,
    NoFeature,
};

/// Stable report identifier, e.g. "gherkin-keywords-not-in-logical-order".
std::string_view rule_name(RuleId id);
std::optional<RuleId> parse_rule_name(std::string_view name);

inline constexpr RuleId kAllRules[] = {
    RuleId::KeywordsNotInLogicalOrder, RuleId::KeywordNotPresentInStep,
    RuleId::MissingTags, RuleId::RestrictedPatternsPresent, RuleId::NoFeature,
};

enum class MissingTagsScope { ScenariosOnly, ScenariosAndFeature };

struct LintConfig {
    std::set<RuleId> enabled;
    std::vector<std::string> restricted_patterns;
    MissingTagsScope missing_tags_scope = MissingTagsScope::ScenariosOnly;

    /// All rules enabled; one restricted pattern matching separator-run
    /// lines such as "-----" or "-----" ----"" (optionally quote-adjacent).
    static LintConfig defaults();
};

struct Finding {
    RuleId rule = RuleId::NoFeature;
    std::string message;
    int line = 0;  // 1-based
    std::string source_path;
};

class LintConfigError : public std::runtime_error {
public:
    explicit LintConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Runs every enabled rule; findings sorted by (line, rule).
/// Throws LintConfigError if a restricted pattern does not compile.
std::vector<Finding> lint(const gherkin::GherkinDocument& doc, const LintConfig& config);

/// Phase-monotonicity check over one step sequence. And/But resolve to the
/// nearest preceding primary keyword; `antecedent` supplies the resolution
/// for a sequence opening with And/But (e.g. the background's last primary
/// keyword). An opening And/But with no antecedent at all yields exactly
/// one finding, on the first step.
std::vector<Finding> check_logical_order(
    const std::vector<gherkin::Step>& steps,
    std::optional<gherkin::StepKeyword> antecedent = std::nullopt,
    std::string_view source_path = {});

/// One finding per (line, pattern) match over feature/background/scenario
/// descriptions, scenario names, and raw lines. Step text is exempt.
std::vector<Finding> check_restricted_patterns(const gherkin::GherkinDocument& doc,
                                               const std::vector<std::string>& patterns);

/// JSON array of {path, line, rule, message}, ordered as given.
std::string findings_to_json(const std::vector<Finding>& findings);

/// Parses the lint section of a JSON config:
///   {"enabled": [...rule names...], "restricted_patterns": [...],
///    "missing_tags_scope": "scenarios_only" | "scenarios_and_feature"}
/// Absent keys keep their defaults. Throws LintConfigError on bad input.
LintConfig config_from_json(std::string_view json_text);

}  // namespace bddgen::lint

#endif
