#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <optional>
#include <vector>

#include "bddgen/gherkin.hpp"
#include "bddgen/lint.hpp"
#include "test_support.hpp"

using namespace bddgen::gherkin;
using namespace bddgen::lint;

namespace {

std::vector<Step> make_steps(std::initializer_list<StepKeyword> keywords) {
    std::vector<Step> steps;
    int line = 1;
    for (auto k : keywords) steps.push_back(Step{k, "text", line++});
    return steps;
}

// Independent restatement of the phase-monotonicity rule, used as the
// oracle: resolve each step by backward scan, compare against the prefix
// maximum, and flag an opening And/But chain once on its first step.
std::vector<int> oracle_violation_lines(const std::vector<Step>& steps,
                                        std::optional<StepKeyword> antecedent) {
    auto resolved_phase = [&](size_t i) -> int {
        if (is_primary(steps[i].keyword)) return keyword_phase(steps[i].keyword);
        for (size_t j = i; j-- > 0;) {
            if (is_primary(steps[j].keyword)) return keyword_phase(steps[j].keyword);
        }
        return antecedent ? keyword_phase(*antecedent) : 0;
    };

    std::vector<int> lines;
    if (!steps.empty() && !is_primary(steps[0].keyword) && resolved_phase(0) == 0) {
        lines.push_back(steps[0].line);
    }
    for (size_t i = 0; i < steps.size(); ++i) {
        if (!is_primary(steps[i].keyword)) continue;
        int prefix_max = 0;
        for (size_t j = 0; j < i; ++j) {
            prefix_max = std::max(prefix_max, resolved_phase(j));
        }
        if (keyword_phase(steps[i].keyword) < prefix_max) lines.push_back(steps[i].line);
    }
    std::sort(lines.begin(), lines.end());
    return lines;
}

std::vector<int> finding_lines(const std::vector<Finding>& findings) {
    std::vector<int> lines;
    for (const auto& f : findings) lines.push_back(f.line);
    std::sort(lines.begin(), lines.end());
    return lines;
}

GherkinDocument parse_fixture(const std::string& name) {
    return parse_document(testsupport::read_fixture(name), name);
}

size_t count_rule(const std::vector<Finding>& findings, RuleId rule) {
    return std::count_if(findings.begin(), findings.end(),
                         [&](const Finding& f) { return f.rule == rule; });
}

}  // namespace

TEST_CASE("Given Then When yields exactly one order finding, on the When step") {
    const auto steps = make_steps({StepKeyword::Given, StepKeyword::Then, StepKeyword::When});
    const auto findings = check_logical_order(steps);
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].rule == RuleId::KeywordsNotInLogicalOrder);
    CHECK(findings[0].line == 3);
}

TEST_CASE("canonical Given When Then And is clean") {
    const auto steps = make_steps(
        {StepKeyword::Given, StepKeyword::When, StepKeyword::Then, StepKeyword::And});
    CHECK(check_logical_order(steps).empty());
}

TEST_CASE("When And Given flags only the Given") {
    const auto steps = make_steps({StepKeyword::When, StepKeyword::And, StepKeyword::Given});
    const auto findings = check_logical_order(steps);
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].line == 3);
}

TEST_CASE("opening And with no antecedent is one finding; background resolves it") {
    const auto steps = make_steps({StepKeyword::And, StepKeyword::Then});
    const auto unresolved = check_logical_order(steps);
    REQUIRE(unresolved.size() == 1);
    CHECK(unresolved[0].line == 1);

    CHECK(check_logical_order(steps, StepKeyword::Given).empty());
}

TEST_CASE("logical order matches the brute-force oracle on all sequences up to length 5") {
    static const StepKeyword kws[] = {StepKeyword::Given, StepKeyword::When,
                                      StepKeyword::Then, StepKeyword::And,
                                      StepKeyword::But};
    for (int length = 0; length <= 5; ++length) {
        int combos = 1;
        for (int i = 0; i < length; ++i) combos *= 5;
        for (int c = 0; c < combos; ++c) {
            std::vector<Step> steps;
            int code = c;
            for (int i = 0; i < length; ++i) {
                steps.push_back(Step{kws[code % 5], "t", i + 1});
                code /= 5;
            }
            for (auto antecedent : std::vector<std::optional<StepKeyword>>{
                     std::nullopt, StepKeyword::Given, StepKeyword::Then}) {
                CAPTURE(length);
                CAPTURE(c);
                REQUIRE(finding_lines(check_logical_order(steps, antecedent)) ==
                        oracle_violation_lines(steps, antecedent));
            }
        }
    }
}

TEST_CASE("And and But never violate order when a primary keyword precedes them") {
    static const StepKeyword primaries[] = {StepKeyword::Given, StepKeyword::When,
                                            StepKeyword::Then};
    for (auto first : primaries) {
        for (auto tail : {StepKeyword::And, StepKeyword::But}) {
            const auto findings =
                check_logical_order(make_steps({first, tail, tail, tail}));
            CHECK(findings.empty());
        }
    }
}

TEST_CASE("table 3 exemplar lints clean under the default config") {
    const auto doc = parse_fixture("table3_exemplar.feature");
    CHECK(lint(doc, LintConfig::defaults()).empty());
}

TEST_CASE("rule fixtures each produce exactly their one finding") {
    const auto config = LintConfig::defaults();

    SUBCASE("keyword order") {
        const auto findings = lint(parse_fixture("order_given_then_when.feature"), config);
        REQUIRE(findings.size() == 1);
        CHECK(findings[0].rule == RuleId::KeywordsNotInLogicalOrder);
        CHECK(findings[0].line == 7);
    }
    SUBCASE("trailing tag line") {
        const auto findings = lint(parse_fixture("trailing_tags.feature"), config);
        REQUIRE(findings.size() == 1);
        CHECK(findings[0].rule == RuleId::KeywordNotPresentInStep);
        CHECK(findings[0].line == 9);
    }
    SUBCASE("missing tags") {
        const auto findings = lint(parse_fixture("untagged_scenario.feature"), config);
        REQUIRE(findings.size() == 1);
        CHECK(findings[0].rule == RuleId::MissingTags);
        CHECK(findings[0].line == 3);
    }
    SUBCASE("restricted pattern in a scenario description") {
        const auto findings = lint(parse_fixture("dashes_description.feature"), config);
        REQUIRE(findings.size() == 1);
        CHECK(findings[0].rule == RuleId::RestrictedPatternsPresent);
        CHECK(findings[0].line == 5);
    }
}

TEST_CASE("feature description matching the quote-adjacent dash form is flagged") {
    const std::string text =
        "Feature: F\n"
        "  -----\" ----\"\n"
        "  @t\n"
        "  Scenario: S\n"
        "    Given x\n";
    const auto doc = parse_document(text, "");
    const auto findings =
        check_restricted_patterns(doc, LintConfig::defaults().restricted_patterns);
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].line == 2);
}

TEST_CASE("clean calculator feature has no restricted-pattern findings") {
    const auto doc = parse_fixture("table3_exemplar.feature");
    CHECK(check_restricted_patterns(doc, LintConfig::defaults().restricted_patterns).empty());
}

TEST_CASE("one finding per matching description line") {
    std::string text = "Feature: F\n";
    for (int i = 0; i < 10; ++i) text += "  ---\n";
    const auto doc = parse_document(text, "");
    const auto findings = check_restricted_patterns(doc, {R"(^[-=*_]{3,}$)"});
    CHECK(findings.size() == 10);
}

TEST_CASE("step text is exempt from restricted patterns") {
    const std::string text =
        "Feature: F\n"
        "  @t\n"
        "  Scenario: S\n"
        "    Given ----- dashes inside a step\n";
    const auto doc = parse_document(text, "");
    CHECK(check_restricted_patterns(doc, LintConfig::defaults().restricted_patterns).empty());
}

TEST_CASE("a disabled rule emits nothing") {
    auto config = LintConfig::defaults();
    config.enabled.erase(RuleId::MissingTags);
    const auto findings = lint(parse_fixture("untagged_scenario.feature"), config);
    CHECK(findings.empty());
}

TEST_CASE("a document with no feature header gets one structural finding") {
    const auto doc = parse_document("I cannot help with that request.\n", "apology.txt");
    const auto findings = lint(doc, LintConfig::defaults());
    CHECK(count_rule(findings, RuleId::NoFeature) == 1);
    CHECK_FALSE(findings.empty());  // the file counts as having syntax issues
}

TEST_CASE("missing-tags scope can include the feature") {
    const std::string text =
        "Feature: F\n"
        "  @t\n"
        "  Scenario: S\n"
        "    Given x\n";
    const auto doc = parse_document(text, "");

    auto config = LintConfig::defaults();
    CHECK(lint(doc, config).empty());

    config.missing_tags_scope = MissingTagsScope::ScenariosAndFeature;
    const auto findings = lint(doc, config);
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].rule == RuleId::MissingTags);
}

TEST_CASE("invalid restricted pattern raises LintConfigError") {
    auto config = LintConfig::defaults();
    config.restricted_patterns.push_back("([unclosed");
    const auto doc = parse_document("Feature: F\n", "");
    CHECK_THROWS_AS(lint(doc, config), LintConfigError);
}

TEST_CASE("config monotonicity: disabling a rule removes exactly its findings") {
    // A document violating several rules at once.
    const std::string text =
        "Feature: F\n"
        "  Scenario: untagged and out of order\n"
        "    Given x\n"
        "    Then z\n"
        "    When y\n"
        "    a raw non-step line\n"
        "\n"
        "@orphan\n";
    const auto doc = parse_document(text, "");
    const auto all = lint(doc, LintConfig::defaults());

    for (RuleId removed : kAllRules) {
        auto config = LintConfig::defaults();
        config.enabled.erase(removed);
        const auto subset = lint(doc, config);

        // every finding in the subset is in the full set, and nothing of
        // the removed rule survives
        CHECK(subset.size() == all.size() - count_rule(all, removed));
        for (const auto& f : subset) {
            CHECK(f.rule != removed);
            CHECK(config.enabled.count(f.rule) == 1);
        }
    }
}

TEST_CASE("findings are sorted by line then rule") {
    const std::string text =
        "Feature: F\n"
        "  Scenario: S\n"
        "    Given x\n"
        "    junk line\n"
        "\n"
        "@late-tags\n";
    const auto doc = parse_document(text, "");
    const auto findings = lint(doc, LintConfig::defaults());
    for (size_t i = 1; i < findings.size(); ++i) {
        const bool ordered =
            findings[i - 1].line < findings[i].line ||
            (findings[i - 1].line == findings[i].line &&
             static_cast<int>(findings[i - 1].rule) <= static_cast<int>(findings[i].rule));
        CHECK(ordered);
    }
}

TEST_CASE("lint config loads from JSON and rejects bad input") {
    const auto config = config_from_json(R"({
        "enabled": ["missing-tags", "no-feature"],
        "restricted_patterns": ["^[-]{3,}$"],
        "missing_tags_scope": "scenarios_and_feature"
    })");
    CHECK(config.enabled.size() == 2);
    CHECK(config.enabled.count(RuleId::MissingTags) == 1);
    CHECK(config.restricted_patterns.size() == 1);
    CHECK(config.missing_tags_scope == MissingTagsScope::ScenariosAndFeature);

    CHECK_THROWS_AS(config_from_json("not json"), LintConfigError);
    CHECK_THROWS_AS(config_from_json(R"({"enabled": ["bogus-rule"]})"), LintConfigError);
    CHECK_THROWS_AS(config_from_json(R"({"restricted_patterns": ["([bad"]})"),
                    LintConfigError);
    CHECK_THROWS_AS(config_from_json(R"({"missing_tags_scope": "everything"})"),
                    LintConfigError);
}

TEST_CASE("findings serialize to a JSON array of path/line/rule/message") {
    const auto doc = parse_fixture("untagged_scenario.feature");
    const auto json_text = findings_to_json(lint(doc, LintConfig::defaults()));
    CHECK(json_text.find("\"rule\": \"missing-tags\"") != std::string::npos);
    CHECK(json_text.find("\"line\": 3") != std::string::npos);
    CHECK(json_text.find("\"path\": \"untagged_scenario.feature\"") != std::string::npos);
}
