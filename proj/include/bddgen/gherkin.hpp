#ifndef BDDGEN_GHERKIN_HPP
#define BDDGEN_GHERKIN_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bddgen::gherkin {

enum class StepKeyword { Given, When, Then, And, But };

std::string_view keyword_name(StepKeyword k);

/// Parses one of "Given", "When", "Then", "And", "But" (case-sensitive).
std::optional<StepKeyword> parse_keyword(std::string_view word);

/// Given/When/Then are primary keywords; And/But inherit the phase of the
/// nearest preceding primary step.
bool is_primary(StepKeyword k);

/// Phase indices used by the logical-order rule: Given=1, When=2, Then=3.
int keyword_phase(StepKeyword k);

struct Step {
    StepKeyword keyword = StepKeyword::Given;
    std::string text;  // remainder of the line after the keyword, trimmed
    int line = 0;      // 1-based source line
};

/// One description line (prose under a Feature/Background/Scenario header,
/// before the first step).
struct SourceLine {
    std::string text;  // trimmed
    int line = 0;
};

enum class RawContext { InFeatureHeader, InBackground, InScenario, TopLevel };

/// A non-blank, non-comment line the parser could not classify. Kept
/// verbatim so lint rules can flag it and the serializer can re-emit it.
struct RawLine {
    std::string text;  // verbatim, including indentation
    int line = 0;
    RawContext context = RawContext::TopLevel;
};

struct Tag {
    std::string text;  // includes the leading '@'
    int line = 0;
};

struct Scenario {
    std::string name;  // may be empty
    std::vector<Tag> tags;
    std::vector<SourceLine> description;
    std::vector<Step> steps;
    std::vector<RawLine> raw_lines;
    int line = 0;  // line of the "Scenario:" header
};

struct Background {
    std::string name;  // text after "Background:", usually empty
    std::vector<SourceLine> description;
    std::vector<Step> steps;
    std::vector<RawLine> raw_lines;
    int line = 0;
};

/// Tolerant structural model of a feature file. Malformed input never fails
/// to parse; it surfaces as missing fields or RawLines.
struct GherkinDocument {
    std::optional<std::string> feature_name;  // nullopt when no "Feature:" line
    std::vector<SourceLine> feature_description;
    std::vector<Tag> feature_tags;
    std::optional<Background> background;
    std::vector<Scenario> scenarios;          // ordered by line number
    std::vector<RawLine> trailing_raw;        // top-level lines outside any block
    std::string source_path;
};

class GherkinError : public std::runtime_error {
public:
    explicit GherkinError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Thrown by parse_document for non-UTF-8 input; the only parse failure.
class InvalidEncoding : public GherkinError {
public:
    explicit InvalidEncoding(const std::string& msg) : GherkinError(msg) {}
};

/// Line-oriented tolerant parse. Every non-blank, non-comment input line is
/// modeled exactly once (header, description, tag, step, or RawLine).
GherkinDocument parse_document(std::string_view text, std::string source_path = {});

/// Canonical form: tags on one line above their owner, steps indented, one
/// blank line between blocks. RawLines are re-emitted verbatim in position.
std::string serialize(const GherkinDocument& doc);

/// Equality over content, ignoring line numbers and source_path.
bool structurally_equal(const GherkinDocument& a, const GherkinDocument& b);

/// Number of source lines the document models; equals the count of
/// non-blank non-comment lines of the parsed input.
size_t modeled_line_count(const GherkinDocument& doc);

}  // namespace bddgen::gherkin

#endif
