#include "bddgen/prompts.hpp"

#include <sstream>

#include "bddgen/util.hpp"

namespace bddgen::prompts {

namespace {

constexpr std::string_view kInstructionsPlaceholder = "{instructions}";

const std::array<std::string, 6>& shared_instructions() {
    static const std::array<std::string, 6> lines = {
        "Start the feature file with the 'Feature:' keyword.",
        "Provide a descriptive feature name to specify the context of the scenarios.",
        "Include steps in the Background if they are repeated at the beginning of all "
        "scenarios in a feature.",
        "The background step is executed before every scenario.",
        "Use tags as annotations to group and organize scenarios and features.",
        "Tags are written with the '@' symbol followed by a significant text.",
    };
    return lines;
}

constexpr std::string_view kBody =
    "Generate a feature file with 5 Gherkin Scenarios for {user_story} by "
    "following below instructions.\n"
    "\n"
    "{instructions}\n";

// Complete five-scenario calculator exemplar. The first two scenarios are
// the classic addition/subtraction pair; the rest extend the same style.
constexpr std::string_view kCalculatorExemplar =
    "Feature: Basic Calculator Operations\n"
    "\n"
    "  As a user, I need a simple calculator for quick and accurate basic operations.\n"
    "\n"
    "  Background:\n"
    "    Given I have opened the calculator application\n"
    "\n"
    "  @basicoperations\n"
    "  Scenario: Performing Addition\n"
    "    When I enter \"5\" into the calculator\n"
    "    And I add \"7\"\n"
    "    Then the result should be \"12\"\n"
    "\n"
    "  @basicoperations\n"
    "  Scenario: Performing Subtraction\n"
    "    When I enter \"10\" into the calculator\n"
    "    And I subtract \"3\"\n"
    "    Then the result should be \"7\"\n"
    "\n"
    "  @basicoperations\n"
    "  Scenario: Performing Multiplication\n"
    "    When I enter \"6\" into the calculator\n"
    "    And I multiply by \"7\"\n"
    "    Then the result should be \"42\"\n"
    "\n"
    "  @basicoperations\n"
    "  Scenario: Performing Division\n"
    "    When I enter \"20\" into the calculator\n"
    "    And I divide by \"4\"\n"
    "    Then the result should be \"5\"\n"
    "\n"
    "  @basicoperations\n"
    "  Scenario: Clearing the Display\n"
    "    When I enter \"99\" into the calculator\n"
    "    And I press the clear button\n"
    "    Then the display should show \"0\"\n";

std::string replace_all(std::string text, std::string_view token, std::string_view value) {
    size_t pos = 0;
    while ((pos = text.find(token, pos)) != std::string::npos) {
        text.replace(pos, token.size(), value);
        pos += value.size();
    }
    return text;
}

std::string numbered_instructions(const std::array<std::string, 6>& lines) {
    std::ostringstream out;
    for (size_t i = 0; i < lines.size(); ++i) {
        if (i) out << '\n';
        out << (i + 1) << ". " << lines[i];
    }
    return out.str();
}

}  // namespace

std::string_view technique_name(Technique t) {
    return t == Technique::ZeroShot ? "zero" : "few";
}

std::optional<Technique> parse_technique(std::string_view name) {
    if (name == "zero" || name == "zero-shot" || name == "zeroshot") {
        return Technique::ZeroShot;
    }
    if (name == "few" || name == "few-shot" || name == "fewshot") {
        return Technique::FewShot;
    }
    return std::nullopt;
}

std::string_view role_name(Role r) {
    switch (r) {
        case Role::System: return "system";
        case Role::User: return "user";
        case Role::Assistant: return "assistant";
    }
    return "";
}

TemplatePair default_templates() {
    TemplatePair pair;
    pair.zero.technique = Technique::ZeroShot;
    pair.zero.body = std::string(kBody);
    pair.zero.instruction_lines = shared_instructions();

    pair.few.technique = Technique::FewShot;
    pair.few.body = std::string(kBody);
    pair.few.instruction_lines = shared_instructions();
    pair.few.exemplar = std::string(kCalculatorExemplar);
    return pair;
}

PromptPayload build_prompt(const stories::UserStory& story, const PromptTemplate& tmpl) {
    const std::string description = util::trim(story.description);
    if (description.empty()) {
        throw PromptError(PromptError::Code::EmptyStory,
                          "story '" + story.id + "' has a blank description");
    }
    if (tmpl.body.find(tmpl.story_placeholder) == std::string::npos) {
        throw PromptError(PromptError::Code::PlaceholderMissing,
                          "template body lacks the story placeholder '" +
                              tmpl.story_placeholder + "'");
    }

    std::string text = replace_all(tmpl.body, tmpl.story_placeholder, description);
    text = replace_all(std::move(text), kInstructionsPlaceholder,
                       numbered_instructions(tmpl.instruction_lines));

    PromptPayload payload;
    payload.technique = tmpl.technique;
    payload.story_id = story.id;
    if (tmpl.system_message) {
        payload.messages.push_back(Message{Role::System, *tmpl.system_message});
    }
    payload.messages.push_back(Message{Role::User, std::move(text)});
    if (tmpl.technique == Technique::FewShot && tmpl.exemplar) {
        payload.messages.push_back(Message{Role::Assistant, *tmpl.exemplar});
    }
    return payload;
}

PromptTemplate with_body(PromptTemplate tmpl, std::string body) {
    tmpl.body = std::move(body);
    return tmpl;
}

std::string templates_digest(const TemplatePair& templates) {
    std::ostringstream canon;
    for (const PromptTemplate* t : {&templates.zero, &templates.few}) {
        canon << technique_name(t->technique) << '\x1f' << t->body << '\x1f';
        for (const auto& line : t->instruction_lines) canon << line << '\x1f';
        canon << t->exemplar.value_or("") << '\x1f'
              << t->system_message.value_or("") << '\x1e';
    }
    return util::sha256_hex(canon.str());
}

}  // namespace bddgen::prompts
