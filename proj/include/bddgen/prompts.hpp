#ifndef BDDGEN_PROMPTS_HPP
#define BDDGEN_PROMPTS_HPP

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bddgen/stories.hpp"

namespace bddgen::prompts {

enum class Technique { ZeroShot, FewShot };

/// Short name used in CLI flags and output paths: "zero" / "few".
std::string_view technique_name(Technique t);
std::optional<Technique> parse_technique(std::string_view name);

enum class Role { System, User, Assistant };

std::string_view role_name(Role r);

struct Message {
    Role role = Role::User;
    std::string text;

    bool operator==(const Message&) const = default;
};

/// A prompt template: a body with {user_story} and {instructions}
/// placeholders, six instruction lines, and (few-shot only) an exemplar
/// feature file delivered as an assistant turn.
struct PromptTemplate {
    Technique technique = Technique::ZeroShot;
    std::string body;
    std::array<std::string, 6> instruction_lines;
    std::optional<std::string> exemplar;  // present iff technique is FewShot
    std::string story_placeholder = "{user_story}";
    std::optional<std::string> system_message;  // none by default
};

struct PromptPayload {
    std::vector<Message> messages;
    Technique technique = Technique::ZeroShot;
    std::string story_id;

    bool operator==(const PromptPayload&) const = default;
};

class PromptError : public std::runtime_error {
public:
    enum class Code { EmptyStory, PlaceholderMissing };
    PromptError(Code code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
    Code code() const { return code_; }

private:
    Code code_;
};

struct TemplatePair {
    PromptTemplate zero;
    PromptTemplate few;
};

/// The built-in zero-shot and few-shot templates. Both share the same six
/// instruction lines; the few-shot one adds a complete five-scenario
/// calculator exemplar.
TemplatePair default_templates();

/// Substitutes {user_story} with the story description and {instructions}
/// with the numbered instruction list; few-shot appends the exemplar as an
/// assistant message after the user message.
PromptPayload build_prompt(const stories::UserStory& story, const PromptTemplate& tmpl);

/// Replaces the default body with the contents of a plain-text template
/// file (placeholders {user_story} / {instructions}).
PromptTemplate with_body(PromptTemplate tmpl, std::string body);

/// Content hash of a template pair, recorded in run manifests.
std::string templates_digest(const TemplatePair& templates);

}  // namespace bddgen::prompts

#endif
