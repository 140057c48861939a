#include "bddgen/gherkin.hpp"

#include <set>
#include <sstream>

#include "bddgen/util.hpp"

namespace bddgen::gherkin {

namespace {

constexpr std::string_view kFeaturePrefix = "Feature:";
constexpr std::string_view kBackgroundPrefix = "Background:";
constexpr std::string_view kScenarioPrefix = "Scenario:";

std::vector<std::string> split_words(std::string_view s) {
    std::vector<std::string> words;
    size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        size_t start = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
        if (i > start) words.emplace_back(s.substr(start, i - start));
    }
    return words;
}

// A tag line consists solely of '@'-prefixed tokens, e.g. "@smoke @fast".
bool is_tag_line(std::string_view trimmed, std::vector<std::string>* tags_out) {
    if (trimmed.empty() || trimmed[0] != '@') return false;
    auto words = split_words(trimmed);
    for (const auto& w : words) {
        if (w.size() < 2 || w[0] != '@') return false;
    }
    if (tags_out) *tags_out = std::move(words);
    return true;
}

std::optional<Step> try_parse_step(std::string_view trimmed, int line) {
    size_t sp = trimmed.find_first_of(" \t");
    std::string_view word = sp == std::string_view::npos ? trimmed : trimmed.substr(0, sp);
    auto kw = parse_keyword(word);
    if (!kw) return std::nullopt;
    std::string text = sp == std::string_view::npos ? std::string{}
                                                    : util::trim(trimmed.substr(sp + 1));
    return Step{*kw, std::move(text), line};
}

struct PendingTagLine {
    std::string raw_text;  // verbatim line
    std::vector<std::string> tags;
    int line = 0;
};

}  // namespace

std::string_view keyword_name(StepKeyword k) {
    switch (k) {
        case StepKeyword::Given: return "Given";
        case StepKeyword::When: return "When";
        case StepKeyword::Then: return "Then";
        case StepKeyword::And: return "And";
        case StepKeyword::But: return "But";
    }
    return "";
}

std::optional<StepKeyword> parse_keyword(std::string_view word) {
    if (word == "Given") return StepKeyword::Given;
    if (word == "When") return StepKeyword::When;
    if (word == "Then") return StepKeyword::Then;
    if (word == "And") return StepKeyword::And;
    if (word == "But") return StepKeyword::But;
    return std::nullopt;
}

bool is_primary(StepKeyword k) {
    return k == StepKeyword::Given || k == StepKeyword::When || k == StepKeyword::Then;
}

int keyword_phase(StepKeyword k) {
    switch (k) {
        case StepKeyword::Given: return 1;
        case StepKeyword::When: return 2;
        case StepKeyword::Then: return 3;
        default: return 0;  // And/But carry no phase of their own
    }
}

GherkinDocument parse_document(std::string_view text, std::string source_path) {
    if (!util::utf8_valid(text)) {
        throw InvalidEncoding("input is not valid UTF-8: " + source_path);
    }
    text = util::strip_bom(text);

    GherkinDocument doc;
    doc.source_path = std::move(source_path);

    enum class State { TopLevel, FeatureHeader, InBackground, InScenario };
    State state = State::TopLevel;
    std::vector<PendingTagLine> pending_tags;

    auto bind_tags = [&](std::vector<Tag>& dest) {
        for (auto& tl : pending_tags) {
            for (auto& t : tl.tags) dest.push_back(Tag{std::move(t), tl.line});
        }
        pending_tags.clear();
    };

    auto current_raw_context = [&]() {
        switch (state) {
            case State::FeatureHeader: return RawContext::InFeatureHeader;
            case State::InBackground: return RawContext::InBackground;
            case State::InScenario: return RawContext::InScenario;
            default: return RawContext::TopLevel;
        }
    };

    const auto lines = util::split_lines(text);
    for (size_t idx = 0; idx < lines.size(); ++idx) {
        const int lineno = static_cast<int>(idx) + 1;
        const std::string& raw = lines[idx];
        if (util::is_blank(raw)) continue;
        const std::string trimmed = util::trim(raw);
        if (trimmed[0] == '#') continue;  // comments are not modeled

        std::vector<std::string> tag_words;
        if (is_tag_line(trimmed, &tag_words)) {
            pending_tags.push_back(PendingTagLine{raw, std::move(tag_words), lineno});
            continue;
        }

        if (!doc.feature_name && trimmed.starts_with(kFeaturePrefix)) {
            doc.feature_name = util::trim(trimmed.substr(kFeaturePrefix.size()));
            bind_tags(doc.feature_tags);
            state = State::FeatureHeader;
            continue;
        }

        if (!doc.background && trimmed.starts_with(kBackgroundPrefix) &&
            state != State::InScenario) {
            Background bg;
            bg.name = util::trim(trimmed.substr(kBackgroundPrefix.size()));
            bg.line = lineno;
            doc.background = std::move(bg);
            state = State::InBackground;
            continue;
        }

        if (trimmed.starts_with(kScenarioPrefix)) {
            Scenario sc;
            sc.name = util::trim(trimmed.substr(kScenarioPrefix.size()));
            sc.line = lineno;
            bind_tags(sc.tags);
            doc.scenarios.push_back(std::move(sc));
            state = State::InScenario;
            continue;
        }

        if (state == State::InBackground || state == State::InScenario) {
            if (auto step = try_parse_step(trimmed, lineno)) {
                if (state == State::InBackground) {
                    doc.background->steps.push_back(std::move(*step));
                } else {
                    doc.scenarios.back().steps.push_back(std::move(*step));
                }
                continue;
            }
            // Prose before the first step is description; after it, raw.
            auto& steps = state == State::InBackground ? doc.background->steps
                                                       : doc.scenarios.back().steps;
            if (steps.empty()) {
                auto& desc = state == State::InBackground
                                 ? doc.background->description
                                 : doc.scenarios.back().description;
                desc.push_back(SourceLine{trimmed, lineno});
            } else {
                auto& raws = state == State::InBackground
                                 ? doc.background->raw_lines
                                 : doc.scenarios.back().raw_lines;
                raws.push_back(RawLine{raw, lineno, current_raw_context()});
            }
            continue;
        }

        if (state == State::FeatureHeader) {
            doc.feature_description.push_back(SourceLine{trimmed, lineno});
            continue;
        }

        doc.trailing_raw.push_back(RawLine{raw, lineno, RawContext::TopLevel});
    }

    // Tags bind forward; with no header left to bind to they are preserved
    // as top-level raw lines (e.g. tags written at the end of the file).
    for (auto& tl : pending_tags) {
        doc.trailing_raw.push_back(RawLine{tl.raw_text, tl.line, RawContext::TopLevel});
    }
    return doc;
}

namespace {

void emit_tags(std::ostringstream& out, const std::vector<Tag>& tags,
               std::string_view indent) {
    if (tags.empty()) return;
    out << indent;
    for (size_t i = 0; i < tags.size(); ++i) {
        if (i) out << ' ';
        out << tags[i].text;
    }
    out << '\n';
}

void emit_step(std::ostringstream& out, const Step& s, std::string_view indent) {
    out << indent << keyword_name(s.keyword);
    if (!s.text.empty()) out << ' ' << s.text;
    out << '\n';
}

// Steps and raw lines interleave by their original line order.
void emit_body(std::ostringstream& out, const std::vector<Step>& steps,
               const std::vector<RawLine>& raws, std::string_view indent) {
    size_t si = 0;
    size_t ri = 0;
    while (si < steps.size() || ri < raws.size()) {
        const bool take_step =
            ri >= raws.size() || (si < steps.size() && steps[si].line <= raws[ri].line);
        if (take_step) {
            emit_step(out, steps[si++], indent);
        } else {
            out << raws[ri++].text << '\n';
        }
    }
}

bool is_orphan_tag_raw(const RawLine& r) {
    return is_tag_line(util::trim(r.text), nullptr);
}

}  // namespace

std::string serialize(const GherkinDocument& doc) {
    std::ostringstream out;
    bool wrote_block = false;

    // Top-level prose can only have preceded the first block, so it is
    // re-emitted first. Orphan tag lines must stay at the end: anywhere
    // earlier they would bind to the next header on reparse.
    std::vector<const RawLine*> leading;
    std::vector<const RawLine*> trailing;
    for (const auto& r : doc.trailing_raw) {
        if (is_orphan_tag_raw(r)) {
            trailing.push_back(&r);
        } else {
            leading.push_back(&r);
        }
    }

    for (const auto* r : leading) out << r->text << '\n';
    if (!leading.empty()) wrote_block = true;

    if (doc.feature_name) {
        if (wrote_block) out << '\n';
        emit_tags(out, doc.feature_tags, "");
        out << "Feature:";
        if (!doc.feature_name->empty()) out << ' ' << *doc.feature_name;
        out << '\n';
        for (const auto& d : doc.feature_description) out << "  " << d.text << '\n';
        wrote_block = true;
    }

    if (doc.background) {
        if (wrote_block) out << '\n';
        out << "  Background:";
        if (!doc.background->name.empty()) out << ' ' << doc.background->name;
        out << '\n';
        for (const auto& d : doc.background->description) out << "    " << d.text << '\n';
        emit_body(out, doc.background->steps, doc.background->raw_lines, "    ");
        wrote_block = true;
    }

    for (const auto& sc : doc.scenarios) {
        if (wrote_block) out << '\n';
        emit_tags(out, sc.tags, "  ");
        out << "  Scenario:";
        if (!sc.name.empty()) out << ' ' << sc.name;
        out << '\n';
        for (const auto& d : sc.description) out << "    " << d.text << '\n';
        emit_body(out, sc.steps, sc.raw_lines, "    ");
        wrote_block = true;
    }

    for (const auto* r : trailing) out << r->text << '\n';
    return out.str();
}

namespace {

bool steps_equal(const std::vector<Step>& a, const std::vector<Step>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].keyword != b[i].keyword || a[i].text != b[i].text) return false;
    }
    return true;
}

bool tags_equal(const std::vector<Tag>& a, const std::vector<Tag>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].text != b[i].text) return false;
    }
    return true;
}

bool lines_equal(const std::vector<SourceLine>& a, const std::vector<SourceLine>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].text != b[i].text) return false;
    }
    return true;
}

bool raws_equal(const std::vector<RawLine>& a, const std::vector<RawLine>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].text != b[i].text || a[i].context != b[i].context) return false;
    }
    return true;
}

}  // namespace

bool structurally_equal(const GherkinDocument& a, const GherkinDocument& b) {
    if (a.feature_name != b.feature_name) return false;
    if (!lines_equal(a.feature_description, b.feature_description)) return false;
    if (!tags_equal(a.feature_tags, b.feature_tags)) return false;
    if (a.background.has_value() != b.background.has_value()) return false;
    if (a.background) {
        if (a.background->name != b.background->name) return false;
        if (!lines_equal(a.background->description, b.background->description)) return false;
        if (!steps_equal(a.background->steps, b.background->steps)) return false;
        if (!raws_equal(a.background->raw_lines, b.background->raw_lines)) return false;
    }
    if (a.scenarios.size() != b.scenarios.size()) return false;
    for (size_t i = 0; i < a.scenarios.size(); ++i) {
        const auto& x = a.scenarios[i];
        const auto& y = b.scenarios[i];
        if (x.name != y.name || !tags_equal(x.tags, y.tags) ||
            !lines_equal(x.description, y.description) || !steps_equal(x.steps, y.steps) ||
            !raws_equal(x.raw_lines, y.raw_lines)) {
            return false;
        }
    }
    return raws_equal(a.trailing_raw, b.trailing_raw);
}

size_t modeled_line_count(const GherkinDocument& doc) {
    size_t n = 0;
    std::set<int> tag_lines;
    auto count_tags = [&](const std::vector<Tag>& tags) {
        tag_lines.clear();
        for (const auto& t : tags) tag_lines.insert(t.line);
        n += tag_lines.size();
    };

    if (doc.feature_name) ++n;
    n += doc.feature_description.size();
    count_tags(doc.feature_tags);
    if (doc.background) {
        ++n;
        n += doc.background->description.size();
        n += doc.background->steps.size();
        n += doc.background->raw_lines.size();
    }
    for (const auto& sc : doc.scenarios) {
        ++n;
        count_tags(sc.tags);
        n += sc.description.size();
        n += sc.steps.size();
        n += sc.raw_lines.size();
    }
    n += doc.trailing_raw.size();
    return n;
}

}  // namespace bddgen::gherkin
