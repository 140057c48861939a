#include "bddgen/stories.hpp"

#include <filesystem>
#include <set>
#include <sstream>

#include "bddgen/util.hpp"

namespace bddgen::stories {

namespace {

// One RFC-4180 record: comma-separated, double-quote quoting, "" escapes,
// newlines allowed inside quoted fields.
struct CsvReader {
    std::string_view text;
    size_t pos = 0;
    int record_no = 0;  // 1-based, counting the header

    bool at_end() const { return pos >= text.size(); }

    std::optional<std::vector<std::string>> next_record() {
        if (at_end()) return std::nullopt;
        ++record_no;
        std::vector<std::string> fields;
        std::string field;
        bool in_quotes = false;
        bool quoted_field = false;

        while (pos < text.size()) {
            char c = text[pos];
            if (in_quotes) {
                if (c == '"') {
                    if (pos + 1 < text.size() && text[pos + 1] == '"') {
                        field.push_back('"');
                        pos += 2;
                    } else {
                        in_quotes = false;
                        ++pos;
                    }
                } else {
                    field.push_back(c);
                    ++pos;
                }
                continue;
            }
            if (c == '"' && field.empty() && !quoted_field) {
                in_quotes = true;
                quoted_field = true;
                ++pos;
                continue;
            }
            if (c == ',') {
                fields.push_back(std::move(field));
                field.clear();
                quoted_field = false;
                ++pos;
                continue;
            }
            if (c == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') {
                pos += 2;
                fields.push_back(std::move(field));
                return fields;
            }
            if (c == '\n') {
                ++pos;
                fields.push_back(std::move(field));
                return fields;
            }
            field.push_back(c);
            ++pos;
        }
        if (in_quotes) {
            throw CsvError(CsvError::Code::MalformedCsv,
                           "unbalanced quote in record " + std::to_string(record_no),
                           record_no);
        }
        fields.push_back(std::move(field));
        return fields;
    }
};

bool record_is_blank(const std::vector<std::string>& fields) {
    return fields.size() == 1 && util::is_blank(fields[0]);
}

std::string csv_quote(const std::string& field) {
    const bool needs_quotes = field.find_first_of(",\"\r\n") != std::string::npos ||
                              (!field.empty() && (field.front() == ' ' || field.back() == ' '));
    if (!needs_quotes) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace

std::vector<UserStory> parse_stories_csv(std::string_view text, const CsvSchema& schema) {
    if (!util::utf8_valid(text)) {
        throw CsvError(CsvError::Code::MalformedCsv, "dataset is not valid UTF-8");
    }
    text = util::strip_bom(text);

    CsvReader reader{text};
    auto header = reader.next_record();
    if (!header || record_is_blank(*header)) {
        throw CsvError(CsvError::Code::EmptyDataset, "dataset has no header row");
    }

    auto column_index = [&](const std::string& name) -> std::optional<size_t> {
        for (size_t i = 0; i < header->size(); ++i) {
            if (util::trim((*header)[i]) == name) return i;
        }
        return std::nullopt;
    };

    const auto id_idx = column_index(schema.id_column);
    if (!id_idx) {
        throw CsvError(CsvError::Code::MalformedCsv,
                       "header lacks id column '" + schema.id_column + "'");
    }
    const auto desc_idx = column_index(schema.description_column);
    if (!desc_idx) {
        throw CsvError(CsvError::Code::MalformedCsv,
                       "header lacks description column '" + schema.description_column + "'");
    }
    const auto source_idx = column_index(schema.source_column);
    const size_t width = header->size();

    std::vector<UserStory> out;
    std::set<std::string> seen_ids;
    int data_row = 0;

    while (auto record = reader.next_record()) {
        if (record_is_blank(*record)) continue;  // stray trailing newline
        ++data_row;
        if (record->size() != width) {
            throw CsvError(CsvError::Code::MalformedCsv,
                           "row " + std::to_string(data_row) + " has " +
                               std::to_string(record->size()) + " fields, expected " +
                               std::to_string(width),
                           data_row);
        }
        UserStory story;
        story.id = util::trim((*record)[*id_idx]);
        story.description = util::trim((*record)[*desc_idx]);
        if (source_idx && !util::is_blank((*record)[*source_idx])) {
            story.source = util::trim((*record)[*source_idx]);
        }
        if (story.id.empty()) {
            throw CsvError(CsvError::Code::MalformedCsv,
                           "row " + std::to_string(data_row) + " has a blank id", data_row);
        }
        if (story.description.empty()) {
            throw CsvError(CsvError::Code::BlankDescription,
                           "row " + std::to_string(data_row) + " (id '" + story.id +
                               "') has a blank description",
                           data_row);
        }
        if (!seen_ids.insert(story.id).second) {
            throw CsvError(CsvError::Code::DuplicateId,
                           "duplicate story id '" + story.id + "' at row " +
                               std::to_string(data_row),
                           data_row);
        }
        out.push_back(std::move(story));
    }

    if (out.empty()) {
        throw CsvError(CsvError::Code::EmptyDataset, "dataset has a header but no data rows");
    }
    return out;
}

std::vector<UserStory> load_stories(const std::filesystem::path& path,
                                    const CsvSchema& schema) {
    if (!std::filesystem::exists(path)) {
        throw CsvError(CsvError::Code::FileNotFound, "dataset not found: " + path.string());
    }
    return parse_stories_csv(util::read_file(path), schema);
}

std::string write_stories_csv(const std::vector<UserStory>& stories,
                              const CsvSchema& schema) {
    bool any_source = false;
    for (const auto& s : stories) {
        if (s.source) any_source = true;
    }
    std::ostringstream out;
    out << csv_quote(schema.id_column) << ',' << csv_quote(schema.description_column);
    if (any_source) out << ',' << csv_quote(schema.source_column);
    out << '\n';
    for (const auto& s : stories) {
        out << csv_quote(s.id) << ',' << csv_quote(s.description);
        if (any_source) out << ',' << csv_quote(s.source.value_or(""));
        out << '\n';
    }
    return out.str();
}

}  // namespace bddgen::stories
