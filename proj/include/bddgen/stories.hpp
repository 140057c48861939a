#ifndef BDDGEN_STORIES_HPP
#define BDDGEN_STORIES_HPP

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bddgen::stories {

struct UserStory {
    std::string id;           // unique within a dataset
    std::string description;  // non-empty after trimming
    std::optional<std::string> source;

    bool operator==(const UserStory&) const = default;
};

/// Column-name mapping for the dataset CSV. `source_column` is looked up
/// opportunistically; the other two must exist in the header.
struct CsvSchema {
    std::string id_column = "id";
    std::string description_column = "description";
    std::string source_column = "source";
};

class CsvError : public std::runtime_error {
public:
    enum class Code {
        FileNotFound,
        MalformedCsv,
        DuplicateId,
        EmptyDataset,
        BlankDescription,
    };

    CsvError(Code code, const std::string& msg, int row = 0)
        : std::runtime_error(msg), code_(code), row_(row) {}

    Code code() const { return code_; }
    /// 1-based data row (0 when not applicable).
    int row() const { return row_; }

private:
    Code code_;
    int row_;
};

/// Parses RFC-4180-style CSV text (UTF-8, BOM tolerated) into stories.
/// Descriptions are trimmed at both ends; interior whitespace is kept
/// verbatim because it feeds the prompt.
std::vector<UserStory> parse_stories_csv(std::string_view text,
                                         const CsvSchema& schema = {});

std::vector<UserStory> load_stories(const std::filesystem::path& path,
                                    const CsvSchema& schema = {});

/// Inverse of parse_stories_csv; emits the source column only when at
/// least one story carries a source.
std::string write_stories_csv(const std::vector<UserStory>& stories,
                              const CsvSchema& schema = {});

}  // namespace bddgen::stories

#endif
