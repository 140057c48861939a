#ifndef BDDGEN_EVALUATION_HPP
#define BDDGEN_EVALUATION_HPP

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "bddgen/lint.hpp"
#include "bddgen/prompts.hpp"

namespace bddgen::eval {

struct FileVerdict {
    std::string story_id;
    std::string model_id;
    prompts::Technique technique = prompts::Technique::ZeroShot;
    std::string path;
    std::vector<lint::Finding> findings;

    bool clean() const { return findings.empty(); }
};

struct AccuracySummary {
    std::string model_id;
    prompts::Technique technique = prompts::Technique::ZeroShot;
    long clean_count = 0;
    long total_count = 0;
    double accuracy = 0.0;  // clean_count / total_count, exactly
};

struct ErrorMatrix {
    using Key = std::tuple<std::string, prompts::Technique, lint::RuleId>;
    std::map<Key, long> counts;  // absent keys mean zero

    long total() const;
    long technique_total(prompts::Technique t) const;
    long cell(const std::string& model, prompts::Technique t, lint::RuleId rule) const;
};

class EvalError : public std::runtime_error {
public:
    enum class Code { EmptyGroup, EmptyMatrix, EmptyInput };
    EvalError(Code code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
    Code code() const { return code_; }

private:
    Code code_;
};

/// Validation accuracy for one (model, technique) group: clean files over
/// total files. A group with no verdicts is an error, not accuracy 0.
AccuracySummary accuracy(const std::vector<FileVerdict>& verdicts,
                         const std::string& model_id, prompts::Technique technique);

/// One summary per (model, technique) present, ordered by model then
/// technique.
std::vector<AccuracySummary> accuracy_by_group(const std::vector<FileVerdict>& verdicts);

ErrorMatrix error_matrix(const std::vector<FileVerdict>& verdicts);

/// Fraction of all findings contributed by each technique; shares sum to 1.
std::map<prompts::Technique, double> technique_share(const ErrorMatrix& matrix);

/// Report writers. Models are ordered lexicographically; rule rows follow
/// the error-type taxonomy with the structural no-feature row last.
void write_accuracy_csv(const std::filesystem::path& path,
                        const std::vector<AccuracySummary>& summaries);
void write_error_matrix_csv(const std::filesystem::path& path, const ErrorMatrix& matrix);
void write_errors_long_csv(const std::filesystem::path& path, const ErrorMatrix& matrix);
void write_summary_json(const std::filesystem::path& path,
                        const std::vector<AccuracySummary>& summaries,
                        const ErrorMatrix& matrix,
                        const std::vector<std::string>& run_ids,
                        long generation_failures);

}  // namespace bddgen::eval

#endif
