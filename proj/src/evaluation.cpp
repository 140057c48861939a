#include "bddgen/evaluation.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bddgen/util.hpp"

namespace bddgen::eval {

using nlohmann::json;
using prompts::Technique;

long ErrorMatrix::total() const {
    long n = 0;
    for (const auto& [key, count] : counts) n += count;
    return n;
}

long ErrorMatrix::technique_total(Technique t) const {
    long n = 0;
    for (const auto& [key, count] : counts) {
        if (std::get<1>(key) == t) n += count;
    }
    return n;
}

long ErrorMatrix::cell(const std::string& model, Technique t, lint::RuleId rule) const {
    auto it = counts.find(Key{model, t, rule});
    return it == counts.end() ? 0 : it->second;
}

AccuracySummary accuracy(const std::vector<FileVerdict>& verdicts,
                         const std::string& model_id, Technique technique) {
    AccuracySummary summary;
    summary.model_id = model_id;
    summary.technique = technique;
    for (const auto& v : verdicts) {
        if (v.model_id != model_id || v.technique != technique) continue;
        ++summary.total_count;
        if (v.clean()) ++summary.clean_count;
    }
    if (summary.total_count == 0) {
        throw EvalError(EvalError::Code::EmptyGroup,
                        "no verdicts for model '" + model_id + "', technique '" +
                            std::string(prompts::technique_name(technique)) + "'");
    }
    summary.accuracy =
        static_cast<double>(summary.clean_count) / static_cast<double>(summary.total_count);
    return summary;
}

std::vector<AccuracySummary> accuracy_by_group(const std::vector<FileVerdict>& verdicts) {
    std::set<std::pair<std::string, Technique>> groups;
    for (const auto& v : verdicts) groups.insert({v.model_id, v.technique});
    std::vector<AccuracySummary> out;
    out.reserve(groups.size());
    for (const auto& [model, technique] : groups) {
        out.push_back(accuracy(verdicts, model, technique));
    }
    return out;
}

ErrorMatrix error_matrix(const std::vector<FileVerdict>& verdicts) {
    ErrorMatrix matrix;
    for (const auto& v : verdicts) {
        for (const auto& f : v.findings) {
            ++matrix.counts[ErrorMatrix::Key{v.model_id, v.technique, f.rule}];
        }
    }
    return matrix;
}

std::map<Technique, double> technique_share(const ErrorMatrix& matrix) {
    const long total = matrix.total();
    if (total == 0) {
        throw EvalError(EvalError::Code::EmptyMatrix,
                        "error matrix is empty; technique shares are undefined");
    }
    std::map<Technique, double> shares;
    for (Technique t : {Technique::ZeroShot, Technique::FewShot}) {
        const long n = matrix.technique_total(t);
        if (n > 0) shares[t] = static_cast<double>(n) / static_cast<double>(total);
    }
    return shares;
}

namespace {

std::vector<std::string> matrix_models(const ErrorMatrix& matrix) {
    std::set<std::string> models;
    for (const auto& [key, count] : matrix.counts) models.insert(std::get<0>(key));
    return {models.begin(), models.end()};
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace

void write_accuracy_csv(const std::filesystem::path& path,
                        const std::vector<AccuracySummary>& summaries) {
    std::ostringstream out;
    out << "model,technique,clean,total,accuracy\n";
    auto sorted = summaries;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        if (a.model_id != b.model_id) return a.model_id < b.model_id;
        return static_cast<int>(a.technique) < static_cast<int>(b.technique);
    });
    for (const auto& s : sorted) {
        out << csv_field(s.model_id) << ',' << prompts::technique_name(s.technique) << ','
            << s.clean_count << ',' << s.total_count << ','
            << util::format_double(s.accuracy) << '\n';
    }
    util::write_file_atomic(path, out.str());
}

void write_error_matrix_csv(const std::filesystem::path& path, const ErrorMatrix& matrix) {
    const auto models = matrix_models(matrix);
    std::ostringstream out;
    out << "technique,error_type";
    for (const auto& m : models) out << ',' << csv_field(m);
    out << ",total\n";
    for (Technique t : {Technique::ZeroShot, Technique::FewShot}) {
        if (matrix.technique_total(t) == 0) continue;
        for (lint::RuleId rule : lint::kAllRules) {
            long row_total = 0;
            std::ostringstream row;
            for (const auto& m : models) {
                const long n = matrix.cell(m, t, rule);
                row << ',' << n;
                row_total += n;
            }
            out << prompts::technique_name(t) << ',' << lint::rule_name(rule) << row.str()
                << ',' << row_total << '\n';
        }
    }
    util::write_file_atomic(path, out.str());
}

void write_errors_long_csv(const std::filesystem::path& path, const ErrorMatrix& matrix) {
    const auto models = matrix_models(matrix);
    std::set<Technique> techniques;
    for (const auto& [key, count] : matrix.counts) techniques.insert(std::get<1>(key));

    std::ostringstream out;
    out << "model,technique,error_type,count\n";
    for (const auto& m : models) {
        for (Technique t : techniques) {
            for (lint::RuleId rule : lint::kAllRules) {
                out << csv_field(m) << ',' << prompts::technique_name(t) << ','
                    << lint::rule_name(rule) << ',' << matrix.cell(m, t, rule) << '\n';
            }
        }
    }
    util::write_file_atomic(path, out.str());
}

void write_summary_json(const std::filesystem::path& path,
                        const std::vector<AccuracySummary>& summaries,
                        const ErrorMatrix& matrix,
                        const std::vector<std::string>& run_ids,
                        long generation_failures) {
    json j;
    j["run_ids"] = run_ids;
    j["generation_failures"] = generation_failures;

    json acc = json::array();
    auto sorted = summaries;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        if (a.model_id != b.model_id) return a.model_id < b.model_id;
        return static_cast<int>(a.technique) < static_cast<int>(b.technique);
    });
    for (const auto& s : sorted) {
        acc.push_back({{"model", s.model_id},
                       {"technique", std::string(prompts::technique_name(s.technique))},
                       {"clean", s.clean_count},
                       {"total", s.total_count},
                       {"accuracy", s.accuracy}});
    }
    j["accuracy"] = std::move(acc);

    json cells = json::object();
    for (Technique t : {Technique::ZeroShot, Technique::FewShot}) {
        if (matrix.technique_total(t) == 0) continue;
        json per_model = json::object();
        for (const auto& m : matrix_models(matrix)) {
            json per_rule = json::object();
            for (lint::RuleId rule : lint::kAllRules) {
                per_rule[std::string(lint::rule_name(rule))] = matrix.cell(m, t, rule);
            }
            per_model[m] = std::move(per_rule);
        }
        cells[std::string(prompts::technique_name(t))] = std::move(per_model);
    }
    j["error_matrix"] = std::move(cells);
    j["total_errors"] = matrix.total();

    if (matrix.total() > 0) {
        json shares = json::object();
        for (const auto& [t, share] : technique_share(matrix)) {
            shares[std::string(prompts::technique_name(t))] = share;
        }
        j["technique_shares"] = std::move(shares);
    }

    util::write_file_atomic(path, j.dump(2) + "\n");
}

}  // namespace bddgen::eval
