#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "bddgen/evaluation.hpp"
#include "bddgen/util.hpp"
#include "test_support.hpp"

using namespace bddgen::eval;
using bddgen::lint::Finding;
using bddgen::lint::RuleId;
using bddgen::prompts::Technique;

namespace {

FileVerdict verdict(const std::string& model, Technique t, size_t finding_count,
                    RuleId rule = RuleId::MissingTags) {
    static int counter = 0;
    FileVerdict v;
    v.story_id = "S" + std::to_string(++counter);
    v.model_id = model;
    v.technique = t;
    v.path = model + "/" + std::string(bddgen::prompts::technique_name(t)) + "/" +
             v.story_id + ".feature";
    for (size_t i = 0; i < finding_count; ++i) {
        v.findings.push_back(Finding{rule, "m", static_cast<int>(i + 1), v.path});
    }
    return v;
}

// Verdicts whose per-rule totals reproduce the published zero-shot and
// few-shot error distributions.
std::vector<FileVerdict> paper_count_verdicts() {
    struct Cell {
        const char* model;
        Technique technique;
        RuleId rule;
        int count;
    };
    static const Cell cells[] = {
        {"GPT-3.5", Technique::ZeroShot, RuleId::KeywordsNotInLogicalOrder, 6},
        {"GPT-4", Technique::ZeroShot, RuleId::KeywordsNotInLogicalOrder, 5},
        {"PaLM-2", Technique::ZeroShot, RuleId::KeywordsNotInLogicalOrder, 4},
        {"Llama-2-13B", Technique::ZeroShot, RuleId::KeywordsNotInLogicalOrder, 0},
        {"GPT-3.5", Technique::ZeroShot, RuleId::KeywordNotPresentInStep, 1},
        {"GPT-4", Technique::ZeroShot, RuleId::KeywordNotPresentInStep, 0},
        {"PaLM-2", Technique::ZeroShot, RuleId::KeywordNotPresentInStep, 58},
        {"Llama-2-13B", Technique::ZeroShot, RuleId::KeywordNotPresentInStep, 130},
        {"GPT-3.5", Technique::ZeroShot, RuleId::RestrictedPatternsPresent, 0},
        {"GPT-4", Technique::ZeroShot, RuleId::RestrictedPatternsPresent, 1},
        {"PaLM-2", Technique::ZeroShot, RuleId::RestrictedPatternsPresent, 32},
        {"Llama-2-13B", Technique::ZeroShot, RuleId::RestrictedPatternsPresent, 335},
        {"GPT-3.5", Technique::ZeroShot, RuleId::MissingTags, 0},
        {"GPT-4", Technique::ZeroShot, RuleId::MissingTags, 0},
        {"PaLM-2", Technique::ZeroShot, RuleId::MissingTags, 95},
        {"Llama-2-13B", Technique::ZeroShot, RuleId::MissingTags, 0},
        {"GPT-3.5", Technique::FewShot, RuleId::KeywordsNotInLogicalOrder, 1},
        {"GPT-4", Technique::FewShot, RuleId::KeywordsNotInLogicalOrder, 1},
        {"PaLM-2", Technique::FewShot, RuleId::KeywordsNotInLogicalOrder, 1},
        {"Llama-2-13B", Technique::FewShot, RuleId::KeywordsNotInLogicalOrder, 0},
        {"GPT-3.5", Technique::FewShot, RuleId::KeywordNotPresentInStep, 0},
        {"GPT-4", Technique::FewShot, RuleId::KeywordNotPresentInStep, 0},
        {"PaLM-2", Technique::FewShot, RuleId::KeywordNotPresentInStep, 3},
        {"Llama-2-13B", Technique::FewShot, RuleId::KeywordNotPresentInStep, 1},
        {"GPT-3.5", Technique::FewShot, RuleId::RestrictedPatternsPresent, 0},
        {"GPT-4", Technique::FewShot, RuleId::RestrictedPatternsPresent, 0},
        {"PaLM-2", Technique::FewShot, RuleId::RestrictedPatternsPresent, 4},
        {"Llama-2-13B", Technique::FewShot, RuleId::RestrictedPatternsPresent, 28},
        {"GPT-3.5", Technique::FewShot, RuleId::MissingTags, 0},
        {"GPT-4", Technique::FewShot, RuleId::MissingTags, 0},
        {"PaLM-2", Technique::FewShot, RuleId::MissingTags, 41},
        {"Llama-2-13B", Technique::FewShot, RuleId::MissingTags, 0},
    };
    std::vector<FileVerdict> verdicts;
    for (const auto& cell : cells) {
        if (cell.count == 0) continue;
        verdicts.push_back(
            verdict(cell.model, cell.technique, static_cast<size_t>(cell.count), cell.rule));
    }
    return verdicts;
}

long matrix_rule_sum(const ErrorMatrix& m, Technique t, RuleId rule) {
    long n = 0;
    for (const auto& [key, count] : m.counts) {
        if (std::get<1>(key) == t && std::get<2>(key) == rule) n += count;
    }
    return n;
}

}  // namespace

TEST_CASE("accuracy is the exact clean/total ratio") {
    std::vector<FileVerdict> verdicts;
    verdicts.push_back(verdict("m", Technique::ZeroShot, 0));
    verdicts.push_back(verdict("m", Technique::ZeroShot, 0));
    verdicts.push_back(verdict("m", Technique::ZeroShot, 2));
    verdicts.push_back(verdict("m", Technique::ZeroShot, 0));

    const auto summary = accuracy(verdicts, "m", Technique::ZeroShot);
    CHECK(summary.clean_count == 3);
    CHECK(summary.total_count == 4);
    CHECK(summary.accuracy == 0.75);
}

TEST_CASE("all-clean verdicts hit accuracy 1.0") {
    std::vector<FileVerdict> verdicts;
    for (int i = 0; i < 50; ++i) verdicts.push_back(verdict("m", Technique::FewShot, 0));
    const auto summary = accuracy(verdicts, "m", Technique::FewShot);
    CHECK(summary.accuracy == 1.0);
    CHECK(summary.total_count == 50);
}

TEST_CASE("an empty group is an error, not accuracy zero") {
    std::vector<FileVerdict> verdicts{verdict("m", Technique::ZeroShot, 0)};
    try {
        accuracy(verdicts, "m", Technique::FewShot);
        FAIL("expected EmptyGroup");
    } catch (const EvalError& e) {
        CHECK(e.code() == EvalError::Code::EmptyGroup);
    }
}

TEST_CASE("accuracy matches a brute-force count over 1000 random verdict sets") {
    std::mt19937 rng(2024);
    std::uniform_int_distribution<int> size_dist(1, 40);
    std::uniform_int_distribution<int> findings_dist(0, 3);

    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<FileVerdict> verdicts;
        const int n = size_dist(rng);
        long dirty = 0;
        for (int i = 0; i < n; ++i) {
            const int f = findings_dist(rng);
            if (f > 0) ++dirty;
            verdicts.push_back(verdict("m", Technique::ZeroShot, static_cast<size_t>(f)));
        }
        const auto summary = accuracy(verdicts, "m", Technique::ZeroShot);
        CHECK(summary.clean_count == n - dirty);
        CHECK(summary.total_count == n);
        CHECK(summary.accuracy ==
              static_cast<double>(n - dirty) / static_cast<double>(n));
    }
}

TEST_CASE("error matrix reproduces the published row sums and totals") {
    const auto verdicts = paper_count_verdicts();
    const auto matrix = error_matrix(verdicts);

    CHECK(matrix_rule_sum(matrix, Technique::ZeroShot, RuleId::KeywordsNotInLogicalOrder) == 15);
    CHECK(matrix_rule_sum(matrix, Technique::ZeroShot, RuleId::KeywordNotPresentInStep) == 189);
    CHECK(matrix_rule_sum(matrix, Technique::ZeroShot, RuleId::RestrictedPatternsPresent) == 368);
    CHECK(matrix_rule_sum(matrix, Technique::ZeroShot, RuleId::MissingTags) == 95);
    CHECK(matrix.technique_total(Technique::ZeroShot) == 667);

    CHECK(matrix_rule_sum(matrix, Technique::FewShot, RuleId::KeywordsNotInLogicalOrder) == 3);
    CHECK(matrix_rule_sum(matrix, Technique::FewShot, RuleId::KeywordNotPresentInStep) == 4);
    CHECK(matrix_rule_sum(matrix, Technique::FewShot, RuleId::RestrictedPatternsPresent) == 32);
    CHECK(matrix_rule_sum(matrix, Technique::FewShot, RuleId::MissingTags) == 41);
    CHECK(matrix.technique_total(Technique::FewShot) == 80);

    CHECK(matrix.total() == 747);
    CHECK(matrix.cell("Llama-2-13B", Technique::ZeroShot,
                      RuleId::KeywordNotPresentInStep) == 130);
    CHECK(matrix.cell("PaLM-2", Technique::ZeroShot, RuleId::MissingTags) == 95);

    const auto shares = technique_share(matrix);
    CHECK(shares.at(Technique::ZeroShot) == doctest::Approx(667.0 / 747.0).epsilon(1e-12));
    CHECK(shares.at(Technique::ZeroShot) == doctest::Approx(0.893).epsilon(0.005));
}

TEST_CASE("no verdicts make an empty matrix; shares are then undefined") {
    const auto matrix = error_matrix({});
    CHECK(matrix.total() == 0);
    CHECK(matrix.counts.empty());
    try {
        technique_share(matrix);
        FAIL("expected EmptyMatrix");
    } catch (const EvalError& e) {
        CHECK(e.code() == EvalError::Code::EmptyMatrix);
    }
}

TEST_CASE("a synthetic three-finding set matches a hand tally") {
    std::vector<FileVerdict> verdicts;
    verdicts.push_back(verdict("a", Technique::ZeroShot, 2, RuleId::MissingTags));
    verdicts.push_back(verdict("b", Technique::FewShot, 1, RuleId::NoFeature));
    const auto matrix = error_matrix(verdicts);
    CHECK(matrix.total() == 3);
    CHECK(matrix.cell("a", Technique::ZeroShot, RuleId::MissingTags) == 2);
    CHECK(matrix.cell("b", Technique::FewShot, RuleId::NoFeature) == 1);
    CHECK(matrix.cell("a", Technique::ZeroShot, RuleId::NoFeature) == 0);
}

TEST_CASE("single-technique and symmetric shares") {
    std::vector<FileVerdict> single{verdict("m", Technique::FewShot, 3)};
    const auto single_shares = technique_share(error_matrix(single));
    CHECK(single_shares.size() == 1);
    CHECK(single_shares.at(Technique::FewShot) == 1.0);

    std::vector<FileVerdict> equal;
    equal.push_back(verdict("m", Technique::ZeroShot, 5));
    equal.push_back(verdict("m", Technique::FewShot, 5));
    const auto shares = technique_share(error_matrix(equal));
    CHECK(shares.at(Technique::ZeroShot) == 0.5);
    CHECK(shares.at(Technique::FewShot) == 0.5);
}

TEST_CASE("shares sum to one within 1e-12") {
    const auto shares = technique_share(error_matrix(paper_count_verdicts()));
    double sum = 0;
    for (const auto& [t, s] : shares) sum += s;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("matrix total conserves the number of findings") {
    std::mt19937 rng(11);
    std::vector<FileVerdict> verdicts;
    long expected = 0;
    for (int i = 0; i < 60; ++i) {
        const auto technique = (rng() % 2) ? Technique::ZeroShot : Technique::FewShot;
        const auto rule = bddgen::lint::kAllRules[rng() % 5];
        const size_t n = rng() % 4;
        expected += static_cast<long>(n);
        verdicts.push_back(verdict("m" + std::to_string(rng() % 3), technique, n, rule));
    }
    CHECK(error_matrix(verdicts).total() == expected);
}

TEST_CASE("aggregation is order-insensitive") {
    auto verdicts = paper_count_verdicts();
    const auto base_matrix = error_matrix(verdicts);
    const auto base_acc = accuracy_by_group(verdicts);

    std::mt19937 rng(3);
    std::shuffle(verdicts.begin(), verdicts.end(), rng);
    CHECK(error_matrix(verdicts).counts == base_matrix.counts);

    const auto shuffled_acc = accuracy_by_group(verdicts);
    REQUIRE(shuffled_acc.size() == base_acc.size());
    for (size_t i = 0; i < base_acc.size(); ++i) {
        CHECK(shuffled_acc[i].model_id == base_acc[i].model_id);
        CHECK(shuffled_acc[i].clean_count == base_acc[i].clean_count);
        CHECK(shuffled_acc[i].accuracy == base_acc[i].accuracy);
    }
}

TEST_CASE("adding a finding to a clean verdict strictly lowers group accuracy") {
    std::vector<FileVerdict> verdicts;
    for (int i = 0; i < 10; ++i) verdicts.push_back(verdict("m", Technique::ZeroShot, 0));
    const double before = accuracy(verdicts, "m", Technique::ZeroShot).accuracy;
    verdicts[4].findings.push_back(Finding{RuleId::MissingTags, "m", 1, "p"});
    const double after = accuracy(verdicts, "m", Technique::ZeroShot).accuracy;
    CHECK(after < before);
}

TEST_CASE("report files carry the expected shapes") {
    testsupport::TempDir tmp("reports");
    const auto verdicts = paper_count_verdicts();
    const auto matrix = error_matrix(verdicts);
    const auto summaries = accuracy_by_group(verdicts);

    write_accuracy_csv(tmp.path() / "accuracy.csv", summaries);
    write_error_matrix_csv(tmp.path() / "error_matrix.csv", matrix);
    write_errors_long_csv(tmp.path() / "errors_long.csv", matrix);
    write_summary_json(tmp.path() / "summary.json", summaries, matrix, {"runid1"}, 2);

    const auto accuracy_csv = bddgen::util::read_file(tmp.path() / "accuracy.csv");
    CHECK(accuracy_csv.starts_with("model,technique,clean,total,accuracy\n"));

    const auto matrix_csv = bddgen::util::read_file(tmp.path() / "error_matrix.csv");
    // zero-shot keyword-order row: GPT-3.5 6, GPT-4 5, Llama 0, PaLM 4 -> total 15
    CHECK(matrix_csv.find("zero,gherkin-keywords-not-in-logical-order,6,5,0,4,15\n") !=
          std::string::npos);
    CHECK(matrix_csv.find("few,missing-tags,0,0,0,41,41\n") != std::string::npos);

    const auto long_csv = bddgen::util::read_file(tmp.path() / "errors_long.csv");
    CHECK(long_csv.find("Llama-2-13B,zero,restricted-patterns-present,335\n") !=
          std::string::npos);

    const auto summary = bddgen::util::read_file(tmp.path() / "summary.json");
    CHECK(summary.find("\"technique_shares\"") != std::string::npos);
    CHECK(summary.find("\"runid1\"") != std::string::npos);
    CHECK(summary.find("\"generation_failures\": 2") != std::string::npos);
}
