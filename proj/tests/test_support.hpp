#ifndef BDDGEN_TEST_SUPPORT_HPP
#define BDDGEN_TEST_SUPPORT_HPP

#include <filesystem>
#include <random>
#include <string>

#include "bddgen/gherkin.hpp"
#include "bddgen/util.hpp"

namespace testsupport {

inline std::filesystem::path fixture_dir() {
    return std::filesystem::path(BDDGEN_FIXTURE_DIR);
}

inline std::string read_fixture(const std::string& name) {
    return bddgen::util::read_file(fixture_dir() / name);
}

inline std::filesystem::path data_dir() {
    return std::filesystem::path(BDDGEN_DATA_DIR);
}

/// Fresh directory under the system temp root, removed by the caller's
/// scope guard when cleanliness matters (tests mostly just leave it).
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        auto base = std::filesystem::temp_directory_path();
        std::mt19937_64 rng(std::random_device{}());
        path_ = base / ("bddgen_" + tag + "_" + std::to_string(rng()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

/// Deterministic generator of canonical documents for round-trip and
/// conservation properties.
inline bddgen::gherkin::GherkinDocument random_document(std::mt19937& rng) {
    using namespace bddgen::gherkin;
    auto pick = [&](int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(rng);
    };
    auto word = [&]() {
        static const char* words[] = {"order",  "login", "report", "cart",
                                      "upload", "alert", "filter", "sync"};
        return std::string(words[pick(0, 7)]);
    };
    auto sentence = [&]() {
        std::string s = word();
        const int n = pick(1, 4);
        for (int i = 0; i < n; ++i) s += " " + word();
        return s;
    };
    auto step = [&](int line) {
        static const StepKeyword kws[] = {StepKeyword::Given, StepKeyword::When,
                                          StepKeyword::Then, StepKeyword::And,
                                          StepKeyword::But};
        return Step{kws[pick(0, 4)], sentence(), line};
    };

    GherkinDocument doc;
    int line = 1;
    doc.feature_name = "Feature about " + word();
    const int ndesc = pick(0, 2);
    for (int i = 0; i < ndesc; ++i) {
        doc.feature_description.push_back(SourceLine{sentence(), ++line});
    }
    if (pick(0, 1)) {
        doc.feature_tags.push_back(Tag{"@" + word(), 0});
    }
    if (pick(0, 1)) {
        Background bg;
        bg.line = ++line;
        const int nsteps = pick(1, 3);
        for (int i = 0; i < nsteps; ++i) bg.steps.push_back(step(++line));
        doc.background = std::move(bg);
    }
    const int nscen = pick(1, 4);
    for (int s = 0; s < nscen; ++s) {
        Scenario sc;
        sc.line = ++line;
        sc.name = "Scenario " + word();
        if (pick(0, 2)) sc.tags.push_back(Tag{"@" + word(), 0});
        const int ndesc2 = pick(0, 1);
        for (int i = 0; i < ndesc2; ++i) {
            sc.description.push_back(SourceLine{sentence(), ++line});
        }
        const int nsteps = pick(1, 5);
        for (int i = 0; i < nsteps; ++i) sc.steps.push_back(step(++line));
        doc.scenarios.push_back(std::move(sc));
    }
    return doc;
}

}  // namespace testsupport

#endif
