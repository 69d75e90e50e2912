#pragma once

// Pass/fail records produced by the verifiers.

#include <string>
#include <utility>
#include <vector>

namespace charp_qkz {

struct Check {
    std::string name;
    bool passed = true;
    std::string detail;
};

class Report {
public:
    Report() = default;
    explicit Report(std::string title) : title_(std::move(title)) {}

    void add(std::string name, bool passed, std::string detail = {}) {
        checks_.push_back({std::move(name), passed, std::move(detail)});
    }
    /// Non-fatal remark, e.g. a skipped point.
    void note(std::string text) { notes_.push_back(std::move(text)); }

    void merge(const Report& other, const std::string& prefix = {}) {
        for (const auto& c : other.checks_) checks_.push_back({prefix + c.name, c.passed, c.detail});
        for (const auto& n : other.notes_) notes_.push_back(prefix + n);
    }

    [[nodiscard]] bool passed() const {
        for (const auto& c : checks_)
            if (!c.passed) return false;
        return true;
    }
    [[nodiscard]] std::size_t failures() const {
        std::size_t n = 0;
        for (const auto& c : checks_) n += c.passed ? 0 : 1;
        return n;
    }
    [[nodiscard]] const Check* first_failure() const {
        for (const auto& c : checks_)
            if (!c.passed) return &c;
        return nullptr;
    }

    /// "title: ok" or "title: FAIL name (detail)" for the first failing check.
    [[nodiscard]] std::string summary() const {
        const Check* f = first_failure();
        if (!f) return title_ + ": ok";
        return title_ + ": FAIL " + f->name + (f->detail.empty() ? "" : " (" + f->detail + ")");
    }

    [[nodiscard]] const std::string& title() const { return title_; }
    [[nodiscard]] const std::vector<Check>& checks() const { return checks_; }
    [[nodiscard]] const std::vector<std::string>& notes() const { return notes_; }

private:
    std::string title_;
    std::vector<Check> checks_;
    std::vector<std::string> notes_;
};

}  // namespace charp_qkz
