#include "planact/skills.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace planact {

namespace {

std::set<std::string> word_set(const std::string& text) {
    std::set<std::string> words;
    std::string current;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else if (!current.empty()) {
            words.insert(current);
            current.clear();
        }
    }
    if (!current.empty()) words.insert(current);
    return words;
}

}  // namespace

SkillLibrary::SkillLibrary(std::vector<Skill> skills) : skills_(std::move(skills)) {
    bool has_fallback = std::any_of(skills_.begin(), skills_.end(),
                                    [](const Skill& s) { return s.pattern.empty(); });
    if (!has_fallback) {
        skills_.push_back(Skill{
            "fallback", "",
            "Subgoal: accomplish the assigned objective.\n"
            "Think about which single command moves you closer to the subgoal, issue it in "
            "markdown backticks, observe the result, and repeat. Output SUBGOAL COMPLETED when "
            "done, or REQUEST_REPLAN[reason] if the subgoal cannot be achieved."});
    }
}

SkillLibrary SkillLibrary::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open skill library: " + path.string());
    nlohmann::json j = nlohmann::json::parse(in);
    std::vector<Skill> skills;
    for (const auto& sj : j.at("skills")) {
        skills.push_back(Skill{sj.at("name").get<std::string>(),
                               sj.value("pattern", ""),
                               sj.at("exemplar").get<std::string>()});
    }
    return SkillLibrary(std::move(skills));
}

std::vector<const Skill*> SkillLibrary::select(const std::string& subgoal_description,
                                               size_t limit) const {
    auto desc_words = word_set(subgoal_description);

    struct Ranked {
        const Skill* skill;
        size_t specificity;
        size_t order;
    };
    std::vector<Ranked> matched;
    for (size_t i = 0; i < skills_.size(); ++i) {
        const Skill& s = skills_[i];
        auto pattern_words = word_set(s.pattern);
        bool all = std::all_of(pattern_words.begin(), pattern_words.end(),
                               [&](const std::string& w) { return desc_words.count(w) > 0; });
        if (!all) continue;
        if (pattern_words.empty() ) {
            matched.push_back(Ranked{&s, 0, i});
        } else {
            matched.push_back(Ranked{&s, pattern_words.size(), i});
        }
    }

    bool any_specific = std::any_of(matched.begin(), matched.end(),
                                    [](const Ranked& r) { return r.specificity > 0; });
    if (any_specific) {
        std::erase_if(matched, [](const Ranked& r) { return r.specificity == 0; });
    }
    std::stable_sort(matched.begin(), matched.end(), [](const Ranked& a, const Ranked& b) {
        if (a.specificity != b.specificity) return a.specificity > b.specificity;
        return a.order < b.order;
    });
    if (limit > 0 && matched.size() > limit) matched.resize(limit);

    std::vector<const Skill*> out;
    for (const auto& r : matched) out.push_back(r.skill);
    return out;
}

}  // namespace planact
