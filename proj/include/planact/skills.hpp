#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace planact {

struct Skill {
    std::string name;
    std::string pattern;  // space-separated keywords; empty matches anything
    std::string exemplar;
};

/// Subgoal-exemplar library conditioning the actor. A skill matches a
/// subgoal when every keyword of its pattern occurs in the description;
/// specificity is the keyword count, ties break by library order. A
/// generic fallback skill (empty pattern) always exists.
class SkillLibrary {
public:
    SkillLibrary() = default;
    explicit SkillLibrary(std::vector<Skill> skills);

    static SkillLibrary load_file(const std::filesystem::path& path);

    /// Matching exemplars ranked by specificity, truncated to `limit`;
    /// only the fallback when nothing matches.
    std::vector<const Skill*> select(const std::string& subgoal_description, size_t limit) const;

    size_t size() const { return skills_.size(); }
    const std::vector<Skill>& skills() const { return skills_; }

private:
    std::vector<Skill> skills_;
};

}  // namespace planact
