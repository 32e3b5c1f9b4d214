#pragma once

#include <string>
#include <string_view>

#include "planact/domain.hpp"
#include "planact/environment.hpp"
#include "planact/gateway.hpp"
#include "planact/ruleset.hpp"
#include "planact/skills.hpp"

namespace planact {

/// What the actor's completion asks for. Termination markers take
/// precedence over fenced commands.
struct ActorDirective {
    enum class Kind { command, completed, replan, empty };
    Kind kind = Kind::empty;
    std::string text;  // command text, or the replan reason
};

/// SUBGOAL COMPLETED / REQUEST_REPLAN[...] markers first, then the content
/// of the last markdown-fenced span, then the last nonempty line.
ActorDirective extract_command(std::string_view completion);

struct ActorConfig {
    int skill_limit = 2;
    bool bind_full_summary = true;  // bind the memory summary, not just the location
    Decoding decoding;
};

/// Reason-and-act loop executing one subgoal against the environment with
/// self-termination and a hard step budget.
class Actor {
public:
    Actor(Gateway& gateway, const TemplateStore& templates, const DomainRuleset& ruleset,
          SkillLibrary skills, std::string domain_instructions, std::string example_format,
          ActorConfig config = {});

    struct Result {
        SubEpisode episode;
        SymbolicMemory memory;
    };

    /// Runs at most `budget` LLM turns; only commands actually sent to the
    /// environment are recorded in the episode and counted as env steps.
    Result execute_subgoal(const Subgoal& subgoal, Environment& env, SymbolicMemory memory,
                           int budget) const;

private:
    std::string instance_prompt(const Subgoal& subgoal, const SymbolicMemory& memory) const;

    Gateway& gateway_;
    const TemplateStore& templates_;
    const DomainRuleset& ruleset_;
    SkillLibrary skills_;
    std::string domain_instructions_;
    std::string example_format_;
    ActorConfig config_;
};

}  // namespace planact
