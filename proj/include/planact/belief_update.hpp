#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "planact/domain.hpp"
#include "planact/gateway.hpp"

namespace planact {

/// Outermost balanced JSON object embedded in `text`, tolerating
/// surrounding prose and markdown fences; nullopt when none is found.
std::optional<std::string> extract_json_object(std::string_view text);

struct VerificationAnswer {
    std::string answer;
    std::string justification;
    bool parse_error = false;
};

/// Parses the "ANSWER ...:" / "JUSTIFICATION:" lines. When only the answer
/// is labeled, the remainder becomes the justification; when neither label
/// is present, the answer is "Uncertain" and the raw text is kept.
VerificationAnswer parse_verification_response(const std::string& text);

struct BeliefUpdateConfig {
    int synthesis_reprompt_budget = 1;
    size_t learned_facts_cap = 0;  // 0 = unbounded
    Decoding decoding;
};

/// Two-stage verification and synthesis: one gateway call per verification
/// question, then one synthesis call producing the new textual memory.
/// Never aborts the episode; any malformed output degrades to a recorded
/// fallback.
class BeliefUpdater {
public:
    BeliefUpdater(Gateway& gateway, const TemplateStore& templates, BeliefUpdateConfig config = {});

    VerificationReport verify(const BeliefState& prev, const SymbolicMemory& mem,
                              const SubEpisode& episode, const Subgoal& subgoal) const;

    TextualMemory synthesize(const BeliefState& prev, const BeliefContext& prev_ctx,
                             const SymbolicMemory& mem, const VerificationReport& report,
                             const Subgoal& subgoal, const std::optional<Plan>& latest_plan,
                             SubgoalStatus outcome) const;

    struct UpdateResult {
        BeliefState belief;
        VerificationReport report;
    };

    UpdateResult belief_update(const BeliefState& prev, const BeliefContext& prev_ctx,
                               SymbolicMemory mem_next, const SubEpisode& episode,
                               const Subgoal& subgoal,
                               const std::optional<Plan>& latest_plan) const;

    int verification_parse_errors() const { return verification_parse_errors_; }
    int synthesis_fallbacks() const { return synthesis_fallbacks_; }

    /// Context shared by every verification question: subgoal text, raw
    /// action/observation trace, and the memory summary.
    static std::string build_context(const Subgoal& subgoal, const SubEpisode& episode,
                                     const SymbolicMemory& mem);

private:
    Gateway& gateway_;
    const TemplateStore& templates_;
    BeliefUpdateConfig config_;
    mutable int verification_parse_errors_ = 0;
    mutable int synthesis_fallbacks_ = 0;
};

}  // namespace planact
