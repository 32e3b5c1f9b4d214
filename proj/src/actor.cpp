#include "planact/actor.hpp"

#include <sstream>
#include <vector>

namespace planact {

namespace {

constexpr const char* kCompletedMarker = "SUBGOAL COMPLETED";
constexpr const char* kReplanMarker = "REQUEST_REPLAN[";

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string last_nonempty_line(const std::string& text) {
    std::string current, last;
    for (char c : text) {
        if (c == '\n') {
            if (!trim(current).empty()) last = trim(current);
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    if (!trim(current).empty()) last = trim(current);
    return last;
}

/// Content of the last ``` fenced block; empty when there is none.
std::string last_fenced_block(const std::string& text) {
    std::vector<size_t> fences;
    for (size_t pos = text.find("```"); pos != std::string::npos; pos = text.find("```", pos + 3)) {
        fences.push_back(pos);
    }
    if (fences.size() < 2) return "";
    size_t open = fences[fences.size() - 2];
    size_t close = fences[fences.size() - 1];
    size_t content_start = open + 3;
    // drop a language tag on the opening fence line
    size_t newline = text.find('\n', content_start);
    if (newline != std::string::npos && newline < close) {
        std::string first_line = trim(text.substr(content_start, newline - content_start));
        bool looks_like_tag = !first_line.empty() && first_line.find(' ') == std::string::npos &&
                              first_line.find('(') == std::string::npos;
        if (first_line.empty() || looks_like_tag) content_start = newline + 1;
    }
    if (content_start >= close) return "";
    return trim(text.substr(content_start, close - content_start));
}

std::string last_inline_span(const std::string& text) {
    std::string result;
    size_t pos = 0;
    while (true) {
        size_t open = text.find('`', pos);
        if (open == std::string::npos) break;
        size_t close = text.find('`', open + 1);
        if (close == std::string::npos) break;
        std::string span = trim(text.substr(open + 1, close - open - 1));
        if (!span.empty()) result = span;
        pos = close + 1;
    }
    return result;
}

}  // namespace

ActorDirective extract_command(std::string_view completion) {
    std::string text(completion);
    if (trim(text).empty()) return {ActorDirective::Kind::empty, ""};

    if (text.find(kCompletedMarker) != std::string::npos) {
        return {ActorDirective::Kind::completed, ""};
    }
    if (auto pos = text.find(kReplanMarker); pos != std::string::npos) {
        size_t start = pos + std::string_view(kReplanMarker).size();
        size_t end = text.find(']', start);
        std::string reason = end == std::string::npos
                                 ? trim(text.substr(start, text.find('\n', start) - start))
                                 : trim(text.substr(start, end - start));
        return {ActorDirective::Kind::replan, reason};
    }

    std::string command = last_fenced_block(text);
    if (!command.empty()) {
        // one environment command per turn: take the last line of the fence
        return {ActorDirective::Kind::command, last_nonempty_line(command + "\n")};
    }
    command = last_inline_span(text);
    if (!command.empty()) return {ActorDirective::Kind::command, command};
    command = last_nonempty_line(text);
    if (!command.empty()) return {ActorDirective::Kind::command, command};
    return {ActorDirective::Kind::empty, ""};
}

Actor::Actor(Gateway& gateway, const TemplateStore& templates, const DomainRuleset& ruleset,
             SkillLibrary skills, std::string domain_instructions, std::string example_format,
             ActorConfig config)
    : gateway_(gateway),
      templates_(templates),
      ruleset_(ruleset),
      skills_(std::move(skills)),
      domain_instructions_(std::move(domain_instructions)),
      example_format_(std::move(example_format)),
      config_(config) {}

std::string Actor::instance_prompt(const Subgoal& subgoal, const SymbolicMemory& memory) const {
    std::string instructions = domain_instructions_;
    auto selected = skills_.select(subgoal.description, static_cast<size_t>(config_.skill_limit));
    if (!selected.empty()) {
        instructions += "\n\nExamples of similar subgoals:";
        for (const Skill* s : selected) {
            instructions += "\n\n" + s->exemplar;
        }
    }

    std::string subgoal_text = subgoal.description;
    if (subgoal.search_locations && !subgoal.search_locations->empty()) {
        subgoal_text += "\n(Search locations, most likely first: ";
        for (size_t i = 0; i < subgoal.search_locations->size(); ++i) {
            if (i) subgoal_text += ", ";
            subgoal_text += (*subgoal.search_locations)[i];
        }
        subgoal_text += ")";
    }

    std::string state = config_.bind_full_summary
                            ? planning_summary(memory)
                            : memory.agent_location.value_or("Location unknown.");

    return templates_.get("actor_instance")
        .render({{"domain_instructions", instructions},
                 {"example_format", example_format_},
                 {"subgoal", subgoal_text},
                 {"location", state}});
}

Actor::Result Actor::execute_subgoal(const Subgoal& subgoal, Environment& env,
                                     SymbolicMemory memory, int budget) const {
    SubEpisode episode;
    episode.subgoal = subgoal;
    episode.status = SubgoalStatus::timeout;

    std::vector<ChatMessage> messages{
        {"system", templates_.get("actor_system").render({})},
        {"user", instance_prompt(subgoal, memory)}};

    for (int turn = 0; turn < budget; ++turn) {
        ChatRequest req{messages, Component::actor, config_.decoding};
        Completion completion = gateway_.complete(req);
        ActorDirective directive = extract_command(completion.text);

        if (directive.kind == ActorDirective::Kind::completed) {
            episode.status = SubgoalStatus::completed;
            break;
        }
        if (directive.kind == ActorDirective::Kind::replan) {
            episode.status = SubgoalStatus::replan_requested;
            episode.replan_reason = directive.text;
            break;
        }
        if (directive.kind == ActorDirective::Kind::empty) {
            messages.push_back({"assistant", completion.text});
            messages.push_back(
                {"user", "Your reply contained no command. Respond with a single command in "
                         "markdown backticks, or SUBGOAL COMPLETED, or REQUEST_REPLAN[reason]."});
            continue;
        }

        std::string observation = env.step(directive.text);
        episode.steps.emplace_back(directive.text, observation);
        episode.env_steps_consumed += 1;
        memory = update_memory(ruleset_, memory, observation, directive.text);
        messages.push_back({"assistant", completion.text});
        messages.push_back({"user", observation});

        if (env.is_success()) {
            episode.status = SubgoalStatus::completed;
            break;
        }
    }
    return Result{std::move(episode), std::move(memory)};
}

}  // namespace planact
