#include "planact/belief_update.hpp"

#include <regex>
#include <sstream>

#include "json.hpp"

namespace planact {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string replace_all(std::string text, const std::string& from, const std::string& to) {
    size_t pos = 0;
    while ((pos = text.find(from, pos)) != std::string::npos) {
        text.replace(pos, from.size(), to);
        pos += to.size();
    }
    return text;
}

std::string render_plan_text(const std::optional<Plan>& plan) {
    if (!plan || plan->subgoals.empty()) return "(None)";
    std::ostringstream out;
    for (size_t i = 0; i < plan->subgoals.size(); ++i) {
        if (i) out << "\n";
        out << (i + 1) << ". " << plan->subgoals[i];
    }
    return out.str();
}

const std::regex kAnswerLine(R"(^\s*ANSWER[^:\n]*:\s*(.*)$)", std::regex::icase);
const std::regex kJustificationLine(R"(^\s*JUSTIFICATION[^:\n]*:\s*(.*)$)", std::regex::icase);

}  // namespace

std::optional<std::string> extract_json_object(std::string_view text) {
    for (size_t start = 0; start < text.size(); ++start) {
        if (text[start] != '{') continue;
        int depth = 0;
        bool in_string = false;
        bool escaped = false;
        for (size_t i = start; i < text.size(); ++i) {
            char c = text[i];
            if (in_string) {
                if (escaped) escaped = false;
                else if (c == '\\') escaped = true;
                else if (c == '"') in_string = false;
                continue;
            }
            if (c == '"') in_string = true;
            else if (c == '{') ++depth;
            else if (c == '}') {
                --depth;
                if (depth == 0) return std::string(text.substr(start, i - start + 1));
            }
        }
        // this '{' never balances; try the next one
    }
    return std::nullopt;
}

VerificationAnswer parse_verification_response(const std::string& text) {
    VerificationAnswer out;
    std::istringstream stream(text);
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(stream, line)) lines.push_back(line);

    size_t answer_line = lines.size();
    for (size_t i = 0; i < lines.size(); ++i) {
        std::smatch m;
        if (std::regex_match(lines[i], m, kAnswerLine)) {
            out.answer = trim(m[1].str());
            answer_line = i;
            break;
        }
    }
    for (size_t i = 0; i < lines.size(); ++i) {
        std::smatch m;
        if (std::regex_match(lines[i], m, kJustificationLine)) {
            std::string j = trim(m[1].str());
            for (size_t rest = i + 1; rest < lines.size(); ++rest) {
                if (trim(lines[rest]).empty()) continue;
                j += (j.empty() ? "" : " ") + trim(lines[rest]);
            }
            out.justification = j;
            return out;
        }
    }
    if (!out.answer.empty() || answer_line < lines.size()) {
        // answer label found but no justification: keep the remainder
        std::string rest;
        for (size_t i = answer_line + 1; i < lines.size(); ++i) {
            if (trim(lines[i]).empty()) continue;
            rest += (rest.empty() ? "" : " ") + trim(lines[i]);
        }
        out.justification = rest;
        if (out.answer.empty()) out.answer = "Uncertain";
        return out;
    }
    out.answer = "Uncertain";
    out.justification = trim(text);
    out.parse_error = true;
    return out;
}

BeliefUpdater::BeliefUpdater(Gateway& gateway, const TemplateStore& templates,
                             BeliefUpdateConfig config)
    : gateway_(gateway), templates_(templates), config_(config) {}

std::string BeliefUpdater::build_context(const Subgoal& subgoal, const SubEpisode& episode,
                                         const SymbolicMemory& mem) {
    std::ostringstream out;
    out << "Subgoal: " << subgoal.description << "\n\n";
    out << "Execution trace:\n";
    if (episode.steps.empty()) {
        out << "(no environment actions were taken)\n";
    } else {
        for (const auto& [action, observation] : episode.steps) {
            out << "> " << action << "\n" << observation << "\n";
        }
    }
    out << "Episode status: " << to_string(episode.status);
    if (!episode.replan_reason.empty()) out << " (" << episode.replan_reason << ")";
    out << "\n\nSymbolic memory:\n" << planning_summary(mem);
    return out.str();
}

VerificationReport BeliefUpdater::verify(const BeliefState& prev, const SymbolicMemory& mem,
                                         const SubEpisode& episode, const Subgoal& subgoal) const {
    (void)prev;
    std::string context = build_context(subgoal, episode, mem);
    const auto& system_t = templates_.get("verification_system");
    const auto& instance_t = templates_.get("verification_instance");

    VerificationReport report;
    for (const auto& question_template : templates_.verification_questions()) {
        std::string question = replace_all(question_template, "<<subgoal>>", subgoal.description);
        std::vector<ChatMessage> messages{
            {"system", system_t.render({})},
            {"user", instance_t.render({{"context", context}, {"question", question}})}};
        Completion completion =
            gateway_.complete(ChatRequest{messages, Component::verification, config_.decoding});
        VerificationAnswer parsed = parse_verification_response(completion.text);
        if (parsed.parse_error) ++verification_parse_errors_;
        report.entries.push_back(
            {question, parsed.answer, parsed.justification, parsed.parse_error});
    }
    return report;
}

TextualMemory BeliefUpdater::synthesize(const BeliefState& prev, const BeliefContext& prev_ctx,
                                        const SymbolicMemory& mem,
                                        const VerificationReport& report, const Subgoal& subgoal,
                                        const std::optional<Plan>& latest_plan,
                                        SubgoalStatus outcome) const {
    std::ostringstream qa;
    for (size_t i = 0; i < report.entries.size(); ++i) {
        const auto& e = report.entries[i];
        if (i) qa << "\n\n";
        qa << "Q" << (i + 1) << ": " << e.question << "\n";
        qa << "A" << (i + 1) << ": " << e.answer << "\n";
        qa << "J" << (i + 1) << ": " << e.justification;
    }

    std::map<std::string, std::string> bindings{
        {"previous_belief", render_belief(prev, prev_ctx)},
        {"memory_summary", planning_summary(mem)},
        {"latest_plan", render_plan_text(latest_plan)},
        {"subgoal", subgoal.description},
        {"last_subgoal_outcome", to_string(outcome)},
        {"qa_summary", qa.str()}};

    std::vector<ChatMessage> messages{
        {"system", templates_.get("synthesis_system").render({})},
        {"user", templates_.get("synthesis_instance").render(bindings)}};

    TextualMemory next = prev.textual;
    for (int attempt = 0; attempt <= config_.synthesis_reprompt_budget; ++attempt) {
        Completion completion =
            gateway_.complete(ChatRequest{messages, Component::synthesis, config_.decoding});
        auto object_text = extract_json_object(completion.text);
        if (object_text) {
            json parsed = json::parse(*object_text, nullptr, false);
            if (!parsed.is_discarded() && parsed.is_object() && parsed.contains("status_line") &&
                parsed["status_line"].is_string() && parsed.contains("justification") &&
                parsed["justification"].is_string() && parsed.contains("learned_facts") &&
                parsed["learned_facts"].is_array()) {
                std::string status = parsed["status_line"].get<std::string>();
                if (status.rfind("Status: ", 0) != 0) status = "Status: " + status;
                next.status_line = status;
                next.justification = parsed["justification"].get<std::string>();
                std::vector<std::string> facts;
                for (const auto& f : parsed["learned_facts"]) {
                    if (f.is_string()) facts.push_back(f.get<std::string>());
                }
                next.append_facts(facts, subgoal.issued_at_k);
                if (config_.learned_facts_cap > 0 &&
                    next.learned_facts.size() > config_.learned_facts_cap) {
                    next.learned_facts.erase(
                        next.learned_facts.begin(),
                        next.learned_facts.end() -
                            static_cast<long>(config_.learned_facts_cap));
                }
                return next;
            }
        }
        messages.push_back({"assistant", completion.text});
        messages.push_back(
            {"user", "Your previous reply was not a valid JSON object with the keys "
                     "\"status_line\", \"justification\", and \"learned_facts\". Respond ONLY "
                     "with that JSON object."});
    }
    ++synthesis_fallbacks_;
    next.status_line = "Status: belief update failed to parse";
    next.justification.clear();
    return next;
}

BeliefUpdater::UpdateResult BeliefUpdater::belief_update(
    const BeliefState& prev, const BeliefContext& prev_ctx, SymbolicMemory mem_next,
    const SubEpisode& episode, const Subgoal& subgoal,
    const std::optional<Plan>& latest_plan) const {
    VerificationReport report = verify(prev, mem_next, episode, subgoal);
    TextualMemory textual =
        synthesize(prev, prev_ctx, mem_next, report, subgoal, latest_plan, episode.status);
    BeliefState next;
    next.symbolic = std::move(mem_next);
    next.textual = std::move(textual);
    next.k = prev.k + 1;
    return UpdateResult{std::move(next), std::move(report)};
}

}  // namespace planact
