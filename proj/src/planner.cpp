#include "planact/planner.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace planact {

namespace {

constexpr const char* kFullPlanToken = "FULL PLAN";
constexpr const char* kExecuteToken = "EXECUTE_SUBGOAL[";
constexpr const char* kTaskCompleteToken = "TASK COMPLETE";

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string squeeze(const std::string& s) {
    std::string out;
    bool space = false;
    for (char c : trim(s)) {
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            space = true;
            continue;
        }
        if (space && !out.empty()) out.push_back(' ');
        space = false;
        out.push_back(c);
    }
    return out;
}

std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::string current;
    for (char c : text) {
        if (c == '\n') {
            lines.push_back(current);
            current.clear();
        } else if (c != '\r') {
            current.push_back(c);
        }
    }
    lines.push_back(current);
    return lines;
}

/// "1. Take the lamp" -> "Take the lamp"; nullopt when not enumerated.
std::optional<std::string> strip_enumeration(const std::string& line) {
    std::string t = trim(line);
    size_t i = 0;
    while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) ++i;
    if (i == 0 || i >= t.size()) return std::nullopt;
    if (t[i] != '.' && t[i] != ')') return std::nullopt;
    return trim(t.substr(i + 1));
}

bool equals_ci(const std::string& a, const char* b) {
    size_t n = std::string_view(b).size();
    if (a.size() != n) return false;
    for (size_t i = 0; i < n; ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i])))
            return false;
    }
    return true;
}

}  // namespace

PlanParse parse_full_plan(std::string_view text, int created_at_k) {
    auto pos = text.find(kFullPlanToken);
    if (pos == std::string_view::npos) return {};

    auto rest = text.substr(pos + std::string_view(kFullPlanToken).size());
    auto lines = split_lines(rest);

    Plan plan;
    plan.created_at_k = created_at_k;
    bool collecting = false;
    for (const auto& raw : lines) {
        std::string line = trim(raw);
        if (line.empty()) continue;  // blank lines never terminate the list
        if (!collecting && equals_ci(line, "Subgoals:")) continue;
        auto item = strip_enumeration(line);
        if (!item || item->empty()) break;
        plan.subgoals.push_back(*item);
        collecting = true;
    }
    if (plan.subgoals.empty()) {
        PlanParse out;
        out.empty_plan = true;
        return out;
    }
    return PlanParse{plan, false};
}

SubgoalParse parse_execute_subgoal(std::string_view text, int issued_at_k) {
    auto pos = text.find(kExecuteToken);
    if (pos == std::string_view::npos) {
        return SubgoalParse{std::nullopt, SubgoalParseErrorKind::not_found};
    }
    auto rest = text.substr(pos + std::string_view(kExecuteToken).size());
    auto lines = split_lines(rest);

    std::vector<std::string> desc_parts;
    std::optional<std::string> search_raw;
    bool in_desc = false;
    bool closed = false;

    for (const auto& raw : lines) {
        std::string line = trim(raw);
        if (line == "]") {
            closed = true;
            break;
        }
        if (line.rfind("DESC:", 0) == 0) {
            desc_parts.push_back(trim(line.substr(5)));
            in_desc = true;
            continue;
        }
        if (line.rfind("SEARCH_LOCATIONS:", 0) == 0) {
            search_raw = trim(line.substr(std::string_view("SEARCH_LOCATIONS:").size()));
            in_desc = false;
            continue;
        }
        if (in_desc && !line.empty()) {
            desc_parts.push_back(line);  // multi-line DESC, joined below
        }
    }
    if (!closed) return SubgoalParse{std::nullopt, SubgoalParseErrorKind::unterminated_block};

    std::string description;
    for (const auto& part : desc_parts) {
        if (part.empty()) continue;
        if (!description.empty()) description += " ";
        description += part;
    }
    description = squeeze(description);
    if (description.empty()) {
        return SubgoalParse{std::nullopt, SubgoalParseErrorKind::missing_desc};
    }

    Subgoal sg;
    sg.description = description;
    sg.issued_at_k = issued_at_k;
    if (search_raw) {
        std::string s = *search_raw;
        if (auto hash = s.find(" #"); hash != std::string::npos) s = s.substr(0, hash);
        s = trim(s);
        std::string lowered = s;
        std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (!s.empty() && lowered != "null" && lowered != "none") {
            auto open = s.find('[');
            auto close = s.rfind(']');
            std::string body = (open != std::string::npos && close != std::string::npos && close > open)
                                   ? s.substr(open + 1, close - open - 1)
                                   : s;
            std::vector<std::string> locations;
            std::stringstream ss(body);
            std::string part;
            while (std::getline(ss, part, ',')) {
                part = trim(part);
                if (!part.empty()) locations.push_back(part);
            }
            if (!locations.empty()) sg.search_locations = std::move(locations);
        }
    }
    return SubgoalParse{sg, SubgoalParseErrorKind::none};
}

std::string render_subgoal_block(const Subgoal& subgoal) {
    std::ostringstream out;
    out << "EXECUTE_SUBGOAL[\n";
    out << "  DESC: " << subgoal.description << "\n";
    if (subgoal.search_locations) {
        out << "  SEARCH_LOCATIONS: [";
        for (size_t i = 0; i < subgoal.search_locations->size(); ++i) {
            if (i) out << ", ";
            out << (*subgoal.search_locations)[i];
        }
        out << "]\n";
    }
    out << "]";
    return out.str();
}

bool declares_task_complete(std::string_view text) {
    return text.find(kTaskCompleteToken) != std::string_view::npos;
}

std::string extract_reasoning(std::string_view text) {
    size_t cut = text.size();
    for (const char* token : {kFullPlanToken, kExecuteToken, kTaskCompleteToken}) {
        auto pos = text.find(token);
        if (pos != std::string_view::npos) cut = std::min(cut, pos);
    }
    return trim(std::string(text.substr(0, cut)));
}

Planner::Planner(Gateway& gateway, const TemplateStore& templates, TaskContext task,
                 PlannerConfig config)
    : gateway_(gateway), templates_(templates), task_(std::move(task)), config_(config) {}

std::vector<ChatMessage> Planner::base_messages() const {
    std::string variant = task_.domain == "household"  ? "household"
                          : task_.domain == "adventure" ? "adventure"
                                                        : "pddl";
    const auto& system_t = templates_.get("planner_system_" + variant);
    const auto& instance_t = templates_.get("planner_instance_" + variant);

    std::map<std::string, std::string> system_bindings{{"task exemplars", task_.planner_exemplars}};
    std::map<std::string, std::string> instance_bindings;
    if (variant == "household") {
        instance_bindings["task_room"] = task_.initial_observation + "\n";
        instance_bindings["task"] = "Your task is to: " + task_.goal_text + ".";
    } else {
        instance_bindings["goal"] = task_.goal_text;
        instance_bindings["initial_observation"] = task_.initial_observation;
    }
    return {ChatMessage{"system", system_t.render(system_bindings)},
            ChatMessage{"user", instance_t.render(instance_bindings)}};
}

PlannerStep Planner::plan_next(const std::vector<PlannerStep>& history, const BeliefState& belief,
                               const BeliefContext& ctx) const {
    std::vector<ChatMessage> messages = base_messages();

    size_t start = 0;
    if (config_.history_window > 0 && history.size() > static_cast<size_t>(config_.history_window)) {
        start = history.size() - static_cast<size_t>(config_.history_window);
    }
    for (size_t i = start; i < history.size(); ++i) {
        messages.push_back({"assistant", history[i].raw_completion});
        if (!history[i].analysis_feedback_json.empty()) {
            messages.push_back({"assistant", history[i].analysis_feedback_json});
        }
    }
    messages.push_back(
        {"user", "Current Belief State:\n" + render_belief(belief, ctx) +
                     "\n\nDecide the next subgoal to execute, or respond with TASK COMPLETE "
                     "if the main goal has already been achieved."});

    std::string last_completion;
    for (int attempt = 0; attempt <= config_.reprompt_budget; ++attempt) {
        ChatRequest req{messages, Component::planner, config_.decoding};
        Completion completion = gateway_.complete(req);
        last_completion = completion.text;

        PlannerStep step;
        step.k = belief.k;
        step.belief_snapshot = belief;
        step.raw_completion = completion.text;
        step.reasoning = extract_reasoning(completion.text);

        auto subgoal_parse = parse_execute_subgoal(completion.text, belief.k);
        if (subgoal_parse.subgoal) {
            auto plan_parse = parse_full_plan(completion.text, belief.k);
            if (plan_parse.plan) step.plan = plan_parse.plan;
            step.subgoal = subgoal_parse.subgoal;
            return step;
        }
        if (declares_task_complete(completion.text)) {
            step.task_complete = true;
            auto plan_parse = parse_full_plan(completion.text, belief.k);
            if (plan_parse.plan) step.plan = plan_parse.plan;
            return step;
        }

        messages.push_back({"assistant", completion.text});
        messages.push_back(
            {"user", "Your previous response did not contain a valid EXECUTE_SUBGOAL[...] block "
                     "or a TASK COMPLETE declaration. Issue exactly one subgoal using the "
                     "EXECUTE_SUBGOAL format, or respond with TASK COMPLETE."});
    }
    throw PlannerParseError("planner produced no EXECUTE_SUBGOAL block after " +
                            std::to_string(config_.reprompt_budget + 1) +
                            " attempts; last completion: " + last_completion);
}

}  // namespace planact
