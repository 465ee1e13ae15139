// cnav: command-line front end for the conceptual navigation engine.

#include <CLI11.hpp>
#include <httplib.h>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "cnav/error.hpp"
#include "cnav/http_api.hpp"
#include "cnav/json_io.hpp"
#include "cnav/planner.hpp"
#include "cnav/session.hpp"
#include "cnav/store.hpp"

namespace fs = std::filesystem;
using namespace cnav;

namespace {

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::NotFound, "cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, path + ": " + e.what());
    }
}

Corpus open_corpus(const std::string& dir, const std::string& ontology) {
    auto corpus = load_corpus(dir, ontology.empty() ? std::nullopt : std::optional<fs::path>(ontology));
    if (!corpus.ontology) throw Error(ErrorCode::NotFound, "no ontology found in " + dir + " (use --ontology)");
    return corpus;
}

void print_issues(const Corpus& corpus) {
    for (const auto& issue : corpus.issues) std::cerr << issue.file.string() << ": " << issue.message << "\n";
}

void print_plan(const CoursePlan& plan, const ResourceStore& store, std::ostream& out) {
    out << "status: " << to_string(plan.status) << "  total: " << format_decimal(plan.total_time) << " min"
        << (plan.within_budget ? "" : "  (over budget)") << "\n";
    int n = 0;
    for (const auto& s : plan.steps) {
        auto c = store.candidate(s.candidate_id);
        out << std::setw(3) << ++n << ". " << std::left << std::setw(24) << s.candidate_id << std::right
            << std::setw(7) << format_decimal(s.time_value) << " min  cp=" << std::fixed << std::setprecision(3)
            << s.cp_at_selection << std::defaultfloat << "  " << c.title() << "\n";
    }
    if (!plan.residual_objective.empty()) out << "uncovered: " << to_string(plan.residual_objective) << "\n";
    for (const auto& w : plan.warnings) out << "warning: " << w << "\n";
}

int cmd_validate(const std::string& dir, const std::string& ontology) {
    auto corpus = open_corpus(dir, ontology);
    print_issues(corpus);
    std::size_t errors = corpus.issues.size(), warnings = 0;
    for (const auto* rd : corpus.store.list()) {
        for (const auto& d : validate_rd(*rd, *corpus.ontology)) {
            const bool err = d.severity == Diagnostic::Severity::Error;
            (err ? errors : warnings)++;
            std::cout << (err ? "error" : "warning") << ": " << corpus.files[rd->id].string() << ": " << d.resource_id
                      << " " << d.csv_name << "[" << d.entry_index << "] " << to_string(d.kind) << ": " << d.message
                      << "\n";
        }
    }
    std::cout << corpus.store.size() << " descriptions, " << errors << " errors, " << warnings << " warnings\n";
    return errors == 0 ? 0 : 1;
}

int cmd_index(const std::string& dir, const std::string& ontology, const std::string& output) {
    auto corpus = load_corpus(dir, ontology.empty() ? std::nullopt : std::optional<fs::path>(ontology));
    print_issues(corpus);
    json index{{"ontology", corpus.ontology ? json(corpus.ontology->uri()) : json(nullptr)},
               {"ontology_file", corpus.ontology_file.string()},
               {"resources", json::array()}};
    for (const auto* rd : corpus.store.list()) {
        auto entry = rd_summary_to_json(*rd);
        entry["file"] = fs::relative(corpus.files[rd->id], dir).string();
        index["resources"].push_back(std::move(entry));
    }
    if (output.empty()) {
        std::cout << index.dump(2) << "\n";
    } else {
        std::ofstream(output) << index.dump(2) << "\n";
        std::cout << "indexed " << corpus.store.size() << " descriptions into " << output << "\n";
    }
    return corpus.issues.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conceptual navigation engine"};
    app.require_subcommand(1);

    std::string dir, ontology, profile_file, config_file, strategy = "backward", start, template_file, output;
    std::string expand_id, host = "0.0.0.0", sessions_file;
    bool as_json = false, fill_gaps = false, explanation_rule = false, relaxed = false;
    int port = 8080, limit = -1, max_backtracks = -1;
    std::string unit;
    double budget = -1;

    auto* validate = app.add_subcommand("validate", "Parse and ontology-check a corpus of descriptions");
    validate->add_option("dir", dir, "Corpus directory")->required()->check(CLI::ExistingDirectory);
    validate->add_option("--ontology", ontology, "Ontology file (default: found in the corpus)");

    auto* index = app.add_subcommand("index", "Build the description index of a corpus");
    index->add_option("dir", dir, "Corpus directory")->required()->check(CLI::ExistingDirectory);
    index->add_option("--ontology", ontology, "Ontology file");
    index->add_option("-o,--output", output, "Write the index to this file");

    auto* plan = app.add_subcommand("plan", "Build a course plan for a learner profile");
    plan->add_option("--corpus", dir, "Corpus directory")->required()->check(CLI::ExistingDirectory);
    plan->add_option("--ontology", ontology, "Ontology file");
    plan->add_option("--profile", profile_file, "Profile JSON {known, objective, time_budget}")->required();
    plan->add_option("--config", config_file, "Planner configuration JSON");
    plan->add_option("--strategy", strategy, "backward | forward | template")
        ->check(CLI::IsMember({"backward", "forward", "template"}));
    plan->add_option("--start", start, "Start candidate for forward navigation");
    plan->add_option("--template", template_file, "Template JSON: array of CSVs");
    plan->add_option("--budget", budget, "Override the profile time budget (minutes)");
    plan->add_option("--max-backtracks", max_backtracks, "Backtracking cap");
    plan->add_flag("--relaxed", relaxed, "Allow any untried alternate when backtracking");
    plan->add_option("--unit", unit, "resource | segment")->check(CLI::IsMember({"resource", "segment"}));
    plan->add_flag("--fill-gaps", fill_gaps, "Top up remaining time with conceptual expansion");
    plan->add_flag("--explanation-before-example", explanation_rule, "Apply the Explanation-before-Example rule");
    plan->add_flag("--json", as_json, "Machine-readable output");

    auto* expand = app.add_subcommand("expand", "List resources related to a candidate");
    expand->add_option("id", expand_id, "Resource or resource#segment id")->required();
    expand->add_option("--corpus", dir, "Corpus directory")->required()->check(CLI::ExistingDirectory);
    expand->add_option("--ontology", ontology, "Ontology file");
    expand->add_option("--limit", limit, "Maximum number of results");
    expand->add_flag("--json", as_json, "Machine-readable output");

    auto* serve = app.add_subcommand("serve", "Run the session HTTP service");
    serve->add_option("--corpus", dir, "Corpus directory")->required()->check(CLI::ExistingDirectory);
    serve->add_option("--ontology", ontology, "Ontology file");
    serve->add_option("--port", port, "Listening port");
    serve->add_option("--host", host, "Listening address");
    serve->add_option("--config", config_file, "Planner configuration JSON");
    serve->add_option("--sessions", sessions_file, "Session snapshot file (sessions survive restarts)");

    CLI11_PARSE(app, argc, argv);

    try {
        PlannerConfig config;
        if (!config_file.empty()) config = config_from_json(read_json_file(config_file));
        if (max_backtracks >= 0) config.max_backtracks = max_backtracks;
        if (relaxed) config.backtrack_relaxed = true;
        if (!unit.empty()) config.selection_unit = parse_selection_unit(unit);
        if (limit >= 0) config.expansion_limit = limit;

        if (*validate) return cmd_validate(dir, ontology);
        if (*index) return cmd_index(dir, ontology, output);

        auto corpus = open_corpus(dir, ontology);
        print_issues(corpus);

        if (*plan) {
            auto profile = profile_from_json(read_json_file(profile_file));
            if (budget > 0) profile.time_budget = budget;
            CoursePlan result;
            if (strategy == "backward") {
                result = backward_navigate(profile, corpus.store, *corpus.ontology, config);
                if (fill_gaps) result = fill_time_gap(result, profile, corpus.store, *corpus.ontology, config);
            } else if (strategy == "forward") {
                if (start.empty() || !profile.time_budget) {
                    throw Error(ErrorCode::InvalidProfile, "forward navigation needs --start and a time budget");
                }
                result = forward_navigate(start, corpus.store, *corpus.ontology, *profile.time_budget, config);
            } else {
                if (template_file.empty()) throw Error(ErrorCode::InvalidProfile, "template strategy needs --template");
                std::vector<Csv> segments;
                for (const auto& seg : read_json_file(template_file)) segments.push_back(csv_from_json(seg));
                result = template_instantiate(segments, profile, corpus.store, *corpus.ontology, config);
            }
            if (explanation_rule) result = apply_pedagogic_rules(result, {explanation_before_example()}, corpus.store);
            if (as_json) {
                std::cout << plan_to_json(result).dump(2) << "\n";
            } else {
                print_plan(result, corpus.store, std::cout);
            }
            return 0;
        }

        if (*expand) {
            auto ranked = conceptual_expansion(expand_id, corpus.store, *corpus.ontology, config.expansion_limit,
                                               config.selection_unit);
            if (as_json) {
                std::cout << ranked_to_json(ranked).dump(2) << "\n";
            } else {
                for (const auto& r : ranked) {
                    std::cout << std::left << std::setw(24) << r.id << std::right << " cp=" << std::fixed
                              << std::setprecision(3) << r.cp << std::defaultfloat << "  "
                              << format_decimal(r.time_value) << " min  " << corpus.store.candidate(r.id).title()
                              << "\n";
                }
            }
            return 0;
        }

        if (*serve) {
            auto store = std::make_shared<const ResourceStore>(std::move(corpus.store));
            auto ont = std::make_shared<const Ontology>(std::move(*corpus.ontology));
            std::optional<fs::path> snapshot;
            if (!sessions_file.empty()) snapshot = sessions_file;
            SessionService service(store, ont, config, snapshot);
            HttpApi api(service);
            httplib::Server server;
            mount(server, api);
            std::cerr << "serving " << store->size() << " descriptions on http://" << host << ":" << port << "\n";
            if (!server.listen(host, port)) {
                std::cerr << "cannot listen on " << host << ":" << port << "\n";
                return 1;
            }
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "cnav: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
