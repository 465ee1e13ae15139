#pragma once

// In-memory index of Resource Descriptions, ranking by Conceptual Proximity,
// and loading of a description corpus from a directory tree.

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cnav/ontology.hpp"
#include "cnav/resource.hpp"

namespace cnav {

enum class SelectionUnit { Resource, Segment };

std::string_view to_string(SelectionUnit unit);
SelectionUnit parse_selection_unit(std::string_view name);

// A selectable unit: a whole resource, or one of its segments addressed as
// "resource_id#segment_id". Points into the store that produced it.
struct Candidate {
    std::string id;
    const ResourceDescription* resource = nullptr;
    const Segment* segment = nullptr;

    const Csv& content() const { return segment ? segment->content : resource->content; }
    // Segments inherit the prerequisites of their resource.
    const Csv& prerequisites() const { return resource->prerequisites; }
    const Csv& relations() const { return segment ? segment->relations : resource->relations; }
    double time_value() const { return segment ? segment->time_value : resource->time_value; }
    const std::optional<PedagogicRole>& role() const { return resource->pedagogic_role; }
    std::string title() const;
    const std::string& uri() const { return resource->uri; }
};

struct RankedCandidate {
    std::string id;
    double cp = 0.0;
    double time_value = 0.0;

    friend bool operator==(const RankedCandidate&, const RankedCandidate&) = default;
};

// CP values closer than this are treated as a tie.
inline constexpr double kCpTieTolerance = 1e-9;

using TagSet = std::set<std::string>;

class ResourceStore {
public:
    void add(ResourceDescription rd);  // DuplicateId, InvariantViolation
    const ResourceDescription& get(std::string_view id) const;  // NotFound
    bool contains(std::string_view id) const;
    std::vector<const ResourceDescription*> list() const;  // id order
    void remove(std::string_view id);  // NotFound
    std::size_t size() const noexcept { return descriptions_.size(); }

    void tag(std::string_view id);    // NotFound; idempotent
    void untag(std::string_view id);  // NotFound
    void clear_tags() noexcept { tags_.clear(); }
    bool is_tagged(std::string_view id) const;
    const TagSet& tags() const noexcept { return tags_; }

    // Resolves "rid" or "rid#sid". Throws NotFound.
    Candidate candidate(std::string_view id) const;
    bool has_candidate(std::string_view id) const;
    // All candidates of the given unit in id order, ignoring tags.
    std::vector<Candidate> candidates(SelectionUnit unit) const;

private:
    std::map<std::string, ResourceDescription, std::less<>> descriptions_;
    TagSet tags_;
};

// Untagged candidates with CP > 0 against `objective`, ordered by CP
// descending (ties within kCpTieTolerance), then time ascending, then id.
// `overlay` holds extra exclusions private to a planning run; an id excludes
// the candidate itself and, for a resource id, all of its segments.
std::vector<RankedCandidate> rank_by_cp(const ResourceStore& store, const Csv& objective, const Ontology& ont,
                                        SelectionUnit unit = SelectionUnit::Resource,
                                        const TagSet& overlay = {});

// Errors-level diagnostics for every description in the store.
std::vector<Diagnostic> validate_store(const ResourceStore& store, const Ontology& ont);

struct LoadIssue {
    std::filesystem::path file;
    std::string message;
};

struct Corpus {
    std::optional<Ontology> ontology;
    std::filesystem::path ontology_file;
    ResourceStore store;
    std::map<std::string, std::filesystem::path> files;  // resource id -> file
    std::vector<LoadIssue> issues;
};

// Walks `dir` recursively. `*.xml` files rooted at <materiau> are Resource
// Descriptions, those rooted at <ontologie> (and `*.onto` files) ontologies.
// Unreadable files are reported in `issues` rather than thrown.
// With `ontology_path` set, that file is used and others are ignored.
Corpus load_corpus(const std::filesystem::path& dir,
                   const std::optional<std::filesystem::path>& ontology_path = std::nullopt);

}  // namespace cnav
