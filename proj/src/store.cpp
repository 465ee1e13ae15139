#include "cnav/store.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "cnav/error.hpp"
#include "cnav/proximity.hpp"

namespace cnav {

std::string_view to_string(SelectionUnit unit) {
    return unit == SelectionUnit::Resource ? "resource" : "segment";
}

SelectionUnit parse_selection_unit(std::string_view name) {
    if (name == "resource") return SelectionUnit::Resource;
    if (name == "segment") return SelectionUnit::Segment;
    throw Error(ErrorCode::ParseError, "selection unit must be 'resource' or 'segment', got '" + std::string(name) + "'");
}

std::string Candidate::title() const {
    return segment ? resource->title + " [" + segment->id + "]" : resource->title;
}

void ResourceStore::add(ResourceDescription rd) {
    check_invariants(rd);
    if (rd.id.find('#') != std::string::npos) {
        throw Error(ErrorCode::InvariantViolation, "resource id '" + rd.id + "' must not contain '#'");
    }
    if (descriptions_.count(rd.id)) throw Error(ErrorCode::DuplicateId, "resource '" + rd.id + "' already stored");
    auto id = rd.id;
    descriptions_.emplace(std::move(id), std::move(rd));
}

const ResourceDescription& ResourceStore::get(std::string_view id) const {
    auto it = descriptions_.find(id);
    if (it == descriptions_.end()) throw Error(ErrorCode::NotFound, "no resource '" + std::string(id) + "'");
    return it->second;
}

bool ResourceStore::contains(std::string_view id) const { return descriptions_.find(id) != descriptions_.end(); }

std::vector<const ResourceDescription*> ResourceStore::list() const {
    std::vector<const ResourceDescription*> out;
    out.reserve(descriptions_.size());
    for (const auto& [id, rd] : descriptions_) out.push_back(&rd);
    return out;
}

void ResourceStore::remove(std::string_view id) {
    auto it = descriptions_.find(id);
    if (it == descriptions_.end()) throw Error(ErrorCode::NotFound, "no resource '" + std::string(id) + "'");
    descriptions_.erase(it);
    std::erase_if(tags_, [&](const std::string& t) { return t == id || t.starts_with(std::string(id) + "#"); });
}

void ResourceStore::tag(std::string_view id) {
    if (!has_candidate(id)) throw Error(ErrorCode::NotFound, "cannot tag unknown candidate '" + std::string(id) + "'");
    tags_.emplace(id);
}

void ResourceStore::untag(std::string_view id) {
    if (!has_candidate(id)) throw Error(ErrorCode::NotFound, "cannot untag unknown candidate '" + std::string(id) + "'");
    tags_.erase(std::string(id));
}

bool ResourceStore::is_tagged(std::string_view id) const { return tags_.count(std::string(id)) > 0; }

Candidate ResourceStore::candidate(std::string_view id) const {
    auto hash = id.find('#');
    const auto& rd = get(id.substr(0, hash));
    if (hash == std::string_view::npos) return {std::string(id), &rd, nullptr};
    auto seg_id = id.substr(hash + 1);
    auto it = std::find_if(rd.segments.begin(), rd.segments.end(), [&](const Segment& s) { return s.id == seg_id; });
    if (it == rd.segments.end()) throw Error(ErrorCode::NotFound, "no segment '" + std::string(id) + "'");
    return {std::string(id), &rd, &*it};
}

bool ResourceStore::has_candidate(std::string_view id) const {
    auto hash = id.find('#');
    auto it = descriptions_.find(id.substr(0, hash));
    if (it == descriptions_.end()) return false;
    if (hash == std::string_view::npos) return true;
    auto seg_id = id.substr(hash + 1);
    const auto& segs = it->second.segments;
    return std::any_of(segs.begin(), segs.end(), [&](const Segment& s) { return s.id == seg_id; });
}

std::vector<Candidate> ResourceStore::candidates(SelectionUnit unit) const {
    std::vector<Candidate> out;
    for (const auto& [id, rd] : descriptions_) {
        if (unit == SelectionUnit::Resource) {
            out.push_back({id, &rd, nullptr});
        } else {
            for (const auto& s : rd.segments) out.push_back({id + "#" + s.id, &rd, &s});
        }
    }
    // "a#b" must sort as a string; the map order already gives resource order,
    // but segment ids are in declaration order within a resource.
    std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) { return a.id < b.id; });
    return out;
}

namespace {

bool excluded(const Candidate& c, const TagSet& tags) {
    return tags.count(c.id) > 0 || (c.segment && tags.count(c.resource->id) > 0);
}

}  // namespace

std::vector<RankedCandidate> rank_by_cp(const ResourceStore& store, const Csv& objective, const Ontology& ont,
                                        SelectionUnit unit, const TagSet& overlay) {
    if (objective.empty()) throw Error(ErrorCode::EmptyObjective, "cannot rank against an empty objective");

    std::vector<RankedCandidate> scored;
    for (const auto& c : store.candidates(unit)) {
        if (excluded(c, store.tags()) || excluded(c, overlay)) continue;
        double cp = conceptual_proximity(objective, c.content(), ont);
        if (cp > 0.0) scored.push_back({c.id, cp, c.time_value()});
    }

    // Exact CP descending first, then cluster values within the tie tolerance
    // of each cluster's head and order every cluster by (time, id).
    std::sort(scored.begin(), scored.end(), [](const RankedCandidate& a, const RankedCandidate& b) {
        if (a.cp != b.cp) return a.cp > b.cp;
        return a.id < b.id;
    });
    for (auto head = scored.begin(); head != scored.end();) {
        auto end = std::find_if(head, scored.end(),
                                [&](const RankedCandidate& r) { return head->cp - r.cp > kCpTieTolerance; });
        std::sort(head, end, [](const RankedCandidate& a, const RankedCandidate& b) {
            if (a.time_value != b.time_value) return a.time_value < b.time_value;
            return a.id < b.id;
        });
        head = end;
    }
    return scored;
}

std::vector<Diagnostic> validate_store(const ResourceStore& store, const Ontology& ont) {
    std::vector<Diagnostic> out;
    for (const auto* rd : store.list()) {
        for (auto& d : validate_rd(*rd, ont)) out.push_back(std::move(d));
    }
    return out;
}

namespace {

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(ErrorCode::NotFound, "cannot open " + p.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Cheap sniff of the root element name without a full parse.
std::string root_element(const std::string& content) {
    std::size_t pos = 0;
    while ((pos = content.find('<', pos)) != std::string::npos) {
        if (content.compare(pos, 2, "<?") == 0 || content.compare(pos, 2, "<!") == 0) {
            ++pos;
            continue;
        }
        auto end = content.find_first_of(" \t\r\n/>", pos + 1);
        return content.substr(pos + 1, end == std::string::npos ? std::string::npos : end - pos - 1);
    }
    return {};
}

}  // namespace

Corpus load_corpus(const std::filesystem::path& dir, const std::optional<std::filesystem::path>& ontology_path) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw Error(ErrorCode::NotFound, "not a directory: " + dir.string());

    Corpus corpus;
    if (ontology_path) {
        corpus.ontology = load_ontology_file(ontology_path->string());
        corpus.ontology_file = *ontology_path;
    }

    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    for (const auto& file : files) {
        const auto ext = file.extension().string();
        if (ext != ".xml" && ext != ".onto") continue;
        try {
            auto content = read_file(file);
            auto root = ext == ".onto" ? std::string("ontologie") : root_element(content);
            if (root == "materiau") {
                auto rd = parse_rd(content);
                auto id = rd.id;
                corpus.store.add(std::move(rd));
                corpus.files.emplace(id, file);
            } else if (root == "ontologie") {
                if (ontology_path && fs::equivalent(file, *ontology_path)) continue;
                if (corpus.ontology) {
                    corpus.issues.push_back({file, "additional ontology ignored; using " + corpus.ontology_file.string()});
                    continue;
                }
                corpus.ontology = ext == ".onto" ? load_ontology_text(content) : load_ontology(content);
                corpus.ontology_file = file;
            } else {
                corpus.issues.push_back({file, "skipped: root element <" + root + "> is neither materiau nor ontologie"});
            }
        } catch (const Error& e) {
            corpus.issues.push_back({file, e.what()});
        }
    }
    return corpus;
}

}  // namespace cnav
