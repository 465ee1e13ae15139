#include "cnav/resource.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "cnav/error.hpp"
#include "xml.hpp"

namespace cnav {

const PedagogicRole PedagogicRole::exposure{Kind::Exposure, {}};
const PedagogicRole PedagogicRole::example{Kind::Example, {}};
const PedagogicRole PedagogicRole::explanation{Kind::Explanation, {}};
const PedagogicRole PedagogicRole::test{Kind::Test, {}};

PedagogicRole PedagogicRole::parse(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "exposure") return exposure;
    if (lower == "example") return example;
    if (lower == "explanation") return explanation;
    if (lower == "test") return test;
    if (name.empty()) throw Error(ErrorCode::InvariantViolation, "empty pedagogic role");
    return {Kind::Other, std::string(name)};
}

PedagogicRole PedagogicRole::other(std::string name) { return parse(name); }

std::string PedagogicRole::name() const {
    switch (kind_) {
    case Kind::Exposure: return "exposure";
    case Kind::Example: return "example";
    case Kind::Explanation: return "explanation";
    case Kind::Test: return "test";
    case Kind::Other: return other_;
    }
    return other_;
}

std::string format_decimal(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

namespace {

double parse_decimal(const std::string& raw, const std::string& context) {
    std::string s = raw;
    s.erase(0, s.find_first_not_of(" \t\r\n"));
    s.erase(s.find_last_not_of(" \t\r\n") + 1);
    double v = 0.0;
    const char* first = s.data();
    if (!s.empty() && s.front() == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw Error(ErrorCode::ParseError, context + ": '" + raw + "' is not a decimal number");
    }
    return v;
}

void check_csv(const Csv& csv, const std::string& rd_id, const std::string& name) {
    std::set<KclGraph> seen;
    for (std::size_t i = 0; i < csv.entries.size(); ++i) {
        const auto& e = csv.entries[i];
        auto where = rd_id + " " + name + "[" + std::to_string(i) + "]";
        if (!(e.weight >= 0.0 && e.weight <= 1.0)) {
            throw Error(ErrorCode::InvariantViolation, where + ": weight outside [0,1]");
        }
        if (e.graph.predicate() && !e.graph.predicate()->referent.is_none()) {
            throw Error(ErrorCode::InvariantViolation, where + ": predicate terms carry no referent");
        }
        if (!seen.insert(e.graph).second) {
            throw Error(ErrorCode::InvariantViolation, where + ": duplicate graph " + to_string(e.graph));
        }
    }
}

Referent parse_referent(const std::optional<std::string>& raw) {
    if (!raw) return Referent::none();
    if (*raw == "#") return Referent::generic();
    return Referent::named(*raw);
}

WeightedGraph parse_phrase(const xml::Node& node, const std::string& context) {
    auto source = xml::attribute(node, "source");
    if (!source) throw Error(ErrorCode::ParseError, context + ": <phrase_kldp> without source");
    auto predicate = xml::attribute(node, "predicat");
    auto destination = xml::attribute(node, "destination");
    if (destination && !predicate) {
        throw Error(ErrorCode::InvariantViolation, context + ": destination without predicat");
    }
    std::optional<ConceptTerm> pred, dest;
    try {
        ConceptTerm src(*source, parse_referent(xml::attribute(node, "source_ref")));
        if (predicate) pred = ConceptTerm(*predicate);
        if (destination) dest = ConceptTerm(*destination, parse_referent(xml::attribute(node, "destination_ref")));
        WeightedGraph wg{KclGraph(std::move(src), std::move(pred), std::move(dest)), 1.0};
        if (auto w = xml::attribute(node, "poids")) {
            wg.weight = parse_decimal(*w, context + " poids");
            check_weight(wg.weight);
        }
        return wg;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ParseError) throw;
        throw Error(e.code(), context + ": " + e.what());
    }
}

Csv parse_csv(const xml::Node& node, const std::string& context) {
    Csv csv;
    std::size_t i = 0;
    for (const auto& [name, child] : xml::children(node)) {
        if (name != "phrase_kldp") {
            throw Error(ErrorCode::ParseError, context + ": unexpected <" + name + ">");
        }
        csv.entries.push_back(parse_phrase(*child, context + " phrase_kldp #" + std::to_string(++i)));
    }
    return simplify(csv);
}

void write_csv(std::ostringstream& out, const char* element, const Csv& csv, const std::string& indent) {
    out << indent << "<" << element << ">\n";
    for (const auto& e : csv.entries) {
        const auto& g = e.graph;
        out << indent << "  <phrase_kldp source=\"" << xml::escape(g.source().type_name) << "\"";
        auto write_ref = [&](const char* attr, const Referent& r) {
            if (r.is_generic()) out << " " << attr << "=\"#\"";
            if (r.is_named()) out << " " << attr << "=\"" << xml::escape(r.name) << "\"";
        };
        write_ref("source_ref", g.source().referent);
        if (g.predicate()) out << " predicat=\"" << xml::escape(g.predicate()->type_name) << "\"";
        if (g.destination()) {
            out << " destination=\"" << xml::escape(g.destination()->type_name) << "\"";
            write_ref("destination_ref", g.destination()->referent);
        }
        if (e.weight != 1.0) out << " poids=\"" << format_decimal(e.weight) << "\"";
        out << "/>\n";
    }
    out << indent << "</" << element << ">\n";
}

}  // namespace

void check_invariants(const ResourceDescription& rd) {
    if (rd.id.empty()) throw Error(ErrorCode::InvariantViolation, "resource id must be non-empty");
    if (rd.content.empty()) {
        throw Error(ErrorCode::InvariantViolation, rd.id + ": description_conceptuelle must hold at least one graph");
    }
    if (!(rd.time_value >= 0.0)) throw Error(ErrorCode::InvariantViolation, rd.id + ": negative temps_utilisation");
    check_csv(rd.content, rd.id, "content");
    check_csv(rd.prerequisites, rd.id, "prerequisites");
    check_csv(rd.relations, rd.id, "relations");
    std::set<std::string> seg_ids;
    for (const auto& s : rd.segments) {
        auto where = rd.id + " segment '" + s.id + "'";
        if (s.id.empty() || s.id.find('#') != std::string::npos) {
            throw Error(ErrorCode::InvariantViolation, where + ": segment ids must be non-empty and free of '#'");
        }
        if (!seg_ids.insert(s.id).second) throw Error(ErrorCode::InvariantViolation, where + ": duplicate segment id");
        if (s.content.empty()) throw Error(ErrorCode::InvariantViolation, where + ": empty content");
        if (!(s.time_value >= 0.0)) throw Error(ErrorCode::InvariantViolation, where + ": negative time");
        check_csv(s.content, rd.id, "segment:" + s.id + "/content");
        check_csv(s.relations, rd.id, "segment:" + s.id + "/relations");
    }
}

ResourceDescription parse_rd(std::string_view document) {
    auto doc = xml::parse(document);
    auto [root_name, root] = xml::root(doc);
    if (root_name != "materiau") {
        throw Error(ErrorCode::ParseError, "root element must be <materiau>, found <" + root_name + ">");
    }
    ResourceDescription rd;
    auto required = [&](const char* attr) {
        auto v = xml::attribute(*root, attr);
        if (!v) throw Error(ErrorCode::ParseError, std::string("<materiau> lacks attribute '") + attr + "'");
        return *v;
    };
    rd.id = required("id");
    rd.uri = required("uri");
    rd.title = required("titre");
    rd.media = xml::attribute(*root, "media");

    bool has_ontology = false, has_time = false, has_content = false;
    for (const auto& [name, node] : xml::children(*root)) {
        const auto ctx = rd.id + " <" + name + ">";
        if (name == "ontologie") {
            rd.ontology_uri = xml::text(*node);
            has_ontology = true;
        } else if (name == "temps_utilisation") {
            rd.time_value = parse_decimal(xml::text(*node), ctx);
            has_time = true;
        } else if (name == "type_pedagogique") {
            rd.pedagogic_role = PedagogicRole::parse(xml::text(*node));
        } else if (name == "description_conceptuelle") {
            rd.content = merge_into(rd.content, parse_csv(*node, ctx));
            has_content = true;
        } else if (name == "pre_requis") {
            rd.prerequisites = merge_into(rd.prerequisites, parse_csv(*node, ctx));
        } else if (name == "relation_conceptuelle") {
            rd.relations = merge_into(rd.relations, parse_csv(*node, ctx));
        } else if (name == "segment") {
            Segment seg;
            auto id = xml::attribute(*node, "id");
            auto time = xml::attribute(*node, "temps_utilisation");
            if (!id || !time) throw Error(ErrorCode::ParseError, ctx + " needs id and temps_utilisation");
            seg.id = *id;
            seg.time_value = parse_decimal(*time, ctx + " temps_utilisation");
            for (const auto& [child_name, child] : xml::children(*node)) {
                auto sctx = ctx + " '" + seg.id + "' <" + child_name + ">";
                if (child_name == "description_conceptuelle") {
                    seg.content = merge_into(seg.content, parse_csv(*child, sctx));
                } else if (child_name == "relation_conceptuelle") {
                    seg.relations = merge_into(seg.relations, parse_csv(*child, sctx));
                } else {
                    throw Error(ErrorCode::ParseError, sctx + ": unexpected element in segment");
                }
            }
            rd.segments.push_back(std::move(seg));
        }
        // Other descriptive elements of the format (keywords, rights, ...) are
        // not used for navigation and are skipped.
    }
    if (!has_ontology) throw Error(ErrorCode::ParseError, rd.id + ": missing <ontologie>");
    if (!has_time) throw Error(ErrorCode::ParseError, rd.id + ": missing <temps_utilisation>");
    if (!has_content) throw Error(ErrorCode::InvariantViolation, rd.id + ": missing <description_conceptuelle>");
    check_invariants(rd);
    return rd;
}

std::string serialize_rd(const ResourceDescription& rd) {
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<materiau id=\"" << xml::escape(rd.id) << "\" uri=\"" << xml::escape(rd.uri) << "\" titre=\""
        << xml::escape(rd.title) << "\"";
    if (rd.media) out << " media=\"" << xml::escape(*rd.media) << "\"";
    out << ">\n";
    out << "  <ontologie>" << xml::escape(rd.ontology_uri) << "</ontologie>\n";
    out << "  <temps_utilisation>" << format_decimal(rd.time_value) << "</temps_utilisation>\n";
    if (rd.pedagogic_role) out << "  <type_pedagogique>" << xml::escape(rd.pedagogic_role->name()) << "</type_pedagogique>\n";
    write_csv(out, "description_conceptuelle", rd.content, "  ");
    if (!rd.prerequisites.empty()) write_csv(out, "pre_requis", rd.prerequisites, "  ");
    if (!rd.relations.empty()) write_csv(out, "relation_conceptuelle", rd.relations, "  ");
    for (const auto& s : rd.segments) {
        out << "  <segment id=\"" << xml::escape(s.id) << "\" temps_utilisation=\"" << format_decimal(s.time_value)
            << "\">\n";
        write_csv(out, "description_conceptuelle", s.content, "    ");
        if (!s.relations.empty()) write_csv(out, "relation_conceptuelle", s.relations, "    ");
        out << "  </segment>\n";
    }
    out << "</materiau>\n";
    return out.str();
}

std::vector<Diagnostic> validate_rd(const ResourceDescription& rd, const Ontology& ont) {
    std::vector<Diagnostic> out;
    if (rd.ontology_uri != ont.uri()) {
        out.push_back({Diagnostic::Kind::OntologyMismatch, Diagnostic::Severity::Warning, rd.id, "ontologie", 0,
                       "indexed with '" + rd.ontology_uri + "' but checked against '" + ont.uri() + "'"});
    }
    auto check = [&](const Csv& csv, const std::string& name) {
        for (std::size_t i = 0; i < csv.entries.size(); ++i) {
            for (auto d : ont.validate_graph(csv.entries[i].graph)) {
                d.resource_id = rd.id;
                d.csv_name = name;
                d.entry_index = i;
                out.push_back(std::move(d));
            }
        }
    };
    check(rd.content, "content");
    check(rd.prerequisites, "prerequisites");
    check(rd.relations, "relations");
    double segment_time = 0.0;
    for (const auto& s : rd.segments) {
        check(s.content, "segment:" + s.id + "/content");
        check(s.relations, "segment:" + s.id + "/relations");
        segment_time += s.time_value;
    }
    if (segment_time > rd.time_value) {
        out.push_back({Diagnostic::Kind::SegmentTimeExceedsResource, Diagnostic::Severity::Warning, rd.id,
                       "segment", 0,
                       "segments total " + format_decimal(segment_time) + " min, resource declares " +
                           format_decimal(rd.time_value)});
    }
    return out;
}

bool has_errors(const std::vector<Diagnostic>& diags) {
    return std::any_of(diags.begin(), diags.end(),
                       [](const Diagnostic& d) { return d.severity == Diagnostic::Severity::Error; });
}

}  // namespace cnav
