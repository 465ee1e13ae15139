#include "cnav/ontology.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

#include "cnav/error.hpp"
#include "xml.hpp"

namespace cnav {

std::string_view to_string(Diagnostic::Kind kind) {
    switch (kind) {
    case Diagnostic::Kind::UnknownType: return "UnknownType";
    case Diagnostic::Kind::UnlicensedAssertion: return "UnlicensedAssertion";
    case Diagnostic::Kind::OntologyMismatch: return "OntologyMismatch";
    case Diagnostic::Kind::SegmentTimeExceedsResource: return "SegmentTimeExceedsResource";
    }
    return "Unknown";
}

Ontology::Ontology(std::string uri, std::vector<ConceptTypeDecl> types, std::vector<RelationSignature> signatures)
    : uri_(std::move(uri)), decls_(std::move(types)), signatures_(std::move(signatures)) {
    // An explicit declaration of the root is accepted and folded into the implicit one.
    std::erase_if(decls_, [](const ConceptTypeDecl& d) { return d.name == kUniversalType && d.parents.empty(); });

    names_.emplace_back(kUniversalType);
    index_.emplace(std::string(kUniversalType), 0);
    for (const auto& d : decls_) {
        if (d.name.empty()) throw Error(ErrorCode::InvariantViolation, "concept with empty name");
        if (!index_.emplace(d.name, names_.size()).second) {
            throw Error(ErrorCode::InvariantViolation, "concept '" + d.name + "' declared twice");
        }
        names_.push_back(d.name);
    }

    const std::size_t n = names_.size();
    std::vector<std::vector<std::size_t>> parents(n);
    for (std::size_t i = 0; i < decls_.size(); ++i) {
        const auto& d = decls_[i];
        for (const auto& p : d.parents) {
            auto it = index_.find(p);
            if (it == index_.end()) {
                throw Error(ErrorCode::DanglingReference,
                            "concept '" + d.name + "' names undeclared parent '" + p + "'", {d.name, p});
            }
            parents[i + 1].push_back(it->second);
        }
        if (d.parents.empty()) parents[i + 1].push_back(0);
    }

    // DFS with colouring both detects cycles and fills the reflexive-transitive closure.
    ancestors_.assign(n, std::vector<bool>(n, false));
    std::vector<int> state(n, 0);  // 0 new, 1 on stack, 2 done
    std::vector<std::string> stack;
    std::function<void(std::size_t)> visit = [&](std::size_t v) {
        state[v] = 1;
        stack.push_back(names_[v]);
        ancestors_[v][v] = true;
        for (auto p : parents[v]) {
            if (state[p] == 1) {
                auto from = std::find(stack.begin(), stack.end(), names_[p]);
                std::vector<std::string> cycle(from, stack.end());
                std::string desc;
                for (const auto& c : cycle) desc += c + " < ";
                throw Error(ErrorCode::CycleError, "subtype cycle: " + desc + names_[p], cycle);
            }
            if (state[p] == 0) visit(p);
            for (std::size_t j = 0; j < n; ++j) {
                if (ancestors_[p][j]) ancestors_[v][j] = true;
            }
        }
        stack.pop_back();
        state[v] = 2;
    };
    for (std::size_t v = 0; v < n; ++v) {
        if (state[v] == 0) visit(v);
    }

    std::set<RelationSignature> seen;
    for (const auto& s : signatures_) {
        for (const auto* t : {&s.source_type, &s.predicate_type, &s.destination_type}) {
            if (!has_type(*t)) {
                throw Error(ErrorCode::DanglingReference,
                            "relation (" + s.source_type + ", " + s.predicate_type + ", " + s.destination_type +
                                ") names undeclared type '" + *t + "'",
                            {*t});
            }
        }
        if (!seen.insert(s).second) {
            throw Error(ErrorCode::InvariantViolation, "relation (" + s.source_type + ", " + s.predicate_type + ", " +
                                                           s.destination_type + ") declared twice");
        }
    }
}

bool Ontology::has_type(std::string_view name) const { return index_.find(std::string(name)) != index_.end(); }

std::size_t Ontology::index_of(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) throw Error(ErrorCode::UnknownType, "unknown concept type '" + std::string(name) + "'");
    return it->second;
}

bool Ontology::is_subtype(std::string_view a, std::string_view b) const {
    return ancestors_[index_of(a)][index_of(b)];
}

std::set<std::string> Ontology::subtypes_of(std::string_view name) const {
    auto b = index_of(name);
    std::set<std::string> out;
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (i != b && ancestors_[i][b]) out.insert(names_[i]);
    }
    return out;
}

std::set<std::string> Ontology::valid_predicates(std::string_view source) const {
    index_of(source);
    std::set<std::string> out;
    for (const auto& s : signatures_) {
        if (is_subtype(source, s.source_type)) out.insert(s.predicate_type);
    }
    return out;
}

std::set<std::string> Ontology::valid_destinations(std::string_view source, std::string_view predicate) const {
    index_of(source);
    index_of(predicate);
    std::set<std::string> out;
    for (const auto& s : signatures_) {
        if (is_subtype(source, s.source_type) && is_subtype(predicate, s.predicate_type)) {
            out.insert(s.destination_type);
            out.merge(subtypes_of(s.destination_type));
        }
    }
    return out;
}

std::vector<Diagnostic> Ontology::validate_graph(const KclGraph& g) const {
    std::vector<Diagnostic> out;
    for (const auto* term : g.terms()) {
        if (!has_type(term->type_name)) {
            out.push_back({Diagnostic::Kind::UnknownType, Diagnostic::Severity::Error, {}, {}, 0,
                           "unknown concept type '" + term->type_name + "' in " + to_string(g)});
        }
    }
    if (!out.empty() || !g.destination()) return out;

    const auto& src = g.source().type_name;
    const auto& pred = g.predicate()->type_name;
    const auto& dst = g.destination()->type_name;
    bool licensed = std::any_of(signatures_.begin(), signatures_.end(), [&](const RelationSignature& s) {
        return is_subtype(src, s.source_type) && is_subtype(pred, s.predicate_type) &&
               is_subtype(dst, s.destination_type);
    });
    if (!licensed) {
        out.push_back({Diagnostic::Kind::UnlicensedAssertion, Diagnostic::Severity::Error, {}, {}, 0,
                       "no relation signature licenses " + to_string(g)});
    }
    return out;
}

std::vector<std::string> Ontology::decompose(std::string_view whole, std::string_view relation) const {
    index_of(whole);
    index_of(relation);
    std::vector<std::string> out;
    for (const auto& s : signatures_) {
        if (s.predicate_type == relation && is_subtype(whole, s.source_type) &&
            std::find(out.begin(), out.end(), s.destination_type) == out.end()) {
            out.push_back(s.destination_type);
        }
    }
    return out;
}

namespace {

std::vector<std::string> split_ws(std::string_view s) {
    std::vector<std::string> out;
    std::istringstream in{std::string(s)};
    for (std::string tok; in >> tok;) out.push_back(tok);
    return out;
}

std::string required_attr(const xml::Node& node, const std::string& name, const std::string& context) {
    auto v = xml::attribute(node, name);
    if (!v || v->empty()) throw Error(ErrorCode::ParseError, context + ": missing attribute '" + name + "'");
    return *v;
}

// Re-throws construction errors with the offending element named.
Ontology build(std::string uri, std::vector<ConceptTypeDecl> types, std::vector<RelationSignature> sigs,
               const std::vector<std::string>& type_ctx, const std::vector<std::string>& sig_ctx) {
    try {
        return Ontology(std::move(uri), types, sigs);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::DanglingReference || e.subjects().empty()) throw;
        const auto& missing = e.subjects().back();
        for (std::size_t i = 0; i < types.size(); ++i) {
            const auto& ps = types[i].parents;
            if (std::find(ps.begin(), ps.end(), missing) != ps.end()) {
                throw Error(e.code(), type_ctx[i] + ": undeclared parent '" + missing + "'", e.subjects());
            }
        }
        for (std::size_t i = 0; i < sigs.size(); ++i) {
            const auto& s = sigs[i];
            if (s.source_type == missing || s.predicate_type == missing || s.destination_type == missing) {
                throw Error(e.code(), sig_ctx[i] + ": undeclared type '" + missing + "'", e.subjects());
            }
        }
        throw;
    }
}

std::string format_parents(const std::vector<std::string>& parents) {
    std::string out;
    for (const auto& p : parents) out += (out.empty() ? "" : " ") + p;
    return out;
}

}  // namespace

Ontology load_ontology(std::string_view text) {
    auto doc = xml::parse(text);
    auto [root_name, root] = xml::root(doc);
    if (root_name != "ontologie") {
        throw Error(ErrorCode::ParseError, "root element must be <ontologie>, found <" + root_name + ">");
    }
    std::string uri = xml::attribute(*root, "uri").value_or("");

    std::vector<ConceptTypeDecl> types;
    std::vector<RelationSignature> sigs;
    std::vector<std::string> type_ctx, sig_ctx;
    std::size_t concept_no = 0, relation_no = 0;
    for (const auto& [name, node] : xml::children(*root)) {
        if (name == "concept") {
            auto ctx = "<concept> #" + std::to_string(++concept_no);
            auto nom = required_attr(*node, "nom", ctx);
            type_ctx.push_back(ctx + " (nom=\"" + nom + "\")");
            types.push_back({nom, split_ws(xml::attribute(*node, "parents").value_or(""))});
        } else if (name == "relation") {
            auto ctx = "<relation> #" + std::to_string(++relation_no);
            sig_ctx.push_back(ctx);
            sigs.push_back({required_attr(*node, "source", ctx), required_attr(*node, "predicat", ctx),
                            required_attr(*node, "destination", ctx)});
        } else {
            throw Error(ErrorCode::ParseError, "unexpected element <" + name + "> in <ontologie>");
        }
    }
    return build(std::move(uri), std::move(types), std::move(sigs), type_ctx, sig_ctx);
}

Ontology load_ontology_text(std::string_view text) {
    std::string uri;
    std::vector<ConceptTypeDecl> types;
    std::vector<RelationSignature> sigs;
    std::vector<std::string> type_ctx, sig_ctx;

    std::istringstream in{std::string(text)};
    std::size_t line_no = 0;
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        auto toks = split_ws(line);
        if (toks.empty()) continue;
        auto ctx = "line " + std::to_string(line_no);
        if (toks[0] == "ontology" && toks.size() == 2) {
            uri = toks[1];
        } else if (toks[0] == "concept" && (toks.size() == 2 || (toks.size() > 3 && toks[2] == "<"))) {
            types.push_back({toks[1], {toks.begin() + std::min<std::size_t>(3, toks.size()), toks.end()}});
            type_ctx.push_back(ctx);
        } else if (toks[0] == "relation" && toks.size() == 4) {
            sigs.push_back({toks[1], toks[2], toks[3]});
            sig_ctx.push_back(ctx);
        } else {
            throw Error(ErrorCode::ParseError, ctx + ": cannot parse '" + line + "'");
        }
    }
    return build(std::move(uri), std::move(types), std::move(sigs), type_ctx, sig_ctx);
}

Ontology load_ontology_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::NotFound, "cannot open ontology file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    const auto content = buf.str();
    auto first = content.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && content[first] == '<') return load_ontology(content);
    return load_ontology_text(content);
}

std::string serialize_ontology(const Ontology& ont) {
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<ontologie uri=\"" << xml::escape(ont.uri()) << "\">\n";
    for (const auto& t : ont.types()) {
        out << "  <concept nom=\"" << xml::escape(t.name) << "\"";
        if (!t.parents.empty()) out << " parents=\"" << xml::escape(format_parents(t.parents)) << "\"";
        out << "/>\n";
    }
    for (const auto& s : ont.signatures()) {
        out << "  <relation source=\"" << xml::escape(s.source_type) << "\" predicat=\""
            << xml::escape(s.predicate_type) << "\" destination=\"" << xml::escape(s.destination_type) << "\"/>\n";
    }
    out << "</ontologie>\n";
    return out.str();
}

std::string serialize_ontology_text(const Ontology& ont) {
    std::ostringstream out;
    if (!ont.uri().empty()) out << "ontology " << ont.uri() << "\n";
    for (const auto& t : ont.types()) {
        out << "concept " << t.name;
        if (!t.parents.empty()) out << " < " << format_parents(t.parents);
        out << "\n";
    }
    for (const auto& s : ont.signatures()) {
        out << "relation " << s.source_type << " " << s.predicate_type << " " << s.destination_type << "\n";
    }
    return out.str();
}

}  // namespace cnav
