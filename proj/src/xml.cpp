#include "xml.hpp"

#include <boost/property_tree/xml_parser.hpp>

#include <sstream>

#include "cnav/error.hpp"

namespace cnav::xml {

namespace pt = boost::property_tree;

Node parse(std::string_view text) {
    std::istringstream in{std::string(text)};
    Node doc;
    try {
        pt::read_xml(in, doc, pt::xml_parser::trim_whitespace | pt::xml_parser::no_comments);
    } catch (const pt::xml_parser_error& e) {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(e.line()) + ": " + e.message());
    }
    return doc;
}

std::pair<std::string, const Node*> root(const Node& doc) {
    auto kids = children(doc);
    if (kids.size() != 1) {
        throw Error(ErrorCode::ParseError, "expected exactly one root element, found " + std::to_string(kids.size()));
    }
    return kids.front();
}

std::vector<std::pair<std::string, const Node*>> children(const Node& node) {
    std::vector<std::pair<std::string, const Node*>> out;
    for (const auto& [name, child] : node) {
        if (name == "<xmlattr>" || name == "<xmlcomment>") continue;
        out.emplace_back(name, &child);
    }
    return out;
}

std::optional<std::string> attribute(const Node& node, const std::string& name) {
    auto attrs = node.get_child_optional("<xmlattr>");
    if (!attrs) return std::nullopt;
    auto value = attrs->get_child_optional(pt::ptree::path_type(name, '\0'));
    if (!value) return std::nullopt;
    return value->data();
}

std::string text(const Node& node) { return node.data(); }

std::string escape(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (char c : raw) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out += c;
        }
    }
    return out;
}

}  // namespace cnav::xml
