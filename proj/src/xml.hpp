#pragma once

// Thin helpers over Boost.PropertyTree's XML reader plus a tiny escaping
// writer. Private to the library.

#include <boost/property_tree/ptree.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cnav::xml {

using Node = boost::property_tree::ptree;

// Parses a document; throws ParseError carrying the reader's line number.
Node parse(std::string_view text);

// The single top-level element: (name, node). Throws ParseError otherwise.
std::pair<std::string, const Node*> root(const Node& doc);

// Child elements in document order, skipping attributes and comments.
std::vector<std::pair<std::string, const Node*>> children(const Node& node);

std::optional<std::string> attribute(const Node& node, const std::string& name);
std::string text(const Node& node);

std::string escape(std::string_view raw);

}  // namespace cnav::xml
