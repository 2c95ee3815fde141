#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

// Minimal element tree over expat; character data other than whitespace is
// kept in `text`.
namespace qres::xml {

struct Element {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;  // document order
  std::vector<Element> children;
  std::string text;

  const std::string* attribute(std::string_view key) const;
};

Element parse(std::string_view text);  // MalformedXml
std::string escape(std::string_view s);

}  // namespace qres::xml
