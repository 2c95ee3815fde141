#include "qres/xml.hpp"

#include <expat.h>

#include <memory>

#include "qres/error.hpp"

namespace qres::xml {

const std::string* Element::attribute(std::string_view key) const {
  for (const auto& [k, v] : attributes)
    if (k == key) return &v;
  return nullptr;
}

namespace {

struct State {
  Element root;
  std::vector<Element*> stack;
  bool have_root = false;
};

void on_start(void* ud, const XML_Char* name, const XML_Char** atts) {
  auto* st = static_cast<State*>(ud);
  Element* e;
  if (st->stack.empty()) {
    st->root.name = name;
    st->have_root = true;
    e = &st->root;
  } else {
    auto& kids = st->stack.back()->children;
    kids.emplace_back();
    e = &kids.back();
    e->name = name;
  }
  for (int i = 0; atts[i]; i += 2) e->attributes.emplace_back(atts[i], atts[i + 1]);
  st->stack.push_back(e);
}

void on_end(void* ud, const XML_Char*) { static_cast<State*>(ud)->stack.pop_back(); }

void on_text(void* ud, const XML_Char* s, int len) {
  auto* st = static_cast<State*>(ud);
  if (st->stack.empty()) return;
  std::string_view chunk(s, static_cast<std::size_t>(len));
  if (chunk.find_first_not_of(" \t\r\n") == std::string_view::npos && st->stack.back()->text.empty())
    return;
  st->stack.back()->text.append(chunk);
}

}  // namespace

Element parse(std::string_view text) {
  std::unique_ptr<XML_ParserStruct, decltype(&XML_ParserFree)> p(XML_ParserCreate("UTF-8"),
                                                                 &XML_ParserFree);
  if (!p) fail(ErrorCode::Io, "cannot create XML parser");
  State st;
  XML_SetUserData(p.get(), &st);
  XML_SetElementHandler(p.get(), on_start, on_end);
  XML_SetCharacterDataHandler(p.get(), on_text);
  if (XML_Parse(p.get(), text.data(), static_cast<int>(text.size()), XML_TRUE) != XML_STATUS_OK) {
    fail(ErrorCode::MalformedXml,
         std::string(XML_ErrorString(XML_GetErrorCode(p.get()))) + " at line " +
             std::to_string(XML_GetCurrentLineNumber(p.get())));
  }
  if (!st.have_root) fail(ErrorCode::MalformedXml, "no root element");
  return std::move(st.root);
}

std::string escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
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

}  // namespace qres::xml
