#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace readrank::html {

// A tolerant HTML tree. Unclosed tags are closed implicitly following the
// common subset of the HTML5 tree-construction rules (implied </p>, </li>,
// void elements); stray end tags are ignored.
struct Node {
  enum class Kind { kDocument, kElement, kText };

  Kind kind = Kind::kDocument;
  std::string name;  // lowercase tag name for elements
  std::vector<std::pair<std::string, std::string>> attributes;
  std::string text;  // entity-decoded content of text nodes
  std::vector<std::unique_ptr<Node>> children;
  Node* parent = nullptr;

  bool is_element() const { return kind == Kind::kElement; }
  bool is_element(std::string_view tag) const {
    return kind == Kind::kElement && name == tag;
  }
  const std::string* attribute(std::string_view key) const;
  bool has_class(std::string_view cls) const;
};

struct Document {
  std::unique_ptr<Node> root;
  std::size_t element_count = 0;
};

Document parse(std::string_view markup);

std::string decode_entities(std::string_view text);

}  // namespace readrank::html
