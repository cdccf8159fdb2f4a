#include "readrank/html.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <unordered_map>

#include "readrank/utf8.hpp"

namespace readrank::html {
namespace {

constexpr std::array kVoidElements = {
    "area", "base", "br", "col", "embed", "hr", "img", "input",
    "link", "meta", "param", "source", "track", "wbr"};

// Start tags that close an open <p>.
constexpr std::array kClosesParagraph = {
    "address", "article", "aside", "blockquote", "center", "details",
    "dialog", "dir", "div", "dl", "fieldset", "figcaption", "figure",
    "footer", "form", "h1", "h2", "h3", "h4", "h5", "h6", "header",
    "hgroup", "hr", "main", "menu", "nav", "ol", "p", "pre", "section",
    "summary", "table", "ul"};

constexpr std::array kParagraphScopeBoundary = {
    "applet", "button", "caption", "html", "marquee", "object",
    "table", "td", "template", "th"};

constexpr std::array kRawText = {"script", "style", "textarea", "noscript"};

template <std::size_t N>
bool contains(const std::array<const char*, N>& set, std::string_view name) {
  return std::any_of(set.begin(), set.end(),
                     [&](const char* s) { return name == s; });
}

bool is_heading(std::string_view name) {
  return name.size() == 2 && name[0] == 'h' && name[1] >= '1' &&
         name[1] <= '6';
}

bool is_ascii_alpha(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f';
}

char ascii_lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = ascii_lower(c);
  return out;
}

const std::unordered_map<std::string_view, char32_t>& named_entities() {
  static const std::unordered_map<std::string_view, char32_t> table = {
      {"amp", U'&'},     {"lt", U'<'},       {"gt", U'>'},
      {"quot", U'"'},    {"apos", U'\''},    {"nbsp", 0xA0},
      {"ndash", 0x2013}, {"mdash", 0x2014},  {"hellip", 0x2026},
      {"laquo", 0xAB},   {"raquo", 0xBB},    {"lsquo", 0x2018},
      {"rsquo", 0x2019}, {"ldquo", 0x201C},  {"rdquo", 0x201D},
      {"bdquo", 0x201E}, {"sbquo", 0x201A},  {"bull", 0x2022},
      {"middot", 0xB7},  {"copy", 0xA9},     {"reg", 0xAE},
      {"deg", 0xB0},     {"times", 0xD7},    {"minus", 0x2212},
      {"shy", 0xAD},     {"thinsp", 0x2009}, {"ensp", 0x2002},
      {"emsp", 0x2003},  {"zwj", 0x200D},    {"zwnj", 0x200C},
      {"lrm", 0x200E},   {"rlm", 0x200F},    {"euro", 0x20AC},
      {"pound", 0xA3},   {"para", 0xB6},     {"sect", 0xA7},
      {"plusmn", 0xB1},  {"frac12", 0xBD},   {"prime", 0x2032},
      {"Prime", 0x2033}, {"eacute", 0xE9},   {"egrave", 0xE8},
      {"aacute", 0xE1},  {"agrave", 0xE0},   {"ouml", 0xF6},
      {"auml", 0xE4},    {"uuml", 0xFC},     {"szlig", 0xDF},
      {"ccedil", 0xE7},  {"ntilde", 0xF1},   {"iacute", 0xED},
      {"oacute", 0xF3},  {"uacute", 0xFA}};
  return table;
}

// Entities accepted without the trailing semicolon (legacy HTML).
bool legacy_entity(std::string_view name) {
  return name == "amp" || name == "lt" || name == "gt" || name == "quot" ||
         name == "nbsp";
}

class TreeBuilder {
 public:
  TreeBuilder() {
    doc_.root = std::make_unique<Node>();
    stack_.push_back(doc_.root.get());
  }

  void text(std::string_view raw) {
    if (raw.empty()) return;
    std::string decoded = decode_entities(raw);
    Node* cur = stack_.back();
    if (!cur->children.empty() &&
        cur->children.back()->kind == Node::Kind::kText) {
      cur->children.back()->text += decoded;
      return;
    }
    auto node = std::make_unique<Node>();
    node->kind = Node::Kind::kText;
    node->text = std::move(decoded);
    node->parent = cur;
    cur->children.push_back(std::move(node));
  }

  Node* start(std::string name,
              std::vector<std::pair<std::string, std::string>> attrs,
              bool self_closing) {
    if (contains(kClosesParagraph, name)) close_paragraph();
    if (name == "li") close_in_list_scope({"li"});
    if (name == "dt" || name == "dd") close_in_list_scope({"dt", "dd"});
    if (is_heading(name) && is_heading(stack_.back()->name)) stack_.pop_back();

    auto node = std::make_unique<Node>();
    node->kind = Node::Kind::kElement;
    node->name = std::move(name);
    node->attributes = std::move(attrs);
    Node* cur = stack_.back();
    node->parent = cur;
    Node* raw = node.get();
    cur->children.push_back(std::move(node));
    ++doc_.element_count;
    if (!self_closing && !contains(kVoidElements, raw->name)) {
      stack_.push_back(raw);
    }
    return raw;
  }

  void end(std::string_view name) {
    for (std::size_t i = stack_.size(); i-- > 1;) {
      if (stack_[i]->name == name) {
        stack_.resize(i);
        return;
      }
    }
  }

  Document finish() { return std::move(doc_); }

 private:
  void close_paragraph() {
    for (std::size_t i = stack_.size(); i-- > 1;) {
      const std::string& n = stack_[i]->name;
      if (n == "p") {
        stack_.resize(i);
        return;
      }
      if (contains(kParagraphScopeBoundary, n)) return;
    }
  }

  void close_in_list_scope(std::initializer_list<std::string_view> names) {
    for (std::size_t i = stack_.size(); i-- > 1;) {
      const std::string& n = stack_[i]->name;
      if (std::find(names.begin(), names.end(), n) != names.end()) {
        stack_.resize(i);
        return;
      }
      if (n == "ul" || n == "ol" || n == "dl" ||
          contains(kParagraphScopeBoundary, n)) {
        return;
      }
    }
  }

  Document doc_;
  std::vector<Node*> stack_;
};

std::size_t find_ci(std::string_view hay, std::string_view needle,
                    std::size_t from) {
  for (std::size_t i = from; i + needle.size() <= hay.size(); ++i) {
    bool match = true;
    for (std::size_t k = 0; k < needle.size(); ++k) {
      if (ascii_lower(hay[i + k]) != needle[k]) {
        match = false;
        break;
      }
    }
    if (match) return i;
  }
  return std::string_view::npos;
}

}  // namespace

const std::string* Node::attribute(std::string_view key) const {
  for (const auto& [k, v] : attributes) {
    if (k == key) return &v;
  }
  return nullptr;
}

bool Node::has_class(std::string_view cls) const {
  const std::string* classes = attribute("class");
  if (classes == nullptr) return false;
  std::string_view rest = *classes;
  while (!rest.empty()) {
    const auto begin = rest.find_first_not_of(" \t\n\r\f");
    if (begin == std::string_view::npos) break;
    rest.remove_prefix(begin);
    const auto stop = rest.find_first_of(" \t\n\r\f");
    if (rest.substr(0, stop) == cls) return true;
    if (stop == std::string_view::npos) break;
    rest.remove_prefix(stop);
  }
  return false;
}

std::string decode_entities(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '&') {
      out.push_back(text[i++]);
      continue;
    }
    std::size_t j = i + 1;
    if (j < text.size() && text[j] == '#') {
      ++j;
      int base = 10;
      if (j < text.size() && (text[j] == 'x' || text[j] == 'X')) {
        base = 16;
        ++j;
      }
      std::size_t k = j;
      while (k < text.size() &&
             (std::isxdigit(static_cast<unsigned char>(text[k])) != 0) &&
             (base == 16 || std::isdigit(static_cast<unsigned char>(text[k])))) {
        ++k;
      }
      unsigned long value = 0;
      const auto [ptr, ec] =
          std::from_chars(text.data() + j, text.data() + k, value, base);
      if (k > j && ec == std::errc() && ptr == text.data() + k) {
        if (value == 0 || value > 0x10FFFF ||
            (value >= 0xD800 && value <= 0xDFFF)) {
          value = 0xFFFD;
        }
        utf8::append(out, static_cast<char32_t>(value));
        i = (k < text.size() && text[k] == ';') ? k + 1 : k;
        continue;
      }
      out.push_back(text[i++]);
      continue;
    }
    std::size_t k = j;
    while (k < text.size() &&
           (is_ascii_alpha(text[k]) ||
            std::isdigit(static_cast<unsigned char>(text[k])))) {
      ++k;
    }
    const std::string_view name = text.substr(j, k - j);
    const auto& table = named_entities();
    const auto it = table.find(name);
    const bool terminated = k < text.size() && text[k] == ';';
    if (it != table.end() && (terminated || legacy_entity(name))) {
      if (it->second != 0xAD) utf8::append(out, it->second);
      i = terminated ? k + 1 : k;
      continue;
    }
    out.push_back(text[i++]);
  }
  return out;
}

Document parse(std::string_view s) {
  TreeBuilder builder;
  std::size_t i = 0;
  std::size_t text_start = 0;
  const auto flush_text = [&](std::size_t upto) {
    if (upto > text_start) builder.text(s.substr(text_start, upto - text_start));
  };

  while (i < s.size()) {
    if (s[i] != '<') {
      ++i;
      continue;
    }
    if (s.compare(i, 4, "<!--") == 0) {
      flush_text(i);
      const auto close = s.find("-->", i + 4);
      i = close == std::string_view::npos ? s.size() : close + 3;
      text_start = i;
      continue;
    }
    if (i + 1 < s.size() && (s[i + 1] == '!' || s[i + 1] == '?')) {
      flush_text(i);
      const auto close = s.find('>', i);
      i = close == std::string_view::npos ? s.size() : close + 1;
      text_start = i;
      continue;
    }
    if (i + 2 < s.size() && s[i + 1] == '/' && is_ascii_alpha(s[i + 2])) {
      flush_text(i);
      std::size_t j = i + 2;
      while (j < s.size() && !is_ascii_space(s[j]) && s[j] != '>' &&
             s[j] != '/') {
        ++j;
      }
      builder.end(lower(s.substr(i + 2, j - i - 2)));
      const auto close = s.find('>', j);
      i = close == std::string_view::npos ? s.size() : close + 1;
      text_start = i;
      continue;
    }
    if (i + 1 < s.size() && is_ascii_alpha(s[i + 1])) {
      flush_text(i);
      std::size_t j = i + 1;
      while (j < s.size() && !is_ascii_space(s[j]) && s[j] != '>' &&
             s[j] != '/') {
        ++j;
      }
      std::string name = lower(s.substr(i + 1, j - i - 1));
      std::vector<std::pair<std::string, std::string>> attrs;
      bool self_closing = false;
      while (j < s.size() && s[j] != '>') {
        if (is_ascii_space(s[j])) {
          ++j;
          continue;
        }
        if (s[j] == '/') {
          self_closing = true;
          ++j;
          continue;
        }
        self_closing = false;
        std::size_t k = j;
        while (k < s.size() && !is_ascii_space(s[k]) && s[k] != '=' &&
               s[k] != '>' && s[k] != '/') {
          ++k;
        }
        std::string key = lower(s.substr(j, k - j));
        if (k == j) ++k;  // lone '=' or similar junk
        std::string value;
        std::size_t m = k;
        while (m < s.size() && is_ascii_space(s[m])) ++m;
        if (m < s.size() && s[m] == '=') {
          ++m;
          while (m < s.size() && is_ascii_space(s[m])) ++m;
          if (m < s.size() && (s[m] == '"' || s[m] == '\'')) {
            const char quote = s[m];
            const auto close = s.find(quote, m + 1);
            const std::size_t stop =
                close == std::string_view::npos ? s.size() : close;
            value = decode_entities(s.substr(m + 1, stop - m - 1));
            k = stop == s.size() ? stop : stop + 1;
          } else {
            std::size_t stop = m;
            while (stop < s.size() && !is_ascii_space(s[stop]) &&
                   s[stop] != '>') {
              ++stop;
            }
            value = decode_entities(s.substr(m, stop - m));
            k = stop;
          }
        }
        if (!key.empty()) attrs.emplace_back(std::move(key), std::move(value));
        j = k;
      }
      i = j < s.size() ? j + 1 : s.size();
      const bool raw_text = contains(kRawText, name);
      builder.start(name, std::move(attrs), self_closing);
      if (raw_text && !self_closing) {
        const std::string closing = "</" + name;
        const auto close = find_ci(s, closing, i);
        if (close == std::string_view::npos) {
          i = s.size();
        } else {
          const auto gt = s.find('>', close);
          i = gt == std::string_view::npos ? s.size() : gt + 1;
        }
        builder.end(name);
      }
      text_start = i;
      continue;
    }
    ++i;  // literal '<'
  }
  flush_text(s.size());
  return builder.finish();
}

}  // namespace readrank::html
