#include "readrank/utf8.hpp"

namespace readrank::utf8 {
namespace {

// Returns the sequence length at `i`, or 0 for an invalid sequence.
std::size_t sequence_at(std::string_view s, std::size_t i, char32_t& cp) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  std::size_t len = 0;
  char32_t min = 0;
  if (b0 < 0x80) {
    cp = b0;
    return 1;
  } else if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
    min = 0x80;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
    min = 0x800;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
    min = 0x10000;
  } else {
    return 0;
  }
  if (i + len > s.size()) return 0;
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) return 0;
    cp = (cp << 6) | (b & 0x3F);
  }
  if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return 0;
  return len;
}

bool in(char32_t cp, char32_t lo, char32_t hi) { return cp >= lo && cp <= hi; }

}  // namespace

bool is_valid(std::string_view bytes) {
  for (std::size_t i = 0; i < bytes.size();) {
    char32_t cp;
    const std::size_t n = sequence_at(bytes, i, cp);
    if (n == 0) return false;
    i += n;
  }
  return true;
}

std::u32string decode(std::string_view bytes) {
  std::u32string out;
  out.reserve(bytes.size());
  for (std::size_t i = 0; i < bytes.size();) {
    char32_t cp;
    const std::size_t n = sequence_at(bytes, i, cp);
    if (n == 0) {
      out.push_back(0xFFFD);
      ++i;
    } else {
      out.push_back(cp);
      i += n;
    }
  }
  return out;
}

void append(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string encode(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t cp : text) append(out, cp);
  return out;
}

std::size_t length(std::string_view bytes) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < bytes.size(); ++n) {
    char32_t cp;
    const std::size_t len = sequence_at(bytes, i, cp);
    i += len == 0 ? 1 : len;
  }
  return n;
}

bool is_space(char32_t cp) {
  return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' ||
         cp == U'\f' || cp == U'\v' || cp == 0xA0 || cp == 0x1680 ||
         in(cp, 0x2000, 0x200A) || cp == 0x2028 || cp == 0x2029 ||
         cp == 0x202F || cp == 0x205F || cp == 0x3000;
}

bool is_mark(char32_t cp) {
  return in(cp, 0x0300, 0x036F) || in(cp, 0x0483, 0x0489) ||
         in(cp, 0x0591, 0x05BD) || in(cp, 0x064B, 0x065F) ||
         in(cp, 0x0900, 0x0903) || in(cp, 0x093A, 0x094F) ||
         in(cp, 0x1AB0, 0x1AFF) || in(cp, 0x1DC0, 0x1DFF) ||
         in(cp, 0x20D0, 0x20FF) || in(cp, 0xFE20, 0xFE2F);
}

bool is_digit(char32_t cp) {
  return in(cp, U'0', U'9') || in(cp, 0x0660, 0x0669) ||
         in(cp, 0x06F0, 0x06F9) || in(cp, 0x0966, 0x096F) ||
         in(cp, 0xFF10, 0xFF19);
}

Script script_of(char32_t cp) {
  if (in(cp, U'A', U'Z') || in(cp, U'a', U'z')) return Script::kLatin;
  if (cp == 0xAA || cp == 0xBA) return Script::kLatin;
  if (in(cp, 0xC0, 0x24F) && cp != 0xD7 && cp != 0xF7) return Script::kLatin;
  if (in(cp, 0x250, 0x2AF) || in(cp, 0x1E00, 0x1EFF)) return Script::kLatin;
  if ((in(cp, 0x370, 0x3FF) && cp != 0x37E && cp != 0x387 && cp != 0x375 &&
       cp != 0x374 && cp != 0x384 && cp != 0x385) ||
      in(cp, 0x1F00, 0x1FFF)) {
    return Script::kGreek;
  }
  if (in(cp, 0x400, 0x482) || in(cp, 0x48A, 0x52F)) return Script::kCyrillic;
  if (in(cp, 0x531, 0x556) || in(cp, 0x561, 0x587)) return Script::kArmenian;
  if (in(cp, 0x5D0, 0x5EA) || in(cp, 0x620, 0x64A) || in(cp, 0x671, 0x6D3) ||
      in(cp, 0x904, 0x939) || in(cp, 0x958, 0x961) || in(cp, 0x980, 0xDFF) ||
      in(cp, 0xE01, 0xE30) || in(cp, 0x10A0, 0x10FF) ||
      in(cp, 0x1100, 0x11FF) || in(cp, 0x3041, 0x3096) ||
      in(cp, 0x30A1, 0x30FA) || in(cp, 0x3400, 0x4DBF) ||
      in(cp, 0x4E00, 0x9FFF) || in(cp, 0xAC00, 0xD7A3) ||
      in(cp, 0xF900, 0xFAFF)) {
    return Script::kOther;
  }
  return Script::kNone;
}

bool is_letter(char32_t cp) { return script_of(cp) != Script::kNone; }

bool is_upper(char32_t cp) {
  if (in(cp, U'A', U'Z')) return true;
  if (in(cp, 0xC0, 0xDE) && cp != 0xD7) return true;
  if (in(cp, 0x100, 0x17F)) {
    // Latin Extended-A alternates upper/lower, with a parity flip at U+0139.
    if (cp == 0x138 || cp == 0x149 || cp == 0x17F) return false;
    if (in(cp, 0x139, 0x148) || in(cp, 0x179, 0x17E)) return cp % 2 == 1;
    return cp % 2 == 0;
  }
  if (in(cp, 0x391, 0x3AB) || in(cp, 0x386, 0x38F)) {
    return cp != 0x387 && cp != 0x38B && cp != 0x38D;
  }
  if (in(cp, 0x400, 0x42F)) return true;
  if (in(cp, 0x460, 0x481) || in(cp, 0x48A, 0x4BF) || in(cp, 0x4D0, 0x52F)) {
    return cp % 2 == 0;
  }
  if (in(cp, 0x531, 0x556)) return true;
  if (in(cp, 0x1E00, 0x1EFF)) return cp % 2 == 0;
  return false;
}

char32_t to_lower(char32_t cp) {
  if (!is_upper(cp)) return cp;
  if (in(cp, U'A', U'Z') || in(cp, 0xC0, 0xDE)) return cp + 0x20;
  if (cp == 0x130) return U'i';
  if (cp == 0x178) return 0xFF;
  if (in(cp, 0x100, 0x17F) || in(cp, 0x460, 0x52F) || in(cp, 0x1E00, 0x1EFF)) {
    return cp + 1;
  }
  switch (cp) {
    case 0x386: return 0x3AC;
    case 0x388: return 0x3AD;
    case 0x389: return 0x3AE;
    case 0x38A: return 0x3AF;
    case 0x38C: return 0x3CC;
    case 0x38E: return 0x3CD;
    case 0x38F: return 0x3CE;
    default: break;
  }
  if (in(cp, 0x391, 0x3AB)) return cp + 0x20;
  if (in(cp, 0x400, 0x40F)) return cp + 0x50;
  if (in(cp, 0x410, 0x42F)) return cp + 0x20;
  if (in(cp, 0x531, 0x556)) return cp + 0x30;
  return cp;
}

char32_t to_upper(char32_t cp) {
  if (cp == 0xFF) return 0x178;
  if (cp == 0x3C2) return 0x3A3;  // final sigma
  for (char32_t offset : {0x20u, 0x01u, 0x50u, 0x30u, 0x26u, 0x25u, 0x40u, 0x3Fu}) {
    if (cp < offset) continue;
    const char32_t candidate = cp - offset;
    if (is_upper(candidate) && to_lower(candidate) == cp) return candidate;
  }
  return cp;
}

std::u32string to_lower(std::u32string_view text) {
  std::u32string out(text);
  for (auto& cp : out) cp = to_lower(cp);
  return out;
}

}  // namespace readrank::utf8
