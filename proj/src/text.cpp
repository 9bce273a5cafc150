#include "uq/text.hpp"

#include <locale>

namespace uq::text {

namespace {

const std::locale& unicode_locale() {
  static const std::locale loc = [] {
    for (const char* name : {"C.UTF-8", "C.utf8", "en_US.UTF-8"}) {
      try {
        return std::locale(name);
      } catch (const std::runtime_error&) {
      }
    }
    return std::locale::classic();
  }();
  return loc;
}

const std::ctype<wchar_t>& wide_ctype() {
  return std::use_facet<std::ctype<wchar_t>>(unicode_locale());
}

bool is_separator(char32_t c) {
  const auto& ct = wide_ctype();
  const auto wc = static_cast<wchar_t>(c);
  return ct.is(std::ctype_base::space, wc) || ct.is(std::ctype_base::punct, wc);
}

bool is_blank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n\f\v") == std::string_view::npos;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n\f\v");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n\f\v");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::u32string decode_utf8(std::string_view utf8) {
  std::u32string out;
  out.reserve(utf8.size());
  std::size_t i = 0;
  while (i < utf8.size()) {
    const auto b0 = static_cast<unsigned char>(utf8[i]);
    int len = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
      len = 1;
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    }
    bool ok = len > 0 && i + len <= utf8.size();
    for (int k = 1; ok && k < len; ++k) {
      const auto b = static_cast<unsigned char>(utf8[i + k]);
      if ((b & 0xC0) != 0x80) ok = false;
      cp = (cp << 6) | (b & 0x3F);
    }
    if (!ok) {
      out.push_back(U'�');
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string encode_utf8(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t c : text) {
    if (c < 0x80) {
      out.push_back(static_cast<char>(c));
    } else if (c < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (c >> 6)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else if (c < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (c >> 12)));
      out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (c >> 18)));
      out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    }
  }
  return out;
}

std::set<std::string> token_set(std::string_view utf8) {
  const auto& ct = wide_ctype();
  std::set<std::string> tokens;
  std::u32string current;
  auto flush = [&] {
    if (!current.empty()) tokens.insert(encode_utf8(current));
    current.clear();
  };
  for (char32_t c : decode_utf8(utf8)) {
    if (is_separator(c)) {
      flush();
    } else {
      current.push_back(static_cast<char32_t>(ct.tolower(static_cast<wchar_t>(c))));
    }
  }
  flush();
  return tokens;
}

std::vector<std::string> split_sentences(std::string_view utf8) {
  std::vector<std::string> sentences;
  auto push = [&](std::string_view s) {
    s = trim(s);
    if (!s.empty()) sentences.emplace_back(s);
  };
  auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
  };
  std::size_t start = 0;
  for (std::size_t i = 0; i < utf8.size(); ++i) {
    const char c = utf8[i];
    if ((c == '.' || c == '!' || c == '?') && i + 1 < utf8.size() && is_space(utf8[i + 1])) {
      push(utf8.substr(start, i + 1 - start));
      start = i + 1;
    }
  }
  if (start < utf8.size() && !is_blank(utf8.substr(start))) push(utf8.substr(start));
  return sentences;
}

}  // namespace uq::text
