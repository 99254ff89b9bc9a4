#pragma once
// Unicode text canonicalization shared by the tokenizer and duplicate
// detection: NFC + case folding (via ICU), whitespace collapsing, and the
// "[USER_12]" mention-placeholder grammar used by the tweet corpora.

#include <string>
#include <string_view>

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "labelaudit/common.hpp"

namespace labelaudit {

// NFC-normalize then case-fold. Input and output are UTF-8.
inline std::string nfc_casefold(std::string_view text) {
  icu::UnicodeString us =
      icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_SUCCESS(status)) {
    icu::UnicodeString normalized = nfc->normalize(us, status);
    if (U_SUCCESS(status)) us = normalized;
  }
  us.foldCase(U_FOLD_CASE_DEFAULT);
  std::string out;
  us.toUTF8String(out);
  return out;
}

inline bool is_space_cp(UChar32 cp) { return u_isUWhiteSpace(cp); }

// Token characters: letters, digits, '*' (censored profanity), '\'' (contractions).
inline bool is_word_cp(UChar32 cp) { return u_isalnum(cp) || cp == U'*' || cp == U'\''; }

// Collapse whitespace runs to single spaces and trim the ends.
inline std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  int32_t i = 0;
  const int32_t n = static_cast<int32_t>(s.size());
  const uint8_t* bytes = reinterpret_cast<const uint8_t*>(s.data());
  while (i < n) {
    int32_t start = i;
    UChar32 cp;
    U8_NEXT(bytes, i, n, cp);
    if (cp < 0) continue;  // skip ill-formed sequences
    if (is_space_cp(cp)) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out.push_back(' ');
      pending_space = false;
      out.append(s.substr(start, i - start));
    }
  }
  return out;
}

// Matches a mention placeholder at byte offset `pos` of already-folded text:
// "[user" , optional "_", digits, "]". Returns the byte length, 0 on no match.
inline size_t match_user_placeholder(std::string_view s, size_t pos) {
  static constexpr std::string_view kPrefix = "[user";
  if (s.size() - pos < kPrefix.size() + 1) return 0;
  if (s.compare(pos, kPrefix.size(), kPrefix) != 0) return 0;
  size_t i = pos + kPrefix.size();
  if (i < s.size() && s[i] == '_') ++i;
  while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
  if (i < s.size() && s[i] == ']') return i + 1 - pos;
  return 0;
}

// Replaces every mention placeholder with a single space.
inline std::string strip_user_placeholders(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  size_t i = 0;
  while (i < s.size()) {
    if (size_t len = match_user_placeholder(s, i); len > 0) {
      out.push_back(' ');
      i += len;
    } else {
      out.push_back(s[i]);
      ++i;
    }
  }
  return out;
}

// Grouping key for exact-duplicate detection.
inline std::string exact_duplicate_key(std::string_view text) {
  return collapse_whitespace(nfc_casefold(text));
}

// Grouping key for retweet-aware duplicate detection: drops one leading
// "rt:" + mention marker, then every mention placeholder.
inline std::string retweet_core_key(std::string_view text) {
  std::string folded = nfc_casefold(text);
  std::string_view s = folded;

  // leading whitespace
  {
    int32_t i = 0;
    const int32_t n = static_cast<int32_t>(s.size());
    const uint8_t* bytes = reinterpret_cast<const uint8_t*>(s.data());
    while (i < n) {
      int32_t prev = i;
      UChar32 cp;
      U8_NEXT(bytes, i, n, cp);
      if (cp < 0 || !is_space_cp(cp)) {
        i = prev;
        break;
      }
    }
    s.remove_prefix(i);
  }

  // "rt:" counts as a retweet marker only when a mention placeholder follows.
  if (s.substr(0, 3) == "rt:") {
    std::string_view rest = s.substr(3);
    size_t ws = 0;
    while (ws < rest.size() && (rest[ws] == ' ' || rest[ws] == '\t')) ++ws;
    if (size_t len = match_user_placeholder(rest, ws); len > 0) {
      s = rest.substr(ws + len);
    }
  }

  return collapse_whitespace(strip_user_placeholders(s));
}

}  // namespace labelaudit
