// SPDX-License-Identifier: Apache-2.0

#include "diffsense/textdiff.hpp"

#include <algorithm>
#include <charconv>
#include <tuple>
#include <unordered_map>

#include "diffsense/model.hpp"

namespace diffsense::textdiff {

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  if (text.empty()) return lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      if (pos < text.size()) lines.emplace_back(text.substr(pos));
      break;
    }
    lines.emplace_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  for (auto& line : lines) {
    auto end = line.find_last_not_of(" \t\r\f\v");
    line.erase(end == std::string::npos ? 0 : end + 1);
  }
  return lines;
}

namespace {

struct Match {
  std::size_t a, b, size;
  auto operator<=>(const Match&) const = default;
};

class SequenceMatcher {
 public:
  SequenceMatcher(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::unordered_map<std::string_view, int> ids;
    auto intern = [&](const std::string& s) {
      auto [it, inserted] = ids.emplace(s, static_cast<int>(ids.size()));
      return it->second;
    };
    a_.reserve(a.size());
    b_.reserve(b.size());
    for (const auto& s : b) b_.push_back(intern(s));
    for (const auto& s : a) a_.push_back(intern(s));

    b2j_.resize(ids.size());
    for (std::size_t j = 0; j < b_.size(); ++j) b2j_[b_[j]].push_back(j);

    // Lines occurring in more than 1% of a long `b` are too common to
    // anchor a match; they can still extend one.
    std::size_t n = b_.size();
    if (n >= 200) {
      std::size_t ntest = n / 100 + 1;
      for (auto& idxs : b2j_) {
        if (idxs.size() > ntest) idxs.clear();
      }
    }
  }

  std::vector<Match> matching_blocks() const {
    std::vector<Match> blocks;
    std::vector<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>> queue;
    queue.emplace_back(0, a_.size(), 0, b_.size());
    while (!queue.empty()) {
      auto [alo, ahi, blo, bhi] = queue.back();
      queue.pop_back();
      Match m = longest_match(alo, ahi, blo, bhi);
      if (m.size == 0) continue;
      blocks.push_back(m);
      if (alo < m.a && blo < m.b) queue.emplace_back(alo, m.a, blo, m.b);
      if (m.a + m.size < ahi && m.b + m.size < bhi)
        queue.emplace_back(m.a + m.size, ahi, m.b + m.size, bhi);
    }
    std::sort(blocks.begin(), blocks.end());

    std::vector<Match> merged;
    Match cur{0, 0, 0};
    for (const auto& m : blocks) {
      if (cur.a + cur.size == m.a && cur.b + cur.size == m.b) {
        cur.size += m.size;
      } else {
        if (cur.size) merged.push_back(cur);
        cur = m;
      }
    }
    if (cur.size) merged.push_back(cur);
    merged.push_back({a_.size(), b_.size(), 0});
    return merged;
  }

 private:
  Match longest_match(std::size_t alo, std::size_t ahi, std::size_t blo, std::size_t bhi) const {
    std::size_t best_i = alo, best_j = blo, best_size = 0;
    std::unordered_map<std::size_t, std::size_t> j2len, next;
    for (std::size_t i = alo; i < ahi; ++i) {
      next.clear();
      for (std::size_t j : b2j_[a_[i]]) {
        if (j < blo) continue;
        if (j >= bhi) break;
        std::size_t k = 1;
        if (j > 0) {
          auto it = j2len.find(j - 1);
          if (it != j2len.end()) k = it->second + 1;
        }
        next[j] = k;
        if (k > best_size) {
          best_i = i + 1 - k;
          best_j = j + 1 - k;
          best_size = k;
        }
      }
      std::swap(j2len, next);
    }
    while (best_i > alo && best_j > blo && a_[best_i - 1] == b_[best_j - 1]) {
      --best_i;
      --best_j;
      ++best_size;
    }
    while (best_i + best_size < ahi && best_j + best_size < bhi &&
           a_[best_i + best_size] == b_[best_j + best_size]) {
      ++best_size;
    }
    return {best_i, best_j, best_size};
  }

  std::vector<int> a_, b_;
  std::vector<std::vector<std::size_t>> b2j_;
};

std::vector<std::vector<Opcode>> grouped_opcodes(std::vector<Opcode> codes, std::size_t n) {
  if (codes.empty()) codes.push_back({OpTag::Equal, 0, 1, 0, 1});
  if (codes.front().tag == OpTag::Equal) {
    auto& c = codes.front();
    c.a_begin = std::max(c.a_begin, c.a_end >= n ? c.a_end - n : 0);
    c.b_begin = std::max(c.b_begin, c.b_end >= n ? c.b_end - n : 0);
  }
  if (codes.back().tag == OpTag::Equal) {
    auto& c = codes.back();
    c.a_end = std::min(c.a_end, c.a_begin + n);
    c.b_end = std::min(c.b_end, c.b_begin + n);
  }

  std::vector<std::vector<Opcode>> groups;
  std::vector<Opcode> group;
  for (Opcode c : codes) {
    if (c.tag == OpTag::Equal && c.a_end - c.a_begin > 2 * n) {
      group.push_back({OpTag::Equal, c.a_begin, std::min(c.a_end, c.a_begin + n), c.b_begin,
                       std::min(c.b_end, c.b_begin + n)});
      groups.push_back(std::move(group));
      group.clear();
      c.a_begin = std::max(c.a_begin, c.a_end - n);
      c.b_begin = std::max(c.b_begin, c.b_end - n);
    }
    group.push_back(c);
  }
  if (!group.empty() && !(group.size() == 1 && group.front().tag == OpTag::Equal)) {
    groups.push_back(std::move(group));
  }
  return groups;
}

std::string format_range(std::size_t start, std::size_t stop) {
  std::size_t beginning = start + 1;
  std::size_t length = stop - start;
  if (length == 1) return std::to_string(beginning);
  if (length == 0) --beginning;
  return std::to_string(beginning) + "," + std::to_string(length);
}

}  // namespace

std::vector<Opcode> opcodes(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<Opcode> out;
  std::size_t i = 0, j = 0;
  for (const auto& m : SequenceMatcher(a, b).matching_blocks()) {
    if (i < m.a && j < m.b) {
      out.push_back({OpTag::Replace, i, m.a, j, m.b});
    } else if (i < m.a) {
      out.push_back({OpTag::Delete, i, m.a, j, m.b});
    } else if (j < m.b) {
      out.push_back({OpTag::Insert, i, m.a, j, m.b});
    }
    i = m.a + m.size;
    j = m.b + m.size;
    if (m.size) out.push_back({OpTag::Equal, m.a, i, m.b, j});
  }
  return out;
}

UnifiedDiff unified_diff(std::string_view old_code, std::string_view new_code,
                         std::size_t context) {
  auto a = split_lines(old_code);
  auto b = split_lines(new_code);
  UnifiedDiff out;
  if (a == b) return out;

  auto groups = grouped_opcodes(opcodes(a, b), context);
  if (groups.empty()) return out;

  out.text = "--- old\n+++ new\n";
  for (const auto& group : groups) {
    const auto& first = group.front();
    const auto& last = group.back();
    out.text += "@@ -" + format_range(first.a_begin, last.a_end) + " +" +
                format_range(first.b_begin, last.b_end) + " @@\n";
    ++out.hunk_count;
    for (const auto& c : group) {
      if (c.tag == OpTag::Equal) {
        for (std::size_t k = c.a_begin; k < c.a_end; ++k) out.text += " " + a[k] + "\n";
        continue;
      }
      if (c.tag == OpTag::Replace || c.tag == OpTag::Delete) {
        for (std::size_t k = c.a_begin; k < c.a_end; ++k) out.text += "-" + a[k] + "\n";
      }
      if (c.tag == OpTag::Replace || c.tag == OpTag::Insert) {
        for (std::size_t k = c.b_begin; k < c.b_end; ++k) out.text += "+" + b[k] + "\n";
      }
    }
  }
  return out;
}

namespace {

// Parses "a" or "a,b" into (start, length).
std::pair<std::size_t, std::size_t> parse_range(std::string_view text) {
  std::size_t start = 0, length = 1;
  auto comma = text.find(',');
  auto head = text.substr(0, comma);
  auto r = std::from_chars(head.data(), head.data() + head.size(), start);
  if (r.ec != std::errc{} || r.ptr != head.data() + head.size())
    throw ParseError("bad hunk range '" + std::string(text) + "'");
  if (comma != std::string_view::npos) {
    auto tail = text.substr(comma + 1);
    r = std::from_chars(tail.data(), tail.data() + tail.size(), length);
    if (r.ec != std::errc{} || r.ptr != tail.data() + tail.size())
      throw ParseError("bad hunk range '" + std::string(text) + "'");
  }
  return {start, length};
}

}  // namespace

std::string apply_patch(std::string_view old_code, std::string_view diff_text) {
  auto old_lines = split_lines(old_code);
  std::vector<std::string> diff_lines;
  {
    std::size_t pos = 0;
    while (pos < diff_text.size()) {
      auto nl = diff_text.find('\n', pos);
      if (nl == std::string_view::npos) nl = diff_text.size();
      diff_lines.emplace_back(diff_text.substr(pos, nl - pos));
      pos = nl + 1;
    }
  }

  std::vector<std::string> out;
  std::size_t cursor = 0;  // next unconsumed old line
  std::size_t k = 0;
  while (k < diff_lines.size() && !diff_lines[k].starts_with("@@")) ++k;

  while (k < diff_lines.size()) {
    const std::string& header = diff_lines[k];
    if (!header.starts_with("@@ -") || !header.ends_with(" @@"))
      throw ParseError("malformed hunk header '" + header + "'");
    std::string_view body(header);
    body = body.substr(4, body.size() - 7);
    auto plus = body.find(" +");
    if (plus == std::string_view::npos) throw ParseError("malformed hunk header '" + header + "'");
    auto [old_start, old_len] = parse_range(body.substr(0, plus));
    std::size_t first = old_len == 0 ? old_start : old_start - 1;
    if (first < cursor || first > old_lines.size())
      throw ParseError("hunk '" + header + "' out of order or out of range");
    while (cursor < first) out.push_back(old_lines[cursor++]);

    for (++k; k < diff_lines.size() && !diff_lines[k].starts_with("@@"); ++k) {
      const std::string& line = diff_lines[k];
      if (line.empty()) throw ParseError("empty line inside hunk");
      std::string content = line.substr(1);
      switch (line[0]) {
        case ' ':
        case '-':
          if (cursor >= old_lines.size() || old_lines[cursor] != content)
            throw ParseError("patch does not apply at old line " + std::to_string(cursor + 1));
          if (line[0] == ' ') out.push_back(content);
          ++cursor;
          break;
        case '+':
          out.push_back(std::move(content));
          break;
        default:
          throw ParseError("unexpected line in hunk: '" + line + "'");
      }
    }
  }
  while (cursor < old_lines.size()) out.push_back(old_lines[cursor++]);

  std::string text;
  for (const auto& line : out) text += line + "\n";
  return text;
}

SplitDiff split_hunks(std::string_view diff_text) {
  SplitDiff out;
  std::string* current = &out.header;
  std::size_t pos = 0;
  while (pos < diff_text.size()) {
    auto nl = diff_text.find('\n', pos);
    std::size_t end = nl == std::string_view::npos ? diff_text.size() : nl + 1;
    std::string_view line = diff_text.substr(pos, end - pos);
    if (line.starts_with("@@")) {
      out.hunks.emplace_back();
      current = &out.hunks.back();
    }
    current->append(line);
    pos = end;
  }
  return out;
}

}  // namespace diffsense::textdiff
