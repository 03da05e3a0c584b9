#pragma once

// Text formats.
//
// Interaction files hold one interaction per line as whitespace-separated
// 1-based node ids. Lines starting with '#' are comments, except a header
// "#n=<N>" which fixes the node count (otherwise it is the largest id seen).
// Community files hold one 1-based class label per node, one per line.
// Config files are key=value lines with '#' comments.
//
// Interaction indices and class labels are written 1-based in every CSV.

#include "clustering.hpp"
#include "error.hpp"
#include "hypergraph.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace hsbm {

namespace detail {

inline std::string_view trim(std::string_view s)
{
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline std::optional<Index> parse_index(std::string_view token)
{
  Index value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) return std::nullopt;
  return value;
}

inline std::vector<std::string_view> split_ws(std::string_view line)
{
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

/// Shortest decimal form that reads back to the same double.
inline std::string format_double(double x)
{
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

} // namespace detail

inline InteractionHypergraph read_interactions(std::istream& in)
{
  std::string line;
  std::size_t line_no = 0;
  std::optional<Index> declared_n;
  std::vector<std::vector<Index>> interactions;
  std::vector<std::size_t> line_of;
  Index max_id = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = detail::trim(line);
    if (text.empty()) continue;
    if (text.front() == '#') {
      const std::string_view body = detail::trim(text.substr(1));
      if (body.starts_with("n=")) {
        auto n = detail::parse_index(detail::trim(body.substr(2)));
        if (!n || *n < 1) throw ParseError("bad node count header '" + std::string(text) + "'", line_no);
        declared_n = *n;
      }
      continue;
    }
    std::vector<Index> e;
    for (auto token : detail::split_ws(text)) {
      auto id = detail::parse_index(token);
      if (!id || *id < 1) throw ParseError("expected a positive node id, got '" + std::string(token) + "'", line_no);
      if (std::find(e.begin(), e.end(), *id - 1) != e.end())
        throw ParseError("node " + std::string(token) + " repeated within an interaction", line_no);
      e.push_back(*id - 1);
      max_id = std::max(max_id, *id);
    }
    interactions.push_back(std::move(e));
    line_of.push_back(line_no);
  }
  if (interactions.empty()) throw ParseError("no interactions found");
  const Index n = declared_n.value_or(max_id);
  if (max_id > n) {
    for (std::size_t p = 0; p < interactions.size(); ++p)
      for (Index v : interactions[p])
        if (v >= n)
          throw ParseError("node id " + std::to_string(v + 1) + " exceeds declared n=" + std::to_string(n),
                           line_of[p]);
  }
  return {n, interactions};
}

inline InteractionHypergraph read_interactions_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_interactions(in);
}

inline void write_interactions(std::ostream& out, const InteractionHypergraph& h)
{
  out << "#n=" << h.num_nodes() << '\n';
  for (Index p = 0; p < h.num_interactions(); ++p) {
    bool first = true;
    for (Index v : h.interaction(p)) {
      out << (first ? "" : " ") << v + 1;
      first = false;
    }
    out << '\n';
  }
}

/// Returns 0-based labels; `classes` receives the number of classes (max
/// label).
inline std::vector<Index> read_communities(std::istream& in, Index* classes = nullptr)
{
  std::string line;
  std::size_t line_no = 0;
  std::vector<Index> labels;
  Index max_label = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = detail::trim(line);
    if (text.empty() || text.front() == '#') continue;
    auto label = detail::parse_index(text);
    if (!label || *label < 1) throw ParseError("expected a positive class label, got '" + std::string(text) + "'", line_no);
    labels.push_back(*label - 1);
    max_label = std::max(max_label, *label);
  }
  if (labels.empty()) throw ParseError("no class labels found");
  if (classes) *classes = max_label;
  return labels;
}

inline void write_communities(std::ostream& out, const std::vector<Index>& labels)
{
  for (Index z : labels) out << z + 1 << '\n';
}

/// key=value pairs; later keys override earlier ones.
inline std::map<std::string, std::string> read_config(std::istream& in)
{
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = detail::trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key=value", line_no);
    const std::string key(detail::trim(text.substr(0, eq)));
    if (key.empty()) throw ParseError("empty key", line_no);
    kv[key] = std::string(detail::trim(text.substr(eq + 1)));
  }
  return kv;
}

/// `types` may be empty; otherwise it holds a 0-based type id per row.
inline void write_embedding_csv(std::ostream& out, const Eigen::MatrixXd& embedding,
                                const std::vector<Index>& types = {})
{
  out << "interaction";
  for (Eigen::Index c = 0; c < embedding.cols(); ++c) out << ",x" << c + 1;
  if (!types.empty()) out << ",type";
  out << '\n';
  for (Eigen::Index p = 0; p < embedding.rows(); ++p) {
    out << p + 1;
    for (Eigen::Index c = 0; c < embedding.cols(); ++c) out << ',' << detail::format_double(embedding(p, c));
    if (!types.empty()) out << ',' << types[p] + 1;
    out << '\n';
  }
}

inline void write_partition_csv(std::ostream& out, const Partition& part)
{
  out << "item,label\n";
  for (std::size_t i = 0; i < part.labels.size(); ++i) out << i + 1 << ',' << part.labels[i] << '\n';
}

inline void write_dendrogram_csv(std::ostream& out, const Dendrogram& dend)
{
  out << "step,a,b,height\n";
  for (std::size_t s = 0; s < dend.merges.size(); ++s) {
    const auto& mg = dend.merges[s];
    out << s + 1 << ',' << mg.a + 1 << ',' << mg.b + 1 << ',' << detail::format_double(mg.height) << '\n';
  }
}

/// Header plus rows of string cells.
struct CsvTable
{
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> column(const std::string& name) const
  {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  }

  std::size_t require(const std::string& name) const
  {
    auto c = column(name);
    if (!c) throw ParseError("missing CSV column '" + name + "'");
    return *c;
  }

  double number(std::size_t row, std::size_t col) const
  {
    const std::string& cell = rows.at(row).at(col);
    if (cell == "nan") return std::numeric_limits<double>::quiet_NaN();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size())
      throw ParseError("not a number: '" + cell + "'", row + 2);
    return value;
  }
};

inline CsvTable read_csv(std::istream& in)
{
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  auto split = [](std::string_view s) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const auto comma = s.find(',', start);
      cells.emplace_back(detail::trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return cells;
  };
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = detail::trim(line);
    if (text.empty() || text.front() == '#') continue;
    if (table.header.empty()) {
      table.header = split(text);
      continue;
    }
    auto cells = split(text);
    if (cells.size() != table.header.size())
      throw ParseError("expected " + std::to_string(table.header.size()) + " cells, got " +
                       std::to_string(cells.size()), line_no);
    table.rows.push_back(std::move(cells));
  }
  if (table.header.empty()) throw ParseError("empty CSV");
  return table;
}

} // namespace hsbm
