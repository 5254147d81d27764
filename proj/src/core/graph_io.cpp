#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "ige/io.hpp"

namespace ige {

namespace fs = std::filesystem;

namespace {

constexpr double kMaxPenWidth = 8.0;

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

std::string hex_color(const Color& c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", quantize(c[0]), quantize(c[1]), quantize(c[2]));
  return buf;
}

}  // namespace

std::vector<GraphCsvRow> graph_rows(const ImageGraph& g) {
  std::vector<GraphCsvRow> rows;
  rows.reserve(g.edges.size());
  for (const Edge& e : g.edges) {
    const Node& a = g.nodes.at(std::size_t(e.src));
    const Node& b = g.nodes.at(std::size_t(e.dst));
    rows.push_back({e.src, e.dst, e.color_distance, e.shared_pixels, e.perimeter_fraction_src,
                    e.perimeter_fraction_dst, a.size, b.size, a.color, b.color});
  }
  return rows;
}

void write_graph_csv(const ImageGraph& g, std::ostream& out) {
  out << kGraphCsvHeader << '\n';
  for (const GraphCsvRow& r : graph_rows(g)) {
    out << r.src << ',' << r.dst << ',' << fixed6(r.color_distance) << ',' << r.shared_pixels << ','
        << fixed6(r.perimeter_fraction_src) << ',' << fixed6(r.perimeter_fraction_dst) << ',' << r.src_size
        << ',' << r.dst_size;
    for (double v : r.src_color) out << ',' << fixed6(v);
    for (double v : r.dst_color) out << ',' << fixed6(v);
    out << '\n';
  }
}

void write_graph_csv(const ImageGraph& g, const fs::path& path) {
  auto out = open_out(path);
  write_graph_csv(g, out);
  finish(out, path);
}

std::vector<GraphCsvRow> read_graph_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kGraphCsvHeader) throw FormatError("graph CSV header mismatch");
  std::vector<GraphCsvRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (cells.size() != 14) {
      throw FormatError("graph CSV line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                        " fields, expected 14");
    }
    try {
      GraphCsvRow r;
      r.src = NodeId(std::stol(cells[0]));
      r.dst = NodeId(std::stol(cells[1]));
      r.color_distance = std::stod(cells[2]);
      r.shared_pixels = std::stoll(cells[3]);
      r.perimeter_fraction_src = std::stod(cells[4]);
      r.perimeter_fraction_dst = std::stod(cells[5]);
      r.src_size = std::stoll(cells[6]);
      r.dst_size = std::stoll(cells[7]);
      for (int c = 0; c < 3; ++c) {
        r.src_color[c] = std::stod(cells[8 + c]);
        r.dst_color[c] = std::stod(cells[11 + c]);
      }
      rows.push_back(r);
    } catch (const std::logic_error&) {
      throw FormatError("graph CSV line " + std::to_string(line_no) + " has a malformed number");
    }
  }
  return rows;
}

std::vector<GraphCsvRow> read_graph_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  return read_graph_csv(in);
}

double dot_pen_width(const Edge& e) {
  return kMaxPenWidth * std::max(e.perimeter_fraction_src, e.perimeter_fraction_dst);
}

void write_graph_dot(const ImageGraph& g, std::ostream& out) {
  out << "graph ige {\n";
  out << "  graph [resolution=\"" << fixed6(g.resolution) << "\"];\n";
  out << "  node [shape=circle, style=filled, fontsize=8];\n";
  for (const Node& n : g.nodes) {
    out << "  n" << n.id << " [fillcolor=\"" << hex_color(n.color) << "\", label=\"" << n.id << "\\n"
        << n.size << "\"];\n";
  }
  for (const Edge& e : g.edges) {
    out << "  n" << e.src << " -- n" << e.dst << " [penwidth=" << fixed6(dot_pen_width(e)) << "];\n";
  }
  out << "}\n";
}

void write_graph_dot(const ImageGraph& g, const fs::path& path) {
  auto out = open_out(path);
  write_graph_dot(g, out);
  finish(out, path);
}

void write_labels(const LabelMatrix& labels, std::ostream& out) {
  for (int y = 0; y < labels.height; ++y) {
    for (int x = 0; x < labels.width; ++x) {
      if (x) out << ' ';
      out << labels.at(y, x);
    }
    out << '\n';
  }
}

void write_labels(const LabelMatrix& labels, const fs::path& path) {
  auto out = open_out(path);
  write_labels(labels, out);
  finish(out, path);
}

}  // namespace ige
