#include "gia/graph.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "gia/error.hpp"

namespace gia {

namespace {

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.emplace_back(line.substr(start));
            break;
        }
        out.emplace_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    return s;
}

double parse_double(const std::string& cell, const std::string& file, std::size_t line_no) {
    const std::string_view v = trim(cell);
    double d = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), d);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw ParseError(file + " line " + std::to_string(line_no) + ": non-numeric cell '" + cell + "'");
    }
    return d;
}

long parse_int(const std::string& cell, const std::string& file, std::size_t line_no) {
    const std::string_view v = trim(cell);
    long i = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), i);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw ParseError(file + " line " + std::to_string(line_no) + ": non-integer cell '" + cell + "'");
    }
    return i;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

}  // namespace

void Graph::validate() const {
    if (node_features.rows() != n_nodes) {
        throw ValidationError("graph: node_features has " + std::to_string(node_features.rows()) +
                              " rows for " + std::to_string(n_nodes) + " nodes");
    }
    if (positions.rows() != n_nodes || positions.cols() != 2) {
        throw ValidationError("graph: positions must be N x 2");
    }
    if (labels.size() != n_nodes) {
        throw ValidationError("graph: labels length " + std::to_string(labels.size()) + " != N");
    }
    if (edge_features.rows() != edges.size()) {
        throw ValidationError("graph: edge_features has " + std::to_string(edge_features.rows()) +
                              " rows for " + std::to_string(edges.size()) + " edges");
    }
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (edges[i].first >= n_nodes || edges[i].second >= n_nodes) {
            throw ValidationError("graph: edge " + std::to_string(i) + " endpoint outside [0, " +
                                  std::to_string(n_nodes) + ")");
        }
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= n_classes) {
            throw ValidationError("graph: node " + std::to_string(i) + " label " + std::to_string(labels[i]) +
                                  " outside [0, " + std::to_string(n_classes) + ")");
        }
    }
}

Graph load_graph(const std::filesystem::path& directory) {
    const auto nodes_path = directory / "nodes.csv";
    const auto edges_path = directory / "edges.csv";
    const std::string nodes_name = nodes_path.string();
    const std::string edges_name = edges_path.string();

    const auto node_lines = read_lines(nodes_path);
    if (node_lines.empty()) throw ParseError(nodes_name + ": empty file");
    const auto node_header = split_csv_line(trim(node_lines[0]));
    if (node_header.size() < 4 || node_header[0] != "node_id" || node_header[1] != "pos_x" ||
        node_header[2] != "pos_y" || node_header.back() != "label") {
        throw ParseError(nodes_name + " line 1: expected header node_id,pos_x,pos_y,<features...>,label");
    }
    const std::size_t d1 = node_header.size() - 4;
    const std::size_t n = node_lines.size() - 1;
    if (n == 0) throw ValidationError(nodes_name + ": no nodes");

    Graph g;
    g.n_nodes = n;
    g.node_features = Matrix(n, d1);
    g.positions = Matrix(n, 2);
    g.labels.assign(n, 0);
    std::vector<bool> seen(n, false);

    int max_label = 0;
    for (std::size_t r = 1; r < node_lines.size(); ++r) {
        const std::string_view raw = trim(node_lines[r]);
        if (raw.empty()) throw ParseError(nodes_name + " line " + std::to_string(r + 1) + ": empty row");
        const auto cells = split_csv_line(raw);
        if (cells.size() != node_header.size()) {
            throw ParseError(nodes_name + " line " + std::to_string(r + 1) + ": expected " +
                             std::to_string(node_header.size()) + " cells, got " + std::to_string(cells.size()));
        }
        const long id = parse_int(cells[0], nodes_name, r + 1);
        if (id < 0 || static_cast<std::size_t>(id) >= n) {
            throw ValidationError(nodes_name + " line " + std::to_string(r + 1) + ": node_id " +
                                  std::to_string(id) + " outside [0, " + std::to_string(n) + ")");
        }
        if (seen[id]) {
            throw ValidationError(nodes_name + " line " + std::to_string(r + 1) + ": duplicate node_id " +
                                  std::to_string(id));
        }
        seen[id] = true;
        const auto idx = static_cast<std::size_t>(id);
        g.positions(idx, 0) = parse_double(cells[1], nodes_name, r + 1);
        g.positions(idx, 1) = parse_double(cells[2], nodes_name, r + 1);
        for (std::size_t f = 0; f < d1; ++f) {
            g.node_features(idx, f) = parse_double(cells[3 + f], nodes_name, r + 1);
        }
        const long label = parse_int(cells.back(), nodes_name, r + 1);
        if (label < 0 || label > 7) {
            throw ValidationError(nodes_name + " line " + std::to_string(r + 1) + ": label " +
                                  std::to_string(label) + " outside [0, 8)");
        }
        g.labels[idx] = static_cast<int>(label);
        max_label = std::max(max_label, static_cast<int>(label));
    }
    g.n_classes = max_label <= 1 ? 2 : 8;

    const auto edge_lines = read_lines(edges_path);
    if (edge_lines.empty()) throw ParseError(edges_name + ": empty file");
    const auto edge_header = split_csv_line(trim(edge_lines[0]));
    if (edge_header.size() < 2 || edge_header[0] != "src" || edge_header[1] != "dst") {
        throw ParseError(edges_name + " line 1: expected header src,dst,<features...>");
    }
    const std::size_t d2 = edge_header.size() - 2;
    const std::size_t e = edge_lines.size() - 1;
    g.edge_features = Matrix(e, d2);
    g.edges.reserve(e);

    for (std::size_t r = 1; r < edge_lines.size(); ++r) {
        const std::string_view raw = trim(edge_lines[r]);
        if (raw.empty()) throw ParseError(edges_name + " line " + std::to_string(r + 1) + ": empty row");
        const auto cells = split_csv_line(raw);
        if (cells.size() != edge_header.size()) {
            throw ParseError(edges_name + " line " + std::to_string(r + 1) + ": expected " +
                             std::to_string(edge_header.size()) + " cells, got " + std::to_string(cells.size()));
        }
        const long src = parse_int(cells[0], edges_name, r + 1);
        const long dst = parse_int(cells[1], edges_name, r + 1);
        if (src < 0 || static_cast<std::size_t>(src) >= n || dst < 0 || static_cast<std::size_t>(dst) >= n) {
            throw ValidationError(edges_name + " line " + std::to_string(r + 1) + ": edge (" +
                                  std::to_string(src) + ", " + std::to_string(dst) + ") endpoint outside [0, " +
                                  std::to_string(n) + ")");
        }
        for (std::size_t f = 0; f < d2; ++f) {
            g.edge_features(r - 1, f) = parse_double(cells[2 + f], edges_name, r + 1);
        }
        g.edges.emplace_back(static_cast<std::uint32_t>(src), static_cast<std::uint32_t>(dst));
    }

    g.validate();
    return g;
}

void save_graph(const Graph& graph, const std::filesystem::path& directory) {
    graph.validate();
    std::error_code ec;
    std::filesystem::create_directories(directory, ec);

    const auto nodes_path = directory / "nodes.csv";
    std::ofstream nodes(nodes_path);
    if (!nodes) throw IoError("cannot write " + nodes_path.string());
    nodes << "node_id,pos_x,pos_y";
    for (std::size_t f = 0; f < graph.node_features.cols(); ++f) nodes << ",f_" << (f + 1);
    nodes << ",label\n";
    char buf[64];
    for (std::size_t i = 0; i < graph.n_nodes; ++i) {
        nodes << i;
        for (std::size_t j = 0; j < 2; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", graph.positions(i, j));
            nodes << ',' << buf;
        }
        for (std::size_t f = 0; f < graph.node_features.cols(); ++f) {
            std::snprintf(buf, sizeof buf, "%.17g", graph.node_features(i, f));
            nodes << ',' << buf;
        }
        nodes << ',' << graph.labels[i] << '\n';
    }
    if (!nodes.good()) throw IoError("write failed: " + nodes_path.string());
    nodes.close();

    const auto edges_path = directory / "edges.csv";
    std::ofstream edges(edges_path);
    if (!edges) throw IoError("cannot write " + edges_path.string());
    edges << "src,dst";
    for (std::size_t f = 0; f < graph.edge_features.cols(); ++f) edges << ",g_" << (f + 1);
    edges << '\n';
    for (std::size_t i = 0; i < graph.edges.size(); ++i) {
        edges << graph.edges[i].first << ',' << graph.edges[i].second;
        for (std::size_t f = 0; f < graph.edge_features.cols(); ++f) {
            std::snprintf(buf, sizeof buf, "%.17g", graph.edge_features(i, f));
            edges << ',' << buf;
        }
        edges << '\n';
    }
    if (!edges.good()) throw IoError("write failed: " + edges_path.string());
}

}  // namespace gia
