#include "thetaforge/lattice_io.hpp"

#include "thetaforge/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace thetaforge {
namespace {

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < std::min(byte > 0 ? byte - 1 : 0, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace

Eigen::MatrixXd matrix_from_json(const nlohmann::json& rows, const char* what) {
  if (!rows.is_array()) throw Error(ErrorKind::ParseError, std::string(what) + " must be an array of rows");
  const auto r = static_cast<Eigen::Index>(rows.size());
  if (r == 0) return Eigen::MatrixXd(0, 0);
  const auto c = static_cast<Eigen::Index>(rows[0].size());
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c) {
      throw Error(ErrorKind::ParseError, std::string(what) + " rows must be arrays of equal length");
    }
    for (Eigen::Index j = 0; j < c; ++j) {
      const auto& v = row[static_cast<std::size_t>(j)];
      if (!v.is_number()) throw Error(ErrorKind::ParseError, std::string(what) + " entries must be numbers");
      m(i, j) = v.get<double>();
    }
  }
  return m;
}

IntMatrix int_matrix_from_json(const nlohmann::json& rows, const char* what, Eigen::Index cols_if_empty) {
  if (!rows.is_array()) throw Error(ErrorKind::ParseError, std::string(what) + " must be an array of rows");
  const auto r = static_cast<Eigen::Index>(rows.size());
  if (r == 0) return IntMatrix(0, cols_if_empty);
  const auto c = static_cast<Eigen::Index>(rows[0].size());
  IntMatrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c) {
      throw Error(ErrorKind::ParseError, std::string(what) + " rows must be arrays of equal length");
    }
    for (Eigen::Index j = 0; j < c; ++j) {
      const auto& v = row[static_cast<std::size_t>(j)];
      if (!v.is_number_integer()) throw Error(ErrorKind::ParseError, std::string(what) + " entries must be integers");
      m(i, j) = v.get<std::int64_t>();
    }
  }
  return m;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json matrix_to_json(const IntMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

EuclideanLattice lattice_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw Error(ErrorKind::ParseError, "lattice document must be a JSON object");
  const std::string label = doc.value("label", std::string{});
  if (doc.contains("gram")) {
    const Eigen::MatrixXd g = matrix_from_json(doc.at("gram"), "gram");
    if (doc.contains("rank") && doc.at("rank").get<Eigen::Index>() != g.rows()) {
      throw Error(ErrorKind::ParseError, "rank does not match the Gram dimension");
    }
    return EuclideanLattice::from_gram(g, label);
  }
  if (doc.contains("basis")) {
    return EuclideanLattice::from_basis(matrix_from_json(doc.at("basis"), "basis"), label);
  }
  if (doc.contains("rank") && doc.at("rank").get<int>() == 0) return EuclideanLattice();
  throw Error(ErrorKind::ParseError, "lattice document needs a \"gram\" or \"basis\" field");
}

nlohmann::json lattice_to_json(const EuclideanLattice& l) {
  nlohmann::json doc;
  doc["rank"] = l.rank();
  doc["gram"] = matrix_to_json(l.gram());
  if (!l.label().empty()) doc["label"] = l.label();
  return doc;
}

nlohmann::json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, column] = line_column(text, e.byte);
    throw Error(ErrorKind::ParseError,
                origin + ": line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + e.what());
  }
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_json_text(buffer.str(), path.string());
}

EuclideanLattice read_lattice_file(const std::filesystem::path& path) {
  return lattice_from_json(read_json_file(path));
}

std::string format_shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_csv(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace thetaforge
