#pragma once

#include "thetaforge/lattice.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace thetaforge {

// {"rank": n, "gram": [[...]], "label": "..."} or {"basis": [[...]]}, where
// basis rows are the ambient coordinates and columns the generators.
EuclideanLattice lattice_from_json(const nlohmann::json& doc);
nlohmann::json lattice_to_json(const EuclideanLattice& l);

// Parse errors are reported as ParseError with "line L, column C".
nlohmann::json read_json_file(const std::filesystem::path& path);
nlohmann::json parse_json_text(const std::string& text, const std::string& origin);
EuclideanLattice read_lattice_file(const std::filesystem::path& path);

Eigen::MatrixXd matrix_from_json(const nlohmann::json& rows, const char* what);
IntMatrix int_matrix_from_json(const nlohmann::json& rows, const char* what, Eigen::Index cols_if_empty = 0);
nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
nlohmann::json matrix_to_json(const IntMatrix& m);

// Shortest decimal representation that round-trips.
std::string format_shortest(double v);
// 17 significant digits, as used in CSV output.
std::string format_csv(double v);

}  // namespace thetaforge
